/**
 * Graph assembly.
 *
 * One rule becomes one directed acyclic event-transition graph:
 *
 *   trigger(s) -> condition(s, chained) -> action
 *
 * A single trigger yields a plain path. Several AND-ed triggers become
 * parallel roots joining at the first condition (or the action when the
 * rule has no conditions). Node ids are 1-based in emitted order; labels
 * follow the "<device>/<event>" convention with a synthetic device name
 * derived from the capability.
 */

import {
  ClauseRole,
  ExtractionError,
  GraphDoc,
  GraphNodeDoc,
  ResolvedNode,
} from "./types.js";

function label(capability: string, instance: number, event: string): string {
  return `${capability}_${instance}/${event}`;
}

/**
 * Build the graph document for one rule. `resolved` must hold exactly one
 * Action clause; triggers and conditions keep their clause order.
 */
export function buildGraph(graphId: string, resolved: readonly ResolvedNode[]): GraphDoc {
  const byRole = (role: ClauseRole) => resolved.filter((r) => r.role === role);
  const triggers = byRole("Trigger");
  const conditions = byRole("Condition");
  const actions = byRole("Action");
  if (actions.length !== 1) {
    throw new ExtractionError(
      `rule must carry exactly one action clause, got ${actions.length}`,
    );
  }

  const ordered = [...triggers, ...conditions, ...actions];
  const instances = new Map<string, number>();
  const nodes: GraphNodeDoc[] = ordered.map((r, i) => {
    const n = (instances.get(r.capability) ?? 0) + 1;
    instances.set(r.capability, n);
    const node: GraphNodeDoc = {
      id: i + 1,
      label: label(r.capability, n, r.event),
    };
    if (r.condition !== undefined) node.condition = r.condition;
    return node;
  });

  // ids: triggers 1..T, then the condition chain, action last
  const edges: [number, number][] = [];
  const chain: number[] = [];
  for (let i = triggers.length; i < ordered.length; i++) chain.push(i + 1);
  for (let t = 1; t <= triggers.length; t++) {
    edges.push([t, chain[0]!]);
  }
  for (let i = 0; i + 1 < chain.length; i++) {
    edges.push([chain[i]!, chain[i + 1]!]);
  }

  return { graph_id: graphId, source: "iot", nodes, edges };
}

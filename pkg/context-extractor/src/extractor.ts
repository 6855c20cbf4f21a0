/**
 * End-to-end extraction: description text in, graph documents out.
 *
 * Each sentence of a description is an independent rule. Per rule the
 * clauses are matched to capabilities in textual order under an
 * injectivity constraint: a capability taken by an earlier clause is
 * skipped and the next-ranked one is used, because each clause names a
 * distinct device slot in the app's install screen.
 */

import {
  AppDescription,
  Capability,
  CapabilityFile,
  ExtractionError,
  GraphDoc,
  ResolvedNode,
  VocabularyError,
} from "./types.js";
import { Embeddings } from "./embeddings.js";
import { sentences } from "./text.js";
import { splitClauses } from "./clauses.js";
import { extractPhrases } from "./phrases.js";
import { phraseWords, rankCapabilities } from "./matcher.js";
import { resolveEvent } from "./commands.js";
import { buildGraph } from "./graph.js";

export interface ExtractionResult {
  graphs: GraphDoc[];
  warnings: string[];
}

export function parseCapabilityFile(doc: unknown): Capability[] {
  const file = doc as CapabilityFile;
  if (!file || !Array.isArray(file.capabilities) || file.capabilities.length === 0) {
    throw new VocabularyError('capability file must carry a non-empty "capabilities" array');
  }
  for (const c of file.capabilities) {
    if (!c.capability || !c.attribute || !Array.isArray(c.values) || !Array.isArray(c.commands)) {
      throw new VocabularyError(`malformed capability entry: ${JSON.stringify(c)}`);
    }
  }
  return file.capabilities;
}

function candidatePool(app: AppDescription, caps: readonly Capability[]): Capability[] {
  if (app.ui_capabilities === undefined) return [...caps];
  const byName = new Map(caps.map((c) => [c.capability, c]));
  return app.ui_capabilities.map((name) => {
    const cap = byName.get(name);
    if (cap === undefined) {
      throw new VocabularyError(`unknown capability "${name}" in ui_capabilities of "${app.app_id}"`);
    }
    return cap;
  });
}

/** Extract every rule of one app description. */
export function extractApp(
  app: AppDescription,
  caps: readonly Capability[],
  emb: Embeddings,
): ExtractionResult {
  if (!app.app_id || /[\s/\\]/.test(app.app_id)) {
    throw new ExtractionError(`bad app_id: ${JSON.stringify(app.app_id ?? null)}`);
  }
  if (!app.description || app.description.trim().length === 0) {
    throw new ExtractionError(`"${app.app_id}": empty description`);
  }
  const pool = candidatePool(app, caps);
  const warnings: string[] = [];
  const oovSeen = new Set<string>();
  const rules = sentences(app.description);
  const graphs: GraphDoc[] = [];

  for (let r = 0; r < rules.length; r++) {
    const split = splitClauses(rules[r]!);
    warnings.push(...split.warnings.map((w) => `"${app.app_id}": ${w}`));

    const taken = new Set<string>();
    const resolved: ResolvedNode[] = [];
    for (const clause of split.clauses) {
      const extraction = extractPhrases(clause.text);
      const clauseWords = phraseWords(extraction);
      const candidates = pool.filter((c) =>
        clause.role === "Action" ? c.commands.length > 0 : c.values.length > 0,
      );
      if (candidates.length === 0) {
        throw new VocabularyError(
          `"${app.app_id}": no ${clause.role.toLowerCase()}-capable capability available`,
        );
      }
      const ranking = rankCapabilities(clauseWords, candidates, emb, warnings, oovSeen);
      if (ranking[0]!.best <= 0) {
        throw new VocabularyError(
          `"${app.app_id}": cannot ground "${clause.text}" in any capability`,
        );
      }
      let choice = ranking.find((m) => !taken.has(m.capability.capability));
      if (choice === undefined) {
        choice = ranking[0]!;
        warnings.push(
          `"${app.app_id}": capability pool exhausted for "${clause.text}"; reusing ${choice.capability.capability}`,
        );
      }
      taken.add(choice.capability.capability);
      const ev = resolveEvent(
        clause.text, extraction, clause.role, choice.capability, emb, warnings, oovSeen,
      );
      resolved.push({
        role: clause.role,
        capability: choice.capability.capability,
        event: ev.event,
        ...(ev.condition !== undefined ? { condition: ev.condition } : {}),
      });
    }

    const graphId = rules.length > 1 ? `${app.app_id}-${r + 1}` : app.app_id;
    graphs.push(buildGraph(graphId, resolved));
  }
  return { graphs, warnings };
}

/** Extract a batch of descriptions; app ids must be unique. */
export function extractApps(
  apps: readonly AppDescription[],
  caps: readonly Capability[],
  emb: Embeddings,
): ExtractionResult {
  const seen = new Set<string>();
  const graphs: GraphDoc[] = [];
  const warnings: string[] = [];
  for (const app of apps) {
    if (seen.has(app.app_id)) {
      throw new ExtractionError(`duplicate app_id "${app.app_id}"`);
    }
    seen.add(app.app_id);
    const res = extractApp(app, caps, emb);
    graphs.push(...res.graphs);
    warnings.push(...res.warnings);
  }
  return { graphs, warnings };
}

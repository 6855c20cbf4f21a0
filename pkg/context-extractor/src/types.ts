/**
 * Shared domain types.
 *
 * The output side mirrors the graph JSON schema of the wireless-context
 * engine: a graph document is {graph_id, source, nodes, edges} where nodes
 * carry integer ids, "device/event" labels and optional numeric-condition
 * payloads. Everything else here is internal to the extraction pipeline.
 */

export interface AppDescription {
  app_id: string;
  description: string;
  /** capability names the app requested at install time; when present,
      matching is constrained to this set */
  ui_capabilities?: string[];
}

export type ClauseRole = "Trigger" | "Condition" | "Action";

export interface Clause {
  text: string;
  role: ClauseRole;
}

export interface ClauseSplit {
  /** clauses in textual order */
  clauses: Clause[];
  /** the subordinating word that signaled causality ("when", "if", ...) */
  conjunction: string;
  warnings: string[];
}

export interface PhraseRelation {
  relation: string; // "dobj" | "nsubj" | "nsubjpass" | "cop" | "acomp"
  head: string;
  dependent: string;
}

export interface PhraseExtraction {
  nounPhrases: string[];
  verbPhrases: string[];
  relations: PhraseRelation[];
}

export interface Capability {
  capability: string;
  attribute: string;
  values: string[];
  commands: string[];
}

export interface CapabilityFile {
  capabilities: Capability[];
}

/** One clause resolved to a concrete event on a capability instance. */
export interface ResolvedNode {
  role: ClauseRole;
  capability: string;
  /** event string in vocabulary form: "contact.open", "switch.on()" */
  event: string;
  condition?: ConditionPayload;
}

export interface ConditionPayload {
  attribute: string;
  op: "<" | ">";
  /** taken from the clause when it states a number; otherwise 0 stands in
      for the value the user picks at install time */
  threshold: number;
}

export interface GraphNodeDoc {
  id: number;
  label: string;
  condition?: ConditionPayload;
}

export interface GraphDoc {
  graph_id: string;
  source: "iot";
  nodes: GraphNodeDoc[];
  edges: [number, number][];
}

export class ExtractionError extends Error {
  constructor(message: string, public readonly sentence?: string) {
    super(sentence ? `${message}: ${JSON.stringify(sentence)}` : message);
    this.name = "ExtractionError";
  }
}

export class VocabularyError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "VocabularyError";
  }
}

/** Public surface of the extractor library. */

export * from "./types.js";
export { Embeddings, cosine } from "./embeddings.js";
export { words, sentences, splitCamelCase, eventWords } from "./text.js";
export { splitClauses } from "./clauses.js";
export { extractPhrases } from "./phrases.js";
export {
  contentWords,
  phraseWords,
  rankCapabilities,
  matchCapability,
  scoreWords,
} from "./matcher.js";
export {
  comparator,
  isNumericCapability,
  resolveEvent,
  thresholdIn,
} from "./commands.js";
export { buildGraph } from "./graph.js";
export { extractApp, extractApps, parseCapabilityFile } from "./extractor.js";
export { parseDescriptions } from "./cli.js";

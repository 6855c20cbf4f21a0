/**
 * Event inference: once a clause owns a capability, decide which command
 * (action clauses) or attribute value (trigger/condition clauses) it names.
 *
 * Candidates come from the capability's declared commands or values and are
 * scored against the clause's verb phrase by the same cosine machinery the
 * capability matcher uses. Numeric attributes (declared value list
 * ["value"]) have no state names; those clauses become a report event plus
 * a comparison whose direction is read from comparative cues in the clause.
 */

import {
  Capability,
  ConditionPayload,
  PhraseExtraction,
  ClauseRole,
  VocabularyError,
} from "./types.js";
import { Embeddings } from "./embeddings.js";
import { splitCamelCase } from "./text.js";
import { contentWords, scoreWords } from "./matcher.js";

/** Cues that read as "below the threshold". */
const LT_CUES = new Set([
  "dark", "darker", "dim", "dimmer", "low", "lower", "below", "under",
  "less", "fewer", "drops", "drop", "dropping", "falls", "fall", "falling",
  "cold", "colder", "cool", "cooler", "freezing", "empty", "dry",
]);

/** Cues that read as "above the threshold". */
const GT_CUES = new Set([
  "bright", "brighter", "high", "higher", "above", "over", "exceeds",
  "exceed", "greater", "more", "hot", "warm", "warmer", "rises", "rise",
  "rising", "climbs", "full", "humid", "muggy", "damp", "wet",
]);

export function isNumericCapability(cap: Capability): boolean {
  return cap.values.length === 1 && cap.values[0] === "value";
}

/** First comparative cue in clause order decides the direction. */
export function comparator(clauseWords: readonly string[]): "<" | ">" | undefined {
  for (const w of clauseWords) {
    if (LT_CUES.has(w)) return "<";
    if (GT_CUES.has(w)) return ">";
  }
  return undefined;
}

/** First numeric literal in the clause; app descriptions rarely carry one,
    so 0 stands in for the install-time choice. */
export function thresholdIn(clauseText: string): number {
  const m = clauseText.match(/\d+(\.\d+)?/);
  return m ? Number(m[0]) : 0;
}

function candidateWords(name: string): string[] {
  return splitCamelCase(name.replace(/\(\)$/, ""));
}

/** Verb-phrase content words; a clause with no verb falls back to all of
    its content words so bare states like "away" still resolve. */
function cueWords(clauseText: string, extraction: PhraseExtraction): string[] {
  const verbal = extraction.verbPhrases.flatMap(contentWords);
  return verbal.length > 0 ? verbal : contentWords(clauseText);
}

function pickBest(
  cues: string[],
  options: readonly string[],
  emb: Embeddings,
  warnings: string[],
  oovSeen: Set<string>,
): string {
  let bestOpt = options[0]!;
  let bestScore = -Infinity;
  for (const opt of options) {
    const { best } = scoreWords(cues, candidateWords(opt), emb, warnings, oovSeen);
    if (best > bestScore) {
      bestScore = best;
      bestOpt = opt;
    }
  }
  return bestOpt;
}

export interface ResolvedEvent {
  /** "<attribute>.<value>" or "<attribute>.<command>()" */
  event: string;
  condition?: ConditionPayload;
}

/**
 * Resolve the event a clause names on its assigned capability.
 *
 * Action clauses pick the most similar command (VocabularyError when the
 * capability offers none). Trigger and condition clauses on a discrete
 * attribute pick the most similar value; on a numeric attribute they
 * become "<attribute>.value" with a comparison payload.
 */
export function resolveEvent(
  clauseText: string,
  extraction: PhraseExtraction,
  role: ClauseRole,
  cap: Capability,
  emb: Embeddings,
  warnings: string[],
  oovSeen: Set<string>,
): ResolvedEvent {
  const cues = cueWords(clauseText, extraction);

  if (role === "Action") {
    if (cap.commands.length === 0) {
      throw new VocabularyError(
        `capability "${cap.capability}" offers no commands for an action clause`,
      );
    }
    const cmd = pickBest(cues, cap.commands, emb, warnings, oovSeen);
    return { event: `${cap.attribute}.${cmd}` };
  }

  if (isNumericCapability(cap)) {
    let op = comparator(contentWords(clauseText));
    if (op === undefined) {
      op = ">";
      warnings.push(
        `no comparative cue in "${clauseText}"; assuming ${cap.attribute} > threshold`,
      );
    }
    return {
      event: `${cap.attribute}.value`,
      condition: { attribute: cap.attribute, op, threshold: thresholdIn(clauseText) },
    };
  }

  const value = pickBest(cues, cap.values, emb, warnings, oovSeen);
  return { event: `${cap.attribute}.${value}` };
}

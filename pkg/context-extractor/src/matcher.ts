/**
 * Capability matching.
 *
 * A clause is scored against a capability by splitting both into words
 * (capability names split at camelCase joints) and taking cosine
 * similarities over all cross pairs. Candidates are ranked by the best
 * pair; ties fall back to the mean over all pairs, which rewards clauses
 * whose words spread across the capability name, then to the capability
 * name so the ranking is total.
 *
 * Words missing from the embedding vocabulary degrade to exact-substring
 * matching (scored just under an exact synonym) and are reported once each
 * through the warning channel.
 */

import { Capability, PhraseExtraction } from "./types.js";
import { Embeddings } from "./embeddings.js";
import { splitCamelCase, words } from "./text.js";

/** Function words that carry no device meaning. "on"/"off" stay: they name
    switch states. "not" stays: it flips presence polarity. */
const STOPWORDS = new Set([
  "a", "an", "the", "your", "my", "our", "his", "her", "its", "their",
  "this", "that", "these", "those", "it", "they", "them", "he", "she",
  "i", "we", "you", "me", "us", "there", "here",
  "is", "am", "are", "was", "were", "be", "been", "being",
  "gets", "becomes", "get", "become",
  "do", "does", "did", "done", "has", "have", "had", "having",
  "will", "would", "shall", "should", "can", "could", "may", "might",
  "must", "and", "or", "but", "nor", "so", "then", "as",
  "if", "when", "whenever", "while", "once", "after", "before", "until",
  "to", "of", "at", "by", "for", "with", "from", "into", "onto", "near",
  "during", "any", "every", "each", "all", "some", "one",
  "please", "also", "just", "too", "very",
]);

const SUBSTRING_SCORE = 0.99;

export interface MatchScore {
  capability: Capability;
  /** best cosine over all word pairs */
  best: number;
  /** mean over all word pairs; the tie-breaker */
  mean: number;
}

export function contentWords(text: string): string[] {
  return words(text).filter((w) => !STOPWORDS.has(w));
}

/** All content words of the extracted phrases, clause order preserved. */
export function phraseWords(extraction: PhraseExtraction): string[] {
  const out: string[] = [];
  const seen = new Set<string>();
  for (const p of [...extraction.nounPhrases, ...extraction.verbPhrases]) {
    for (const w of contentWords(p)) {
      if (!seen.has(w)) {
        seen.add(w);
        out.push(w);
      }
    }
  }
  return out;
}

/** Similarity for one word pair; out-of-vocabulary words fall back to
    exact-substring matching and are recorded in `warnings` once. */
export function pairScore(
  a: string,
  b: string,
  emb: Embeddings,
  warnings: string[],
  oovSeen: Set<string>,
): number {
  const sim = emb.similarity(a, b);
  if (sim !== undefined) return sim;
  for (const w of [a, b]) {
    if (!emb.has(w) && !oovSeen.has(w)) {
      oovSeen.add(w);
      warnings.push(
        `"${w}" is not in the embedding vocabulary; using substring matching`,
      );
    }
  }
  const [short, long] = a.length <= b.length ? [a, b] : [b, a];
  return short.length >= 3 && long.includes(short) ? SUBSTRING_SCORE : 0;
}

export function scoreWords(
  clauseWords: string[],
  candidateWords: string[],
  emb: Embeddings,
  warnings: string[],
  oovSeen: Set<string>,
): { best: number; mean: number } {
  let best = 0;
  let sum = 0;
  let n = 0;
  for (const a of clauseWords) {
    for (const b of candidateWords) {
      const s = pairScore(a, b, emb, warnings, oovSeen);
      if (s > best) best = s;
      sum += s;
      n += 1;
    }
  }
  return { best, mean: n > 0 ? sum / n : 0 };
}

export function capabilityWords(cap: Capability): string[] {
  return splitCamelCase(cap.capability);
}

/**
 * Rank candidate capabilities for a clause, most similar first. The
 * ordering is total and deterministic: (best desc, mean desc, name asc).
 */
export function rankCapabilities(
  clauseWords: string[],
  candidates: readonly Capability[],
  emb: Embeddings,
  warnings: string[],
  oovSeen: Set<string>,
): MatchScore[] {
  const scored: MatchScore[] = candidates.map((capability) => ({
    capability,
    ...scoreWords(clauseWords, capabilityWords(capability), emb, warnings, oovSeen),
  }));
  scored.sort((x, y) => {
    if (x.best !== y.best) return y.best - x.best;
    if (x.mean !== y.mean) return y.mean - x.mean;
    return x.capability.capability < y.capability.capability ? -1 : 1;
  });
  return scored;
}

/** The single most similar capability; the extractor walks the full ranking
    when it needs the second-best one to keep assignments injective. */
export function matchCapability(
  extraction: PhraseExtraction,
  candidates: readonly Capability[],
  emb: Embeddings,
  warnings: string[] = [],
): MatchScore | undefined {
  const ranked = rankCapabilities(
    phraseWords(extraction),
    candidates,
    emb,
    warnings,
    new Set(),
  );
  return ranked[0];
}

/**
 * Phrase extraction.
 *
 * Clauses in app descriptions fall into three shapes, and a pattern grammar
 * over a verb lexicon covers all of them:
 *
 *   imperative    "Turn on your lights"      -> VP "Turn on", NP "your lights"
 *   copular       "the space is dark"        -> NP "the space", VP "is dark"
 *   subject-verb  "a open/close sensor opens"-> NP "a open/close sensor",
 *                                               VP "opens"
 *
 * Relations name the head dependencies the matcher cares about: dobj for
 * imperative objects, nsubj/nsubjpass for subjects, cop for copulas.
 */

import {
  ExtractionError,
  PhraseExtraction,
  PhraseRelation,
} from "./types.js";
import { COPULAS, EVENTIVE_PARTICIPLES } from "./clauses.js";

const DETERMINERS = new Set([
  "a", "an", "the", "your", "my", "our", "his", "her", "its", "their",
  "this", "that", "these", "those", "any", "every", "each", "all", "some",
  "one", "no",
]);

/** Verb particles that belong to the verb phrase ("turn on", "shut off"). */
const PARTICLES = new Set(["on", "off", "up", "down", "out"]);

/** Prepositions end the direct-object span of an imperative. */
const PREPOSITIONS = new Set([
  "to", "at", "by", "of", "for", "with", "from", "in", "into", "onto",
  "near", "during", "above", "below", "over", "under", "than",
]);

/** Base and finite verb forms seen in trigger-action descriptions. */
const VERBS = new Set([
  "turn", "turns", "turned", "switch", "switches", "toggle",
  "open", "opens", "opened", "close", "closes", "closed", "shut", "shuts",
  "lock", "locks", "locked", "unlock", "unlocks", "unlocked",
  "set", "sets", "send", "sends", "sound", "sounds",
  "start", "starts", "stop", "stops",
  "dim", "dims", "brighten", "brightens",
  "activate", "activates", "deactivate", "deactivates",
  "arrive", "arrives", "leave", "leaves", "return", "returns",
  "move", "moves", "shake", "shakes", "vibrate", "vibrates",
  "rattle", "rattles", "knock", "knocks",
  "flood", "floods", "leak", "leaks",
  "drop", "drops", "fall", "falls", "rise", "rises", "climb", "climbs",
  "exceed", "exceeds", "reach", "reaches",
  "take", "takes", "record", "records", "capture", "captures",
  "detect", "detects", "sense", "senses",
  "ring", "rings", "chime", "chimes", "beep", "beeps",
]);

function tokenize(clause: string): string[] {
  return clause
    .split(/\s+/)
    .map((t) => t.replace(/^["'(,;:]+|["'),;:.!?]+$/g, ""))
    .filter((t) => t.length > 0);
}

function isVerb(tok: string): boolean {
  return VERBS.has(tok.toLowerCase());
}

/** Last token of a noun span that is not a determiner; the phrase head. */
function headNoun(span: string[]): string | undefined {
  for (let i = span.length - 1; i >= 0; i--) {
    if (!DETERMINERS.has(span[i]!.toLowerCase())) return span[i];
  }
  return undefined;
}

function phrase(span: string[]): string {
  return span.join(" ");
}

/**
 * Extract noun phrases, verb phrases, and head relations from one clause.
 * Clauses with no recognizable verb come back as a single noun phrase;
 * capability matching still works off the nouns alone.
 */
export function extractPhrases(clause: string): PhraseExtraction {
  const toks = tokenize(clause);
  if (toks.length === 0) {
    throw new ExtractionError("empty clause", clause);
  }

  const nounPhrases: string[] = [];
  const verbPhrases: string[] = [];
  const relations: PhraseRelation[] = [];

  // imperative: clause-initial verb, optional particle, then the object
  if (isVerb(toks[0]!) && !COPULAS.has(toks[0]!.toLowerCase())) {
    const vp: string[] = [toks[0]!];
    let i = 1;
    while (i < toks.length && PARTICLES.has(toks[i]!.toLowerCase())) {
      vp.push(toks[i]!);
      i += 1;
    }
    const obj: string[] = [];
    while (i < toks.length && !PREPOSITIONS.has(toks[i]!.toLowerCase())) {
      obj.push(toks[i]!);
      i += 1;
    }
    // shifted particle: "turn the light off"
    if (obj.length >= 2 && PARTICLES.has(obj[obj.length - 1]!.toLowerCase())) {
      vp.push(obj.pop()!);
    }
    verbPhrases.push(phrase(vp));
    if (obj.length > 0) {
      nounPhrases.push(phrase(obj));
      const head = headNoun(obj);
      if (head !== undefined) {
        relations.push({ relation: "dobj", head: toks[0]!, dependent: head });
      }
    }
    if (i < toks.length - 1) {
      nounPhrases.push(phrase(toks.slice(i + 1)));
    }
    return { nounPhrases, verbPhrases, relations };
  }

  // copular: "<subject> is <predicate>"
  for (let i = 1; i < toks.length - 1; i++) {
    if (COPULAS.has(toks[i]!.toLowerCase())) {
      const subj = toks.slice(0, i);
      const pred = toks.slice(i + 1);
      nounPhrases.push(phrase(subj));
      verbPhrases.push(phrase(toks.slice(i)));
      const subjHead = headNoun(subj);
      const predHead = headNoun(pred);
      if (subjHead !== undefined && predHead !== undefined) {
        const low = predHead.toLowerCase();
        const passive = EVENTIVE_PARTICIPLES.has(low) || low.endsWith("ed");
        relations.push({
          relation: passive ? "nsubjpass" : "nsubj",
          head: predHead,
          dependent: subjHead,
        });
        if (!passive) {
          relations.push({ relation: "cop", head: predHead, dependent: toks[i]! });
        }
      }
      return { nounPhrases, verbPhrases, relations };
    }
  }

  // subject-verb: first verb token splits subject from predicate
  for (let i = 1; i < toks.length; i++) {
    if (isVerb(toks[i]!)) {
      const subj = toks.slice(0, i);
      nounPhrases.push(phrase(subj));
      verbPhrases.push(phrase(toks.slice(i)));
      const subjHead = headNoun(subj);
      if (subjHead !== undefined) {
        relations.push({
          relation: "nsubj",
          head: toks[i]!,
          dependent: subjHead,
        });
      }
      return { nounPhrases, verbPhrases, relations };
    }
  }

  // no verb found: a bare state like "away" or "door closed" without a
  // recognized verb form; nouns carry the match
  nounPhrases.push(phrase(toks));
  return { nounPhrases, verbPhrases, relations };
}

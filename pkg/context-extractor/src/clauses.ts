/**
 * Clause splitting.
 *
 * App descriptions follow a narrow grammar: a main clause naming the action
 * and a subordinate clause naming what triggers it, linked by a causal
 * conjunction. A full constituency parse is overkill for that shape; the
 * splitter locates the conjunction, cuts at it, and labels the pieces.
 *
 *   "Turn on your lights when a open/close sensor opens and the space
 *    is dark"
 *     -> Action "Turn on your lights"
 *        Trigger "a open/close sensor opens"
 *        Condition "the space is dark"
 *
 * Subordinate conjuncts joined by "and" are split apart. The first one is
 * always a Trigger; later ones are Conditions when they are copular state
 * descriptions ("is dark", "is above 80") and Triggers otherwise.
 */

import { Clause, ClauseSplit, ExtractionError } from "./types.js";
import { words } from "./text.js";

const SUBORDINATORS = [
  "as soon as",
  "in case",
  "whenever",
  "when",
  "while",
  "once",
  "after",
  "if",
];

/** Participles that read as events even behind a copula ("is detected"). */
export const EVENTIVE_PARTICIPLES = new Set([
  "detected",
  "opened",
  "closed",
  "pressed",
  "triggered",
  "activated",
  "unlocked",
  "locked",
  "turned",
]);

export const COPULAS = new Set([
  "is",
  "am",
  "are",
  "was",
  "were",
  "gets",
  "becomes",
]);

function stripThen(text: string): string {
  return text.replace(/^then\s+/i, "").trim();
}

/** Conditions look like "<subject> is <state>"; the state must not be an
    eventive participle, otherwise the conjunct stays a trigger. */
function looksStative(clause: string): boolean {
  const ws = words(clause);
  for (let i = 0; i < ws.length - 1; i++) {
    if (COPULAS.has(ws[i]!)) {
      const pred = ws[i + 1]!;
      return !EVENTIVE_PARTICIPLES.has(pred);
    }
  }
  return false;
}

function splitConjuncts(sub: string): string[] {
  return sub
    .split(/\s*,?\s+and\s+|\s*,\s+/i)
    .map((c) => c.trim())
    .filter((c) => c.length > 0);
}

function labelSubordinate(conjuncts: string[]): Clause[] {
  return conjuncts.map((text, i) => ({
    text,
    role: i > 0 && looksStative(text) ? "Condition" : "Trigger",
  }));
}

/**
 * Split one sentence into labeled clauses.
 *
 * Throws ExtractionError when the sentence has no usable clause structure;
 * a bare imperative with no subordinate clause is accepted with a warning.
 */
export function splitClauses(sentence: string): ClauseSplit {
  const text = sentence.trim().replace(/[.!?]+$/, "");
  if (words(text).length === 0) {
    throw new ExtractionError("no clause structure found", sentence);
  }

  // leading subordinate: "If X, (then) Y" (cut at the last comma so that
  // comma-separated AND-lists stay inside the subordinate clause)
  for (const conj of SUBORDINATORS) {
    const m = text.match(
      new RegExp(`^${conj}\\s+(.+),\\s*(.+?)$`, "is"),
    );
    if (m) {
      const clauses = labelSubordinate(splitConjuncts(m[1]!));
      clauses.push({ text: stripThen(m[2]!), role: "Action" });
      return { clauses, conjunction: conj, warnings: [] };
    }
  }

  // trailing subordinate: "Y when X"
  for (const conj of SUBORDINATORS) {
    const m = text.match(
      new RegExp(`^(.+?),?\\s+${conj}\\s+(.+)$`, "is"),
    );
    if (m) {
      const clauses: Clause[] = [{ text: m[1]!.trim(), role: "Action" }];
      clauses.push(...labelSubordinate(splitConjuncts(m[2]!)));
      return { clauses, conjunction: conj, warnings: [] };
    }
  }

  // a leading subordinator with no comma leaves the main clause unfindable
  const lead = SUBORDINATORS.find((c) =>
    new RegExp(`^${c}\\b`, "i").test(text),
  );
  if (lead) {
    throw new ExtractionError(
      `cannot locate the main clause after "${lead}"`,
      sentence,
    );
  }

  // single imperative, no subordinate
  return {
    clauses: [{ text, role: "Action" }],
    conjunction: "",
    warnings: ["no subordinate clause; treated as a single action"],
  };
}

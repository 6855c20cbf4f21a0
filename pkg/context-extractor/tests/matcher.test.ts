import { describe, expect, test } from "vitest";

import {
  contentWords,
  matchCapability,
  pairScore,
  phraseWords,
  rankCapabilities,
} from "../src/matcher.js";
import { extractPhrases } from "../src/phrases.js";
import { capability, loadCapabilities, loadEmbeddings } from "./helpers.js";

const emb = loadEmbeddings();
const caps = loadCapabilities();
const sensors = caps.filter((c) => c.values.length > 0);
const actuators = caps.filter((c) => c.commands.length > 0);

function top(clause: string, candidates = caps): string {
  const m = matchCapability(extractPhrases(clause), candidates, emb);
  return m!.capability.capability;
}

describe("content words", () => {
  test("function words are dropped, state words kept", () => {
    expect(contentWords("the space is dark")).toEqual(["space", "dark"]);
    expect(contentWords("Turn on your lights")).toEqual(["turn", "on", "lights"]);
  });

  test("phrase words merge noun and verb phrases without duplicates", () => {
    const ws = phraseWords(extractPhrases("a open/close sensor opens"));
    expect(ws).toEqual(["open", "close", "sensor", "opens"]);
  });
});

describe("ranking", () => {
  test("verbs carry the match for actuation clauses", () => {
    expect(top("Turn on your lights", actuators)).toBe("switch");
  });

  test("subject nouns carry the match for sensor clauses", () => {
    expect(top("a open/close sensor opens", sensors)).toBe("contactSensor");
    expect(top("the space is dark", sensors)).toBe("illuminanceMeasurement");
    expect(top("smoke is detected", sensors)).toBe("smokeDetector");
  });

  test("exact best-pair tie falls back to the pair mean", () => {
    // "lock the door" pairs 1.0 with both lock and doorControl; the mean
    // over all pairs favors the single-word capability the verb names
    expect(top("lock the door", actuators)).toBe("lock");
  });

  test("object word beats verb word when it is the better pair", () => {
    expect(top("open the window", actuators)).toBe("windowShade");
    expect(top("open the garage door", actuators)).toBe("doorControl");
  });

  test("ranking is total and deterministic", () => {
    const ws = phraseWords(extractPhrases("the space is dark"));
    const a = rankCapabilities(ws, sensors, emb, [], new Set());
    const b = rankCapabilities(ws, sensors, emb, [], new Set());
    expect(a.map((m) => m.capability.capability)).toEqual(
      b.map((m) => m.capability.capability),
    );
    expect(a[0]!.best).toBeGreaterThan(a[1]!.best - 1e-12);
  });
});

describe("out-of-vocabulary fallback", () => {
  test("substring match scores just under an exact synonym", () => {
    const warnings: string[] = [];
    const s = pairScore("smokealarm", "alarm", emb, warnings, new Set());
    expect(s).toBeCloseTo(0.99);
    expect(warnings).toHaveLength(1);
    expect(warnings[0]).toContain("smokealarm");
  });

  test("short fragments do not substring-match", () => {
    const warnings: string[] = [];
    expect(pairScore("zz", "buzzer", emb, warnings, new Set())).toBe(0);
  });

  test("each unknown word warns once", () => {
    const warnings: string[] = [];
    const seen = new Set<string>();
    pairScore("frobnicator", "switch", emb, warnings, seen);
    pairScore("frobnicator", "lock", emb, warnings, seen);
    expect(warnings).toHaveLength(1);
  });

  test("unknown words still rank via substring evidence", () => {
    expect(top("the smokedetector fires", sensors)).toBe("smokeDetector");
  });
});

/** Tokenization helpers shared by the clause splitter and phrase extractor. */

/** Lowercase word tokens; drops punctuation, keeps intra-word slashes split
    apart ("open/close" contributes both words). */
export function words(text: string): string[] {
  return (text.toLowerCase().match(/[a-z][a-z']*/g) ?? []).map((w) =>
    w.replace(/'/g, ""),
  );
}

/** Sentence boundaries at ./!/? followed by whitespace. Abbreviations are
    not a concern in install-time app descriptions. */
export function sentences(text: string): string[] {
  return text
    .split(/(?<=[.!?])\s+/)
    .map((s) => s.trim().replace(/[.!?]+$/, "").trim())
    .filter((s) => s.length > 0);
}

/** "relativeHumidityMeasurement" -> ["relative", "humidity", "measurement"] */
export function splitCamelCase(name: string): string[] {
  return name
    .replace(/([a-z0-9])([A-Z])/g, "$1 $2")
    .toLowerCase()
    .split(/[\s_]+/)
    .filter((w) => w.length > 0);
}

/** Event strings are "<attr>.<value>" or "<attr>.<command>()"; the word
    content is what similarity scoring runs on. */
export function eventWords(eventStr: string): string[] {
  const tail = eventStr.slice(eventStr.indexOf(".") + 1).replace(/\(\)$/, "");
  return splitCamelCase(tail);
}

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { Embeddings } from "../src/embeddings.js";
import { Capability } from "../src/types.js";
import { parseCapabilityFile } from "../src/extractor.js";

export function fixturePath(name: string): string {
  return fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
}

export function loadCapabilities(): Capability[] {
  return parseCapabilityFile(
    JSON.parse(readFileSync(fixturePath("capabilities.json"), "utf-8")),
  );
}

export function capability(name: string): Capability {
  const cap = loadCapabilities().find((c) => c.capability === name);
  if (cap === undefined) throw new Error(`no fixture capability ${name}`);
  return cap;
}

let cached: Embeddings | undefined;

export function loadEmbeddings(): Embeddings {
  if (cached === undefined) {
    cached = Embeddings.load(
      fileURLToPath(new URL("../data/embeddings.txt", import.meta.url)),
    );
  }
  return cached;
}

#!/usr/bin/env node
/**
 * context-extractor --descriptions apps.jsonl --capabilities caps.json
 *                   --out-dir DIR [--embeddings vectors.txt]
 *
 * Reads app descriptions (JSONL, one {"app_id", "description",
 * "ui_capabilities"?} object per line, or a single JSON array), extracts
 * one event-transition graph per rule, and writes each graph as
 * "<graph_id>.json" into the output directory. Warnings go to stderr;
 * any extraction failure aborts the run with exit code 1.
 */

import { mkdirSync, readFileSync, realpathSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import process from "node:process";

import { AppDescription, GraphDoc } from "./types.js";
import { Embeddings } from "./embeddings.js";
import { extractApps, parseCapabilityFile } from "./extractor.js";

const USAGE = `usage: context-extractor --descriptions FILE --capabilities FILE --out-dir DIR
                         [--embeddings FILE]

  --descriptions FILE   app descriptions: JSONL of {"app_id","description"[,"ui_capabilities"]}
                        or one JSON array of such objects
  --capabilities FILE   capability vocabulary: {"capabilities":[...]}
  --out-dir DIR         directory for the emitted <graph_id>.json files
  --embeddings FILE     word vector table (token + components per line);
                        defaults to the bundled table
`;

interface Args {
  descriptions: string;
  capabilities: string;
  outDir: string;
  embeddings?: string;
}

function parseArgs(argv: string[]): Args {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i]!;
    if (a === "--help" || a === "-h") {
      process.stdout.write(USAGE);
      process.exit(0);
    }
    if (!a.startsWith("--")) throw new Error(`unexpected argument "${a}"`);
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`missing value for ${a}`);
    flags.set(a.slice(2), value);
    i += 1;
  }
  const need = (k: string): string => {
    const v = flags.get(k);
    if (v === undefined) throw new Error(`missing required --${k}`);
    return v;
  };
  return {
    descriptions: need("descriptions"),
    capabilities: need("capabilities"),
    outDir: need("out-dir"),
    embeddings: flags.get("embeddings"),
  };
}

export function parseDescriptions(text: string, origin: string): AppDescription[] {
  const trimmed = text.trim();
  if (trimmed.length === 0) throw new Error(`${origin}: no descriptions`);
  if (trimmed.startsWith("[")) {
    const arr = JSON.parse(trimmed);
    if (!Array.isArray(arr)) throw new Error(`${origin}: expected a JSON array`);
    return arr as AppDescription[];
  }
  const apps: AppDescription[] = [];
  const lines = trimmed.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!.trim();
    if (line.length === 0) continue;
    try {
      apps.push(JSON.parse(line) as AppDescription);
    } catch (exc) {
      throw new Error(`${origin}:${i + 1}: bad JSON: ${(exc as Error).message}`);
    }
  }
  return apps;
}

function bundledEmbeddings(): string {
  return fileURLToPath(new URL("../data/embeddings.txt", import.meta.url));
}

function writeGraph(outDir: string, doc: GraphDoc): string {
  const path = join(outDir, `${doc.graph_id}.json`);
  writeFileSync(path, JSON.stringify(doc) + "\n", "utf-8");
  return path;
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  const apps = parseDescriptions(readFileSync(args.descriptions, "utf-8"), args.descriptions);
  const caps = parseCapabilityFile(JSON.parse(readFileSync(args.capabilities, "utf-8")));
  const emb = Embeddings.load(args.embeddings ?? bundledEmbeddings());

  const { graphs, warnings } = extractApps(apps, caps, emb);
  for (const w of warnings) process.stderr.write(`warning: ${w}\n`);

  mkdirSync(args.outDir, { recursive: true });
  for (const g of graphs) writeGraph(args.outDir, g);
  process.stdout.write(`${graphs.length} graph(s) from ${apps.length} description(s) -> ${args.outDir}\n`);
  return 0;
}

function invokedDirectly(): boolean {
  // argv[1] may be a bin symlink; compare real paths
  if (process.argv[1] === undefined) return false;
  try {
    return realpathSync(process.argv[1]) === fileURLToPath(import.meta.url);
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (exc) {
    process.stderr.write(`error: ${(exc as Error).message}\n`);
    process.exit(1);
  }
}

/**
 * Word vector store.
 *
 * The on-disk format is deliberately plain: one token per line followed by
 * its components, whitespace separated. Every line must carry the same
 * number of components. The bundled table is a small hand-tuned space
 * organized around device-domain clusters (switching, illumination,
 * presence, ...) with polarity sub-axes so that antonym pairs such as
 * open/close or home/away land on opposite sides of their cluster.
 */

import { readFileSync } from "node:fs";
import { VocabularyError } from "./types.js";

export class Embeddings {
  private readonly table: Map<string, Float64Array>;
  readonly dim: number;

  private constructor(table: Map<string, Float64Array>, dim: number) {
    this.table = table;
    this.dim = dim;
  }

  static parse(text: string, origin = "<string>"): Embeddings {
    const table = new Map<string, Float64Array>();
    let dim = -1;
    const lines = text.split(/\r?\n/);
    for (let i = 0; i < lines.length; i++) {
      const line = lines[i]!.trim();
      if (line.length === 0) continue;
      const parts = line.split(/\s+/);
      const token = parts[0]!.toLowerCase();
      const vec = new Float64Array(parts.length - 1);
      for (let j = 1; j < parts.length; j++) {
        const v = Number(parts[j]);
        if (!Number.isFinite(v)) {
          throw new VocabularyError(
            `${origin}:${i + 1}: bad component "${parts[j]}" for "${token}"`,
          );
        }
        vec[j - 1] = v;
      }
      if (vec.length === 0) {
        throw new VocabularyError(`${origin}:${i + 1}: no components`);
      }
      if (dim === -1) dim = vec.length;
      if (vec.length !== dim) {
        throw new VocabularyError(
          `${origin}:${i + 1}: expected ${dim} components, got ${vec.length}`,
        );
      }
      table.set(token, vec);
    }
    if (table.size === 0) {
      throw new VocabularyError(`${origin}: empty embedding table`);
    }
    return new Embeddings(table, dim);
  }

  static load(path: string): Embeddings {
    return Embeddings.parse(readFileSync(path, "utf-8"), path);
  }

  get size(): number {
    return this.table.size;
  }

  has(word: string): boolean {
    return this.table.has(word.toLowerCase());
  }

  vector(word: string): Float64Array | undefined {
    return this.table.get(word.toLowerCase());
  }

  /** Cosine similarity, or undefined when either word is out of vocabulary. */
  similarity(a: string, b: string): number | undefined {
    const va = this.vector(a);
    const vb = this.vector(b);
    if (va === undefined || vb === undefined) return undefined;
    return cosine(va, vb);
  }
}

export function cosine(a: Float64Array, b: Float64Array): number {
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i++) {
    dot += a[i]! * b[i]!;
    na += a[i]! * a[i]!;
    nb += b[i]! * b[i]!;
  }
  if (na === 0 || nb === 0) return 0;
  return dot / Math.sqrt(na * nb);
}

import type { DatasetRow } from "./csv.js";
import { fnv1a32, mulberry32 } from "./random.js";

export interface EmbeddingBackend {
  readonly name: string;
  readonly dim: number;
  embed(sentences: string[]): Promise<number[][]>;
}

export interface EmbeddingMatrix {
  values: number[][];
  rowIds: string[];
  dim: number;
}

/** Deterministic offline backend: each sentence maps to a fixed pseudo-random
 * vector derived from a hash of its text. Carries no meaning, but exercises
 * every downstream shape and determinism contract without a model. */
export class StubBackend implements EmbeddingBackend {
  readonly name = "stub";
  readonly dim: number;

  constructor(dim = 384) {
    if (dim < 1) throw new Error(`stub backend dim must be >= 1, got ${dim}`);
    this.dim = dim;
  }

  async embed(sentences: string[]): Promise<number[][]> {
    return sentences.map((sentence) => {
      const next = mulberry32(fnv1a32(sentence));
      return Array.from({ length: this.dim }, () => next() * 2 - 1);
    });
  }
}

const DEFAULT_MODEL = "Xenova/paraphrase-multilingual-MiniLM-L12-v2";

/** Real multilingual sentence embeddings via a local transformers runtime.
 * The model is resolved lazily so offline environments fail with
 * instructions instead of at import time. */
export class DefaultBackend implements EmbeddingBackend {
  readonly name = "default";
  readonly dim = 384;

  async embed(sentences: string[]): Promise<number[][]> {
    let pipeline: (task: string, model: string) => Promise<any>;
    try {
      ({ pipeline } = await import("@xenova/transformers" as string));
    } catch {
      throw new Error(
        "default embedding backend unavailable: install @xenova/transformers " +
          `and pre-download ${DEFAULT_MODEL} into its local cache, ` +
          "or run with --backend stub",
      );
    }
    const extract = await pipeline("feature-extraction", DEFAULT_MODEL);
    const vectors: number[][] = [];
    for (const sentence of sentences) {
      const output = await extract(sentence, { pooling: "mean", normalize: true });
      vectors.push(Array.from(output.data as Iterable<number>));
    }
    return vectors;
  }
}

export function backendByName(name: string): EmbeddingBackend {
  if (name === "stub") return new StubBackend();
  if (name === "default") return new DefaultBackend();
  throw new Error(`unknown embedding backend ${JSON.stringify(name)}; use default or stub`);
}

/** Embed one vector per dataset row, aligned with row order. */
export async function embedSentences(
  rows: DatasetRow[],
  backend: EmbeddingBackend,
): Promise<EmbeddingMatrix> {
  if (rows.length === 0) throw new Error("cannot embed an empty dataset");
  const values = await backend.embed(rows.map((row) => row.sentence_anonymized));
  if (values.length !== rows.length) {
    throw new Error(`backend returned ${values.length} vectors for ${rows.length} rows`);
  }
  for (const vector of values) {
    if (vector.length !== backend.dim) {
      throw new Error(`backend vector has ${vector.length} dims, expected ${backend.dim}`);
    }
    for (const value of vector) {
      if (!Number.isFinite(value)) throw new Error("backend produced a non-finite value");
    }
  }
  return { values, rowIds: rows.map((row) => row.source), dim: backend.dim };
}

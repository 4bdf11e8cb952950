import { mkdirSync, readdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { metadataCsv, parseDatasetCsv, type DatasetRow } from "./csv.js";
import { backendByName, embedSentences } from "./embed.js";
import { encodeNpyFloat32 } from "./npy.js";
import { reducePca } from "./pca.js";
import { reduceUmap } from "./umap.js";

export const PCA_FILE = "sentence_embeddings_pca_128.npy";
export const UMAP_FILE = "sentence_embeddings_umap_64.npy";
export const METADATA_FILE = "metadata.csv";

export interface VectorizeOptions {
  dataset: string;
  out: string;
  pcaMax?: number;
  umapDims?: number;
  seed?: number;
  backend?: string;
}

export interface VectorizeSummary {
  rows: number;
  pcaComponents: number;
  umapDims: number;
}

/** Write the two projection arrays and the text-free metadata, then verify
 * no exported file leaks sentence text. Row i of each array corresponds to
 * metadata row i. */
export function exportArrays(
  pca: number[][],
  umap: number[][],
  rows: DatasetRow[],
  outDir: string,
): void {
  if (pca.length !== rows.length || umap.length !== rows.length) {
    throw new Error("export: array row counts do not match the dataset");
  }
  mkdirSync(outDir, { recursive: true });
  writeFileSync(join(outDir, PCA_FILE), encodeNpyFloat32(pca));
  writeFileSync(join(outDir, UMAP_FILE), encodeNpyFloat32(umap));
  writeFileSync(join(outDir, METADATA_FILE), metadataCsv(rows), "utf-8");

  // non-reversibility gate: nothing in the export directory may carry the
  // sentences themselves
  const sentences = rows.map((row) => row.sentence_anonymized).filter((s) => s.length > 0);
  for (const name of readdirSync(outDir)) {
    const content = readFileSync(join(outDir, name)).toString("utf-8");
    for (const sentence of sentences) {
      if (content.includes(sentence)) {
        throw new Error(`export: sentence text leaked into ${name}`);
      }
    }
  }
}

export async function runVectorize(options: VectorizeOptions): Promise<VectorizeSummary> {
  const pcaMax = options.pcaMax ?? 128;
  const umapDims = options.umapDims ?? 64;
  const seed = options.seed ?? 0;

  const rows = parseDatasetCsv(readFileSync(options.dataset, "utf-8"));
  if (rows.length === 0) throw new Error(`dataset has no rows: ${options.dataset}`);

  const backend = backendByName(options.backend ?? "default");
  const embedded = await embedSentences(rows, backend);
  const pca = reducePca(embedded.values, pcaMax);
  const umap = reduceUmap(pca.projection, umapDims, seed);
  exportArrays(pca.projection, umap, rows, options.out);

  return { rows: rows.length, pcaComponents: pca.projection[0].length, umapDims };
}

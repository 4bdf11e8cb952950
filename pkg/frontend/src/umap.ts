import { UMAP } from "umap-js";

import { mulberry32 } from "./random.js";

export const UMAP_NEIGHBORS = 15;
export const UMAP_MIN_DIST = 0.1;

/** Nonlinear projection to `dims` dimensions with a pinned seed. The
 * neighborhood size shrinks automatically for small inputs (the library
 * requires nNeighbors < n). */
export function reduceUmap(matrix: number[][], dims = 64, seed = 0): number[][] {
  const n = matrix.length;
  if (n < 3) throw new Error(`umap needs at least 3 samples, got ${n}`);
  if (n <= dims) {
    console.warn(`umap: ${n} samples projected to ${dims} dims; results will be weak`);
  }
  const umap = new UMAP({
    nComponents: dims,
    nNeighbors: Math.min(UMAP_NEIGHBORS, n - 1),
    minDist: UMAP_MIN_DIST,
    random: mulberry32(seed),
  });
  const out = umap.fit(matrix);
  if (out.length !== n) throw new Error("umap returned a wrong row count");
  for (const row of out) {
    if (row.length !== dims) throw new Error("umap returned a wrong dimension");
    for (const value of row) {
      if (!Number.isFinite(value)) throw new Error("umap produced a non-finite value");
    }
  }
  return out;
}

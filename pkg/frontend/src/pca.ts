/** Principal component analysis by eigendecomposition of the sample
 * covariance matrix. One code path regardless of shape: the covariance is
 * d x d and the cyclic Jacobi rotations below keep the eigenvector basis
 * orthonormal even when the data matrix is rank-deficient.
 */

export interface PcaResult {
  /** n x k projections of the centered data onto the top components. */
  projection: number[][];
  /** k x d; row j is the j-th principal axis (unit length). */
  components: number[][];
  /** Top-k covariance eigenvalues, non-increasing. */
  explainedVariance: number[];
  mean: number[];
}

/** Component count actually produced: the configured cap, bounded by the
 * centered data's maximum possible rank. */
export function effectiveComponents(maxComponents: number, n: number, d: number): number {
  return Math.min(maxComponents, n - 1, d);
}

export function reducePca(matrix: number[][], maxComponents = 128): PcaResult {
  const n = matrix.length;
  if (n < 2) throw new Error(`pca needs at least 2 samples, got ${n}`);
  const d = matrix[0].length;
  for (const row of matrix) {
    if (row.length !== d) throw new Error("pca input rows have inconsistent widths");
  }
  if (maxComponents < 1) throw new Error(`maxComponents must be >= 1, got ${maxComponents}`);

  const mean = new Float64Array(d);
  for (const row of matrix) {
    for (let j = 0; j < d; j++) mean[j] += row[j];
  }
  for (let j = 0; j < d; j++) mean[j] /= n;

  const centered: Float64Array[] = matrix.map((row) => {
    const out = new Float64Array(d);
    for (let j = 0; j < d; j++) out[j] = row[j] - mean[j];
    return out;
  });

  // sample covariance, upper triangle mirrored
  const cov: Float64Array[] = Array.from({ length: d }, () => new Float64Array(d));
  for (let a = 0; a < d; a++) {
    for (let b = a; b < d; b++) {
      let sum = 0;
      for (let i = 0; i < n; i++) sum += centered[i][a] * centered[i][b];
      const value = sum / (n - 1);
      cov[a][b] = value;
      cov[b][a] = value;
    }
  }

  const { values, vectors } = jacobiEigen(cov);
  const order = values
    .map((value, index) => ({ value, index }))
    .sort((x, y) => y.value - x.value);

  const k = effectiveComponents(maxComponents, n, d);
  const components: number[][] = [];
  const explainedVariance: number[] = [];
  for (let j = 0; j < k; j++) {
    const { value, index } = order[j];
    explainedVariance.push(value);
    const axis = new Array<number>(d);
    for (let a = 0; a < d; a++) axis[a] = vectors[a][index];
    components.push(axis);
  }

  const projection = centered.map((row) => {
    const out = new Array<number>(k);
    for (let j = 0; j < k; j++) {
      let dot = 0;
      const axis = components[j];
      for (let a = 0; a < d; a++) dot += row[a] * axis[a];
      out[j] = dot;
    }
    return out;
  });

  return { projection, components, explainedVariance, mean: Array.from(mean) };
}

interface EigenPairs {
  values: number[];
  /** vectors[row][col]: column `col` is the eigenvector for values[col]. */
  vectors: Float64Array[];
}

/** Cyclic Jacobi eigendecomposition for a symmetric matrix. The rotation
 * schedule follows the classic threshold recipe: skip rotations that can no
 * longer change the matrix at working precision, stop when the off-diagonal
 * mass underflows to zero. */
function jacobiEigen(sym: Float64Array[], maxSweeps = 100): EigenPairs {
  const n = sym.length;
  const m = sym.map((row) => Float64Array.from(row));
  const vectors: Float64Array[] = Array.from({ length: n }, (_, i) => {
    const row = new Float64Array(n);
    row[i] = 1;
    return row;
  });

  for (let sweep = 0; sweep < maxSweeps; sweep++) {
    let offDiagonal = 0;
    for (let p = 0; p < n - 1; p++) {
      for (let q = p + 1; q < n; q++) offDiagonal += Math.abs(m[p][q]);
    }
    if (offDiagonal === 0) break;
    const threshold = sweep < 3 ? (0.2 * offDiagonal) / (n * n) : 0;

    for (let p = 0; p < n - 1; p++) {
      for (let q = p + 1; q < n; q++) {
        const apq = m[p][q];
        const small = 100 * Math.abs(apq);
        if (
          sweep > 3 &&
          Math.abs(m[p][p]) + small === Math.abs(m[p][p]) &&
          Math.abs(m[q][q]) + small === Math.abs(m[q][q])
        ) {
          m[p][q] = 0;
          m[q][p] = 0;
          continue;
        }
        if (Math.abs(apq) <= threshold) continue;

        const diff = m[q][q] - m[p][p];
        let t: number;
        if (Math.abs(diff) + small === Math.abs(diff)) {
          t = apq / diff;
        } else {
          const theta = (0.5 * diff) / apq;
          t = 1 / (Math.abs(theta) + Math.sqrt(1 + theta * theta));
          if (theta < 0) t = -t;
        }
        const c = 1 / Math.sqrt(1 + t * t);
        const s = t * c;
        const tau = s / (1 + c);
        const h = t * apq;

        m[p][p] -= h;
        m[q][q] += h;
        m[p][q] = 0;
        m[q][p] = 0;
        for (let i = 0; i < n; i++) {
          if (i !== p && i !== q) {
            const mip = m[i][p];
            const miq = m[i][q];
            m[i][p] = mip - s * (miq + tau * mip);
            m[i][q] = miq + s * (mip - tau * miq);
            m[p][i] = m[i][p];
            m[q][i] = m[i][q];
          }
          const vip = vectors[i][p];
          const viq = vectors[i][q];
          vectors[i][p] = vip - s * (viq + tau * vip);
          vectors[i][q] = viq + s * (vip - tau * viq);
        }
      }
    }
  }

  return { values: Array.from({ length: n }, (_, i) => m[i][i]), vectors };
}

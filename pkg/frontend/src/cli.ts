#!/usr/bin/env node
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";

import { runVectorize } from "./vectorize.js";
import { UMAP_MIN_DIST, UMAP_NEIGHBORS } from "./umap.js";

const USAGE =
  "usage: prisme-vectorize --dataset <csv> --out <dir> " +
  "[--pca-max 128] [--umap-dims 64] [--seed N] [--backend default|stub]";

function positiveInt(name: string, raw: string, minimum: number): number {
  const value = Number.parseInt(raw, 10);
  if (!Number.isInteger(value) || String(value) !== raw.trim() || value < minimum) {
    throw new UsageError(`--${name} expects an integer >= ${minimum}, got ${JSON.stringify(raw)}`);
  }
  return value;
}

class UsageError extends Error {}

export async function main(argv: string[]): Promise<number> {
  try {
    const { values } = (() => {
      try {
        return parseArgs({
          args: argv,
          options: {
            dataset: { type: "string" },
            out: { type: "string" },
            "pca-max": { type: "string", default: "128" },
            "umap-dims": { type: "string", default: "64" },
            seed: { type: "string", default: "0" },
            backend: { type: "string", default: "default" },
          },
          strict: true,
        });
      } catch (error) {
        throw new UsageError((error as Error).message);
      }
    })();

    if (!values.dataset || !values.out) {
      throw new UsageError(USAGE);
    }
    const summary = await runVectorize({
      dataset: values.dataset,
      out: values.out,
      pcaMax: positiveInt("pca-max", values["pca-max"]!, 1),
      umapDims: positiveInt("umap-dims", values["umap-dims"]!, 1),
      seed: positiveInt("seed", values.seed!, 0),
      backend: values.backend,
    });
    console.log(
      `vectorize: ok (${summary.rows} rows, pca ${summary.pcaComponents}, ` +
        `umap ${summary.umapDims}; nNeighbors=${UMAP_NEIGHBORS} minDist=${UMAP_MIN_DIST})`,
    );
    return 0;
  } catch (error) {
    const missingInput = (error as NodeJS.ErrnoException).code === "ENOENT";
    const badInput = /unknown embedding backend|expected header/.test(String(error));
    console.error(`error: ${(error as Error).message}`);
    if (error instanceof UsageError || missingInput || badInput) {
      console.error(USAGE);
      return 2;
    }
    return 1;
  }
}

const invokedDirectly =
  typeof process.argv[1] === "string" &&
  import.meta.url === pathToFileURL(process.argv[1]).href;

if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}

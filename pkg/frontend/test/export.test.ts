import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { parseDatasetCsv } from "../src/csv.js";
import { parseNpy } from "../src/npy.js";
import {
  exportArrays,
  METADATA_FILE,
  PCA_FILE,
  runVectorize,
  UMAP_FILE,
} from "../src/vectorize.js";

const DATASET = fileURLToPath(new URL("fixtures/dataset.csv", import.meta.url));

describe("end-to-end export", () => {
  let outDir: string;
  let rowCount: number;

  beforeAll(async () => {
    outDir = mkdtempSync(join(tmpdir(), "vectorize-"));
    const summary = await runVectorize({
      dataset: DATASET,
      out: outDir,
      seed: 7,
      backend: "stub",
    });
    rowCount = summary.rows;
  });

  afterAll(() => {
    rmSync(outDir, { recursive: true, force: true });
  });

  it("pca array reloads as float32 with shape (n, k)", () => {
    const parsed = parseNpy(readFileSync(join(outDir, PCA_FILE)));
    expect(parsed.descr).toBe("<f4");
    expect(parsed.fortranOrder).toBe(false);
    // 36 fixture rows, 384 stub dims: k = min(128, 35, 384)
    expect(parsed.shape).toEqual([rowCount, rowCount - 1]);
    expect(Array.from(parsed.data).every(Number.isFinite)).toBe(true);
  });

  it("umap array reloads as float32 with shape (n, 64), all finite", () => {
    const parsed = parseNpy(readFileSync(join(outDir, UMAP_FILE)));
    expect(parsed.descr).toBe("<f4");
    expect(parsed.shape).toEqual([rowCount, 64]);
    expect(Array.from(parsed.data).every(Number.isFinite)).toBe(true);
  });

  it("metadata is row-aligned with the dataset", () => {
    const rows = parseDatasetCsv(readFileSync(DATASET, "utf-8"));
    const lines = readFileSync(join(outDir, METADATA_FILE), "utf-8").trimEnd().split("\r\n");
    expect(lines[0]).toBe("word_labels,keywords,source,doc_id");
    expect(lines).toHaveLength(rows.length + 1);
    rows.forEach((row, i) => {
      const cells = lines[i + 1].split(",");
      expect(cells[2]).toBe(row.source);
      expect(cells[3]).toBe(String(i));
    });
  });

  it("no exported file carries sentence text", () => {
    const rows = parseDatasetCsv(readFileSync(DATASET, "utf-8"));
    for (const name of [PCA_FILE, UMAP_FILE, METADATA_FILE]) {
      const content = readFileSync(join(outDir, name)).toString("utf-8");
      for (const row of rows) {
        expect(content.includes(row.sentence_anonymized)).toBe(false);
      }
    }
  });

  it("a second run with the same seed is byte-identical", async () => {
    const again = mkdtempSync(join(tmpdir(), "vectorize-"));
    try {
      await runVectorize({ dataset: DATASET, out: again, seed: 7, backend: "stub" });
      for (const name of [PCA_FILE, UMAP_FILE, METADATA_FILE]) {
        expect(readFileSync(join(again, name)).equals(readFileSync(join(outDir, name)))).toBe(
          true,
        );
      }
    } finally {
      rmSync(again, { recursive: true, force: true });
    }
  });
});

describe("leak gate", () => {
  it("refuses to export when a label column duplicates the sentence", () => {
    const rows = [
      {
        word_labels: "confidential phrasing",
        keywords: "k",
        source: "d:1",
        sentence_anonymized: "confidential phrasing",
      },
    ];
    const dir = mkdtempSync(join(tmpdir(), "vectorize-leak-"));
    try {
      expect(() => exportArrays([[1, 2]], [[3, 4]], rows, dir)).toThrow(/leaked into/);
    } finally {
      rmSync(dir, { recursive: true, force: true });
    }
  });
});

describe("cli", () => {
  it("needs both --dataset and --out", async () => {
    expect(await main([])).toBe(2);
  });

  it("rejects unknown flags", async () => {
    expect(await main(["--dataset", DATASET, "--out", "/tmp/x", "--frob", "1"])).toBe(2);
  });

  it("rejects a missing dataset file", async () => {
    expect(await main(["--dataset", "/nonexistent.csv", "--out", "/tmp/x"])).toBe(2);
  });

  it("rejects an unknown backend and bad numbers", async () => {
    expect(await main(["--dataset", DATASET, "--out", "/tmp/x", "--backend", "gpt"])).toBe(2);
    expect(await main(["--dataset", DATASET, "--out", "/tmp/x", "--seed", "-1"])).toBe(2);
    expect(await main(["--dataset", DATASET, "--out", "/tmp/x", "--pca-max", "zero"])).toBe(2);
  });

  it("runs the stub pipeline to completion", async () => {
    const dir = mkdtempSync(join(tmpdir(), "vectorize-cli-"));
    try {
      const code = await main([
        "--dataset", DATASET,
        "--out", dir,
        "--seed", "3",
        "--backend", "stub",
      ]);
      expect(code).toBe(0);
      expect(parseNpy(readFileSync(join(dir, UMAP_FILE))).shape[1]).toBe(64);
    } finally {
      rmSync(dir, { recursive: true, force: true });
    }
  });
});

import { describe, expect, it } from "vitest";

import type { DatasetRow } from "../src/csv.js";
import {
  backendByName,
  DefaultBackend,
  embedSentences,
  StubBackend,
  type EmbeddingBackend,
} from "../src/embed.js";

function row(sentence: string, source = "a:1"): DatasetRow {
  return { word_labels: "l", keywords: "k", source, sentence_anonymized: sentence };
}

describe("stub backend", () => {
  it("yields one constant-width finite vector per row", async () => {
    const rows = ["one", "two", "three", "four"].map((s) => row(s));
    const matrix = await embedSentences(rows, new StubBackend());
    expect(matrix.values).toHaveLength(4);
    for (const vector of matrix.values) {
      expect(vector).toHaveLength(384);
      expect(vector.every(Number.isFinite)).toBe(true);
    }
    expect(matrix.dim).toBe(384);
  });

  it("is deterministic: identical sentences get identical vectors", async () => {
    const backend = new StubBackend();
    const [a, b, c] = await backend.embed(["same text", "same text", "different"]);
    expect(a).toEqual(b);
    expect(a).not.toEqual(c);
    const [again] = await backend.embed(["same text"]);
    expect(again).toEqual(a);
  });
});

describe("matrix assembly", () => {
  it("passes backend vectors through untouched, row-aligned", async () => {
    const fixed: EmbeddingBackend = {
      name: "fixed",
      dim: 3,
      embed: async (sentences) =>
        sentences.map((_, i) => [i + 0.5, -i, i * i]),
    };
    const rows = [row("a", "d:1"), row("b", "d:2"), row("c", "d:3")];
    const matrix = await embedSentences(rows, fixed);
    expect(matrix.values).toEqual([
      [0.5, -0, 0],
      [1.5, -1, 1],
      [2.5, -2, 4],
    ]);
    expect(matrix.rowIds).toEqual(["d:1", "d:2", "d:3"]);
  });

  it("rejects an empty dataset", async () => {
    await expect(embedSentences([], new StubBackend())).rejects.toThrow(/empty dataset/);
  });

  it("rejects wrong-width and non-finite backend output", async () => {
    const short: EmbeddingBackend = {
      name: "short",
      dim: 4,
      embed: async (sentences) => sentences.map(() => [1, 2]),
    };
    await expect(embedSentences([row("x")], short)).rejects.toThrow(/dims/);

    const broken: EmbeddingBackend = {
      name: "nan",
      dim: 2,
      embed: async (sentences) => sentences.map(() => [1, Number.NaN]),
    };
    await expect(embedSentences([row("x")], broken)).rejects.toThrow(/non-finite/);
  });
});

describe("backend selection", () => {
  it("resolves the two shipped backends by name", () => {
    expect(backendByName("stub")).toBeInstanceOf(StubBackend);
    expect(backendByName("default")).toBeInstanceOf(DefaultBackend);
    expect(() => backendByName("gpt")).toThrow(/unknown embedding backend/);
  });

  it("default backend fails offline with install instructions", async () => {
    await expect(new DefaultBackend().embed(["text"])).rejects.toThrow(
      /install @xenova\/transformers.*--backend stub/s,
    );
  });
});

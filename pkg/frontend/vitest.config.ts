import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // PCA eigendecompositions and UMAP fits on realistic sizes take a while
    testTimeout: 120_000,
  },
});

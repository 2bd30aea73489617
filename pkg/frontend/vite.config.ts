/// <reference types="vitest/config" />
import { defineConfig } from "vite";

export default defineConfig({
  build: {
    target: "es2022",
    outDir: "dist",
  },
  test: {
    include: ["test/**/*.test.ts"],
    environment: "node",
    // The e2e test boots the real service; first frame may JIT-compile.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});

import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    port: 5173,
    proxy: {
      // Forward API calls to a locally running memsandbox service.
      "/workspaces": "http://127.0.0.1:8642",
      "/healthz": "http://127.0.0.1:8642",
    },
  },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
  },
});

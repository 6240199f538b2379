// Bootstrap: resolve (or create) the workspace named in the URL, then poll
// the server revision once a second and re-render on change.

import { ApiClient } from "./api";
import { App } from "./app";
import "./style.css";

const POLL_INTERVAL_MS = 1000;

async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");

  const client = new ApiClient();
  const app = new App(root, client);

  const params = new URLSearchParams(window.location.search);
  let workspaceId = params.get("workspace");
  try {
    if (workspaceId) {
      app.setWorkspace(await client.getWorkspace(workspaceId));
    } else {
      const doc = await client.createWorkspace();
      workspaceId = doc.id;
      params.set("workspace", workspaceId);
      window.history.replaceState(null, "", `?${params.toString()}`);
      app.setWorkspace(doc);
    }
  } catch (error) {
    root.textContent = `cannot reach the memory service: ${String(error)}`;
    throw error;
  }

  if (app.doc && app.doc.conversations.length === 0) {
    await app.newConversation();
  }

  window.setInterval(() => {
    void app.refresh();
  }, POLL_INTERVAL_MS);
}

void start();

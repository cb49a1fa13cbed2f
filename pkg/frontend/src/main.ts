import { ApiClient } from "./api.js";
import { App } from "./app.js";

declare global {
  interface Window {
    MEDBEADS_API_BASE?: string;
  }
}

// Served under /ui by the engine: same-origin API by default.
const base = window.MEDBEADS_API_BASE ?? "";
const app = new App(document, new ApiClient(base));
app.start().catch((err) => {
  const list = document.querySelector("#patient-list");
  if (list) list.textContent = `Failed to reach the API: ${err}`;
});

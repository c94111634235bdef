import { ApiClient } from "./api.js";
import { initApp } from "./app.js";

declare global {
  interface Window {
    AIRHOLD_API?: string;
  }
}

const root = document.getElementById("app");
if (root) {
  const base = window.AIRHOLD_API ?? "http://127.0.0.1:8080";
  const handles = initApp(root, new ApiClient(base));
  void handles.loadNetwork();
}

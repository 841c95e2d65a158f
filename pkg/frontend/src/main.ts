import { ApiClient } from "./api.js";
import { Editor } from "./editor.js";

// Served by the annotation service itself by default; ?api=http://host:port
// points the editor at a service running elsewhere during development.
const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "");
const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const editor = new Editor({ api, root });
void editor.start();

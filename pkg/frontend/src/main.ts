import { ServiceClient } from "./api.js";
import { mountApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("server") ?? "http://127.0.0.1:8000";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
mountApp(root, {
  client: new ServiceClient(baseUrl),
  defaultStart: "course0_topic0_oer0",
  defaultGoal: "goal0",
});

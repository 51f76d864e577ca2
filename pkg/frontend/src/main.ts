import { ApiClient } from "./api.js";
import { Console } from "./console.js";

window.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const api = new ApiClient("");
  void new Console(api, root).start();
});

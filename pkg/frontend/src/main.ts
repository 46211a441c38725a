import { ReviewApi } from "./api";
import { mountApp } from "./app";

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app mount point");

const app = mountApp(root, new ReviewApi(""));
void app.refresh();
// keep the progress badges honest while a colleague batch-labels elsewhere
setInterval(() => void app.refresh(), 30_000);

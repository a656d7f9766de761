/** Browser bootstrap: wires the controller to the DOM.
 *
 * The service base URL defaults to same-origin and can be overridden at
 * runtime via window.NOVELTYRANK_BASE_URL (set it in index.html or inject
 * it at deploy time).
 */

import { HttpApiClient } from "./api.js";
import { App } from "./app.js";
import type { ViewName } from "./state.js";
import { parseCandidates } from "./views/rank.js";

declare global {
  interface Window {
    NOVELTYRANK_BASE_URL?: string;
  }
}

const baseUrl = window.NOVELTYRANK_BASE_URL ?? "";
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app container");
}

const app: App = new App(new HttpApiClient(baseUrl), () => render());

function value(id: string): string {
  const el = document.getElementById(id) as HTMLInputElement | HTMLTextAreaElement | null;
  return el ? el.value : "";
}

function syncInputs(): void {
  switch (app.state.active) {
    case "score":
      app.state.score.paperId = value("score-paper-id");
      break;
    case "compare":
      app.state.compare.a = value("compare-a");
      app.state.compare.b = value("compare-b");
      break;
    case "rank":
      app.state.rank.input = value("rank-input");
      break;
  }
}

function render(): void {
  root!.innerHTML = app.renderNav() + app.render();
  wire();
}

function wire(): void {
  root!.querySelectorAll<HTMLButtonElement>(".tab").forEach((tab) => {
    tab.addEventListener("click", () => {
      syncInputs();
      const view = tab.dataset.view as ViewName;
      app.activate(view);
      if (view === "domains" && !app.state.domains.result) {
        void app.loadDomains();
      }
    });
  });
  root!.querySelector("#score-form")?.addEventListener("submit", (event) => {
    event.preventDefault();
    syncInputs();
    void app.submitScore();
  });
  root!.querySelector("#compare-form")?.addEventListener("submit", (event) => {
    event.preventDefault();
    syncInputs();
    void app.submitCompare();
  });
  root!.querySelector("#compare-swap")?.addEventListener("click", () => {
    syncInputs();
    void app.swapCompare();
  });
  root!.querySelector("#rank-form")?.addEventListener("submit", (event) => {
    event.preventDefault();
    syncInputs();
    void app.submitRank();
  });
  root!.querySelector("#rank-input")?.addEventListener("input", () => {
    // sync the submit button without a full re-render (keeps textarea focus)
    syncInputs();
    const button = root!.querySelector<HTMLButtonElement>("#rank-submit");
    if (button) {
      button.disabled = app.state.rank.pending || parseCandidates(app.state.rank.input).length === 0;
    }
  });
  root!.querySelector("#domains-refresh")?.addEventListener("click", () => {
    void app.loadDomains();
  });
  root!.querySelectorAll<HTMLElement>(".rank-link, .recent-link, .neighbor-row").forEach((el) => {
    el.addEventListener("click", (event) => {
      const paperId = el.dataset.paperId;
      if (!paperId) return;
      event.preventDefault();
      void app.openScoreFor(paperId);
    });
  });
}

render();

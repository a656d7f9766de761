/** Compare view: two papers side by side, winner straight from the API. */

import type { CompareResponse } from "../api.js";
import type { CompareViewState } from "../state.js";
import { errorBanner, escapeHtml, fixed, pendingBadge } from "./shared.js";

function slotCard(slot: "A" | "B", paperId: string, score: number, result: CompareResponse): string {
  const isWinner = !result.tie && result.winner === slot;
  const classes = ["card", "compare-card", `slot-${slot.toLowerCase()}`];
  if (isWinner) classes.push("winner");
  if (result.tie) classes.push("tied");
  const badge = result.tie
    ? `<span class="badge badge-tie">Tie</span>`
    : isWinner
      ? `<span class="badge badge-winner">More novel</span>`
      : "";
  return `
    <div data-slot="${slot}" class="${classes.join(" ")}">
      <h3>Paper ${slot}</h3>
      <p class="paper-id">${escapeHtml(paperId)}</p>
      <p>Score: <span data-field="score_${slot.toLowerCase()}">${fixed(score)}</span></p>
      ${badge}
    </div>`;
}

export function renderCompareResult(a: string, b: string, result: CompareResponse): string {
  return `
    <div class="compare-result">
      ${slotCard("A", a, result.score_a, result)}
      ${slotCard("B", b, result.score_b, result)}
    </div>`;
}

export function renderCompareView(state: CompareViewState): string {
  const results = state.result ? renderCompareResult(state.a, state.b, state.result) : "";
  const canSwap = state.result !== null && !state.pending;
  return `
  <section class="view view-compare">
    <h2>Compare two papers</h2>
    <form id="compare-form">
      <label>Paper A <input id="compare-a" value="${escapeHtml(state.a)}"></label>
      <label>Paper B <input id="compare-b" value="${escapeHtml(state.b)}"></label>
      <button type="submit" id="compare-submit"${state.pending ? " disabled" : ""}>Compare</button>
      <button type="button" id="compare-swap"${canSwap ? "" : " disabled"}>Swap A/B</button>
      ${pendingBadge(state.pending)}
    </form>
    ${errorBanner(state.error)}
    ${results}
  </section>`;
}

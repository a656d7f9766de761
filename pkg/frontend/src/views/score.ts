/** Score view: one paper's novelty signals plus its nearest prior work. */

import type { ScoreResponse } from "../api.js";
import type { ScoreViewState } from "../state.js";
import { errorBanner, escapeHtml, fixed, pendingBadge } from "./shared.js";

export function renderScoreCard(result: ScoreResponse): string {
  const parts: string[] = [];
  if (result.label !== undefined && result.probabilities) {
    parts.push(
      `<p class="verdict">Predicted label: <strong data-field="label">${result.label}</strong>` +
        ` (novel probability <span data-field="p1">${fixed(result.probabilities[1])}</span>)</p>`,
    );
  }
  if (result.score !== undefined) {
    parts.push(`<p>Novelty score: <strong data-field="score">${fixed(result.score)}</strong></p>`);
  }
  parts.push(
    `<p>Max similarity to prior work: <span data-field="max_sim">${fixed(result.max_sim)}</span><br>` +
      `Average similarity to prior work: <span data-field="avg_sim">${fixed(result.avg_sim)}</span></p>`,
  );
  return `<div class="card score-card">${parts.join("\n")}</div>`;
}

export function renderNeighborTable(result: ScoreResponse): string {
  if (result.neighbors.length === 0) {
    return `<p class="empty">No prior work retrieved.</p>`;
  }
  const rows = result.neighbors
    .map(
      (n, i) => `
    <tr class="neighbor-row" data-paper-id="${escapeHtml(n.id)}">
      <td>${i + 1}</td>
      <td>${escapeHtml(n.id)}</td>
      <td>${escapeHtml(n.title)}</td>
      <td>${fixed(n.cosine)}</td>
    </tr>`,
    )
    .join("");
  return `
    <table class="neighbor-table">
      <thead><tr><th>#</th><th>Paper</th><th>Title</th><th>Cosine</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

export function renderScoreView(state: ScoreViewState): string {
  const results = state.result
    ? renderScoreCard(state.result) + renderNeighborTable(state.result)
    : "";
  return `
  <section class="view view-score">
    <h2>Score a paper</h2>
    <form id="score-form">
      <label>Paper id
        <input id="score-paper-id" name="paperId" value="${escapeHtml(state.paperId)}" placeholder="e.g. p0042">
      </label>
      <button type="submit" id="score-submit"${state.pending ? " disabled" : ""}>Score</button>
      ${pendingBadge(state.pending)}
    </form>
    ${errorBanner(state.error)}
    ${results}
  </section>`;
}

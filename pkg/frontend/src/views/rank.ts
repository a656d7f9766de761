/** Rank view: candidates ordered exactly as the API returned them. */

import type { RankResponse } from "../api.js";
import type { RankViewState } from "../state.js";
import { errorBanner, escapeHtml, fixed, pendingBadge } from "./shared.js";

export function parseCandidates(input: string): string[] {
  return input
    .split(/[\s,]+/)
    .map((s) => s.trim())
    .filter((s) => s.length > 0);
}

export function renderRankTable(result: RankResponse): string {
  const rows = result.ranking
    .map(
      (entry) => `
    <tr class="rank-row" data-paper-id="${escapeHtml(entry.id)}">
      <td>${entry.rank}</td>
      <td><a href="#score" class="rank-link" data-paper-id="${escapeHtml(entry.id)}">${escapeHtml(entry.id)}</a></td>
      <td>${fixed(entry.score)}</td>
    </tr>`,
    )
    .join("");
  return `
    <table class="rank-table">
      <thead><tr><th>Rank</th><th>Paper</th><th>Score</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

export function renderRankView(state: RankViewState): string {
  const candidates = parseCandidates(state.input);
  const disabled = state.pending || candidates.length === 0;
  const results = state.result ? renderRankTable(state.result) : "";
  return `
  <section class="view view-rank">
    <h2>Rank a set of papers</h2>
    <form id="rank-form">
      <label>Paper ids (comma or whitespace separated)
        <textarea id="rank-input" rows="3">${escapeHtml(state.input)}</textarea>
      </label>
      <button type="submit" id="rank-submit"${disabled ? " disabled" : ""}>Rank</button>
      ${pendingBadge(state.pending)}
    </form>
    ${errorBanner(state.error)}
    ${results}
  </section>`;
}

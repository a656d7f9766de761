/** Domains view: corpus composition plus recent papers for quick selection. */

import type { DomainsResponse } from "../api.js";
import type { DomainsViewState } from "../state.js";
import { errorBanner, escapeHtml, fixed, pendingBadge } from "./shared.js";

export function renderDomainsTable(result: DomainsResponse): string {
  const rows = result.domains
    .map((d) => {
      const recent = d.recent
        .map(
          (r) =>
            `<li><a href="#score" class="recent-link" data-paper-id="${escapeHtml(r.id)}">` +
            `${escapeHtml(r.id)}</a> ${escapeHtml(r.title)} <em>(${escapeHtml(r.published)})</em></li>`,
        )
        .join("");
      return `
    <tr class="domain-row" data-domain="${escapeHtml(d.domain)}">
      <td>${escapeHtml(d.domain)}</td>
      <td>${d.papers}</td>
      <td>${d.positives}</td>
      <td>${fixed(d.share)}</td>
      <td>${fixed(d.positive_share)}</td>
      <td><ul class="recent-list">${recent}</ul></td>
    </tr>`;
    })
    .join("");
  return `
    <table class="domains-table">
      <thead>
        <tr><th>Domain</th><th>Papers</th><th>Positives</th><th>Share</th><th>Positive share</th><th>Recent papers</th></tr>
      </thead>
      <tbody>${rows}</tbody>
    </table>`;
}

export function renderDomainsView(state: DomainsViewState): string {
  return `
  <section class="view view-domains">
    <h2>Domains</h2>
    <button id="domains-refresh"${state.pending ? " disabled" : ""}>Refresh</button>
    ${pendingBadge(state.pending)}
    ${errorBanner(state.error)}
    ${state.result ? renderDomainsTable(state.result) : ""}
  </section>`;
}

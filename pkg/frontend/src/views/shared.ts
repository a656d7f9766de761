/** Shared rendering helpers. All numbers shown in the UI come verbatim from
 *  API response fields; the only transformation is display formatting. */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function fixed(value: number, places = 4): string {
  return value.toFixed(places);
}

export function errorBanner(message: string | null): string {
  if (!message) return "";
  return `<div class="error-banner" role="alert">${escapeHtml(message)}</div>`;
}

export function pendingBadge(pending: boolean): string {
  return pending ? `<span class="pending" aria-busy="true">Loading…</span>` : "";
}

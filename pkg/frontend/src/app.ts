/** DOM-free application controller.
 *
 * Holds the view state, funnels every API call through the one-in-flight-
 * per-view gate, and renders the active view to an HTML string. The browser
 * bootstrap (main.ts) owns the actual DOM; tests drive this class directly
 * against a mock ApiClient.
 */

import { ApiRequestError, type ApiClient } from "./api.js";
import { RequestGate, initialState, type ViewName, type ViewState } from "./state.js";
import { renderCompareView } from "./views/compare.js";
import { renderDomainsView } from "./views/domains.js";
import { parseCandidates, renderRankView } from "./views/rank.js";
import { renderScoreView } from "./views/score.js";

function messageOf(error: unknown): string {
  if (error instanceof ApiRequestError) {
    const details = error.body.error.details;
    const ids = Array.isArray(details?.ids) ? ` (${(details.ids as string[]).join(", ")})` : "";
    if (error.status === 404) {
      return `Unknown paper: ${error.body.error.message}${ids}`;
    }
    return `${error.body.error.message}${ids}`;
  }
  return `Request failed: ${String(error)}`;
}

export class App {
  readonly state: ViewState = initialState();
  private readonly gate = new RequestGate();

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: () => void = () => {},
  ) {}

  activate(view: ViewName): void {
    this.state.active = view;
    this.onChange();
  }

  /** Open the score view with an id prefilled (rank rows, recent papers). */
  openScoreFor(paperId: string): Promise<void> {
    this.state.score.paperId = paperId;
    this.state.active = "score";
    this.onChange();
    return this.submitScore();
  }

  async submitScore(): Promise<void> {
    const paperId = this.state.score.paperId.trim();
    if (!paperId) return;
    await this.runView("score", async () => {
      this.state.score.result = await this.api.score(paperId);
    });
  }

  async submitCompare(): Promise<void> {
    const { a, b } = this.state.compare;
    if (!a.trim() || !b.trim()) return;
    await this.runView("compare", async () => {
      this.state.compare.result = await this.api.compare(a.trim(), b.trim());
    });
  }

  /** Resubmit with slots exchanged; a consistent backend mirrors the verdict. */
  async swapCompare(): Promise<void> {
    const { a, b } = this.state.compare;
    this.state.compare.a = b;
    this.state.compare.b = a;
    this.onChange();
    await this.submitCompare();
  }

  async submitRank(): Promise<void> {
    const candidates = parseCandidates(this.state.rank.input);
    if (candidates.length === 0) return;
    await this.runView("rank", async () => {
      this.state.rank.result = await this.api.rank(candidates);
    });
  }

  async loadDomains(): Promise<void> {
    await this.runView("domains", async () => {
      this.state.domains.result = await this.api.domains();
    });
  }

  private async runView(view: ViewName, task: () => Promise<void>): Promise<void> {
    if (this.gate.isPending(view)) {
      // the duplicate submit waits on the in-flight request, never re-fires;
      // the original caller reports any failure
      await this.gate.run(view, async () => {}).catch(() => {});
      return;
    }
    const status = this.state[view];
    status.pending = true;
    status.error = null;
    this.onChange();
    try {
      await this.gate.run(view, task);
    } catch (error) {
      status.error = messageOf(error);
    } finally {
      status.pending = false;
      this.onChange();
    }
  }

  render(): string {
    switch (this.state.active) {
      case "score":
        return renderScoreView(this.state.score);
      case "compare":
        return renderCompareView(this.state.compare);
      case "rank":
        return renderRankView(this.state.rank);
      case "domains":
        return renderDomainsView(this.state.domains);
    }
  }

  renderNav(): string {
    const tabs: Array<[ViewName, string]> = [
      ["score", "Score"],
      ["compare", "Compare"],
      ["rank", "Rank"],
      ["domains", "Domains"],
    ];
    const items = tabs
      .map(
        ([view, label]) =>
          `<button class="tab${view === this.state.active ? " active" : ""}" data-view="${view}">${label}</button>`,
      )
      .join("");
    return `<nav class="tabs">${items}</nav>`;
  }
}

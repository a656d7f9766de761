/** View state and the one-in-flight-per-view request gate. */

import type { CompareResponse, DomainsResponse, RankResponse, ScoreResponse } from "./api.js";

export type ViewName = "score" | "compare" | "rank" | "domains";

export interface ViewStatus {
  pending: boolean;
  error: string | null;
}

export interface ScoreViewState extends ViewStatus {
  paperId: string;
  result: ScoreResponse | null;
}

export interface CompareViewState extends ViewStatus {
  a: string;
  b: string;
  result: CompareResponse | null;
}

export interface RankViewState extends ViewStatus {
  input: string;
  result: RankResponse | null;
}

export interface DomainsViewState extends ViewStatus {
  result: DomainsResponse | null;
}

export interface ViewState {
  active: ViewName;
  score: ScoreViewState;
  compare: CompareViewState;
  rank: RankViewState;
  domains: DomainsViewState;
}

export function initialState(): ViewState {
  return {
    active: "score",
    score: { paperId: "", result: null, pending: false, error: null },
    compare: { a: "", b: "", result: null, pending: false, error: null },
    rank: { input: "", result: null, pending: false, error: null },
    domains: { result: null, pending: false, error: null },
  };
}

/**
 * At most one request may be in flight per view. A submit that arrives while
 * the view's request is pending does not issue a second call: it receives
 * (waits on) the in-flight promise.
 */
export class RequestGate {
  private pending = new Map<ViewName, Promise<unknown>>();

  isPending(view: ViewName): boolean {
    return this.pending.has(view);
  }

  run<T>(view: ViewName, task: () => Promise<T>): Promise<T> {
    const existing = this.pending.get(view);
    if (existing) {
      return existing as Promise<T>;
    }
    const inFlight = task().finally(() => this.pending.delete(view));
    this.pending.set(view, inFlight);
    return inFlight;
  }
}

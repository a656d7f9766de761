/** Typed client for the noveltyrank service API (see the service docs for
 *  the endpoint contract). The UI never computes scores; it renders these
 *  response payloads verbatim. */

export interface NeighborEntry {
  id: string;
  title: string;
  cosine: number;
}

export interface ScoreResponse {
  paper_id: string | null;
  score?: number;
  label?: number;
  probabilities?: number[];
  max_sim: number;
  avg_sim: number;
  neighbors: NeighborEntry[];
}

export interface CompareResponse {
  winner: "A" | "B";
  score_a: number;
  score_b: number;
  tie: boolean;
}

export interface RankEntry {
  id: string;
  score: number;
  rank: number;
}

export interface RankResponse {
  ranking: RankEntry[];
}

export interface RecentPaper {
  id: string;
  title: string;
  published: string;
}

export interface DomainSummary {
  domain: string;
  papers: number;
  positives: number;
  share: number;
  positive_share: number;
  recent: RecentPaper[];
}

export interface DomainsResponse {
  domains: DomainSummary[];
}

export interface HealthResponse {
  status: string;
  version: string;
  recipe_hash: string;
  heads: string[];
  papers: number;
}

export interface ErrorEnvelope {
  error: {
    code: string;
    message: string;
    details: Record<string, unknown>;
  };
}

/** Non-2xx response carrying the service's error envelope. */
export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ErrorEnvelope,
  ) {
    super(body.error.message);
    this.name = "ApiRequestError";
  }
}

export interface ApiClient {
  health(): Promise<HealthResponse>;
  score(paperId: string): Promise<ScoreResponse>;
  compare(a: string, b: string): Promise<CompareResponse>;
  rank(candidates: string[]): Promise<RankResponse>;
  domains(): Promise<DomainsResponse>;
}

/** fetch-backed client; base URL is set at construction (build default or
 *  runtime override). */
export class HttpApiClient implements ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    const body = await response.json();
    if (!response.ok) {
      throw new ApiRequestError(response.status, body as ErrorEnvelope);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, { method: "POST", body: JSON.stringify(payload) });
  }

  health(): Promise<HealthResponse> {
    return this.request("/v1/health");
  }

  score(paperId: string): Promise<ScoreResponse> {
    return this.post("/v1/score", { paper_id: paperId });
  }

  compare(a: string, b: string): Promise<CompareResponse> {
    return this.post("/v1/compare", { a, b });
  }

  rank(candidates: string[]): Promise<RankResponse> {
    return this.post("/v1/rank", { candidates });
  }

  domains(): Promise<DomainsResponse> {
    return this.request("/v1/domains");
  }
}

/** Canned API responses; the mock suite runs against these only. */

import type {
  CompareResponse,
  DomainsResponse,
  RankResponse,
  ScoreResponse,
} from "../src/api.js";

export const SCORE_THREE_NEIGHBORS: ScoreResponse = {
  paper_id: "p0042",
  score: 3.25,
  label: 1,
  probabilities: [0.126953125, 0.873046875],
  max_sim: 0.61000041,
  avg_sim: 0.48,
  neighbors: [
    { id: "p0001", title: "Neural scene graphs", cosine: 0.61000041 },
    { id: "p0002", title: "Video diffusion basics", cosine: 0.5201 },
    { id: "p0003", title: "Scene token pruning", cosine: 0.3099 },
  ],
};

export const SCORE_NO_NEIGHBORS: ScoreResponse = {
  paper_id: "p0007",
  score: -1.5,
  max_sim: 0,
  avg_sim: 0,
  neighbors: [],
};

export const COMPARE_B_WINS: CompareResponse = {
  winner: "B",
  score_a: 1.25,
  score_b: 4.75,
  tie: false,
};

// deliberately contradicts the scores: the UI must trust the winner field,
// never recompute it from score_a/score_b
export const COMPARE_CONTRADICTORY: CompareResponse = {
  winner: "B",
  score_a: 9.5,
  score_b: 0.5,
  tie: false,
};

export const COMPARE_TIE: CompareResponse = {
  winner: "A",
  score_a: 2.0,
  score_b: 2.0,
  tie: true,
};

// API order is authoritative; this fixture is not sorted by id or score
export const RANK_FIVE: RankResponse = {
  ranking: [
    { id: "p0009", score: 5.5, rank: 1 },
    { id: "p0002", score: 4.25, rank: 2 },
    { id: "p0011", score: 3.0, rank: 3 },
    { id: "p0001", score: -0.5, rank: 4 },
    { id: "p0005", score: -2.75, rank: 5 },
  ],
};

export const DOMAINS_TWO: DomainsResponse = {
  domains: [
    {
      domain: "CV",
      papers: 32,
      positives: 10,
      share: 0.2,
      positive_share: 0.3125,
      recent: [
        { id: "p0150", title: "Recent CV paper", published: "2025-05-30" },
        { id: "p0148", title: "Older CV paper", published: "2025-05-12" },
      ],
    },
    {
      domain: "Robotics",
      papers: 21,
      positives: 8,
      share: 0.13125,
      positive_share: 0.380952,
      recent: [{ id: "p0139", title: "Recent robotics paper", published: "2025-05-28" }],
    },
  ],
};

"""Client for an external chat-completion-style novelty judge.

The judge endpoint receives a frozen system prompt (reviewer persona,
novelty primer, few-shot reference decisions) and a user prompt carrying
the paper metadata and similarity signals, and must answer with a single
token: ``0``/``1`` for binary judging, ``A``/``B`` for pairwise judging.
Anything else is a parse error.

Wire protocol: one POST per query with body
``{model, system, user, max_output_tokens, temperature}`` returning
``{text}``; temperature is pinned to 0. An optional swap ensemble queries
each pair twice with slots exchanged and reports ``inconsistent`` when
the un-swapped votes disagree, exposing positional bias.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .corpus import PaperRecord
from .simindex import SimilarityFeatures

logger = logging.getLogger(__name__)

BINARY_SYSTEM_PROMPT = """\
You are an expert AI researcher and senior conference reviewer (NeurIPS/ICLR level).
Your goal is to judge whether the submission introduces a conceptually novel idea.
Conceptual novelty captures fundamental shifts in scientific thinking.

---
### Conceptual Novelty Primer
Consider the following signals:
- Problem Formulation: Does it redefine an existing task or introduce a new one?
- Methodological Innovation: Does it propose a new class of algorithms or training paradigm?
- Theoretical Insight: Does it deliver a unifying or surprising theoretical lens?
- Cross-Disciplinary Import: Does it import a transformative idea from another domain?
Incremental tweaks (hyperparameters, surface-level architecture edits, dataset swaps) are not novel.

---
### Reference Decisions
Example 1:
Title: Differentiable Logic for Robotics
Abstract: Introduces a framework that composes continuous control policies with symbolic logic programs to enable reasoning-guided motion planning.
Similarity scores: max=0.61 | avg=0.48
Reasoning: Combines two previously disjoint paradigms (continuous control and symbolic reasoning) into a unified differentiable architecture (Novel).
Output: 1
Example 2:
Title: Better Hyperparameters for BERT Fine-Tuning
Abstract: Reports extensive sweeps over learning rates and batch sizes for BERT on GLUE benchmarks.
Similarity scores: max=0.89 | avg=0.81
Reasoning: Purely empirical tuning without a new formulation or architecture (Not Novel).
Output: 0
Example 3:
Title: Physical Priors for Diffusion Models
Abstract: Incorporates symbolic conservation laws into diffusion model training to improve controllable generation.
Similarity scores: max=0.67 | avg=0.58
Reasoning: Introduces a cross-disciplinary inductive bias that reshapes the generative objective (Novel).
Output: 1
"""

BINARY_USER_TEMPLATE = """\
---
### Paper Metadata
Title: {title}
Primary Category: {category}
Abstract: {abstract}
Max similarity to prior work: {max_sim}
Average similarity to prior work: {avg_sim}
---
### Similarity Report (Aggregated)
{similarity_report}
---
### Decision Instructions
1. Synthesize the available evidence (abstract + similarity signals).
2. Decide whether the work represents a conceptually novel contribution.
3. Output "1" if the paper is conceptually novel and likely to influence future research.
4. Output "0" if the contribution is incremental, derivative, or lacks conceptual novelty.
Respond with a single digit (0 or 1).
"""

PAIRWISE_SYSTEM_PROMPT = """\
You are an expert computer-vision researcher and senior conference reviewer (CVPR/ICCV/NeurIPS level).
Your goal is to compare the *conceptual novelty* of two computer-vision research papers (not just surface/benchmark improvements).

---
Conceptual Novelty Primer
Consider the following signals:
- Problem Formulation: Does it redefine an existing task or introduce a new one?
- Methodological Innovation: Does it propose a new class of algorithms or training paradigm?
- Theoretical Insight: Does it deliver a unifying or surprising theoretical lens?
- Cross-Disciplinary Import: Does it import a transformative idea from another domain?
Incremental tweaks (hyperparameters, surface-level architecture edits, dataset swaps) are not novel.

---
Step-by-step reasoning (use these as your guide and mention the strongest signal):
1) Extract the core technical idea from each paper's title and abstract.
2) Check whether the idea represents a new task, representation, learning paradigm, or major architectural shift.
3) Use similarity metrics as supportive evidence (high similarity tilts toward incremental), but prioritize conceptual signals (new objective, representation, or theory).
4) Choose which paper is more conceptually novel; answer only with 'A' or 'B'.

--- EXAMPLES
Example 1:
Paper A: Introduces Vision Transformer (ViT), treats images as a sequence of patches and applies a pure transformer backbone, changing core architecture for vision.
Paper B: Reports small regularization and augmentation tweaks to ResNet training that marginally improve accuracy.
Reasoning: A introduces a new architectural paradigm for visual representation (Novel).
Output: A
Example 2:
Paper A: Proposes Neural Radiance Fields (NeRF), an implicit continuous 3D scene representation enabling view synthesis.
Paper B: Improves an existing multi-view stereo pipeline with a better post-processing filter.
Reasoning: NeRF introduces a fundamentally new representation and rendering paradigm (Novel).
Output: A
Example 3:
Paper A: Applies an off-the-shelf transformer to a small medical imaging dataset with minor changes.
Paper B: Proposes a new contrastive objective that aligns multi-resolution feature maps and demonstrates broad transfer across many vision tasks.
Reasoning: B defines a new learning objective with broad implications -> Novel.
Output: B
"""

PAIRWISE_USER_TEMPLATE = """\
---
### Paper A
Title: {titleA}
Primary Category: {categoryA}
Abstract: {abstractA}
Max similarity to prior work: {max_simA}
Average similarity to prior work: {avg_simA}
---
### Paper B
Title: {titleB}
Primary Category: {categoryB}
Abstract: {abstractB}
Max similarity to prior work: {max_simB}
Average similarity to prior work: {avg_simB}
---
Output only the single letter 'A' or 'B'.
"""

_PLACEHOLDER = re.compile(r"\{(\w+)\}")


class JudgeError(RuntimeError):
    """Raised when the endpoint fails after the configured retries."""


class VerdictParseError(JudgeError):
    """Raised when a response is not exactly one of the allowed tokens."""

    def __init__(self, raw: str, mode: str):
        super().__init__(f"unparseable {mode} verdict: {raw!r}")
        self.raw = raw
        self.mode = mode


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    mode: str  # "binary" | "pairwise"

    @property
    def sha256(self) -> str:
        return hashlib.sha256((self.system_text + "\x00" + self.user_text).encode()).hexdigest()


@dataclass(frozen=True)
class JudgeVerdict:
    decision: str  # "0"/"1", "A"/"B", or "inconsistent"
    raw_responses: tuple[str, ...]
    swapped: bool  # swap ensemble was applied


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    model: str = "judge"
    auth_token: str | None = None
    max_output_tokens: int = 4
    timeout_s: float = 30.0
    max_attempts: int = 3
    backoff_s: float = 1.0


def _fill(template: str, values: dict[str, str]) -> str:
    # Single pass so substituted values are never re-scanned for placeholders.
    return _PLACEHOLDER.sub(lambda m: values[m.group(1)], template)


def _category(paper: PaperRecord) -> str:
    return paper.categories[0] if paper.categories else paper.domain


def build_binary_prompt(paper: PaperRecord, sim: SimilarityFeatures, report: str) -> PromptBundle:
    """Fill the binary judging template; similarity values to 4 decimals."""
    user = _fill(
        BINARY_USER_TEMPLATE,
        {
            "title": paper.title,
            "category": _category(paper),
            "abstract": paper.abstract,
            "max_sim": f"{sim.max_sim:.4f}",
            "avg_sim": f"{sim.avg_sim:.4f}",
            "similarity_report": report.rstrip("\n"),
        },
    )
    return PromptBundle(system_text=BINARY_SYSTEM_PROMPT, user_text=user, mode="binary")


def build_pairwise_prompt(
    a: PaperRecord,
    a_sim: SimilarityFeatures,
    b: PaperRecord,
    b_sim: SimilarityFeatures,
) -> PromptBundle:
    """Fill the pairwise template; slot order is exactly as given."""
    user = _fill(
        PAIRWISE_USER_TEMPLATE,
        {
            "titleA": a.title,
            "categoryA": _category(a),
            "abstractA": a.abstract,
            "max_simA": f"{a_sim.max_sim:.4f}",
            "avg_simA": f"{a_sim.avg_sim:.4f}",
            "titleB": b.title,
            "categoryB": _category(b),
            "abstractB": b.abstract,
            "max_simB": f"{b_sim.max_sim:.4f}",
            "avg_simB": f"{b_sim.avg_sim:.4f}",
        },
    )
    return PromptBundle(system_text=PAIRWISE_SYSTEM_PROMPT, user_text=user, mode="pairwise")


def parse_verdict(raw: str, mode: str) -> str:
    """Strict verdict parsing: exactly '0'/'1' or 'A'/'B' after trimming."""
    token = raw.strip()
    if mode == "binary":
        if token in ("0", "1"):
            return token
    elif mode == "pairwise":
        if token.upper() in ("A", "B"):
            return token.upper()
    else:
        raise ValueError(f"unknown judge mode {mode!r}")
    raise VerdictParseError(raw, mode)


class JudgeClient:
    """HTTP client with retries, backoff, and an audit trail.

    ``transport`` is injectable (httpx.MockTransport in tests) so judging
    logic never needs a live network. ``sleep`` is injectable for the same
    reason.
    """

    def __init__(
        self,
        config: EndpointConfig,
        transport: httpx.BaseTransport | None = None,
        sleep=time.sleep,
    ):
        self.config = config
        headers = {}
        if config.auth_token:
            headers["Authorization"] = f"Bearer {config.auth_token}"
        self._client = httpx.Client(transport=transport, headers=headers, timeout=config.timeout_s)
        self._sleep = sleep
        self.audit_log: list[dict] = []

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "JudgeClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def query(self, prompt: PromptBundle, pair_key: str = "", swapped: bool = False) -> str:
        """One judged verdict, retrying transport and parse failures."""
        body = {
            "model": self.config.model,
            "system": prompt.system_text,
            "user": prompt.user_text,
            "max_output_tokens": self.config.max_output_tokens,
            "temperature": 0,
        }
        last_error: Exception | None = None
        for attempt in range(self.config.max_attempts):
            if attempt:
                self._sleep(self.config.backoff_s * 2 ** (attempt - 1))
            started = time.monotonic()
            try:
                response = self._client.post(self.config.url, json=body)
                response.raise_for_status()
                raw = str(response.json()["text"])
            except (httpx.HTTPError, KeyError, ValueError) as exc:
                last_error = exc
                logger.warning("judge query attempt %d failed: %s", attempt + 1, exc)
                continue
            latency_ms = (time.monotonic() - started) * 1000.0
            try:
                decision = parse_verdict(raw, prompt.mode)
            except VerdictParseError as exc:
                self._audit(pair_key, prompt, raw, None, latency_ms, swapped)
                last_error = exc
                logger.warning("judge query attempt %d unparseable: %r", attempt + 1, raw)
                continue
            self._audit(pair_key, prompt, raw, decision, latency_ms, swapped)
            return decision
        raise JudgeError(
            f"judge query failed after {self.config.max_attempts} attempts: {last_error}"
        ) from last_error

    def _audit(self, pair_key, prompt, raw, decision, latency_ms, swapped) -> None:
        self.audit_log.append(
            {
                "pair": pair_key,
                "swapped": swapped,
                "prompt_sha256": prompt.sha256,
                "raw_response": raw,
                "decision": decision,
                "latency_ms": round(latency_ms, 3),
            }
        )

    def write_audit_log(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for entry in self.audit_log:
                fh.write(json.dumps(entry) + "\n")


def judge_pair(
    client: JudgeClient,
    a: PaperRecord,
    a_sim: SimilarityFeatures,
    b: PaperRecord,
    b_sim: SimilarityFeatures,
    swap_ensemble: bool = False,
) -> JudgeVerdict:
    """Judge one ordered pair, optionally probing positional bias.

    With the ensemble, the swapped query's answer is un-swapped before
    voting: 'A' on the swapped prompt is a vote for the original slot B.
    Disagreement yields decision 'inconsistent'.
    """
    pair_key = f"{a.id}|{b.id}"
    forward = build_pairwise_prompt(a, a_sim, b, b_sim)
    first = client.query(forward, pair_key=pair_key, swapped=False)
    raw_responses = [first]
    if not swap_ensemble:
        return JudgeVerdict(decision=first, raw_responses=tuple(raw_responses), swapped=False)
    backward = build_pairwise_prompt(b, b_sim, a, a_sim)
    second = client.query(backward, pair_key=pair_key, swapped=True)
    raw_responses.append(second)
    unswapped_second = "B" if second == "A" else "A"
    decision = first if first == unswapped_second else "inconsistent"
    return JudgeVerdict(decision=decision, raw_responses=tuple(raw_responses), swapped=True)

"""Report rendering: delimited domain tables plus matplotlib figures.

The report path always writes machine-readable output (JSONL or an
aligned text table) and, alongside it, a per-domain bar chart showing
agreement, the domain's share of the training corpus, and its positive-
label share. Rows keep their input order in both artifacts.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import DomainRow, write_report

FIGURE_DPI = 150


def write_domain_report(
    rows: list[DomainRow],
    out_dir: str | Path,
    fmt: str = "jsonl",
    stem: str = "domain_breakdown",
) -> dict[str, Path]:
    """Write the domain table and its figure; returns the artifact paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    suffix = "jsonl" if fmt == "jsonl" else "txt"
    table_path = out_dir / f"{stem}.{suffix}"
    write_report([r.to_json() for r in rows], table_path, fmt=fmt)
    figure_path = out_dir / f"{stem}.png"
    render_domain_figure(rows, figure_path)
    return {"table": table_path, "figure": figure_path}


def render_domain_figure(rows: list[DomainRow], path: str | Path) -> None:
    """Grouped bars per domain: agreement, training share, positive share."""
    domains = [r.domain for r in rows]
    x = np.arange(len(domains))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(6.0, 1.4 * len(domains)), 4.0))
    ax.bar(x - width, [r.agreement for r in rows], width, label="test agreement", color="#3b6fb6")
    ax.bar(x, [r.train_share for r in rows], width, label="train share", color="#d8973c")
    ax.bar(x + width, [r.train_positive_share for r in rows], width, label="train positive share", color="#6aa56e")
    ax.set_xticks(x)
    ax.set_xticklabels(domains, rotation=20, ha="right")
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel("fraction")
    ax.set_title("Pairwise agreement by domain vs. training distribution")
    ax.legend(frameon=False, fontsize=8)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=FIGURE_DPI)
    plt.close(fig)

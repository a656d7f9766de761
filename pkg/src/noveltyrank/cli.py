"""Operator command line: the full pipeline from metadata to a running service.

Subcommands map onto the library stages:

  ingest     validate a metadata file, print corpus statistics
  index      build the strictly-prior similarity index, persist its inputs
  featurize  export per-paper similarity features (+ optional fused check)
  pairs      sample training pairs or enumerate dense evaluation pairs
  train      train the classification or ranking head, write a checkpoint
  eval       score a checkpoint: classification metrics or pairwise agreement
  judge      run an external judge endpoint over a pair file
  serve      expose a snapshot directory over HTTP
  report     per-domain breakdown table + figure from an eval decisions file

Exit codes: 0 success, 1 operational failure, 2 usage error. Every run
prints the seed and a digest of its effective configuration so outputs
can be tied back to exact invocations.
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import DEFAULT_CUTOFF, Corpus, load_corpus, save_corpus, corpus_stats, temporal_split
from .embeddings import load_store, save_store
from .fusion import FusionRecipe, batch_assemble, default_recipe
from .heads import (
    ClassifyDataset,
    RankDataset,
    classification_head,
    classify_config,
    load_checkpoint,
    predict,
    rank_config,
    ranking_head,
    save_checkpoint,
    train,
)
from .judge import EndpointConfig, JudgeClient, judge_pair
from .metrics import (
    Decision,
    classification_metrics,
    confusion,
    domain_breakdown,
    format_table,
    pairwise_agreement,
    write_report,
)
from .pairs import dense_eval_pairs, load_pairs, sample_training_pairs, save_pairs
from .simindex import DEFAULT_K, build_index, compute_all_features, read_features, write_features

logger = logging.getLogger(__name__)


class CliError(RuntimeError):
    """Operational failure; rendered to stderr and mapped to exit code 1."""


def _parse_date(raw: str) -> dt.date:
    try:
        return dt.date.fromisoformat(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid date {raw!r}, expected YYYY-MM-DD")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noveltyrank",
        description="Novelty estimation pipeline: ingest, retrieve, fuse, train, evaluate, serve.",
    )
    parser.add_argument("--version", action="version", version=f"noveltyrank {__version__}")
    parser.add_argument("--json-errors", action="store_true", help="emit errors as JSON on stderr")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", help="validate a metadata file and print stats")
    p.add_argument("--corpus", required=True, help="metadata JSONL file")
    p.add_argument("--out", help="write the normalized corpus here")
    p.add_argument("--format", choices=("jsonl", "table"), default="table")

    p = sub.add_parser("index", help="build the strictly-prior similarity index")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True, help="directory with channel file pairs")
    p.add_argument("--channel", choices=("classification", "proximity"), default="proximity")
    p.add_argument("--out", required=True, help="directory for the index bundle")

    p = sub.add_parser("featurize", help="export similarity features per paper")
    p.add_argument("--corpus")
    p.add_argument("--embeddings")
    p.add_argument("--index", help="index bundle directory (alternative to --corpus/--embeddings)")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--out", required=True)

    p = sub.add_parser("pairs", help="generate comparison pairs")
    p.add_argument("--corpus", required=True)
    p.add_argument("--cutoff", type=_parse_date, default=DEFAULT_CUTOFF)
    p.add_argument("--split", choices=("train", "test", "all"), help="corpus side to draw from")
    p.add_argument("--dense", action="store_true", help="dense evaluation pairs instead of sampled")
    p.add_argument("--ratio", type=int, default=5, help="negatives per positive (sampled mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train a head and write a checkpoint")
    p.add_argument("--task", choices=("classify", "rank"), required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--features", required=True, help="featurize output for these papers")
    p.add_argument("--pairs", help="training pair file (rank task)")
    p.add_argument("--cutoff", type=_parse_date, default=DEFAULT_CUTOFF)
    p.add_argument("--split", choices=("train", "test", "all"), default="train")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoint", required=True, help="output checkpoint path")

    p = sub.add_parser("eval", help="evaluate a checkpoint")
    p.add_argument("--task", choices=("classify", "rank"), required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--pairs", help="evaluation pair file (rank task)")
    p.add_argument("--cutoff", type=_parse_date, default=DEFAULT_CUTOFF)
    p.add_argument("--split", choices=("train", "test", "all"), default="test")
    p.add_argument("--out", help="metrics report file")
    p.add_argument("--format", choices=("jsonl", "table"), default="table")
    p.add_argument("--decisions", help="write per-pair decisions here (rank task)")

    p = sub.add_parser("judge", help="query an external judge over a pair file")
    p.add_argument("--pairs", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--endpoint", required=True, help="judge endpoint URL")
    p.add_argument("--model", default="judge")
    p.add_argument("--swap-ensemble", action="store_true")
    p.add_argument("--out", help="audit log path (JSONL)")
    p.add_argument("--decisions", help="write per-pair decisions here")
    p.add_argument("--limit", type=int, help="judge only the first N pairs")

    p = sub.add_parser("serve", help="serve a snapshot directory over HTTP")
    p.add_argument("--snapshot")
    p.add_argument("--listen", help="host:port (default 127.0.0.1:8000)")
    p.add_argument("--config", help="JSON config file (also via NOVELTYRANK_CONFIG)")

    p = sub.add_parser("report", help="domain breakdown table + figure")
    p.add_argument("--decisions", required=True, help="decisions JSONL from eval/judge")
    p.add_argument("--corpus", required=True, help="corpus supplying training statistics")
    p.add_argument("--cutoff", type=_parse_date, help="restrict training stats to this side")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=("jsonl", "table"), default="jsonl")

    return parser


def _config_digest(args: argparse.Namespace) -> str:
    payload = {k: str(v) for k, v in sorted(vars(args).items()) if k != "json_errors"}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def _announce(args: argparse.Namespace) -> None:
    seed = getattr(args, "seed", None)
    print(f"run: subcommand={args.subcommand} seed={seed} config_digest={_config_digest(args)}")


def _split_corpus(corpus: Corpus, split: str | None, cutoff: dt.date) -> Corpus:
    if split in (None, "all"):
        return corpus
    train_side, test_side = temporal_split(corpus, cutoff)
    return train_side if split == "train" else test_side


def _load_stores(directory: str) -> dict:
    return {channel: load_store(directory, channel) for channel in ("classification", "proximity")}


def _feature_vectors(corpus, stores, features_path, recipe):
    sims = read_features(features_path, stores["proximity"])
    missing = [pid for pid in corpus.ids() if pid not in sims]
    if missing:
        raise CliError(f"features file lacks entries for {len(missing)} papers, e.g. {missing[0]!r}")
    return batch_assemble(corpus, stores, sims, recipe)


def cmd_ingest(args) -> int:
    corpus = load_corpus(args.corpus)
    stats = corpus_stats(corpus)
    if args.format == "jsonl":
        print(json.dumps(stats.to_json()))
    else:
        rows = [
            {"domain": d, "positives": p, "negatives": n, "total": p + n}
            for d, (p, n) in stats.per_domain.items()
        ]
        print(
            f"papers={stats.total} positives={stats.positives} "
            f"ratio={stats.positive_ratio:.4f} dates={stats.date_min}..{stats.date_max}"
        )
        if rows:
            print(format_table(rows, ["domain", "positives", "negatives", "total"]), end="")
    if args.out:
        save_corpus(corpus, args.out)
        print(f"wrote normalized corpus to {args.out}")
    return 0


def cmd_index(args) -> int:
    corpus = load_corpus(args.corpus)
    store = load_store(args.embeddings, args.channel)
    build_index(corpus, store)  # validates coverage and dimensions
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(corpus, out / "corpus.jsonl")
    save_store(store, out)
    print(f"indexed {len(corpus)} papers (dim {store.dim}) into {out}")
    return 0


def cmd_featurize(args) -> int:
    if args.index:
        corpus = load_corpus(Path(args.index) / "corpus.jsonl")
        store = load_store(args.index, "proximity")
    elif args.corpus and args.embeddings:
        corpus = load_corpus(args.corpus)
        store = load_store(args.embeddings, "proximity")
    else:
        raise CliError("featurize needs --index or both --corpus and --embeddings")
    index = build_index(corpus, store)
    features = compute_all_features(index, store, k=args.k)
    write_features(features, args.out)
    print(f"wrote similarity features for {len(features)} papers to {args.out}")
    return 0


def cmd_pairs(args) -> int:
    corpus = load_corpus(args.corpus)
    split = args.split or ("test" if args.dense else "train")
    side = _split_corpus(corpus, split, args.cutoff)
    if args.dense:
        pairset = dense_eval_pairs(side)
    else:
        pairset = sample_training_pairs(side, negatives_per_positive=args.ratio, seed=args.seed)
    save_pairs(pairset, args.out)
    print(f"wrote {len(pairset)} {pairset.provenance} pairs to {args.out}")
    return 0


def cmd_train(args) -> int:
    corpus = load_corpus(args.corpus)
    stores = _load_stores(args.embeddings)
    recipe = default_recipe(stores["classification"].dim)
    if args.task == "classify":
        cfg = classify_config(seed=args.seed, epochs=args.epochs, learning_rate=args.lr, batch_size=args.batch)
        side = _split_corpus(corpus, args.split, args.cutoff)
        if len(side) == 0:
            raise CliError(f"no papers in the {args.split} split")
        feats = _feature_vectors(side, stores, args.features, recipe)
        ids = side.ids()
        data = ClassifyDataset(
            x=np.stack([feats[pid].values for pid in ids]),
            y=np.array([side.get(pid).label for pid in ids], dtype=np.int64),
            recipe_hash=recipe.hash,
        )
        head = classification_head(recipe.expected_dim, seed=args.seed, recipe_hash=recipe.hash)
    else:
        if not args.pairs:
            raise CliError("rank training needs --pairs")
        cfg = rank_config(seed=args.seed, epochs=args.epochs, learning_rate=args.lr, batch_size=args.batch)
        pairset = load_pairs(args.pairs)
        if len(pairset) == 0:
            raise CliError("empty pair file")
        pair_ids = sorted({pid for pair in pairset for pid in (pair.a_id, pair.b_id)})
        sub = Corpus.from_records([corpus.get(pid) for pid in pair_ids])
        feats = _feature_vectors(sub, stores, args.features, recipe)
        data = RankDataset(
            x_a=np.stack([feats[pair.a_id].values for pair in pairset]),
            x_b=np.stack([feats[pair.b_id].values for pair in pairset]),
            y=np.array([1.0 if pair.gold == "A" else 0.0 for pair in pairset]),
            recipe_hash=recipe.hash,
        )
        head = ranking_head(recipe.expected_dim, seed=args.seed, recipe_hash=recipe.hash)
    head, history = train(head, data, cfg, task=args.task)
    save_checkpoint(args.checkpoint, head, recipe=recipe)
    print(
        f"trained {args.task} head on {len(data)} examples, "
        f"final epoch loss {history[-1]:.6f}, checkpoint at {args.checkpoint}"
    )
    return 0


def cmd_eval(args) -> int:
    head, recipe, _ = load_checkpoint(args.checkpoint)
    if recipe is None:
        raise CliError("checkpoint carries no fusion recipe; cannot assemble features")
    if head.task != args.task:
        raise CliError(f"checkpoint task {head.task!r} does not match --task {args.task!r}")
    corpus = load_corpus(args.corpus)
    stores = _load_stores(args.embeddings)
    if args.task == "classify":
        side = _split_corpus(corpus, args.split, args.cutoff)
        if len(side) == 0:
            raise CliError(f"no papers in the {args.split} split")
        feats = _feature_vectors(side, stores, args.features, recipe)
        predictions = {}
        for pid in side.ids():
            label, _ = predict(head, feats[pid].values)
            predictions[pid] = int(label)
        labels = {pid: side.get(pid).label for pid in side.ids()}
        m = classification_metrics(confusion(predictions, labels))
        rows = [m.to_json()]
        print(
            f"accuracy={m.accuracy:.4f} precision={m.precision:.4f} "
            f"recall={m.recall:.4f} f1={m.f1:.4f} (n={len(side)})"
        )
    else:
        if not args.pairs:
            raise CliError("rank evaluation needs --pairs")
        pairset = load_pairs(args.pairs)
        if len(pairset) == 0:
            raise CliError("empty pair file")
        pair_ids = sorted({pid for pair in pairset for pid in (pair.a_id, pair.b_id)})
        sub = Corpus.from_records([corpus.get(pid) for pid in pair_ids])
        feats = _feature_vectors(sub, stores, args.features, recipe)
        decisions = []
        for pair in pairset:
            score_a = float(predict(head, feats[pair.a_id].values))
            score_b = float(predict(head, feats[pair.b_id].values))
            predicted = "A" if score_a >= score_b else "B"
            decisions.append(Decision(gold=pair.gold, predicted=predicted, domain=pair.domain))
        report = pairwise_agreement(decisions)
        rows = [
            {"domain": d, "agreement": a, "pairs": n} for d, (a, n) in report.per_domain.items()
        ]
        rows.insert(0, {"domain": "(overall)", "agreement": report.overall, "pairs": report.total})
        print(f"agreement={report.overall:.4f} pairs={report.total}")
        if args.decisions:
            with open(args.decisions, "w", encoding="utf-8") as fh:
                for pair, dec in zip(pairset, decisions):
                    fh.write(
                        json.dumps(
                            {
                                "a_id": pair.a_id,
                                "b_id": pair.b_id,
                                "domain": pair.domain,
                                "gold": dec.gold,
                                "predicted": dec.predicted,
                            }
                        )
                        + "\n"
                    )
            print(f"wrote decisions to {args.decisions}")
    if args.out:
        write_report(rows, args.out, fmt=args.format)
        print(f"wrote report to {args.out}")
    return 0


def cmd_judge(args) -> int:
    corpus = load_corpus(args.corpus)
    store = load_store(args.embeddings, "proximity")
    sims = read_features(args.features, store)
    pairset = load_pairs(args.pairs)
    pairs = list(pairset)
    if args.limit is not None:
        pairs = pairs[: args.limit]
    if not pairs:
        raise CliError("no pairs to judge")
    config = EndpointConfig(url=args.endpoint, model=args.model)
    decisions = []
    with JudgeClient(config) as client:
        for pair in pairs:
            verdict = judge_pair(
                client,
                corpus.get(pair.a_id),
                sims[pair.a_id],
                corpus.get(pair.b_id),
                sims[pair.b_id],
                swap_ensemble=args.swap_ensemble,
            )
            predicted = verdict.decision if verdict.decision in ("A", "B") else None
            decisions.append((pair, Decision(gold=pair.gold, predicted=predicted, domain=pair.domain)))
        if args.out:
            client.write_audit_log(args.out)
            print(f"wrote audit log to {args.out}")
    report = pairwise_agreement([d for _, d in decisions])
    print(
        f"agreement={report.overall:.4f} pairs={report.total} "
        f"inconsistent={report.inconsistent_count}"
    )
    if args.decisions:
        with open(args.decisions, "w", encoding="utf-8") as fh:
            for pair, dec in decisions:
                fh.write(
                    json.dumps(
                        {
                            "a_id": pair.a_id,
                            "b_id": pair.b_id,
                            "domain": pair.domain,
                            "gold": dec.gold,
                            "predicted": dec.predicted,
                        }
                    )
                    + "\n"
                )
        print(f"wrote decisions to {args.decisions}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_snapshot, resolve_config

    settings = resolve_config(
        flags={"listen": args.listen, "snapshot": args.snapshot},
        config_path=args.config,
    )
    if not settings.get("snapshot"):
        raise CliError("serve needs a snapshot (flag --snapshot, env NOVELTYRANK_SNAPSHOT, or config file)")
    snapshot = load_snapshot(settings["snapshot"])
    app = create_app(snapshot)
    host, _, port = str(settings["listen"]).partition(":")
    print(f"serving snapshot {snapshot.version} on {settings['listen']}")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="warning")
    return 0


def cmd_report(args) -> int:
    from .reporting import write_domain_report

    decisions = []
    with open(args.decisions, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            decisions.append(
                Decision(gold=obj["gold"], predicted=obj.get("predicted"), domain=obj.get("domain"))
            )
    if not decisions:
        raise CliError("decisions file is empty")
    corpus = load_corpus(args.corpus)
    if args.cutoff:
        corpus, _ = temporal_split(corpus, args.cutoff)
    rows = domain_breakdown(decisions, corpus_stats(corpus))
    paths = write_domain_report(rows, args.out, fmt=args.format)
    print(f"wrote {paths['table']} and {paths['figure']}")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "index": cmd_index,
    "featurize": cmd_featurize,
    "pairs": cmd_pairs,
    "train": cmd_train,
    "eval": cmd_eval,
    "judge": cmd_judge,
    "serve": cmd_serve,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    _announce(args)
    try:
        return _COMMANDS[args.subcommand](args)
    except Exception as exc:  # operational failures -> exit 1
        if args.json_errors:
            body = {"error": {"code": type(exc).__name__, "message": str(exc)}}
            print(json.dumps(body), file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

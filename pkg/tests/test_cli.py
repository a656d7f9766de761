import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from noveltyrank.cli import main
from noveltyrank.synthetic import write_fixture


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipeline")
    write_fixture(root, n=160, dim=24, seed=5, separable=True)
    return root


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli("ingest", "--corpus", "x.jsonl", "--frobnicate")
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        run_cli("transmogrify")
    assert exc.value.code == 2


def test_missing_file_exits_1(tmp_path, capsys):
    assert run_cli("ingest", "--corpus", tmp_path / "absent.jsonl") == 1
    assert "error:" in capsys.readouterr().err


def test_json_errors_flag(tmp_path, capsys):
    assert run_cli("--json-errors", "ingest", "--corpus", tmp_path / "absent.jsonl") == 1
    err = capsys.readouterr().err
    assert json.loads(err)["error"]["code"]


def test_run_announces_seed_and_digest(fixture_dir, capsys):
    assert run_cli("ingest", "--corpus", fixture_dir / "corpus.jsonl") == 0
    out = capsys.readouterr().out
    assert "subcommand=ingest" in out
    assert "config_digest=" in out


def test_pairs_deterministic_files(fixture_dir, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run_cli("pairs", "--corpus", fixture_dir / "corpus.jsonl", "--ratio", 5, "--seed", 7, "--out", a) == 0
    assert run_cli("pairs", "--corpus", fixture_dir / "corpus.jsonl", "--ratio", 5, "--seed", 7, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()


class _StubJudge(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        # name the slot whose block contains a positive ("novel") abstract
        a_block = body["user"].split("### Paper B")[0]
        verdict = "A" if "(novel)" in a_block else "B"
        payload = json.dumps({"text": verdict}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture(scope="module")
def stub_judge_url():
    server = HTTPServer(("127.0.0.1", 0), _StubJudge)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/complete"
    server.shutdown()


def test_pipeline_closure(fixture_dir, tmp_path, capsys, stub_judge_url):
    """ingest -> index -> featurize -> pairs -> train -> eval -> judge -> report,
    every artifact consumed by the next stage untouched."""
    corpus = fixture_dir / "corpus.jsonl"
    embeddings = fixture_dir / "embeddings"
    index_dir = tmp_path / "index"
    features = tmp_path / "features.jsonl"
    train_pairs = tmp_path / "train_pairs.jsonl"
    eval_pairs = tmp_path / "eval_pairs.jsonl"
    rank_ckpt = tmp_path / "rank.nvrm"
    classify_ckpt = tmp_path / "classify.nvrm"
    decisions = tmp_path / "decisions.jsonl"
    report_file = tmp_path / "rank_report.jsonl"

    assert run_cli("ingest", "--corpus", corpus) == 0
    assert run_cli("index", "--corpus", corpus, "--embeddings", embeddings, "--out", index_dir) == 0
    assert run_cli("featurize", "--index", index_dir, "--k", 10, "--out", features) == 0
    assert run_cli("pairs", "--corpus", corpus, "--ratio", 5, "--seed", 3, "--out", train_pairs) == 0
    assert run_cli("pairs", "--corpus", corpus, "--dense", "--out", eval_pairs) == 0

    assert (
        run_cli(
            "train", "--task", "rank", "--corpus", corpus, "--embeddings", embeddings,
            "--features", features, "--pairs", train_pairs, "--lr", 0.02, "--seed", 3,
            "--checkpoint", rank_ckpt,
        )
        == 0
    )
    assert rank_ckpt.exists()

    assert (
        run_cli(
            "eval", "--task", "rank", "--checkpoint", rank_ckpt, "--corpus", corpus,
            "--embeddings", embeddings, "--features", features, "--pairs", eval_pairs,
            "--decisions", decisions, "--out", report_file, "--format", "jsonl",
        )
        == 0
    )
    rows = [json.loads(l) for l in report_file.read_text().splitlines()]
    overall = next(r for r in rows if r["domain"] == "(overall)")
    assert overall["agreement"] >= 0.95
    assert overall["pairs"] > 0

    assert (
        run_cli(
            "train", "--task", "classify", "--corpus", corpus, "--embeddings", embeddings,
            "--features", features, "--lr", 0.01, "--seed", 4, "--checkpoint", classify_ckpt,
        )
        == 0
    )
    assert (
        run_cli(
            "eval", "--task", "classify", "--checkpoint", classify_ckpt, "--corpus", corpus,
            "--embeddings", embeddings, "--features", features,
            "--out", tmp_path / "classify_report.jsonl", "--format", "jsonl",
        )
        == 0
    )
    classify_rows = [json.loads(l) for l in (tmp_path / "classify_report.jsonl").read_text().splitlines()]
    assert 0.0 <= classify_rows[0]["accuracy"] <= 1.0

    audit = tmp_path / "audit.jsonl"
    judge_decisions = tmp_path / "judge_decisions.jsonl"
    assert (
        run_cli(
            "judge", "--pairs", eval_pairs, "--corpus", corpus, "--embeddings", embeddings,
            "--features", features, "--endpoint", stub_judge_url, "--limit", 12,
            "--swap-ensemble", "--out", audit, "--decisions", judge_decisions,
        )
        == 0
    )
    assert len(audit.read_text().splitlines()) == 24  # two queries per pair
    judged = [json.loads(l) for l in judge_decisions.read_text().splitlines()]
    assert all(d["predicted"] == d["gold"] for d in judged)  # content-aware stub

    report_dir = tmp_path / "report"
    assert (
        run_cli(
            "report", "--decisions", decisions, "--corpus", corpus,
            "--cutoff", "2025-03-15", "--out", report_dir,
        )
        == 0
    )
    assert (report_dir / "domain_breakdown.jsonl").exists()
    figure = report_dir / "domain_breakdown.png"
    assert figure.exists() and figure.stat().st_size > 1000
    breakdown = [json.loads(l) for l in (report_dir / "domain_breakdown.jsonl").read_text().splitlines()]
    assert all(set(r) == {"domain", "agreement", "pairs", "train_share", "train_positive_share"} for r in breakdown)


def test_train_rank_requires_pairs(fixture_dir, tmp_path):
    code = run_cli(
        "train", "--task", "rank", "--corpus", fixture_dir / "corpus.jsonl",
        "--embeddings", fixture_dir / "embeddings", "--features", tmp_path / "none.jsonl",
        "--checkpoint", tmp_path / "x.nvrm",
    )
    assert code == 1


def test_serve_without_snapshot_exits_1(capsys, monkeypatch):
    monkeypatch.delenv("NOVELTYRANK_SNAPSHOT", raising=False)
    monkeypatch.delenv("NOVELTYRANK_CONFIG", raising=False)
    assert run_cli("serve") == 1
    assert "snapshot" in capsys.readouterr().err

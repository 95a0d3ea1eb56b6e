"""
Tests for the gamsum command line.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List

import pandas as pd
import pytest

from src.cli.commands import COMMANDS
from src.cli.main import EXIT_ERROR, EXIT_OK, EXIT_USAGE, build_parser, build_run_config, dispatch
from src.config.settings import ModelKind
from src.corpus.loader import load_split
from src.corpus.persistence import load_model
from src.errors import SchemaError
from src.features.extraction import FEATURE_NAMES

SMALL_EBM = [
    "--set", "ebm.rounds=20",
    "--set", "ebm.bags=2",
    "--set", "ebm.interactions=2",
    "--set", "ebm.interaction_rounds=10",
    "--set", "ebm.max_bins=16",
]


@pytest.fixture(autouse=True)
def detach_cli_handlers():
    """Drop the handlers installed by dispatch."""
    yield
    logger = logging.getLogger("gamsum")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)


class TestUsage:
    """Tests for argument errors and exit codes."""

    def test_no_subcommand(self) -> None:
        assert dispatch([]) == EXIT_USAGE

    def test_missing_input_file(self, tmp_path: Path) -> None:
        assert dispatch(["label", "--corpus", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "x.tsv")]) == EXIT_USAGE

    def test_unknown_model_kind(self, mini_corpus_path: Path, tmp_path: Path) -> None:
        assert dispatch(["train", "--model", "forest", "--dataset", str(mini_corpus_path), "--out", "m.json"]) == EXIT_USAGE

    def test_subset_needs_split(self, mini_corpus_path: Path, tmp_path: Path) -> None:
        argv = ["label", "--corpus", str(mini_corpus_path), "--subset", "train", "--out", str(tmp_path / "x.tsv")]
        assert dispatch(argv) == EXIT_USAGE

    def test_bad_override(self, mini_corpus_path: Path, tmp_path: Path) -> None:
        argv = ["label", "--corpus", str(mini_corpus_path), "--out", str(tmp_path / "x.tsv"), "--set", "ebm.rounds=-4"]
        assert dispatch(argv) == EXIT_USAGE

    def test_bad_budget(self, mini_corpus_path: Path, tmp_path: Path) -> None:
        argv = ["label", "--corpus", str(mini_corpus_path), "--out", str(tmp_path / "x.tsv"), "--budget", "lines:3"]
        assert dispatch(argv) == EXIT_USAGE

    def test_broken_corpus(self, tmp_path: Path) -> None:
        corpus = tmp_path / "broken.jsonl"
        corpus.write_text('{"id": "a", "body": "One sentence."\n', encoding="utf-8")
        assert dispatch(["ingest", "--corpus", str(corpus), "--out-dir", str(tmp_path / "out")]) == EXIT_ERROR

    def test_domain_error_exits_one(self, mocker, mini_corpus_path: Path, tmp_path: Path) -> None:
        failing = mocker.Mock(side_effect=SchemaError("bad dump"))
        mocker.patch.dict(COMMANDS, {"label": failing})
        argv = ["label", "--corpus", str(mini_corpus_path), "--out", str(tmp_path / "x.tsv")]
        assert dispatch(argv) == EXIT_ERROR
        failing.assert_called_once()


class TestRunConfig:
    """Tests for turning arguments into a RunConfig."""

    def test_seed_reaches_every_section(self, mini_corpus_path: Path) -> None:
        args = build_parser().parse_args(
            ["train", "--model", "gaminet", "--dataset", str(mini_corpus_path), "--out", "m.json", "--seed", "9"]
        )
        config = build_run_config(args)
        assert config.model_kind is ModelKind.GAMINET
        assert (config.seed, config.settings.ebm.seed, config.settings.gaminet.seed) == (9, 9, 9)
        assert config.inputs == {"dataset": str(mini_corpus_path)}
        assert config.outputs == {"out": "m.json"}

    def test_budget_and_options(self, mini_corpus_path: Path) -> None:
        args = build_parser().parse_args(
            ["summarize", "--corpus", str(mini_corpus_path), "--baseline", "lead", "--budget", "words:80", "--out", "s.jsonl"]
        )
        config = build_run_config(args)
        assert config.budget == "words:80"
        assert config.options["baseline"] == "lead"
        assert config.model_kind is None


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory: pytest.TempPathFactory) -> Dict[str, Path]:
    """Run ingest, label, train and summarize once on the mini corpus."""
    corpus = Path(__file__).parent / "fixtures" / "mini_corpus.jsonl"
    work = tmp_path_factory.mktemp("pipeline")
    paths = {
        "corpus": corpus,
        "data": work / "data",
        "split": work / "data" / "split.json",
        "train": work / "train.tsv",
        "test": work / "test.tsv",
        "model": work / "ebm.json",
        "log": work / "ebm_log.tsv",
        "summaries": work / "summaries.jsonl",
        "explain": work / "explain",
        "work": work,
    }
    assert dispatch(["ingest", "--corpus", str(corpus), "--out-dir", str(paths["data"]), "--seed", "1"]) == EXIT_OK
    for subset, out in (("train", paths["train"]), ("test", paths["test"])):
        argv = ["label", "--corpus", str(corpus), "--split", str(paths["split"]), "--subset", subset, "--out", str(out)]
        assert dispatch(argv) == EXIT_OK
    argv = ["train", "--model", "ebm", "--dataset", str(paths["train"]), "--out", str(paths["model"])]
    assert dispatch(argv + ["--log", str(paths["log"]), "--seed", "3"] + SMALL_EBM) == EXIT_OK
    argv = [
        "summarize", "--corpus", str(corpus), "--split", str(paths["split"]), "--subset", "test",
        "--model", str(paths["model"]), "--out", str(paths["summaries"]),
    ]
    assert dispatch(argv) == EXIT_OK
    return paths


def _jsonl(path: Path) -> List[dict]:
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]


class TestPipeline:
    """End-to-end runs of every subcommand."""

    def test_ingest_outputs(self, pipeline: Dict[str, Path]) -> None:
        split = load_split(pipeline["split"])
        assert (len(split.train), len(split.validation), len(split.test)) == (40, 5, 5)
        overview = pd.read_csv(pipeline["data"] / "documents.tsv", sep="\t")
        assert len(overview) == 50
        assert set(overview["part"]) == {"train", "validation", "test"}
        assert len(_jsonl(pipeline["data"] / "corpus.jsonl")) == 50

    def test_label_outputs(self, pipeline: Dict[str, Path]) -> None:
        dump = pd.read_csv(pipeline["test"], sep="\t")
        test_ids = set(load_split(pipeline["split"]).test)
        assert set(dump["doc_id"]) == test_ids
        assert list(dump.columns[:2]) == ["doc_id", "sentence_index"]
        assert set(FEATURE_NAMES) <= set(dump.columns)
        assert set(dump["label"]) <= {0, 1}

    def test_train_outputs(self, pipeline: Dict[str, Path]) -> None:
        model = load_model(pipeline["model"])
        assert model.metadata["model_kind"] == "ebm"
        assert tuple(model.feature_names) == FEATURE_NAMES
        log = pd.read_csv(pipeline["log"], sep="\t")
        assert "mains" in set(log["stage"])

    def test_train_is_deterministic(self, pipeline: Dict[str, Path]) -> None:
        again = pipeline["work"] / "ebm_again.json"
        argv = ["train", "--model", "ebm", "--dataset", str(pipeline["train"]), "--out", str(again), "--seed", "3"]
        assert dispatch(argv + SMALL_EBM + ["--workers", "2"]) == EXIT_OK
        assert again.read_bytes() == pipeline["model"].read_bytes()

    def test_summaries(self, pipeline: Dict[str, Path]) -> None:
        records = _jsonl(pipeline["summaries"])
        assert sorted(r["id"] for r in records) == sorted(load_split(pipeline["split"]).test)
        for record in records:
            assert 1 <= len(record["indices"]) <= 3
            assert record["indices"] == sorted(record["indices"])

    def test_evaluate_summaries(self, pipeline: Dict[str, Path], capsys: pytest.CaptureFixture) -> None:
        report = pipeline["work"] / "report.json"
        table = pipeline["work"] / "report.txt"
        argv = [
            "evaluate", "--corpus", str(pipeline["corpus"]), "--split", str(pipeline["split"]), "--subset", "test",
            "--summaries", str(pipeline["summaries"]), "--out", str(report), "--table", str(table),
        ]
        assert dispatch(argv) == EXIT_OK
        payload = json.loads(report.read_text(encoding="utf-8"))
        assert payload["documents"] == 5
        assert 0.0 < payload["rouge"]["rouge1"] <= 1.0
        assert 0.0 <= payload["f1"] <= 1.0
        assert "rouge1" in capsys.readouterr().out
        assert "rouge1" in table.read_text(encoding="utf-8")

    def test_evaluate_baselines(self, pipeline: Dict[str, Path]) -> None:
        scores = {}
        for baseline in ("lead", "oracle"):
            summaries = pipeline["work"] / f"{baseline}.jsonl"
            report = pipeline["work"] / f"{baseline}.json"
            common = ["--corpus", str(pipeline["corpus"]), "--split", str(pipeline["split"]), "--subset", "test"]
            assert dispatch(["summarize", *common, "--baseline", baseline, "--out", str(summaries)]) == EXIT_OK
            assert dispatch(["evaluate", *common, "--summaries", str(summaries), "--out", str(report)]) == EXIT_OK
            scores[baseline] = json.loads(report.read_text(encoding="utf-8"))
        assert scores["oracle"]["f1"] == 1.0
        assert scores["lead"]["documents"] == 5
        assert "notices" in scores["lead"]

    def test_evaluate_repeats(self, pipeline: Dict[str, Path]) -> None:
        report = pipeline["work"] / "repeats.json"
        argv = [
            "evaluate", "--corpus", str(pipeline["corpus"]), "--split", str(pipeline["split"]),
            "--model", "logistic", "--repeats", "2", "--out", str(report), "--set", "logistic.max_iter=300",
        ]
        assert dispatch(argv) == EXIT_OK
        payload = json.loads(report.read_text(encoding="utf-8"))
        assert payload["model_kind"] == "logistic"
        assert len(payload["runs"]) == 2
        assert set(payload["mean"]) == {"rouge1", "rouge2", "rougeL", "f1"}

    def test_explain(self, pipeline: Dict[str, Path]) -> None:
        doc_id = load_split(pipeline["split"]).test[0]
        argv = [
            "explain", "--model", str(pipeline["model"]), "--dataset", str(pipeline["test"]),
            "--out-dir", str(pipeline["explain"]), "--doc-id", doc_id,
        ]
        assert dispatch(argv) == EXIT_OK
        model = load_model(pipeline["model"])
        importance = pd.read_csv(pipeline["explain"] / "importance.tsv", sep="\t")
        assert len(importance) == len(model.mains) + len(model.pairs)
        assert importance["ratio"].sum() == pytest.approx(1.0)
        for f in model.mains:
            assert (pipeline["explain"] / f"main_{FEATURE_NAMES[f]}.tsv").is_file()
        local = pd.read_csv(pipeline["explain"] / f"explain_{doc_id}.tsv", sep="\t")
        dump = pd.read_csv(pipeline["test"], sep="\t")
        assert len(local) == int((dump["doc_id"] == doc_id).sum())
        assert {"intercept", "logit", "probability"} <= set(local.columns)

    def test_explain_unknown_document(self, pipeline: Dict[str, Path]) -> None:
        argv = [
            "explain", "--model", str(pipeline["model"]), "--dataset", str(pipeline["test"]),
            "--out-dir", str(pipeline["work"] / "explain2"), "--doc-id", "no-such-doc",
        ]
        assert dispatch(argv) == EXIT_ERROR


class TestBadData:
    """Tests that bad data and unwritable outputs end with exit code 1."""

    def _dump_with_nan(self, pipeline: Dict[str, Path], name: str) -> Path:
        dump = pd.read_csv(pipeline["train"], sep="\t", dtype={"doc_id": str})
        dump.loc[3, "tf_isf"] = float("nan")
        path = pipeline["work"] / name
        dump.to_csv(path, sep="\t", index=False)
        return path

    @pytest.mark.parametrize("kind", ["ebm", "logistic"])
    def test_nan_feature_dump(self, pipeline: Dict[str, Path], kind: str) -> None:
        dataset = self._dump_with_nan(pipeline, f"nan_{kind}.tsv")
        out = pipeline["work"] / f"nan_{kind}.json"
        argv = ["train", "--model", kind, "--dataset", str(dataset), "--out", str(out)]
        assert dispatch(argv + SMALL_EBM) == EXIT_ERROR
        assert not out.exists()

    def test_nan_validation_dump(self, pipeline: Dict[str, Path]) -> None:
        val = self._dump_with_nan(pipeline, "nan_val.tsv")
        out = pipeline["work"] / "nan_val.json"
        argv = ["train", "--model", "logistic", "--dataset", str(pipeline["train"]), "--val-dataset", str(val)]
        assert dispatch(argv + ["--out", str(out)]) == EXIT_ERROR
        assert not out.exists()

    def test_fractional_labels(self, pipeline: Dict[str, Path]) -> None:
        dump = pd.read_csv(pipeline["train"], sep="\t", dtype={"doc_id": str})
        dump["label"] = dump["label"].astype(float)
        dump.loc[0, "label"] = 0.5
        dataset = pipeline["work"] / "half_label.tsv"
        dump.to_csv(dataset, sep="\t", index=False)
        argv = ["train", "--model", "logistic", "--dataset", str(dataset), "--out", str(pipeline["work"] / "half.json")]
        assert dispatch(argv) == EXIT_ERROR

    def test_unwritable_output(self, mini_corpus_path: Path, tmp_path: Path) -> None:
        out = tmp_path / "missing" / "dir" / "x.tsv"
        assert dispatch(["label", "--corpus", str(mini_corpus_path), "--out", str(out)]) == EXIT_ERROR

    def test_train_is_timed(self, pipeline: Dict[str, Path], caplog: pytest.LogCaptureFixture) -> None:
        out = pipeline["work"] / "timed_logistic.json"
        argv = ["train", "--model", "logistic", "--dataset", str(pipeline["train"]), "--out", str(out)]
        with caplog.at_level(logging.INFO, logger="gamsum"):
            assert dispatch(argv + ["--set", "logistic.max_iter=50"]) == EXIT_OK
        assert any(message.startswith("train finished in") for message in caplog.messages)

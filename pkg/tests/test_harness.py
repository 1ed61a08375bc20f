import filecmp
import math

import numpy as np
import pytest

from nfpt.generators import dataset_spec
from nfpt.harness import (
    ConfigError,
    ExperimentConfig,
    MetricRow,
    aggregate,
    emit_report,
    format_gap,
    gap_percent,
    load_config,
    load_dataset,
    make_dataset,
    parse_config_text,
    read_csv_report,
    run_experiment,
    run_instance,
    run_instances,
    worker_count,
)

from helpers import small_corpus


def _tiny_corpus(count=8, seed=21):
    return [("tiny", [(f"g{i}", g, i) for i, g in enumerate(small_corpus(count, n_max=20, seed=seed))])]


def test_gap_formula():
    assert gap_percent("mis", 9, 10) == pytest.approx(10.0)
    assert gap_percent("mvc", 11, 10) == pytest.approx(10.0)
    assert gap_percent("maxcut", 101, 100) == pytest.approx(-1.0)
    assert gap_percent("mis", 0, 0) == 0.0
    assert math.isinf(gap_percent("mvc", 3, 0))


def test_gap_two_decimals_keep_sign():
    assert format_gap(-1.3849) == "-1.38"
    assert format_gap(0.0) == "0.00"
    assert format_gap(12.346) == "12.35"


@pytest.mark.parametrize("kind", ["mis", "mvc", "maxcut"])
def test_tdpa_dominates_oracle_per_instance(kind):
    cfg = ExperimentConfig(problem=kind, eta=3, seeds=3, bestof=4)
    for res in run_instances(cfg, _tiny_corpus()):
        assert res.exact and res.error is None
        for mine, theirs in ((res.avg["TDPA"], res.avg["ORACLE"]), ([res.best["TDPA"]], [res.best["ORACLE"]])):
            for a, b in zip(mine, theirs):
                assert gap_percent(kind, a, res.opt) <= gap_percent(kind, b, res.opt)
        assert gap_percent(kind, res.best["RT"], res.opt) <= gap_percent(kind, res.best["RD"], res.opt)


def test_perfect_advice_gives_zero_gap():
    cfg = ExperimentConfig(problem="mvc", eta=2, seeds=2, bestof=2, oracle="perfect", methods=["TDPA"])
    rows = run_experiment(cfg, _tiny_corpus(5))
    assert rows and all(r.gap == 0.0 for r in rows)


def test_empty_method_list():
    assert run_experiment(ExperimentConfig(methods=[]), _tiny_corpus(2)) == []
    assert emit_report([], "text").startswith("Method")


def test_oracle_failure_is_recorded(caplog):
    cfg = ExperimentConfig(problem="mis", eta=2, seeds=1, bestof=1, oracle="stub:adjacent", methods=["ORACLE"])
    results = run_instances(cfg, _tiny_corpus(2))
    assert all(r.error and "infeasible" in r.error for r in results)
    assert aggregate(cfg, results) == []
    assert "skipped" in caplog.text


def test_csv_round_trip(tmp_path):
    row = MetricRow("ER_desk", "best", "RT", 21.5, -1.3849, [20.0, 23.0], 0.01, 0.02)
    text = emit_report([row], "csv", tmp_path / "r.csv")
    assert len(text.strip().splitlines()) == 2
    assert read_csv_report((tmp_path / "r.csv").read_text()) == [row]


def test_text_table_layout():
    rows = [
        MetricRow("A", "avg", "ORACLE", 10.0, 5.0, [10.0]),
        MetricRow("A", "avg", "TDPA", 10.5, 0.25, [10.5]),
        MetricRow("A", "best", "RT", 11.0, -1.384, [11.0]),
    ]
    text = emit_report(rows, "text")
    assert "+Tdpa" in text and "-1.38" in text and "[best-of-N]" in text
    with pytest.raises(ValueError):
        emit_report(rows, "xml")
    with pytest.raises(ValueError):
        emit_report([], "csv", allow_empty=False)


def test_dataset_files_reproducible(tmp_path):
    spec = dataset_spec("WS_desk", 5)
    a = make_dataset(spec, 3, tmp_path / "a", "WS_desk")
    make_dataset(spec, 3, tmp_path / "b", "WS_desk")
    cmp = filecmp.dircmp(tmp_path / "a", tmp_path / "b")
    assert not cmp.diff_files and not cmp.left_only
    name, items = load_dataset(tmp_path / "a")
    assert name == "WS_desk" and len(items) == 3
    assert a["mean_n"] == pytest.approx(np.mean([g.n for _, g, _ in items]))


def test_empty_dataset(tmp_path):
    manifest = make_dataset(dataset_spec("BA_desk"), 0, tmp_path)
    assert manifest["instances"] == [] and manifest["mean_n"] == 0.0


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "exp.conf"
    path.write_text("# desk run\ndatasets = BA_desk, Reg_desk\nproblem = maxcut\nicl.k = 6\nrd.rho = 0.5\n")
    cfg = load_config(path, {"icl.k": 4, "seeds": None})
    assert cfg.datasets == ["BA_desk", "Reg_desk"]
    assert cfg.target_eta == 6
    assert cfg.icl.k == 4 and cfg.icl.kappa == 2
    assert cfg.rd.rho == 0.5 and cfg.rd.rounds == cfg.bestof


@pytest.mark.parametrize("text", ["nonsense = 1", "just words", "methods = ORACLE,FOO", "seeds = x", "format = xml"])
def test_bad_config(text):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping(parse_config_text(text))


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("NFPT_THREADS", "2")
    assert worker_count(8) == 2
    monkeypatch.delenv("NFPT_THREADS")
    assert worker_count(3) == 3


def test_parallel_matches_serial(monkeypatch):
    monkeypatch.delenv("NFPT_THREADS", raising=False)
    corpus = _tiny_corpus(4)
    serial = run_instances(ExperimentConfig(eta=3, seeds=2, bestof=2), corpus)
    parallel = run_instances(ExperimentConfig(eta=3, seeds=2, bestof=2, threads=2), corpus)
    assert [(r.avg, r.best, r.opt) for r in serial] == [(r.avg, r.best, r.opt) for r in parallel]


def test_named_dataset_resolution():
    cfg = ExperimentConfig(datasets=["Reg_desk"], count=2, eta=3, seeds=2, bestof=2)
    rows = run_experiment(cfg)
    assert {r.dataset for r in rows} == {"Reg_desk"}
    res = run_instance(cfg, "x", "y", small_corpus(1)[0], 0)
    assert res.timing["prep_s"] >= 0 and res.modulator_method in ("exact", "greedy")

"""Datasets, the method ladder, gap metrics and report rendering.

Methods (each scored per instance against a reference optimum):

* ``ORACLE`` - the oracle's own trajectory
* ``TDPA``   - that trajectory restricted to the modulator, completed by the DP
* ``ICL``    - incremental-confidence committed state, completed once by the oracle
* ``IT``     - ICL advice completed by the DP
* ``RD``     - best of N randomized-deferral trajectories
* ``RT``     - best DP completion over the N deferral advice strings

``avg`` rows average single runs over ``seeds`` seeds (ORACLE, TDPA, ICL,
IT); ``best`` rows take the best of ``bestof`` runs (ORACLE, TDPA, RD, RT).
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import io
import json
import logging
import os
import time
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .exact import reference_opt
from .generators import GenSpec, dataset_spec, generate, instance_specs, mix
from .graph import Graph, ProblemKind, evaluate, read_graph, write_graph
from .meta import IclParams, RdParams, icl_run, rd_run
from .modulator import DEFAULT_ETA, select_modulator
from .oracles import OracleCall, OracleError, advice_from, make_oracle
from .tdpa import TdpaSolver
from .treedecomp import decompose

log = logging.getLogger(__name__)

METHODS = ("ORACLE", "TDPA", "ICL", "IT", "RD", "RT")
AVG_METHODS = ("ORACLE", "TDPA", "ICL", "IT")
BEST_METHODS = ("ORACLE", "TDPA", "RD", "RT")
METHOD_LABELS = {"ORACLE": "Oracle", "TDPA": "+Tdpa", "ICL": "+Icl", "IT": "+IT", "RD": "+Rd", "RT": "+RT"}


# -- configuration ----------------------------------------------------------

# key -> (parser, default, description)
CONFIG_KEYS: dict[str, tuple[Any, Any, str]] = {
    "datasets": (lambda s: [x.strip() for x in s.split(",") if x.strip()], [], "dataset names or directories, comma separated"),
    "count": (int, 100, "instances generated per named dataset when no directory is given"),
    "problem": (ProblemKind.parse, ProblemKind.MIS, "mis, mvc or maxcut"),
    "eta": (int, None, "target width; defaults to 10 for mis/mvc and 6 for maxcut"),
    "methods": (lambda s: [x.strip().upper() for x in s.split(",") if x.strip()], list(METHODS), "subset of ORACLE,TDPA,ICL,IT,RD,RT"),
    "seeds": (int, 20, "runs averaged for avg rows"),
    "bestof": (int, 20, "runs per instance for best rows"),
    "oracle": (str, "random-greedy", "random-greedy, perfect, stub[:mode] or cmd:<command>"),
    "oracle_timeout": (float, 30.0, "seconds to wait for an external oracle reply"),
    "icl.k": (int, 8, "trajectories per confidence round"),
    "icl.kappa": (int, None, "vote threshold; defaults to ceil(k/2)"),
    "icl.max_rounds": (int, 16, "confidence rounds before the fallback commit"),
    "rd.rho": (float, 0.25, "fraction of vertices reverted per deferral round"),
    "rd.rounds": (int, None, "deferral rounds; defaults to bestof"),
    "modulator": (str, "auto", "exact, greedy or auto"),
    "modulator_budget": (int, 20_000, "branch-and-bound nodes before auto falls back to greedy"),
    "reference_budget": (int, 1 << 24, "total DP states allowed for the exact reference"),
    "master_seed": (int, 0, "root of every derived seed"),
    "threads": (int, 1, "worker processes (capped by NFPT_THREADS)"),
    "out": (str, "", "output directory for reports"),
    "format": (str, "text", "csv or text"),
}


class ConfigError(ValueError):
    pass


@dataclasses.dataclass
class ExperimentConfig:
    datasets: list[str] = dataclasses.field(default_factory=list)
    count: int = 100
    problem: ProblemKind = ProblemKind.MIS
    eta: int | None = None
    methods: list[str] = dataclasses.field(default_factory=lambda: list(METHODS))
    seeds: int = 20
    bestof: int = 20
    oracle: str = "random-greedy"
    oracle_timeout: float = 30.0
    icl_k: int = 8
    icl_kappa: int | None = None
    icl_max_rounds: int = 16
    rd_rho: float = 0.25
    rd_rounds: int | None = None
    modulator: str = "auto"
    modulator_budget: int = 20_000
    reference_budget: int = 1 << 24
    master_seed: int = 0
    threads: int = 1
    out: str = ""
    format: str = "text"

    def __post_init__(self):
        self.problem = ProblemKind.parse(self.problem)
        self.methods = [m.upper() for m in self.methods]
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}")
        if self.seeds < 1 or self.bestof < 1:
            raise ConfigError("seeds and bestof must be at least 1")
        if self.format not in ("csv", "text"):
            raise ConfigError(f"unknown format {self.format!r}")

    @property
    def target_eta(self) -> int:
        return self.eta if self.eta is not None else DEFAULT_ETA[self.problem.value]

    @property
    def icl(self) -> IclParams:
        return IclParams(self.icl_k, self.icl_kappa, self.icl_max_rounds)

    @property
    def rd(self) -> RdParams:
        return RdParams(self.rd_rho, self.rd_rounds or self.bestof)

    @classmethod
    def from_mapping(cls, values: dict[str, Any]) -> "ExperimentConfig":
        kwargs = {}
        for key, raw in values.items():
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            parse = CONFIG_KEYS[key][0]
            try:
                kwargs[key.replace(".", "_")] = parse(raw) if isinstance(raw, str) else raw
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from None
        return cls(**kwargs)


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def load_config(path=None, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    values: dict[str, Any] = {}
    if path:
        values.update(parse_config_text(Path(path).read_text()))
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    return ExperimentConfig.from_mapping(values)


def worker_count(requested: int) -> int:
    cap = os.environ.get("NFPT_THREADS")
    n = max(1, requested)
    if cap:
        n = min(n, max(1, int(cap)))
    return n


# -- datasets ---------------------------------------------------------------


def make_dataset(spec: GenSpec, count: int, out_dir, name: str | None = None) -> dict:
    """Write ``count`` edge-list files plus ``manifest.json``; returns the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, inst in enumerate(instance_specs(spec, count)):
        g = generate(inst)
        fname = f"graph_{i:04d}.txt"
        write_graph(g, out / fname)
        rows.append({"file": fname, "seed": inst.seed, "n": g.n, "m": g.m})
    manifest = {
        "name": name or f"{spec.family}_{spec.n_range[0]}_{spec.n_range[1]}",
        "family": spec.family,
        "n_range": list(spec.n_range),
        "params": {k: list(v) if isinstance(v, tuple) else v for k, v in spec.params.items()},
        "master_seed": spec.seed,
        "count": count,
        "mean_n": float(np.mean([r["n"] for r in rows])) if rows else 0.0,
        "mean_m": float(np.mean([r["m"] for r in rows])) if rows else 0.0,
        "instances": rows,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return manifest


def load_dataset(path) -> tuple[str, list[tuple[str, Graph, int]]]:
    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text())
    items = [(r["file"], read_graph(path / r["file"]), int(r["seed"])) for r in manifest["instances"]]
    return manifest["name"], items


def resolve_datasets(cfg: ExperimentConfig) -> list[tuple[str, list[tuple[str, Graph, int]]]]:
    out = []
    for entry in cfg.datasets:
        if Path(entry, "manifest.json").exists():
            out.append(load_dataset(entry))
            continue
        spec = dataset_spec(entry, mix(cfg.master_seed, hash_name(entry)))
        items = [(f"{entry}#{i}", generate(s), s.seed) for i, s in enumerate(instance_specs(spec, cfg.count))]
        out.append((entry, items))
    return out


def hash_name(name: str) -> int:
    h = 0
    for ch in name.encode():
        h = mix(h, ch)
    return h


# -- experiment -------------------------------------------------------------


@dataclasses.dataclass
class InstanceResult:
    dataset: str
    name: str
    n: int
    m: int
    width: int
    modulator_size: int
    modulator_method: str
    opt: int
    exact: bool
    avg: dict[str, list[int]]
    best: dict[str, int]
    timing: dict[str, float]
    error: str | None = None


def _pick(kind: ProblemKind, values: Iterable[int]) -> int:
    values = list(values)
    return max(values) if kind.maximize else min(values)


def run_instance(cfg: ExperimentConfig, dataset: str, name: str, g: Graph, seed: int, oracle=None) -> InstanceResult:
    """All requested methods on one graph; ``oracle`` defaults to ``cfg.oracle``."""
    kind = cfg.problem
    close = lambda: None  # noqa: E731
    if oracle is None:
        oracle, close = make_oracle(cfg.oracle, cfg.oracle_timeout)
    timing = {"prep_s": 0.0, "neural_s": 0.0, "tdpa_s": 0.0, "reference_s": 0.0}
    t0 = time.perf_counter()
    td = decompose(g)
    mod = select_modulator(td, cfg.target_eta, cfg.modulator, cfg.modulator_budget)
    solver = TdpaSolver(g, td, mod, kind, check=False)
    timing["prep_s"] = time.perf_counter() - t0
    methods = set(cfg.methods)
    avg: dict[str, list[int]] = {m: [] for m in AVG_METHODS if m in methods}
    best: dict[str, int] = {}

    def sample(partial, s):
        t = time.perf_counter()
        full = oracle(OracleCall(g, kind, partial, s)).full
        timing["neural_s"] += time.perf_counter() - t
        return full

    def complete(advice):
        t = time.perf_counter()
        out = solver.solve(advice)
        timing["tdpa_s"] += time.perf_counter() - t
        return out.value

    fresh = np.full(g.n, -1, dtype=np.int8)
    try:
        for s in range(cfg.seeds):
            run_seed = mix(seed, cfg.master_seed, s)
            if methods & {"ORACLE", "TDPA"}:
                traj = sample(fresh, run_seed)
                if "ORACLE" in avg:
                    avg["ORACLE"].append(evaluate(g, kind, traj))
                if "TDPA" in avg:
                    avg["TDPA"].append(complete(advice_from(traj, mod)))
            if methods & {"ICL", "IT"}:
                t = time.perf_counter()
                icl = icl_run(oracle, g, kind, mod, cfg.icl, run_seed)
                timing["neural_s"] += time.perf_counter() - t
                if "ICL" in avg:
                    avg["ICL"].append(evaluate(g, kind, sample(icl.committed, mix(run_seed, 0x1C1))))
                if "IT" in avg:
                    avg["IT"].append(complete(icl.advice))
        if methods & {"ORACLE", "TDPA"}:
            ov, tv = [], []
            for j in range(cfg.bestof):
                traj = sample(fresh, mix(seed, cfg.master_seed, 0xB0, j))
                ov.append(evaluate(g, kind, traj))
                if "TDPA" in methods:
                    tv.append(complete(advice_from(traj, mod)))
            if "ORACLE" in methods:
                best["ORACLE"] = _pick(kind, ov)
            if "TDPA" in methods:
                best["TDPA"] = _pick(kind, tv)
        if methods & {"RD", "RT"}:
            t = time.perf_counter()
            rounds = rd_run(oracle, g, kind, mod, cfg.rd, mix(seed, cfg.master_seed, 0xDF))
            timing["neural_s"] += time.perf_counter() - t
            if "RD" in methods:
                best["RD"] = _pick(kind, (evaluate(g, kind, r.trajectory) for r in rounds))
            if "RT" in methods:
                best["RT"] = _pick(kind, (complete(r.advice) for r in rounds))
    except OracleError as exc:
        close()
        return InstanceResult(dataset, name, g.n, g.m, td.width, len(mod), mod.method, 0, False, {}, {}, timing, str(exc))
    close()
    found = [v for vs in avg.values() for v in vs] + list(best.values())
    t = time.perf_counter()
    ref = reference_opt(g, kind, cfg.reference_budget, td=td, candidates=found)
    timing["reference_s"] = time.perf_counter() - t
    return InstanceResult(dataset, name, g.n, g.m, td.width, len(mod), mod.method, ref.value, ref.exact, avg, best, timing)


def gap_percent(kind, value: float, opt: float) -> float:
    """``100 * (1 - x/OPT)`` when maximizing, ``100 * (x/OPT - 1)`` when minimizing."""
    kind = ProblemKind.parse(kind)
    if opt == 0:
        return 0.0 if value == 0 else float("inf")
    return 100.0 * ((1.0 - value / opt) if kind.maximize else (value / opt - 1.0))


@dataclasses.dataclass
class MetricRow:
    dataset: str
    metric: str  # "avg" or "best"
    method: str
    size: float
    gap: float   # percent
    values: list[float]
    neural_s: float = 0.0
    tdpa_s: float = 0.0


def _task(args):
    cfg, dataset, name, g, seed = args
    return run_instance(cfg, dataset, name, g, seed)


def run_instances(cfg: ExperimentConfig, corpus=None) -> list[InstanceResult]:
    corpus = corpus if corpus is not None else resolve_datasets(cfg)
    tasks = [(cfg, ds, name, g, seed) for ds, items in corpus for name, g, seed in items]
    width = worker_count(cfg.threads)
    if width == 1 or len(tasks) <= 1:
        return [_task(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=width) as pool:
        return list(pool.map(_task, tasks))


def aggregate(cfg: ExperimentConfig, results: list[InstanceResult]) -> list[MetricRow]:
    kind = cfg.problem
    rows: list[MetricRow] = []
    datasets = list(dict.fromkeys(r.dataset for r in results))
    for ds in datasets:
        ok = [r for r in results if r.dataset == ds and r.error is None]
        failed = sum(1 for r in results if r.dataset == ds and r.error is not None)
        if failed:
            log.warning("%s: %d instance(s) skipped after oracle failures", ds, failed)
        if not ok:
            continue
        neural = float(np.mean([r.timing["neural_s"] for r in ok]))
        tdpa = float(np.mean([r.timing["tdpa_s"] for r in ok]))
        for method in AVG_METHODS:
            if method not in cfg.methods:
                continue
            per = [float(np.mean(r.avg[method])) for r in ok]
            gaps = [float(np.mean([gap_percent(kind, v, r.opt) for v in r.avg[method]])) for r in ok]
            rows.append(MetricRow(ds, "avg", method, float(np.mean(per)), float(np.mean(gaps)), per, neural, tdpa))
        for method in BEST_METHODS:
            if method not in cfg.methods:
                continue
            per = [float(r.best[method]) for r in ok]
            gaps = [gap_percent(kind, r.best[method], r.opt) for r in ok]
            rows.append(MetricRow(ds, "best", method, float(np.mean(per)), float(np.mean(gaps)), per, neural, tdpa))
    return rows


def run_experiment(cfg: ExperimentConfig, corpus=None) -> list[MetricRow]:
    if not cfg.methods:
        return []
    return aggregate(cfg, run_instances(cfg, corpus))


# -- reports ----------------------------------------------------------------

CSV_FIELDS = ("dataset", "metric", "method", "size", "gap_pct", "neural_s", "tdpa_s", "values")


def format_gap(gap: float) -> str:
    return f"{gap:.2f}"


def emit_report(rows: list[MetricRow], fmt: str = "text", path=None, allow_empty: bool = True) -> str:
    """Render ``rows`` as CSV (full precision) or an aligned text table; optionally write ``path``."""
    if not rows and not allow_empty:
        raise ValueError("no rows to report")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in rows:
            w.writerow([r.dataset, r.metric, r.method, repr(r.size), repr(r.gap), repr(r.neural_s), repr(r.tdpa_s),
                        ";".join(repr(v) for v in r.values)])
        text = buf.getvalue()
    elif fmt == "text":
        text = _text_table(rows)
    else:
        raise ValueError(f"unknown report format {fmt!r}; expected csv or text")
    if path is not None:
        Path(path).write_text(text)
    return text


def _text_table(rows: list[MetricRow]) -> str:
    datasets = list(dict.fromkeys(r.dataset for r in rows))
    header = ["Method"]
    for ds in datasets:
        header += [f"{ds} Size", f"{ds} Gap%"]
    lines = [header]
    for metric, label in (("avg", "average"), ("best", "best-of-N")):
        methods = list(dict.fromkeys(r.method for r in rows if r.metric == metric))
        if not methods:
            continue
        lines.append([f"[{label}]"] + [""] * (len(header) - 1))
        for method in methods:
            line = [METHOD_LABELS[method]]
            for ds in datasets:
                hit = [r for r in rows if r.dataset == ds and r.metric == metric and r.method == method]
                line += [f"{hit[0].size:.2f}", format_gap(hit[0].gap)] if hit else ["-", "-"]
            lines.append(line)
    timing = [["Timing (s/instance)"] + [""] * (len(header) - 1)]
    for ds in datasets:
        hit = [r for r in rows if r.dataset == ds]
        if hit:
            timing.append([f"  {ds}", f"Neural {hit[0].neural_s:.3f}", f"Tdpa {hit[0].tdpa_s:.3f}"] + [""] * (len(header) - 3))
    widths = [max(len(row[i]) for row in lines + timing if i < len(row)) for i in range(len(header))]
    out = []
    for row in lines + timing:
        out.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(out) + "\n"


def read_csv_report(text: str) -> list[MetricRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        values = [float(v) for v in rec["values"].split(";")] if rec["values"] else []
        rows.append(MetricRow(rec["dataset"], rec["metric"], rec["method"], float(rec["size"]), float(rec["gap_pct"]),
                              values, float(rec["neural_s"]), float(rec["tdpa_s"])))
    return rows

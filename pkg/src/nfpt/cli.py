"""Command line: ``nfpt {gen,decompose,solve,bench,oracle-check}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .exact import reference_opt
from .generators import FULL_DATASETS, DESK_DATASETS, GenSpec, dataset_spec
from .graph import ProblemKind, evaluate, read_graph, state_string
from .meta import icl_run, rd_run
from .modulator import DEFAULT_ETA, select_modulator
from .oracles import OracleCall, OracleError, advice_from, make_oracle, oracle_check, stub_command
from .tdpa import TdpaSolver
from .treedecomp import decompose, format_td


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", choices=["mis", "mvc", "maxcut"], default=None)
    p.add_argument("--eta", type=int, default=None)
    p.add_argument("--oracle", default=None, help="random-greedy, perfect, stub[:mode] or cmd:<command>")
    p.add_argument("--icl.k", dest="icl_k", type=int, default=None)
    p.add_argument("--icl.kappa", dest="icl_kappa", type=int, default=None)
    p.add_argument("--rd.rho", dest="rd_rho", type=float, default=None)


def _parse_params(items: list[str]) -> dict:
    out = {}
    for item in items or []:
        key, _, val = item.partition("=")
        if key == "m_range":
            lo, _, hi = val.partition(",")
            out[key] = (int(lo), int(hi))
        else:
            out[key] = float(val) if "." in val else int(val)
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nfpt", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a dataset directory")
    g.add_argument("--dataset", help=f"named profile: {', '.join([*FULL_DATASETS, *DESK_DATASETS])}")
    g.add_argument("--family", choices=["ER", "BA", "WS", "RR", "HK"])
    g.add_argument("--n", nargs=2, type=int, metavar=("MIN", "MAX"))
    g.add_argument("--param", action="append", help="family parameter, e.g. p=0.03, m=3, m_range=3,7")
    g.add_argument("--count", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    d = sub.add_parser("decompose", help="tree decomposition and modulator of one graph")
    d.add_argument("graph")
    d.add_argument("--problem", choices=["mis", "mvc", "maxcut"], default="mis")
    d.add_argument("--eta", type=int, default=None)
    d.add_argument("--modulator", choices=["auto", "exact", "greedy"], default="auto")
    d.add_argument("--td-out", help="write the decomposition in bag-per-line format")

    s = sub.add_parser("solve", help="run one method on one graph")
    s.add_argument("graph")
    _common(s)
    s.add_argument("--method", default="tdpa", choices=["oracle", "tdpa", "icl", "it", "rd", "rt", "exact"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bestof", type=int, default=20)
    s.add_argument("--modulator", choices=["auto", "exact", "greedy"], default="auto")

    b = sub.add_parser("bench", help="run the method grid and write a report")
    b.add_argument("--config", help="key = value config file")
    b.add_argument("--dataset", action="append", help="dataset name or directory (repeatable)")
    _common(b)
    b.add_argument("--seeds", type=int, default=None)
    b.add_argument("--bestof", type=int, default=None)
    b.add_argument("--count", type=int, default=None)
    b.add_argument("--methods", default=None)
    b.add_argument("--out", default=None)
    b.add_argument("--format", choices=["csv", "text"], default=None)

    c = sub.add_parser("oracle-check", help="protocol conformance test for an external oracle")
    c.add_argument("--oracle", default="stub", help="stub[:mode] or cmd:<command>")
    c.add_argument("--timeout", type=float, default=10.0)
    c.add_argument("--no-negative", action="store_true", help="skip the rejection self-test")
    return ap


def cmd_gen(args) -> int:
    if args.dataset:
        spec = dataset_spec(args.dataset, args.seed)
        name = args.dataset
    else:
        if not (args.family and args.n):
            print("gen: give --dataset or --family with --n", file=sys.stderr)
            return 2
        spec = GenSpec(args.family, tuple(args.n), _parse_params(args.param), args.seed)
        name = None
    manifest = harness.make_dataset(spec, args.count, args.out, name)
    print(f"{manifest['name']}: {args.count} graphs, mean |V|={manifest['mean_n']:.2f} |E|={manifest['mean_m']:.2f}")
    return 0


def cmd_decompose(args) -> int:
    g = read_graph(args.graph)
    td = decompose(g)
    eta = args.eta if args.eta is not None else DEFAULT_ETA[args.problem]
    mod = select_modulator(td, eta, args.modulator)
    print(f"n={g.n} m={g.m} bags={len(td.bags)} width={td.width}")
    print(f"modulator[{mod.method}] size={len(mod)}")
    print(mod.format())
    if args.td_out:
        Path(args.td_out).write_text(format_td(td))
    return 0


def _resolve_command_oracle(spec: str):
    if spec.startswith("cmd:"):
        return spec[4:]
    if spec == "stub" or spec.startswith("stub:"):
        return stub_command(spec.partition(":")[2] or "greedy")
    raise ValueError(f"oracle-check needs stub[:mode] or cmd:<command>, got {spec!r}")


def cmd_solve(args) -> int:
    g = read_graph(args.graph)
    kind = ProblemKind.parse(args.problem or "mis")
    if args.method == "exact":
        ref = reference_opt(g, kind)
        print(json.dumps({"method": "exact", "value": ref.value, "exact": ref.exact, "source": ref.source}))
        return 0
    cfg = harness.ExperimentConfig(problem=kind, eta=args.eta, oracle=args.oracle or "random-greedy",
                                   icl_k=args.icl_k or 8, icl_kappa=args.icl_kappa, rd_rho=args.rd_rho or 0.25,
                                   bestof=args.bestof)
    td = decompose(g)
    mod = select_modulator(td, cfg.target_eta, args.modulator)
    solver = TdpaSolver(g, td, mod, kind, check=False)
    oracle, close = make_oracle(cfg.oracle, cfg.oracle_timeout)
    try:
        m = args.method
        if m in ("oracle", "tdpa"):
            full = oracle(OracleCall.fresh(g, kind, args.seed)).full
            if m == "tdpa":
                full = solver.solve(advice_from(full, mod)).assignment
        elif m in ("icl", "it"):
            icl = icl_run(oracle, g, kind, mod, cfg.icl, args.seed)
            if m == "icl":
                full = oracle(OracleCall(g, kind, icl.committed, args.seed)).full
            else:
                full = solver.solve(icl.advice).assignment
        else:
            rounds = rd_run(oracle, g, kind, mod, cfg.rd, args.seed)
            cands = [r.trajectory for r in rounds] if m == "rd" else [solver.solve(r.advice).assignment for r in rounds]
            pick = max if kind.maximize else min
            full = pick(cands, key=lambda a: evaluate(g, kind, a))
    except OracleError as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return 1
    finally:
        close()
    print(json.dumps({"method": args.method, "value": evaluate(g, kind, full), "width": td.width,
                      "modulator": len(mod), "assignment": state_string(full)}))
    return 0


def cmd_bench(args) -> int:
    overrides = {
        "datasets": ",".join(args.dataset) if args.dataset else None,
        "problem": args.problem, "eta": args.eta, "oracle": args.oracle, "seeds": args.seeds,
        "bestof": args.bestof, "count": args.count, "methods": args.methods, "out": args.out,
        "format": args.format, "icl.k": args.icl_k, "icl.kappa": args.icl_kappa, "rd.rho": args.rd_rho,
    }
    cfg = harness.load_config(args.config, overrides)
    if not cfg.datasets:
        print("bench: no datasets given", file=sys.stderr)
        return 2
    results = harness.run_instances(cfg)
    rows = harness.aggregate(cfg, results)
    text = harness.emit_report(rows, cfg.format)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        harness.emit_report(rows, "csv", out / "report.csv")
        harness.emit_report(rows, "text", out / "report.txt")
    sys.stdout.write(text)
    return 0


def cmd_oracle_check(args) -> int:
    try:
        command = _resolve_command_oracle(args.oracle)
    except ValueError as exc:
        print(exc, file=sys.stderr)
        return 2
    rows = oracle_check(command, args.timeout, negative=not args.no_negative)
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    return 0 if all(ok for _, ok, _ in rows) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "gen": cmd_gen,
        "decompose": cmd_decompose,
        "solve": cmd_solve,
        "bench": cmd_bench,
        "oracle-check": cmd_oracle_check,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())

"""Inference-time strategies over any oracle.

* :func:`icl_run` - incremental confidence level: sample ``k`` completions of
  the committed state, commit vertices whose vote count clears ``kappa``,
  repeat until the modulator is fully committed.
* :func:`rd_run` - randomized deferral: after each complete trajectory revert
  a random fraction of vertices (and their constraint-entangled neighbours)
  to undecided and resample from there.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .generators import make_rng, mix
from .graph import Graph, ProblemKind, evaluate, undecided
from .modulator import Modulator
from .oracles import Oracle, OracleCall, advice_from


@dataclasses.dataclass(frozen=True)
class IclParams:
    k: int = 8
    kappa: int | None = None  # defaults to ceil(k / 2)
    max_rounds: int = 16

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.kappa is None:
            object.__setattr__(self, "kappa", math.ceil(self.k / 2))
        if not 0 <= self.kappa <= self.k:
            raise ValueError("kappa must lie in [0, k]")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be positive")


@dataclasses.dataclass(frozen=True)
class RdParams:
    rho: float = 0.25
    rounds: int = 20

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if self.rounds < 1:
            raise ValueError("rounds must be positive")


@dataclasses.dataclass
class IclResult:
    advice: dict[int, int]
    committed: np.ndarray
    rounds: int
    fallback: bool
    history: list[np.ndarray]


@dataclasses.dataclass
class RdRound:
    seed_state: np.ndarray
    trajectory: np.ndarray
    advice: dict[int, int]


def vote_counts(trajectories: np.ndarray) -> np.ndarray:
    """Per-vertex IN counts of a ``k x n`` stack of complete assignments."""
    return np.asarray(trajectories, dtype=np.int64).sum(axis=0)


def _safe_state(kind: ProblemKind) -> int:
    # the value that can never clash with already committed vertices
    return 0 if kind is ProblemKind.MIS else 1


def _clashes(g: Graph, kind: ProblemKind, state: np.ndarray, v: int, value: int) -> bool:
    if kind is ProblemKind.MIS and value == 1:
        return any(state[w] == 1 for w in g.adj[v])
    if kind is ProblemKind.MVC and value == 0:
        return any(state[w] == 0 for w in g.adj[v])
    return False


def commit_votes(g: Graph, kind: ProblemKind, committed: np.ndarray, votes: np.ndarray, k: int, kappa: int) -> np.ndarray:
    """Commit undecided vertices with ``votes > kappa`` (IN) or ``k - votes > kappa`` (OUT).

    Vertices are visited in id order and a commit that would clash with an
    earlier commitment is skipped.
    """
    kind = ProblemKind.parse(kind)
    out = committed.copy()
    for v in np.flatnonzero(committed < 0).tolist():
        vin = int(votes[v])
        vout = k - vin
        if vin > kappa and vin > vout:
            value = 1
        elif vout > kappa and vout > vin:
            value = 0
        else:
            continue
        if not _clashes(g, kind, out, v, value):
            out[v] = value
    return out


def _better(kind: ProblemKind, a: int, b: int) -> bool:
    return a > b if kind.maximize else a < b


def icl_run(oracle: Oracle, g: Graph, kind, mod: Modulator, params: IclParams = IclParams(), seed: int = 0) -> IclResult:
    kind = ProblemKind.parse(kind)
    tm = sorted(mod.vertices)
    committed = undecided(g.n)
    history = [committed.copy()]
    rounds = 0
    last: list[np.ndarray] = []
    while True:
        last = [oracle(OracleCall(g, kind, committed, mix(seed, rounds, j))).full for j in range(params.k)]
        rounds += 1
        committed = commit_votes(g, kind, committed, vote_counts(np.stack(last)), params.k, params.kappa)
        history.append(committed.copy())
        if all(committed[v] >= 0 for v in tm) or rounds >= params.max_rounds:
            break
    fallback = False
    pending = [v for v in tm if committed[v] < 0]
    if pending:
        fallback = True
        best = last[0]
        best_val = evaluate(g, kind, best)
        for traj in last[1:]:
            val = evaluate(g, kind, traj)
            if _better(kind, val, best_val):
                best, best_val = traj, val
        for v in pending:
            value = int(best[v])
            if _clashes(g, kind, committed, v, value):
                value = _safe_state(kind)
            committed[v] = value
        history.append(committed.copy())
    return IclResult(advice_from(committed, mod), committed, rounds, fallback, history)


def defer(g: Graph, kind, state, reverted) -> np.ndarray:
    """Revert ``reverted`` to undecided, plus the neighbours their old value constrains.

    MIS: neighbours of a reverted IN vertex. MVC: neighbours of a reverted
    OUT vertex. MAXCUT: no neighbour reset.
    """
    kind = ProblemKind.parse(kind)
    state = np.asarray(state)
    out = state.copy()
    entangled = {ProblemKind.MIS: 1, ProblemKind.MVC: 0}.get(kind)
    for v in reverted:
        if entangled is not None and state[v] == entangled:
            for w in g.adj[v]:
                out[w] = -1
        out[v] = -1
    return out


def rd_run(oracle: Oracle, g: Graph, kind, mod: Modulator, params: RdParams = RdParams(), seed: int = 0) -> list[RdRound]:
    kind = ProblemKind.parse(kind)
    rng = make_rng(mix(seed, 0x5D))
    n = g.n
    count = min(n, math.ceil(params.rho * n))
    seed_state = undecided(n)
    out: list[RdRound] = []
    for r in range(params.rounds):
        if r:
            decided = np.flatnonzero(out[-1].trajectory >= 0)
            chosen = rng.choice(decided, size=min(count, decided.size), replace=False).tolist()
            seed_state = defer(g, kind, out[-1].trajectory, chosen)
        traj = oracle(OracleCall(g, kind, seed_state, mix(seed, r))).full
        out.append(RdRound(seed_state, traj, advice_from(traj, mod)))
    return out

"""Exhaustive ground truth for small graphs and reference optima for gap metrics."""

from __future__ import annotations

import dataclasses
from typing import Iterable

import numpy as np

from .graph import Graph, ProblemKind
from .tdpa import DPOutcome, TdpaSolver
from .treedecomp import RootedTD, decompose

MAX_BRUTE_N = 26
MAX_EXACT_WIDTH = 18
_CHUNK = 1 << 20


class InstanceTooLarge(ValueError):
    pass


def brute_force(g: Graph, kind, partial=None) -> DPOutcome:
    """Optimum over all ``2**n`` assignments (those agreeing with ``partial``, if given).

    Ties resolve to the smallest assignment read as a binary number with
    vertex ``i`` at bit ``i``.
    """
    kind = ProblemKind.parse(kind)
    n = g.n
    if n > MAX_BRUTE_N:
        raise InstanceTooLarge(f"brute force refused for n={n} > {MAX_BRUTE_N}")
    fix_mask = fix_val = 0
    if partial is not None:
        partial = np.asarray(partial)
        for v in np.flatnonzero(partial >= 0):
            fix_mask |= 1 << int(v)
            if partial[v] == 1:
                fix_val |= 1 << int(v)
    nbr = g.masks
    higher = [m >> (u + 1) << (u + 1) for u, m in enumerate(nbr)]
    best_val, best_x = None, None
    sign = 1 if kind.maximize else -1
    for start in range(0, 1 << n, _CHUNK):
        x = np.arange(start, min(start + _CHUNK, 1 << n), dtype=np.int64)
        ok = (x & fix_mask) == fix_val
        val = np.zeros(x.size, dtype=np.int64)
        for u in range(n):
            bit = ((x >> u) & 1).astype(bool)
            if kind is ProblemKind.MIS:
                ok &= ~(bit & ((x & nbr[u]) != 0))
            elif kind is ProblemKind.MVC:
                ok &= bit | ((~x & nbr[u]) == 0)
            elif higher[u]:
                val += np.where(bit, np.bitwise_count(~x & higher[u]), np.bitwise_count(x & higher[u]))
        if kind is not ProblemKind.MAXCUT:
            val = np.bitwise_count(x).astype(np.int64)
        if not ok.any():
            continue
        score = np.where(ok, sign * val, np.iinfo(np.int64).min)
        i = int(np.argmax(score))
        if best_val is None or score[i] > best_val:
            best_val, best_x = int(score[i]), int(x[i])
    if best_x is None:
        raise ValueError("no feasible assignment agrees with the partial state")
    assignment = np.array([(best_x >> v) & 1 for v in range(n)], dtype=np.int8)
    return DPOutcome(sign * best_val, assignment, (), 0)


@dataclasses.dataclass(frozen=True)
class Reference:
    value: int
    exact: bool
    source: str
    assignment: np.ndarray | None = None


def reference_opt(
    g: Graph,
    kind,
    budget: int = 1 << 26,
    td: RootedTD | None = None,
    candidates: Iterable[int] = (),
) -> Reference:
    """Best available optimum with an exactness flag.

    Brute force up to ``MAX_BRUTE_N`` vertices; otherwise the unconstrained DP
    when the width is at most ``MAX_EXACT_WIDTH`` and the total bag-state
    count fits ``budget``; otherwise the best of ``candidates`` (values found
    by other methods), flagged inexact.
    """
    kind = ProblemKind.parse(kind)
    if g.n <= MAX_BRUTE_N:
        out = brute_force(g, kind)
        return Reference(out.value, True, "brute_force", out.assignment)
    if td is None:
        td = decompose(g)
    if td.width <= MAX_EXACT_WIDTH and sum(1 << len(b) for b in td.bags) <= budget:
        out = TdpaSolver(g, td, None, kind, check=False).solve({})
        return Reference(out.value, True, "dp", out.assignment)
    vals = list(candidates)
    if not vals:
        return Reference(0, False, "none")
    best = max(vals) if kind.maximize else min(vals)
    return Reference(int(best), False, "best_known")

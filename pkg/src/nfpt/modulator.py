"""Treewidth modulators on a fixed tree decomposition.

A modulator for target width ``eta`` is a vertex set ``TM`` such that every
bag keeps at most ``eta + 1`` vertices outside ``TM``. Finding a smallest one
is a multi-cover problem over the oversized bags; :func:`modulator_exact`
solves it by branch and bound and :func:`modulator_greedy` is the scalable
stand-in.
"""

from __future__ import annotations

import dataclasses
import heapq
from typing import Iterable, Sequence

from .treedecomp import RootedTD, TreeDecomposition, iter_bits, to_mask

DEFAULT_ETA = {"mis": 10, "mvc": 10, "maxcut": 6}
DEFAULT_NODE_BUDGET = 10**7


class ModulatorBudgetExceeded(RuntimeError):
    def __init__(self, nodes: int, incumbent: frozenset[int]):
        super().__init__(f"branch and bound gave up after {nodes} nodes")
        self.nodes = nodes
        self.incumbent = incumbent


@dataclasses.dataclass(frozen=True)
class Modulator:
    eta: int
    vertices: frozenset[int]
    method: str = "given"

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self.vertices

    def format(self) -> str:
        return " ".join(map(str, [self.eta, *sorted(self.vertices)]))

    @classmethod
    def parse(cls, line: str) -> "Modulator":
        parts = line.split()
        if not parts:
            raise ValueError("empty modulator line")
        eta, *vs = (int(x) for x in parts)
        if eta < 0:
            raise ValueError("eta must be nonnegative")
        return cls(eta, frozenset(vs))


def _bags(td: "TreeDecomposition | RootedTD | Sequence[Iterable[int]]") -> list[frozenset[int]]:
    if isinstance(td, (TreeDecomposition, RootedTD)):
        return list(td.bags)
    return [frozenset(b) for b in td]


def verify_modulator(td, mod: Modulator) -> bool:
    limit = mod.eta + 1
    return all(len(b - mod.vertices) <= limit for b in _bags(td))


def residual_bags(td, mod: Modulator) -> list[frozenset[int]]:
    return [b - mod.vertices for b in _bags(td)]


def _oversized(bags: list[frozenset[int]], eta: int) -> list[tuple[int, int]]:
    """Distinct oversized bags as ``(mask, demand)``."""
    seen = {}
    for b in bags:
        demand = len(b) - eta - 1
        if demand > 0:
            seen[to_mask(b)] = demand
    return list(seen.items())


def modulator_greedy(td, eta: int) -> Modulator:
    """Repeatedly take the vertex lying in the most still-violating bags (smallest id on ties)."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    bags = _bags(td)
    excess = [len(b) - eta - 1 for b in bags]
    member: dict[int, list[int]] = {}
    hits: dict[int, int] = {}
    for t, b in enumerate(bags):
        for v in b:
            member.setdefault(v, []).append(t)
            if excess[t] > 0:
                hits[v] = hits.get(v, 0) + 1
    heap = [(-c, v) for v, c in hits.items()]
    heapq.heapify(heap)
    chosen: set[int] = set()
    while heap:
        negc, v = heapq.heappop(heap)
        if v in chosen or -negc != hits.get(v, 0) or negc == 0:
            continue
        chosen.add(v)
        for t in member[v]:
            if excess[t] <= 0:
                continue
            excess[t] -= 1
            if excess[t] == 0:
                for w in bags[t]:
                    if w in chosen:
                        continue
                    hits[w] -= 1
                    if hits[w] > 0:
                        heapq.heappush(heap, (-hits[w], w))
    return Modulator(eta, frozenset(chosen), "greedy")


def modulator_exact(td, eta: int, node_budget: int = DEFAULT_NODE_BUDGET) -> Modulator:
    """Minimum-cardinality modulator by branch and bound.

    Bound: the demands of bags with pairwise-disjoint free vertices add up,
    since no single vertex can serve two of them. Branching takes the bag
    with the largest remaining demand and a free vertex of it that sits in
    the most unsatisfied bags; include first, then exclude. Raises
    :class:`ModulatorBudgetExceeded` (carrying the incumbent) once more than
    ``node_budget`` nodes have been expanded.
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    over = _oversized(_bags(td), eta)
    if not over:
        return Modulator(eta, frozenset(), "exact")
    masks = [m for m, _ in over]
    demands = [d for _, d in over]
    nb = len(over)

    greedy = modulator_greedy([frozenset(iter_bits(m)) for m in masks], eta)
    best = [to_mask(greedy.vertices), len(greedy.vertices)]
    nodes = 0

    # explicit stack: modulators on full-size graphs run hundreds of decisions deep
    stack = [(0, 0, 0)]
    while stack:
        chosen, banned, size = stack.pop()
        nodes += 1
        if nodes > node_budget:
            raise ModulatorBudgetExceeded(nodes, frozenset(iter_bits(best[0])))
        # unit propagation: bags whose free vertices are all needed
        dead = False
        while True:
            forced = 0
            open_bags = []
            for i in range(nb):
                need = demands[i] - (masks[i] & chosen).bit_count()
                if need <= 0:
                    continue
                free = masks[i] & ~chosen & ~banned
                nfree = free.bit_count()
                if nfree < need:
                    dead = True
                    break
                if nfree == need:
                    forced |= free
                open_bags.append((need, nfree, i, free))
            if dead or not forced:
                break
            chosen |= forced
            size += forced.bit_count()
            if size >= best[1]:
                dead = True
                break
        if dead:
            continue
        if not open_bags:
            if size < best[1]:
                best[0], best[1] = chosen, size
            continue
        open_bags.sort(key=lambda r: (-r[0], r[1], r[2]))
        bound = 0
        used = 0
        for need, _, _, free in open_bags:
            if free & used == 0:
                bound += need
                used |= free
        if size + bound >= best[1]:
            continue
        need, _, i, free = open_bags[0]
        score: dict[int, int] = {}
        for _, _, _, f in open_bags:
            for v in iter_bits(f & free):
                score[v] = score.get(v, 0) + 1
        v = min(score, key=lambda x: (-score[x], x))
        bit = 1 << v
        # include is explored first, so it goes on top
        stack.append((chosen, banned | bit, size))
        stack.append((chosen | bit, banned, size + 1))

    return Modulator(eta, frozenset(iter_bits(best[0])), "exact")


def select_modulator(td, eta: int, method: str = "auto", node_budget: int = 20_000) -> Modulator:
    """``exact``, ``greedy`` or ``auto`` (exact within ``node_budget``, else greedy)."""
    if method == "greedy":
        return modulator_greedy(td, eta)
    if method == "exact":
        return modulator_exact(td, eta, node_budget)
    if method != "auto":
        raise ValueError(f"unknown modulator method {method!r}")
    try:
        return modulator_exact(td, eta, node_budget)
    except ModulatorBudgetExceeded:
        return modulator_greedy(td, eta)

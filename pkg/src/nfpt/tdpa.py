"""Tree-decomposition dynamic programming with advice.

Vertices in the modulator take the values fixed by an advice string; the DP
enumerates only the remaining ("undecided") vertices of each bag, so a bag
with ``k`` undecided vertices costs ``2**k`` states. With an empty modulator
this is the plain exact treewidth DP.

Objective accounting: each vertex is credited once, in the root-most bag
that contains it, and each edge once, in the root-most bag containing both
endpoints (the deeper of the two endpoint home bags). Constraints are
checked in every bag. Minimization (MVC) runs as maximization of ``-|S|``.

Bag states are integers whose bit ``i`` is the state of the bag's ``i``-th
undecided vertex; tables are numpy arrays indexed by state or by separator
key, with ``-inf`` marking infeasible entries.
"""

from __future__ import annotations

import dataclasses
from typing import Mapping

import numpy as np

from .graph import Graph, ProblemKind
from .modulator import Modulator
from .treedecomp import RootedTD, TreeDecomposition, iter_bits, root_and_order, to_mask, validate_td

NEG = -np.inf


class AdviceError(ValueError):
    """Advice does not cover the modulator exactly."""


class AdviceInfeasible(ValueError):
    """Advice violates a constraint between two modulator vertices."""

    def __init__(self, edge: tuple[int, int], kind: ProblemKind):
        super().__init__(f"advice violates {kind.value} on edge {edge}")
        self.edge = edge


@dataclasses.dataclass(frozen=True)
class DPOutcome:
    value: int
    assignment: np.ndarray
    bag_states: tuple[int, ...]
    feasible_states: int


@dataclasses.dataclass
class _BagPlan:
    vertices: tuple[int, ...]
    nbr: list[int]          # per position: undecided bag neighbours (position mask)
    home: int               # positions credited here
    cut_home: list[int]     # per position i: home-edge partners j > i
    slot: int               # offset into the flat undecided-slot arrays
    children: list[tuple[int, tuple[int, ...], tuple[int, ...]]]  # (child, child pos, our pos)


@dataclasses.dataclass
class DPState:
    """Tables of one solve, kept for reconstruction."""

    solver: "TdpaSolver"
    advice_array: np.ndarray
    root_state: int
    root_score: float
    best_child_state: dict[int, np.ndarray]
    bag_states: list[int]
    feasible_states: int


def _positions(mask: int, index: dict[int, int]) -> int:
    out = 0
    for v in iter_bits(mask):
        out |= 1 << index[v]
    return out


def _bits_of(states: np.ndarray, positions) -> np.ndarray:
    key = np.zeros_like(states)
    for j, p in enumerate(positions):
        key |= ((states >> p) & 1) << j
    return key


class TdpaSolver:
    """Precomputed DP plan for one (graph, decomposition, modulator, kind)."""

    def __init__(self, g: Graph, td: "RootedTD | TreeDecomposition", mod: Modulator | None, kind, check: bool = True):
        self.g = g
        self.kind = ProblemKind.parse(kind)
        if isinstance(td, TreeDecomposition):
            td = root_and_order(td)
        if check:
            ok, why = validate_td(g, td)
            if not ok:
                raise ValueError(f"tree decomposition invalid for graph ({why})")
        self.td = td
        self.tm = frozenset(mod.vertices) if mod is not None else frozenset()
        if any(not 0 <= v < g.n for v in self.tm):
            raise ValueError("modulator vertex out of range")
        self._build()

    # -- plan ---------------------------------------------------------------

    def _build(self) -> None:
        g, td = self.g, self.td
        tm_mask = to_mask(self.tm)
        depth = td.depths()
        home = [-1] * g.n
        for t in reversed(td.order):
            for v in td.bags[t]:
                if home[v] < 0:
                    home[v] = t

        def edge_home(u, v):
            a, b = home[u], home[v]
            return a if depth[a] >= depth[b] else b

        gm = g.masks
        plans: list[_BagPlan | None] = [None] * len(td.bags)
        uf_slot, uf_fixed, uf_home = [], [], []
        slot = 0
        for t in td.order:
            bag = td.bags[t]
            bag_mask = to_mask(bag)
            und = tuple(sorted(v for v in bag if v not in self.tm))
            index = {v: i for i, v in enumerate(und)}
            und_mask = bag_mask & ~tm_mask
            nbr, cut_home = [], []
            home_mask = 0
            for i, u in enumerate(und):
                if home[u] == t:
                    home_mask |= 1 << i
                inner = gm[u] & und_mask
                nbr.append(_positions(inner, index))
                ch = 0
                for w in iter_bits(inner):
                    if index[w] > i and edge_home(u, w) == t:
                        ch |= 1 << index[w]
                cut_home.append(ch)
                for f in iter_bits(gm[u] & bag_mask & tm_mask):
                    uf_slot.append(slot + i)
                    uf_fixed.append(f)
                    uf_home.append(edge_home(u, f) == t)
            plans[t] = _BagPlan(und, nbr, home_mask, cut_home, slot, [])
            slot += len(und)
        for t in td.order:
            p = td.parent[t]
            if p < 0:
                continue
            child, parent = plans[t], plans[p]
            pidx = {v: i for i, v in enumerate(parent.vertices)}
            shared = [v for v in child.vertices if v in pidx]
            cidx = {v: i for i, v in enumerate(child.vertices)}
            parent.children.append((t, tuple(cidx[v] for v in shared), tuple(pidx[v] for v in shared)))
        self.plans = plans
        self.n_slots = slot
        self.uf_slot = np.array(uf_slot, dtype=np.int64)
        self.uf_fixed = np.array(uf_fixed, dtype=np.int64)
        self.uf_home = np.array(uf_home, dtype=bool)
        self.tm_edges = [(u, v) for u, v in g.edges if u in self.tm and v in self.tm]

    # -- advice -------------------------------------------------------------

    def advice_array(self, advice: Mapping[int, int]) -> np.ndarray:
        """Validate ``advice`` (domain == modulator, constraint-consistent) and spread it over n."""
        keys = frozenset(int(v) for v in advice)
        if keys != self.tm:
            missing, extra = sorted(self.tm - keys), sorted(keys - self.tm)
            raise AdviceError(f"advice domain mismatch: missing {missing[:5]}, extra {extra[:5]}")
        a = np.full(self.g.n, -1, dtype=np.int8)
        for v, s in advice.items():
            s = int(s)
            if s not in (0, 1):
                raise AdviceError(f"advice for vertex {v} must be 0 or 1, got {s}")
            a[int(v)] = s
        if self.kind is not ProblemKind.MAXCUT:
            bad = 1 if self.kind is ProblemKind.MIS else 0
            for u, v in self.tm_edges:
                if a[u] == bad and a[v] == bad:
                    raise AdviceInfeasible((u, v), self.kind)
        return a

    def _constant(self, a: np.ndarray) -> float:
        if self.kind is ProblemKind.MAXCUT:
            return float(sum(1 for u, v in self.tm_edges if a[u] != a[v]))
        cnt = float(sum(1 for v in self.tm if a[v] == 1))
        return -cnt if self.kind is ProblemKind.MVC else cnt

    # -- DP -----------------------------------------------------------------

    def run(self, advice: Mapping[int, int]) -> DPState:
        a = self.advice_array(advice)
        kind = self.kind
        fixed_state = a[self.uf_fixed] if self.uf_fixed.size else np.zeros(0, dtype=np.int8)
        n_slots = self.n_slots
        fin = np.bincount(self.uf_slot, weights=(fixed_state == 1), minlength=n_slots) if n_slots else np.zeros(0)
        fout = np.bincount(self.uf_slot, weights=(fixed_state == 0), minlength=n_slots) if n_slots else np.zeros(0)
        if kind is ProblemKind.MAXCUT and n_slots:
            hin = np.bincount(self.uf_slot, weights=(fixed_state == 1) & self.uf_home, minlength=n_slots)
            hout = np.bincount(self.uf_slot, weights=(fixed_state == 0) & self.uf_home, minlength=n_slots)

        tables: dict[int, np.ndarray] = {}
        messages: dict[int, np.ndarray] = {}
        best_child: dict[int, np.ndarray] = {}
        bag_states = [0] * len(self.plans)
        feasible = 0
        for t in self.td.order:
            plan = self.plans[t]
            k = len(plan.vertices)
            s = np.arange(1 << k, dtype=np.int64)
            bag_states[t] = 1 << k
            sl = slice(plan.slot, plan.slot + k)
            ok = np.ones(s.shape, dtype=bool)
            if kind is ProblemKind.MIS:
                forced_out = to_mask(i for i, c in enumerate(fin[sl]) if c > 0)
                if forced_out:
                    ok &= (s & forced_out) == 0
                for i, nm in enumerate(plan.nbr):
                    if nm:
                        ok &= ~((((s >> i) & 1) == 1) & ((s & nm) != 0))
                score = np.bitwise_count(s & plan.home).astype(np.float64)
            elif kind is ProblemKind.MVC:
                forced_in = to_mask(i for i, c in enumerate(fout[sl]) if c > 0)
                if forced_in:
                    ok &= (s & forced_in) == forced_in
                for i, nm in enumerate(plan.nbr):
                    if nm:
                        ok &= ~((((s >> i) & 1) == 0) & ((~s & nm) != 0))
                score = -np.bitwise_count(s & plan.home).astype(np.float64)
            else:
                score = np.zeros(s.shape, dtype=np.float64)
                for i, ch in enumerate(plan.cut_home):
                    bit = (s >> i) & 1
                    if ch:
                        score += np.where(bit == 1, np.bitwise_count(~s & ch), np.bitwise_count(s & ch))
                    w_in, w_out = hin[plan.slot + i], hout[plan.slot + i]
                    if w_in or w_out:
                        score += np.where(bit == 1, w_out, w_in)
            score[~ok] = NEG
            feasible += int(ok.sum())
            for c, cpos, ppos in plan.children:
                score += messages.pop(c)[_bits_of(s, ppos)]
            tables[t] = score
            p = self.td.parent[t]
            if p >= 0:
                ppos_in_child = next(cp for cc, cp, _ in self.plans[p].children if cc == t)
                key = _bits_of(s, ppos_in_child)
                size = 1 << len(ppos_in_child)
                msg = np.full(size, NEG)
                np.maximum.at(msg, key, score)
                hit = np.isfinite(score) & (score == msg[key])
                big = np.iinfo(np.int64).max
                arg = np.full(size, big, dtype=np.int64)
                np.minimum.at(arg, key[hit], s[hit])
                arg[arg == big] = -1
                messages[t] = msg
                best_child[t] = arg
                del tables[t]
        root = self.td.root
        root_table = tables[root]
        rs = int(np.argmax(root_table))
        root_score = float(root_table[rs])
        if not np.isfinite(root_score):
            raise AdviceInfeasible((-1, -1), kind)
        return DPState(self, a, rs, root_score + self._constant(a), best_child, bag_states, feasible)

    def solve(self, advice: Mapping[int, int] | None = None) -> DPOutcome:
        state = self.run(advice if advice is not None else {})
        assignment = reconstruct(state)
        value = int(round(state.root_score))
        if self.kind is ProblemKind.MVC:
            value = -value
        return DPOutcome(value, assignment, tuple(state.bag_states), state.feasible_states)


def reconstruct(dp: DPState) -> np.ndarray:
    """Walk the backpointers top-down and return the complete assignment."""
    solver = dp.solver
    out = dp.advice_array.copy()
    chosen = {solver.td.root: dp.root_state}
    for t in reversed(solver.td.order):
        plan = solver.plans[t]
        st = chosen[t]
        for i, v in enumerate(plan.vertices):
            out[v] = (st >> i) & 1
        for c, _, ppos in plan.children:
            key = 0
            for j, p in enumerate(ppos):
                key |= ((st >> p) & 1) << j
            cs = int(dp.best_child_state[c][key])
            if cs < 0:
                raise RuntimeError("broken backpointer")
            chosen[c] = cs
    return out


def tdpa_solve(g: Graph, td, mod: Modulator | None, advice: Mapping[int, int] | None, kind) -> DPOutcome:
    """Optimum of ``kind`` over complete assignments that agree with ``advice`` on the modulator."""
    return TdpaSolver(g, td, mod, kind).solve(advice or {})


def enumerate_bag_states(g: Graph, bag, advice: Mapping[int, int], kind) -> list[dict[int, int]]:
    """All locally feasible assignments of one bag with the advised vertices held fixed.

    Undecided vertices are ``bag - advice``; every edge inside the bag is
    checked (for MAXCUT nothing is filtered).
    """
    kind = ProblemKind.parse(kind)
    bag = sorted(set(bag))
    fixed = {v: int(advice[v]) for v in bag if v in advice}
    und = [v for v in bag if v not in fixed]
    out = []
    bad = {ProblemKind.MIS: 1, ProblemKind.MVC: 0}.get(kind)
    inner = [(u, v) for u, v in g.edges if u in set(bag) and v in set(bag)]
    for s in range(1 << len(und)):
        x = dict(fixed)
        for i, v in enumerate(und):
            x[v] = (s >> i) & 1
        if bad is not None and any(x[u] == bad and x[v] == bad for u, v in inner):
            continue
        out.append(dict(sorted(x.items())))
    return out

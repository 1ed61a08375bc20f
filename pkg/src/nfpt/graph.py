"""Undirected simple graphs, problem kinds and objective evaluation.

Assignments are int8 numpy arrays of length ``n`` holding one of the three
:class:`VertexState` codes (``-1`` undecided, ``0`` out, ``1`` in).
"""

from __future__ import annotations

import enum
import io
from typing import Iterable, Mapping

import numpy as np


class GraphParseError(ValueError):
    """Malformed edge-list input."""

    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno


class ProblemKind(enum.Enum):
    MIS = "mis"
    MVC = "mvc"
    MAXCUT = "maxcut"

    @property
    def maximize(self) -> bool:
        return self is not ProblemKind.MVC

    @classmethod
    def parse(cls, name: "str | ProblemKind") -> "ProblemKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower().replace("-", "").replace("_", ""))
        except ValueError:
            raise ValueError(f"unknown problem kind {name!r}; expected mis, mvc or maxcut") from None


class VertexState(enum.IntEnum):
    UNDECIDED = -1
    OUT = 0
    IN = 1


_STATE_CHARS = {-1: "?", 0: "0", 1: "1"}
_CHAR_STATES = {"?": -1, "0": 0, "1": 1}


class Graph:
    """Simple undirected graph over vertices ``0..n-1``.

    Instances are treated as immutable; ``edges`` is a sorted tuple of
    ``(u, v)`` pairs with ``u < v``.
    """

    __slots__ = ("n", "edges", "adj", "_masks", "_edge_array")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop on {u}; use normalize() for raw input")
            es.add((u, v) if u < v else (v, u))
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(es))
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.adj: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in nbrs)
        self._masks = None
        self._edge_array = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def neighbors(self, u: int) -> frozenset[int]:
        return self.adj[u]

    def closed_neighbors(self, u: int) -> frozenset[int]:
        return self.adj[u] | {u}

    @property
    def masks(self) -> tuple[int, ...]:
        """Adjacency rows as Python-int bitsets."""
        if self._masks is None:
            rows = []
            for nb in self.adj:
                x = 0
                for v in nb:
                    x |= 1 << v
                rows.append(x)
            self._masks = tuple(rows)
        return self._masks

    @property
    def edge_array(self) -> np.ndarray:
        if self._edge_array is None:
            arr = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
            arr.setflags(write=False)
            self._edge_array = arr
        return self._edge_array

    def subgraph(self, keep: Iterable[int]) -> "Graph":
        """Induced subgraph, relabelled in increasing id order."""
        keep = sorted(set(keep))
        index = {v: i for i, v in enumerate(keep)}
        return Graph(len(keep), ((index[u], index[v]) for u, v in self.edges if u in index and v in index))

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def normalize(n: int, edges: Iterable[tuple[int, int]]) -> tuple[Graph, dict[int, int]]:
    """Drop self-loops, duplicate edges and isolated vertices; relabel to 0..n'-1.

    ``n`` is the raw vertex count; ids it covers that touch no edge are
    isolated and disappear. Returns the graph and the old-to-new id mapping
    for the surviving vertices.
    """
    es = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            continue
        es.add((u, v) if u < v else (v, u))
    used = sorted({x for e in es for x in e})
    if used and used[0] < 0:
        raise ValueError("negative vertex id")
    mapping = {old: new for new, old in enumerate(used)}
    return Graph(len(used), ((mapping[u], mapping[v]) for u, v in es)), mapping


def parse_edge_list(data: "str | bytes | io.IOBase") -> Graph:
    """Parse ``u v`` lines (``#`` comments allowed) into a normalized graph."""
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    edges = []
    top = -1
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(lineno, raw, "expected two vertex ids")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(lineno, raw, "vertex ids must be integers") from None
        if u < 0 or v < 0:
            raise GraphParseError(lineno, raw, "vertex ids must be nonnegative")
        edges.append((u, v))
        top = max(top, u, v)
    g, _ = normalize(top + 1, edges)
    return g


def format_edge_list(g: Graph) -> str:
    lines = [f"# n={g.n} m={g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    with open(path, "rb") as fh:
        return parse_edge_list(fh.read())


def write_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_edge_list(g))


# -- assignments ------------------------------------------------------------


def undecided(n: int) -> np.ndarray:
    return np.full(n, VertexState.UNDECIDED, dtype=np.int8)


def as_assignment(states, n: int | None = None) -> np.ndarray:
    """Coerce a state string, a sequence of codes or a vertex set to an int8 array.

    A ``set``/``frozenset`` is read as the IN-set of a complete assignment
    and requires ``n``.
    """
    if isinstance(states, str):
        try:
            arr = np.array([_CHAR_STATES[c] for c in states], dtype=np.int8)
        except KeyError as exc:
            raise ValueError(f"bad state character {exc.args[0]!r}") from None
    elif isinstance(states, (set, frozenset)):
        if n is None:
            raise ValueError("n is required to expand a vertex set")
        arr = np.zeros(n, dtype=np.int8)
        arr[list(states)] = 1
    else:
        arr = np.asarray(states, dtype=np.int8).copy()
    if n is not None and arr.shape != (n,):
        raise ValueError(f"assignment length {arr.shape[0]} != n={n}")
    if arr.size and (arr.min() < -1 or arr.max() > 1):
        raise ValueError("state codes must be -1, 0 or 1")
    return arr


def state_string(a) -> str:
    return "".join(_STATE_CHARS[int(x)] for x in np.asarray(a))


def is_complete(a) -> bool:
    return bool(np.all(np.asarray(a) >= 0))


def selected(a) -> frozenset[int]:
    return frozenset(np.flatnonzero(np.asarray(a) == 1).tolist())


def _require_complete(g: Graph, a) -> np.ndarray:
    a = np.asarray(a)
    if a.shape != (g.n,):
        raise ValueError(f"assignment length {a.shape} does not match n={g.n}")
    if not is_complete(a):
        raise ValueError("assignment has undecided vertices")
    return a


def evaluate(g: Graph, kind: ProblemKind, a) -> int:
    """Objective value of a complete assignment (feasibility not checked)."""
    kind = ProblemKind.parse(kind)
    a = _require_complete(g, a)
    if kind is ProblemKind.MAXCUT:
        if g.m == 0:
            return 0
        e = g.edge_array
        return int(np.count_nonzero(a[e[:, 0]] != a[e[:, 1]]))
    return int(np.count_nonzero(a == 1))


def is_feasible(g: Graph, kind: ProblemKind, a) -> bool:
    kind = ProblemKind.parse(kind)
    a = _require_complete(g, a)
    if kind is ProblemKind.MAXCUT or g.m == 0:
        return True
    e = g.edge_array
    lhs, rhs = a[e[:, 0]], a[e[:, 1]]
    if kind is ProblemKind.MIS:
        return not bool(np.any((lhs == 1) & (rhs == 1)))
    return bool(np.all((lhs == 1) | (rhs == 1)))


def partial_conflicts(g: Graph, kind: ProblemKind, a) -> list[tuple[int, int]]:
    """Edges whose two decided endpoints already violate the kind's constraint."""
    kind = ProblemKind.parse(kind)
    a = np.asarray(a)
    if kind is ProblemKind.MAXCUT or g.m == 0:
        return []
    e = g.edge_array
    lhs, rhs = a[e[:, 0]], a[e[:, 1]]
    bad_state = 1 if kind is ProblemKind.MIS else 0
    bad = (lhs == bad_state) & (rhs == bad_state)
    return [tuple(map(int, row)) for row in e[bad]]


def extends(full, partial) -> bool:
    """True when ``full`` agrees with every decided entry of ``partial``."""
    full, partial = np.asarray(full), np.asarray(partial)
    decided = partial >= 0
    return full.shape == partial.shape and bool(np.all(full[decided] == partial[decided]))


def restrict(a, vertices: Iterable[int]) -> dict[int, int]:
    a = np.asarray(a)
    return {int(v): int(a[v]) for v in sorted(vertices)}


def apply_fixed(n: int, fixed: Mapping[int, int]) -> np.ndarray:
    out = undecided(n)
    for v, s in fixed.items():
        out[v] = s
    return out

"""Tree decompositions: min-degree construction, validation, pruning, rooting.

Bags are ``frozenset`` objects of graph vertices. A :class:`TreeDecomposition` is an
unrooted forest of bags; :func:`root_and_order` turns it into a
:class:`RootedTD` with a parent array and a bottom-up node order.
"""

from __future__ import annotations

import dataclasses
import heapq
from collections import deque
from typing import Iterable, Iterator

from .graph import Graph


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


@dataclasses.dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        if not self.bags:
            return -1
        return max(len(b) for b in self.bags) - 1

    def __len__(self) -> int:
        return len(self.bags)

    def neighbors(self) -> list[set[int]]:
        nb: list[set[int]] = [set() for _ in self.bags]
        for a, b in self.edges:
            nb[a].add(b)
            nb[b].add(a)
        return nb


@dataclasses.dataclass(frozen=True)
class RootedTD:
    """Rooted tree of bags; ``order`` lists every node after all of its children."""

    bags: tuple[frozenset[int], ...]
    parent: tuple[int, ...]
    order: tuple[int, ...]
    root: int

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    @property
    def children(self) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in self.bags]
        for t, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(t)
        return ch

    def depths(self) -> list[int]:
        depth = [0] * len(self.bags)
        for t in reversed(self.order):
            p = self.parent[t]
            if p >= 0:
                depth[t] = depth[p] + 1
        return depth

    def unrooted(self) -> TreeDecomposition:
        return TreeDecomposition(self.bags, tuple((t, p) for t, p in enumerate(self.parent) if p >= 0))


# -- construction -----------------------------------------------------------


def min_degree_td(g: Graph) -> TreeDecomposition:
    """Min-degree elimination; ties go to the smallest vertex id.

    Eliminating ``u`` emits the bag ``{u} | N(u)`` and makes ``N(u)`` a clique
    in a working copy of the adjacency. The bag is linked to the bag of the
    first vertex of ``N(u)`` eliminated afterwards, which contains ``N(u)``.
    Once the remaining graph is a clique it becomes one final bag. Bags are
    returned in reverse creation order, so bag 0 is the last one built.
    """
    n = g.n
    if n == 0:
        return TreeDecomposition((), ())
    adj = list(g.masks)
    deg = [a.bit_count() for a in adj]
    heap = [(deg[v], v) for v in range(n)]
    heapq.heapify(heap)
    alive = [True] * n
    remaining = n
    bags: list[int] = []
    link_nbrs: list[int] = []
    bag_of = [-1] * n
    step_of = [0] * n
    step = 0
    while remaining:
        d, u = heapq.heappop(heap)
        if not alive[u] or d != deg[u]:
            continue
        if d == remaining - 1:
            # every live vertex has degree remaining-1: the rest is a clique
            final = adj[u] | (1 << u)
            idx = len(bags)
            bags.append(final)
            link_nbrs.append(0)
            for v in iter_bits(final):
                bag_of[v] = idx
                step_of[v] = step
                alive[v] = False
            break
        nb = adj[u]
        idx = len(bags)
        bags.append(nb | (1 << u))
        link_nbrs.append(nb)
        bag_of[u] = idx
        step_of[u] = step
        step += 1
        alive[u] = False
        remaining -= 1
        ubit = 1 << u
        for v in iter_bits(nb):
            new = (adj[v] | nb) & ~(1 << v) & ~ubit
            adj[v] = new
            c = new.bit_count()
            if c != deg[v]:
                deg[v] = c
                heapq.heappush(heap, (c, v))
        adj[u] = 0

    tree_edges = []
    for idx, nb in enumerate(link_nbrs):
        if not nb:
            continue
        first = min(iter_bits(nb), key=lambda v: step_of[v])
        tree_edges.append((idx, bag_of[first]))
    k = len(bags)
    flip = lambda i: k - 1 - i  # noqa: E731
    out_bags = tuple(frozenset(iter_bits(bags[flip(i)])) for i in range(k))
    out_edges = tuple(sorted((min(flip(a), flip(b)), max(flip(a), flip(b))) for a, b in tree_edges))
    return TreeDecomposition(out_bags, out_edges)


# -- validation -------------------------------------------------------------


def validate_td(g: Graph, td: "TreeDecomposition | RootedTD") -> tuple[bool, str | None]:
    """Check the decomposition; returns ``(ok, first violated property)``.

    Property names: ``"tree"`` (bag graph is a forest), ``"union"``,
    ``"edge"`` and ``"subtree"``.
    """
    if isinstance(td, RootedTD):
        td = td.unrooted()
    k = len(td.bags)
    # forest check with union-find
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    seen_edges = set()
    for a, b in td.edges:
        if not (0 <= a < k and 0 <= b < k) or a == b or (min(a, b), max(a, b)) in seen_edges:
            return False, "tree"
        seen_edges.add((min(a, b), max(a, b)))
        ra, rb = find(a), find(b)
        if ra == rb:
            return False, "tree"
        parent[ra] = rb

    masks = [to_mask(b) for b in td.bags]
    covered = 0
    for m in masks:
        covered |= m
    if covered != (1 << g.n) - 1:
        return False, "union"

    reach = [0] * g.n
    count = [0] * g.n
    for m in masks:
        for v in iter_bits(m):
            reach[v] |= m
            count[v] += 1
    gm = g.masks
    for u in range(g.n):
        if gm[u] & ~reach[u]:
            return False, "edge"

    shared = [0] * g.n
    for a, b in td.edges:
        for v in iter_bits(masks[a] & masks[b]):
            shared[v] += 1
    # in a forest, the bags holding v form count - shared components
    for v in range(g.n):
        if count[v] - shared[v] != 1:
            return False, "subtree"
    return True, None


# -- pruning ----------------------------------------------------------------


def prune_bags(td: TreeDecomposition) -> TreeDecomposition:
    """Contract every bag into an adjacent superset bag, reattaching its other neighbours.

    Bag order is preserved among survivors (the lowest surviving index keeps
    index 0, and so on).
    """
    k = len(td.bags)
    if k <= 1:
        return td
    masks = [to_mask(b) for b in td.bags]
    nbrs = td.neighbors()
    removed = [False] * k
    work = deque(range(k))
    queued = [True] * k
    while work:
        a = work.popleft()
        queued[a] = False
        if removed[a]:
            continue
        host = -1
        for b in sorted(nbrs[a]):
            if masks[a] & ~masks[b] == 0:
                host = b
                break
        if host < 0:
            continue
        for c in nbrs[a]:
            if c == host:
                continue
            nbrs[c].discard(a)
            nbrs[c].add(host)
            nbrs[host].add(c)
        nbrs[host].discard(a)
        nbrs[a] = set()
        removed[a] = True
        for x in (host, *nbrs[host]):
            if not queued[x]:
                queued[x] = True
                work.append(x)
    keep = [t for t in range(k) if not removed[t]]
    index = {t: i for i, t in enumerate(keep)}
    edges = sorted({(min(index[a], index[b]), max(index[a], index[b])) for a in keep for b in nbrs[a]})
    return TreeDecomposition(tuple(td.bags[t] for t in keep), tuple(edges))


# -- rooting ----------------------------------------------------------------


def root_and_order(td: TreeDecomposition, root: int = 0) -> RootedTD:
    """Root at ``root``; a forest gets a virtual empty root joining its components.

    An empty decomposition becomes a single empty root bag.
    """
    k = len(td.bags)
    if k == 0:
        return RootedTD((frozenset(),), (-1,), (0,), 0)
    nbrs = td.neighbors()
    parent = [-2] * k
    comp_roots = []
    for start in [root] + [t for t in range(k) if t != root]:
        if parent[start] != -2:
            continue
        comp_roots.append(start)
        parent[start] = -1
        stack = [start]
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if parent[y] == -2:
                    parent[y] = x
                    stack.append(y)
    bags = list(td.bags)
    if len(comp_roots) > 1:
        virtual = k
        bags.append(frozenset())
        parent.append(-1)
        for r in comp_roots:
            parent[r] = virtual
        root = virtual
    children: list[list[int]] = [[] for _ in bags]
    for t, p in enumerate(parent):
        if p >= 0:
            children[p].append(t)
    order = []
    stack = [(root, False)]
    while stack:
        x, done = stack.pop()
        if done:
            order.append(x)
            continue
        stack.append((x, True))
        for c in reversed(children[x]):
            stack.append((c, False))
    return RootedTD(tuple(bags), tuple(parent), tuple(order), root)


def decompose(g: Graph) -> RootedTD:
    """Min-degree decomposition, pruned and rooted."""
    return root_and_order(prune_bags(min_degree_td(g)))


# -- text format ------------------------------------------------------------


def format_td(td: RootedTD) -> str:
    """One line per bag: ``t parent v1 v2 ...`` (parent -1 at the root)."""
    lines = []
    for t, bag in enumerate(td.bags):
        lines.append(" ".join(map(str, [t, td.parent[t], *sorted(bag)])))
    return "\n".join(lines) + "\n"


def parse_td(text: str) -> RootedTD:
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            t, p, *vs = (int(x) for x in line.split())
        except ValueError:
            raise ValueError(f"line {lineno}: expected integers: {raw!r}") from None
        rows[t] = (p, frozenset(vs))
    k = len(rows)
    if sorted(rows) != list(range(k)):
        raise ValueError("bag ids must be 0..k-1")
    roots = [t for t, (p, _) in rows.items() if p == -1]
    if len(roots) != 1:
        raise ValueError(f"expected exactly one root, found {len(roots)}")
    td = TreeDecomposition(
        tuple(rows[t][1] for t in range(k)),
        tuple((t, p) for t, (p, _) in sorted(rows.items()) if p >= 0),
    )
    rooted = root_and_order(td, roots[0])
    if rooted.parent != tuple(rows[t][0] for t in range(k)):
        raise ValueError("parent pointers do not form a tree")
    return rooted

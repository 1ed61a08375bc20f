"""Seeded random-graph families (ER, BA, WS, RR, HK) and dataset profiles.

All randomness flows through ``numpy.random.Generator(PCG64(seed))`` so a
given seed yields the same edge set on every platform. Per-instance seeds are
derived with :func:`mix`, a SplitMix64 finalizer over the pair.
"""

from __future__ import annotations

import dataclasses
import itertools
from collections import Counter
from typing import Any

import numpy as np

from .graph import Graph, normalize

_MASK64 = (1 << 64) - 1
FAMILIES = ("ER", "BA", "WS", "RR", "HK")


class ConfigurationError(ValueError):
    pass


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix(*parts: int) -> int:
    """Fold integers into one 64-bit seed: ``h = splitmix64(h ^ splitmix64(p))``."""
    h = 0
    for p in parts:
        h = splitmix64(h ^ splitmix64(int(p) & _MASK64))
    return h


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


@dataclasses.dataclass(frozen=True)
class GenSpec:
    """One random-graph configuration.

    ``params`` per family: ER ``p``; BA ``m``; WS ``k``, ``p``; RR ``d``;
    HK ``m_range`` (inclusive pair) and ``p``.
    """

    family: str
    n_range: tuple[int, int]
    params: dict[str, Any]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", self.family.upper())
        lo, hi = self.n_range
        object.__setattr__(self, "n_range", (int(lo), int(hi)))
        validate_spec(self)

    def with_seed(self, seed: int) -> "GenSpec":
        return dataclasses.replace(self, seed=seed)


def validate_spec(spec: GenSpec) -> None:
    fam, (lo, hi), p = spec.family, spec.n_range, spec.params
    if fam not in FAMILIES:
        raise ConfigurationError(f"unknown family {fam!r}")
    if lo < 0 or hi < lo:
        raise ConfigurationError(f"bad n_range {spec.n_range}")
    need = {"ER": ("p",), "BA": ("m",), "WS": ("k", "p"), "RR": ("d",), "HK": ("m_range", "p")}[fam]
    missing = [k for k in need if k not in p]
    if missing:
        raise ConfigurationError(f"{fam} requires parameters {missing}")
    if "p" in p and not 0.0 <= float(p["p"]) <= 1.0:
        raise ConfigurationError("p must lie in [0, 1]")
    if fam == "BA" and not 1 <= int(p["m"]) < max(lo, 2):
        raise ConfigurationError(f"BA needs 1 <= m < n (m={p['m']}, n>={lo})")
    if fam == "WS" and not 0 <= int(p["k"]) < lo:
        raise ConfigurationError(f"WS needs k < n (k={p['k']}, n>={lo})")
    if fam == "RR":
        d = int(p["d"])
        if d < 0 or (lo <= d and d > 0):
            raise ConfigurationError(f"RR needs 0 <= d < n (d={d}, n>={lo})")
        if d % 2 and lo == hi and lo % 2:
            raise ConfigurationError("RR needs n*d even")
    if fam == "HK":
        mlo, mhi = p["m_range"]
        if not 1 <= mlo <= mhi < max(lo, 2):
            raise ConfigurationError(f"HK needs 1 <= m_lo <= m_hi < n (got {p['m_range']})")


# -- the five families ------------------------------------------------------


def erdos_renyi(n: int, p: float, rng: np.random.Generator) -> list[tuple[int, int]]:
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return list(zip(iu[keep].tolist(), ju[keep].tolist()))


def _random_subset(seq: list[int], m: int, rng: np.random.Generator) -> set[int]:
    # uniform draws from a repeated-endpoint list == degree-proportional choice
    targets: set[int] = set()
    size = len(seq)
    while len(targets) < m:
        targets.add(seq[int(rng.integers(size))])
    return targets


def barabasi_albert(n: int, m: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Preferential attachment seeded by a star on ``m + 1`` vertices: m*(n-m) edges."""
    edges = [(0, v) for v in range(1, m + 1)]
    repeated = [0] * m + list(range(1, m + 1))
    for source in range(m + 1, n):
        targets = _random_subset(repeated, m, rng)
        edges.extend((t, source) for t in sorted(targets))
        repeated.extend(sorted(targets))
        repeated.extend([source] * m)
    return edges


def holme_kim(n: int, m: int, p: float, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Preferential attachment with triad-formation steps taken with probability ``p``."""
    nbrs: list[set[int]] = [set() for _ in range(n)]
    repeated = list(range(m))
    for source in range(m, n):
        pool = sorted(_random_subset(repeated, m, rng))
        rng.shuffle(pool)
        target = pool.pop()
        nbrs[source].add(target)
        nbrs[target].add(source)
        repeated.append(target)
        count = 1
        while count < m:
            if rng.random() < p:
                closing = sorted(w for w in nbrs[target] if w != source and w not in nbrs[source])
                if closing:
                    w = closing[int(rng.integers(len(closing)))]
                    nbrs[source].add(w)
                    nbrs[w].add(source)
                    repeated.append(w)
                    count += 1
                    continue
            if not pool:
                break
            target = pool.pop()
            nbrs[source].add(target)
            nbrs[target].add(source)
            repeated.append(target)
            count += 1
        repeated.extend([source] * m)
    return [(u, v) for u in range(n) for v in nbrs[u] if u < v]


def watts_strogatz(n: int, k: int, p: float, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Ring lattice with ``k // 2`` neighbours per side, each lattice edge rewired w.p. ``p``."""
    half = k // 2
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for j in range(1, half + 1):
        for u in range(n):
            v = (u + j) % n
            nbrs[u].add(v)
            nbrs[v].add(u)
    for j in range(1, half + 1):
        for u in range(n):
            v = (u + j) % n
            if v not in nbrs[u] or rng.random() >= p:
                continue
            if len(nbrs[u]) >= n - 1:
                continue
            w = int(rng.integers(n))
            while w == u or w in nbrs[u]:
                w = int(rng.integers(n))
            nbrs[u].discard(v)
            nbrs[v].discard(u)
            nbrs[u].add(w)
            nbrs[w].add(u)
    return [(u, v) for u in range(n) for v in nbrs[u] if u < v]


def random_regular(n: int, d: int, rng: np.random.Generator, max_restarts: int = 1000) -> list[tuple[int, int]]:
    """Uniform-ish d-regular graph via stub pairing that re-pairs only the clashing stubs."""
    if d == 0 or n == 0:
        return []

    def attempt():
        edges: set[tuple[int, int]] = set()
        stubs = np.repeat(np.arange(n), d)
        while stubs.size:
            rng.shuffle(stubs)
            leftover: Counter[int] = Counter()
            for a, b in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
                if a > b:
                    a, b = b, a
                if a != b and (a, b) not in edges:
                    edges.add((a, b))
                else:
                    leftover[a] += 1
                    leftover[b] += 1
            if not leftover:
                break
            # no compatible pair left among the leftover stubs -> restart
            keys = sorted(leftover)
            if not any((u, v) not in edges for u, v in itertools.combinations(keys, 2)):
                return None
            stubs = np.array([v for v in keys for _ in range(leftover[v])], dtype=np.int64)
        return sorted(edges)

    for _ in range(max_restarts):
        out = attempt()
        if out is not None:
            return out
    raise ConfigurationError(f"could not realise a {d}-regular graph on {n} vertices")


def sample_n(spec: GenSpec, rng: np.random.Generator) -> int:
    lo, hi = spec.n_range
    while True:
        n = int(rng.integers(lo, hi + 1))
        if spec.family != "RR" or (n * int(spec.params["d"])) % 2 == 0:
            return n


def generate_raw(spec: GenSpec) -> tuple[int, list[tuple[int, int]]]:
    """Sample ``n`` then the family's edges, before normalization."""
    rng = make_rng(spec.seed)
    n = sample_n(spec, rng)
    p = spec.params
    fam = spec.family
    if fam == "ER":
        edges = erdos_renyi(n, float(p["p"]), rng)
    elif fam == "BA":
        m = int(p["m"])
        if m >= n:
            raise ConfigurationError(f"BA needs m < n (m={m}, n={n})")
        edges = barabasi_albert(n, m, rng)
    elif fam == "WS":
        k = int(p["k"])
        if k >= n:
            raise ConfigurationError(f"WS needs k < n (k={k}, n={n})")
        edges = watts_strogatz(n, k, float(p["p"]), rng)
    elif fam == "RR":
        d = int(p["d"])
        if d >= n and d > 0:
            raise ConfigurationError(f"RR needs d < n (d={d}, n={n})")
        edges = random_regular(n, d, rng)
    else:
        mlo, mhi = (int(x) for x in p["m_range"])
        m = int(rng.integers(mlo, mhi + 1))
        if m >= n:
            raise ConfigurationError(f"HK needs m < n (m={m}, n={n})")
        edges = holme_kim(n, m, float(p["p"]), rng)
    return n, edges


def generate(spec: GenSpec) -> Graph:
    n, edges = generate_raw(spec)
    g, _ = normalize(n, edges)
    return g


# -- dataset profiles -------------------------------------------------------

_SMALL, _LARGE = (700, 800), (1000, 1200)

# name -> (family, n_range, params, reported mean (|V|, |E|))
FULL_DATASETS: dict[str, tuple[str, tuple[int, int], dict[str, Any], tuple[float, float]]] = {
    "ER_SS": ("ER", _SMALL, {"p": 0.03}, (748.05, 8408.72)),
    "ER_SD": ("ER", _SMALL, {"p": 0.08}, (750.54, 22551.89)),
    "ER_LS": ("ER", _LARGE, {"p": 0.03}, (1102.32, 18258.46)),
    "ER_LD": ("ER", _LARGE, {"p": 0.08}, (1103.03, 48750.79)),
    "BA_SS": ("BA", _SMALL, {"m": 3}, (748.46, 1840.49)),
    "BA_SD": ("BA", _SMALL, {"m": 15}, (749.43, 10655.76)),
    "BA_LS": ("BA", _LARGE, {"m": 3}, (1101.31, 2702.49)),
    "BA_LD": ("BA", _LARGE, {"m": 15}, (1090.02, 15538.75)),
    "WS_SS": ("WS", _SMALL, {"k": 15, "p": 0.1}, (748.05, 5236.35)),
    "WS_SD": ("WS", _SMALL, {"k": 25, "p": 0.1}, (750.54, 9006.48)),
    "WS_LS": ("WS", _LARGE, {"k": 15, "p": 0.1}, (1102.32, 7716.24)),
    "WS_LD": ("WS", _LARGE, {"k": 25, "p": 0.1}, (1103.03, 13236.36)),
    "Reg_SS": ("RR", (800, 900), {"d": 6}, (848.05, 2544.15)),
    "Reg_SD": ("RR", (800, 900), {"d": 16}, (850.54, 6804.32)),
    "Reg_LS": ("RR", _LARGE, {"d": 6}, (1102.32, 3306.96)),
    "Reg_LD": ("RR", _LARGE, {"d": 16}, (1103.03, 8824.24)),
    "HK_SS": ("HK", _SMALL, {"m_range": (3, 7), "p": 0.3}, (748.46, 3299.16)),
    "HK_SD": ("HK", _SMALL, {"m_range": (10, 15), "p": 0.3}, (746.66, 8743.89)),
    "HK_LS": ("HK", _LARGE, {"m_range": (3, 7), "p": 0.3}, (1101.31, 4941.53)),
    "HK_LD": ("HK", _LARGE, {"m_range": (10, 15), "p": 0.3}, (1096.27, 13172.38)),
}

# small sparse graphs whose min-degree width stays low enough for an exact reference
DESK_DATASETS: dict[str, tuple[str, tuple[int, int], dict[str, Any]]] = {
    "ER_desk": ("ER", (40, 80), {"p": 0.05}),
    "BA_desk": ("BA", (40, 80), {"m": 2}),
    "WS_desk": ("WS", (40, 80), {"k": 4, "p": 0.1}),
    "Reg_desk": ("RR", (40, 80), {"d": 3}),
    "HK_desk": ("HK", (40, 80), {"m_range": (1, 2), "p": 0.3}),
}


def dataset_spec(name: str, seed: int = 0) -> GenSpec:
    if name in FULL_DATASETS:
        fam, nr, params, _ = FULL_DATASETS[name]
    elif name in DESK_DATASETS:
        fam, nr, params = DESK_DATASETS[name]
    else:
        raise ConfigurationError(f"unknown dataset {name!r}")
    return GenSpec(fam, nr, dict(params), seed)


def instance_specs(spec: GenSpec, count: int) -> list[GenSpec]:
    """``count`` per-instance specs whose seeds are ``mix(spec.seed, i)``."""
    return [spec.with_seed(mix(spec.seed, i)) for i in range(count)]

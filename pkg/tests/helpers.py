import itertools

import numpy as np

from nfpt.generators import GenSpec, generate, mix
from nfpt.graph import Graph

KINDS = ("mis", "mvc", "maxcut")

_SMALL_FAMILIES = [
    ("ER", {"p": 0.3}),
    ("BA", {"m": 2}),
    ("WS", {"k": 4, "p": 0.2}),
    ("RR", {"d": 3}),
    ("HK", {"m_range": (1, 3), "p": 0.4}),
]


def small_corpus(count: int, n_max: int = 20, seed: int = 7) -> list[Graph]:
    """Mixed-family graphs with 6 <= n <= n_max, cycling through the families."""
    out = []
    i = 0
    while len(out) < count:
        family, params = _SMALL_FAMILIES[i % len(_SMALL_FAMILIES)]
        g = generate(GenSpec(family, (6, n_max), params, mix(seed, i)))
        i += 1
        if g.n >= 2:
            out.append(g)
    return out


def cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def two_cliques() -> Graph:
    """K7 on 0..6 glued to K6 on 4..9: width 6, two deletions reach width 4."""
    edges = set(itertools.combinations(range(7), 2)) | set(itertools.combinations(range(4, 10), 2))
    return Graph(10, edges)




def random_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    iu = np.triu_indices(n, 1)
    keep = rng.random(iu[0].size) < p
    return Graph(n, zip(iu[0][keep].tolist(), iu[1][keep].tolist()))

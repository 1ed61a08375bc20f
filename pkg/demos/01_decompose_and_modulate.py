"""Tree decompositions and treewidth modulators, step by step.

Two cliques sharing three vertices give a decomposition of width 6. At a
target width of 4 the largest bag must shed two vertices and the smaller one
must shed one, so a well-placed pair in the overlap fixes both.
"""

import itertools

from nfpt.graph import Graph
from nfpt.modulator import modulator_exact, modulator_greedy, residual_bags, verify_modulator
from nfpt.treedecomp import decompose, format_td, min_degree_td, prune_bags, validate_td

edges = set(itertools.combinations(range(7), 2)) | set(itertools.combinations(range(4, 10), 2))
g = Graph(10, edges)
print(f"graph: n={g.n} m={g.m}")

raw = min_degree_td(g)
pruned = prune_bags(raw)
print(f"min-degree elimination: {len(raw)} bags, width {raw.width}")
print(f"after pruning subset bags: {len(pruned)} bags, width {pruned.width}")
print("valid:", validate_td(g, pruned))

td = decompose(g)
print("\nrooted decomposition (bag, parent, vertices):")
print(format_td(td), end="")

for eta in (6, 5, 4, 3):
    exact = modulator_exact(td, eta)
    greedy = modulator_greedy(td, eta)
    widest = max(len(b) for b in residual_bags(td, exact)) - 1
    print(f"eta={eta}: exact {sorted(exact.vertices)} (residual width {widest}), "
          f"greedy size {len(greedy)}, both feasible: {verify_modulator(td, exact) and verify_modulator(td, greedy)}")

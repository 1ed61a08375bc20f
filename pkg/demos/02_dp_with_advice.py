"""The dynamic program, with and without advice.

Without a modulator the DP is exact and we check it against brute force.
With a modulator, the advice pins those vertices and each bag only
enumerates its remaining vertices. Good advice recovers the optimum and
any oracle's own advice is never made worse.
"""

import numpy as np

from nfpt.exact import brute_force
from nfpt.generators import GenSpec, generate
from nfpt.graph import evaluate, restrict
from nfpt.modulator import modulator_exact
from nfpt.oracles import OracleCall, advice_from, oracle_random_greedy
from nfpt.tdpa import TdpaSolver
from nfpt.treedecomp import decompose

g = generate(GenSpec("HK", (18, 18), {"m_range": (2, 3), "p": 0.4}, seed=11))
td = decompose(g)
print(f"graph n={g.n} m={g.m}, decomposition width {td.width}")

for kind in ("mis", "mvc", "maxcut"):
    dp = TdpaSolver(g, td, None, kind).solve()
    bf = brute_force(g, kind)
    print(f"{kind:>6}: dp {dp.value}  brute force {bf.value}  peak bag states {max(dp.bag_states)}")

eta = 2
mod = modulator_exact(td, eta)
print(f"\nmodulator at eta={eta}: {sorted(mod.vertices)}")
for kind in ("mis", "mvc", "maxcut"):
    solver = TdpaSolver(g, td, mod, kind)
    best = brute_force(g, kind)
    perfect = solver.solve(restrict(best.assignment, mod.vertices))
    lifts = []
    for seed in range(5):
        full = oracle_random_greedy(OracleCall.fresh(g, kind, seed)).full
        lifts.append((evaluate(g, kind, full), solver.solve(advice_from(full, mod)).value))
    print(f"{kind:>6}: optimal advice -> {perfect.value} (optimum {best.value}), peak states {max(perfect.bag_states)} <= {2 ** (eta + 1)}")
    print(f"        greedy oracle -> with advice: {lifts}")

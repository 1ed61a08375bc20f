"""Oracles, incremental confidence and randomized deferral.

The random greedy oracle stands in for a learned sampler. We look at vote
counts across trajectories, at what ICL commits round by round, and at the
seed states randomized deferral produces. At the end the shipped stub runs
as a child process over the line protocol.
"""

import numpy as np

from nfpt.generators import GenSpec, generate
from nfpt.graph import Graph, evaluate, state_string
from nfpt.meta import IclParams, RdParams, defer, icl_run, rd_run, vote_counts
from nfpt.modulator import modulator_exact
from nfpt.oracles import ExternalOracle, OracleCall, oracle_random_greedy, stub_command
from nfpt.tdpa import TdpaSolver
from nfpt.treedecomp import decompose

g = generate(GenSpec("BA", (40, 40), {"m": 2}, seed=3))
td = decompose(g)
mod = modulator_exact(td, 2)
print(f"graph n={g.n} m={g.m}, width {td.width}, modulator {len(mod)} vertices")

trajs = np.stack([oracle_random_greedy(OracleCall.fresh(g, "mis", s)).full for s in range(8)])
print("IN votes over 8 trajectories (first 20 vertices):", vote_counts(trajs)[:20].tolist())

res = icl_run(oracle_random_greedy, g, "mis", mod, IclParams(k=8), seed=1)
for r, state in enumerate(res.history):
    print(f"  after round {r}: {int((state >= 0).sum()):2d} committed  {state_string(state)[:40]}")
solver = TdpaSolver(g, td, mod, "mis")
print(f"ICL rounds={res.rounds} fallback={res.fallback}, IT value {solver.solve(res.advice).value}")

print("\ndeferral on the small example:")
example = Graph(5, [(0, 1), (0, 2), (2, 3), (3, 4)])
print("  [0,1,1,0,1] revert vertex 2 ->", state_string(defer(example, "mis", np.array([0, 1, 1, 0, 1]), [2])))

rounds = rd_run(oracle_random_greedy, g, "mis", mod, RdParams(rho=0.25, rounds=6), seed=2)
for i, r in enumerate(rounds):
    print(f"  round {i}: seed undecided {int((r.seed_state < 0).sum()):2d}, "
          f"oracle {evaluate(g, 'mis', r.trajectory)}, with DP {solver.solve(r.advice).value}")

print("\nexternal stub over the protocol:")
with ExternalOracle(stub_command("greedy")) as ext:
    full = ext(OracleCall.fresh(g, "maxcut", 5)).full
    print(f"  maxcut reply value {evaluate(g, 'maxcut', full)}")

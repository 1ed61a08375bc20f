import itertools

import numpy as np
import pytest

from nfpt.modulator import (
    Modulator,
    ModulatorBudgetExceeded,
    modulator_exact,
    modulator_greedy,
    residual_bags,
    select_modulator,
    verify_modulator,
)
from nfpt.treedecomp import decompose

from helpers import random_graph, two_cliques


def brute_min_size(bags, eta):
    """Smallest hitting-style deletion set, by trying subsets of growing size."""
    over = [b for b in bags if len(b) > eta + 1]
    pool = sorted(set().union(*over)) if over else []
    for size in range(len(pool) + 1):
        for cand in itertools.combinations(pool, size):
            s = set(cand)
            if all(len(b - s) <= eta + 1 for b in over):
                return size
    raise AssertionError("unreachable")


def test_no_violation_gives_empty():
    bags = [frozenset({0, 1, 2}), frozenset({2, 3})]
    assert modulator_exact(bags, 2).vertices == frozenset()
    assert modulator_greedy(bags, 2).vertices == frozenset()


def test_two_cliques_instance():
    td = decompose(two_cliques())
    assert td.width == 6
    mod = modulator_exact(td, 4)
    assert len(mod) == 2
    assert mod.vertices & {4, 5, 6}
    assert max(len(b) for b in residual_bags(td, mod)) - 1 <= 4


def test_single_bag_of_eight():
    bags = [frozenset(range(8))]
    assert len(modulator_exact(bags, 4)) == 3
    assert len(modulator_greedy(bags, 4)) == 3


def test_verify_examples():
    bags = [frozenset(range(8)), frozenset({6, 7, 8, 9, 10, 11})]
    mod = modulator_exact(bags, 4)
    assert verify_modulator(bags, mod)
    for v in mod.vertices:
        assert not verify_modulator(bags, Modulator(4, mod.vertices - {v}))
    assert verify_modulator([frozenset(range(5))], Modulator(4, frozenset()))


@pytest.mark.parametrize("seed", range(4))
def test_exact_is_minimal(seed):
    rng = np.random.default_rng(seed)
    checked = 0
    for _ in range(60):
        g = random_graph(rng, int(rng.integers(8, 26)), float(rng.uniform(0.15, 0.45)))
        td = decompose(g)
        eta = int(rng.integers(1, max(2, td.width)))
        over = [b for b in td.bags if len(b) > eta + 1]
        pool = set().union(*over) if over else set()
        mod = modulator_exact(td, eta)
        assert verify_modulator(td, mod)
        assert len(mod) <= len(modulator_greedy(td, eta))
        if len(pool) <= 15:
            assert len(mod) == brute_min_size(td.bags, eta)
            checked += 1
    assert checked > 10


def test_greedy_feasible_on_random():
    rng = np.random.default_rng(9)
    for _ in range(50):
        g = random_graph(rng, 60, 0.2)
        td = decompose(g)
        for eta in (0, 3, 6):
            assert verify_modulator(td, modulator_greedy(td, eta))


def test_budget_exceeded_falls_back():
    rng = np.random.default_rng(2)
    td = decompose(random_graph(rng, 120, 0.3))
    with pytest.raises(ModulatorBudgetExceeded) as info:
        modulator_exact(td, 3, node_budget=5)
    assert info.value.incumbent
    mod = select_modulator(td, 3, "auto", node_budget=5)
    assert mod.method == "greedy" and verify_modulator(td, mod)


def test_format_round_trip():
    mod = Modulator(4, frozenset({7, 2, 9}))
    assert mod.format() == "4 2 7 9"
    assert Modulator.parse(mod.format()).vertices == mod.vertices
    with pytest.raises(ValueError):
        Modulator.parse("")
    with pytest.raises(ValueError):
        select_modulator([], 2, "magic")

import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nfpt.graph import (
    Graph,
    GraphParseError,
    ProblemKind,
    as_assignment,
    evaluate,
    extends,
    format_edge_list,
    is_feasible,
    normalize,
    parse_edge_list,
    partial_conflicts,
    read_graph,
    restrict,
    state_string,
    write_graph,
)

from helpers import complete, cycle, path


def test_parse_path():
    g = parse_edge_list("0 1\n1 2")
    assert (g.n, g.m) == (3, 2)


def test_self_loop_only_normalizes_to_empty():
    g = parse_edge_list("0 0")
    assert (g.n, g.m) == (0, 0)


def test_relabel_preserves_adjacency():
    g = parse_edge_list("0 2\n2 5")
    assert (g.n, g.m) == (3, 2)
    assert g.edges == ((0, 1), (1, 2))


def test_parse_accepts_bytes_files_and_comments():
    text = "# a comment\n0 1\n\n1 2\n"
    assert parse_edge_list(text.encode()) == parse_edge_list(io.StringIO(text)) == path(3)


@pytest.mark.parametrize("bad,lineno", [("0 1\n1\n", 2), ("0 x\n", 1), ("0 1 2\n", 1), ("0 1\n-1 2\n", 2)])
def test_parse_errors_carry_line_number(bad, lineno):
    with pytest.raises(GraphParseError) as info:
        parse_edge_list(bad)
    assert info.value.lineno == lineno


def test_normalize_drops_isolated():
    g, mapping = normalize(4, [(0, 1), (1, 2), (0, 2)])
    assert (g.n, g.m) == (3, 3)
    assert 3 not in mapping


def test_normalize_duplicate_edges():
    edges = list(complete(4).edges) + [(1, 0), (2, 3)]
    g, _ = normalize(4, edges)
    assert g.m == 6


def test_normalize_self_loop_on_star_centre():
    g, _ = normalize(6, [(0, i) for i in range(1, 6)] + [(0, 0)])
    assert g.m == 5


@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), max_size=60))
def test_normalize_invariants(edges):
    g, mapping = normalize(31, edges)
    assert all(u < v for u, v in g.edges)
    assert len(set(g.edges)) == g.m
    assert all(g.degree(u) > 0 for u in range(g.n))
    assert sorted(mapping.values()) == list(range(g.n))
    raw = {(min(u, v), max(u, v)) for u, v in edges if u != v}
    assert {(mapping[u], mapping[v]) for u, v in raw} == set(g.edges)


def test_round_trip(tmp_path):
    g = cycle(7)
    write_graph(g, tmp_path / "g.txt")
    assert read_graph(tmp_path / "g.txt") == g
    assert parse_edge_list(format_edge_list(g)) == g


def test_evaluate_examples():
    c5 = cycle(5)
    s = as_assignment({0, 2}, 5)
    assert evaluate(c5, ProblemKind.MIS, s) == 2
    assert evaluate(c5, ProblemKind.MAXCUT, s) == 4
    assert evaluate(complete(4), ProblemKind.MVC, as_assignment({0, 1, 2}, 4)) == 3


def test_evaluate_rejects_incomplete():
    with pytest.raises(ValueError):
        evaluate(cycle(5), "mis", "01?01")


def test_feasibility_examples():
    p3 = path(3)
    assert is_feasible(p3, "mis", as_assignment({0, 2}, 3))
    assert not is_feasible(p3, "mis", as_assignment({0, 1}, 3))
    assert is_feasible(p3, "mvc", as_assignment({1}, 3))
    assert not is_feasible(p3, "mvc", as_assignment({0}, 3))
    assert is_feasible(p3, "maxcut", as_assignment(set(), 3))


def test_state_strings_and_partials():
    a = as_assignment("1?0")
    assert state_string(a) == "1?0"
    assert extends(as_assignment("100"), a)
    assert not extends(as_assignment("000"), a)
    assert restrict(as_assignment("101"), [0, 1]) == {0: 1, 1: 0}
    assert partial_conflicts(path(3), "mis", as_assignment("11?")) == [(0, 1)]


def test_problem_kind_parse():
    assert ProblemKind.parse("MaxCut") is ProblemKind.MAXCUT
    assert ProblemKind.MIS.maximize and not ProblemKind.MVC.maximize
    with pytest.raises(ValueError):
        ProblemKind.parse("tsp")


def test_networkx_view_matches():
    nx = pytest.importorskip("networkx")
    g = cycle(6).to_networkx()
    assert nx.cycle_graph(6).edges == g.edges


def test_graph_rejects_out_of_range():
    with pytest.raises(ValueError):
        Graph(2, [(0, 2)])
    assert np.array_equal(path(3).edge_array, np.array([[0, 1], [1, 2]]))

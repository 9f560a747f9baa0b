import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpump.pebble import (Graph, InvalidPlacement, Move, NotEquivalent, PebblePath, SizeMismatch,
                          equivalent, format_pebble_path, graph_from_edges, parse_pebble_text,
                          pebble_solve, signature, validate_pebble_path)
from kpump.verify import brute_force_pebble_oracle

PATH3 = graph_from_edges(3, [(0, 1), (1, 2)])


def test_graph_normalizes_and_validates():
    g = Graph(3, frozenset({(1, 0), (2, 1)}))
    assert g.edges == {(0, 1), (1, 2)}
    with pytest.raises(ValueError):
        Graph(2, frozenset({(1, 1)}))
    with pytest.raises(ValueError):
        Graph(2, frozenset({(0, 2)}))


def test_components_ordered_by_smallest_vertex():
    g = graph_from_edges(5, [(3, 4), (0, 2)])
    assert g.component_labels == [0, 1, 0, 2, 2]
    assert g.component_count == 3


def test_signature_counts_per_component():
    g = graph_from_edges(5, [(3, 4), (0, 2)])
    assert signature(g, [0, 3]) == (1, 0, 1)
    assert equivalent(g, [0, 3], [2, 4])
    assert not equivalent(g, [0, 3], [1, 4])
    with pytest.raises(SizeMismatch):
        equivalent(g, [0], [0, 1])
    with pytest.raises(InvalidPlacement):
        signature(g, [0, 0])


def test_path_graph_two_moves():
    pp = pebble_solve(PATH3, [0], [2])
    assert pp.moves == (Move(0, 0, 1), Move(0, 1, 2))
    assert validate_pebble_path(PATH3, pp, [2])


def test_identity_is_empty():
    assert pebble_solve(PATH3, [0, 2], [2, 0]).moves == ()


def test_not_equivalent_raises():
    g = graph_from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(NotEquivalent):
        pebble_solve(g, [0, 1], [1, 2])


def test_star_needs_evacuation():
    # pebbles on the hub and one leaf; targets are the two other leaves
    g = graph_from_edges(4, [(0, 1), (0, 2), (0, 3)])
    pp = pebble_solve(g, [0, 1], [2, 3])
    assert validate_pebble_path(g, pp, [2, 3])


def test_validator_rejects_bad_paths():
    assert not validate_pebble_path(PATH3, PebblePath((0,), (Move(0, 0, 2),)), [2])  # no edge
    assert not validate_pebble_path(PATH3, PebblePath((0, 1), (Move(0, 0, 1),)), [1, 1])
    assert not validate_pebble_path(PATH3, PebblePath((0,), (Move(0, 1, 2),)), [2])  # wrong src
    assert not validate_pebble_path(PATH3, PebblePath((0,), ()), [2])  # wrong target


def test_text_format_round_trip():
    text = "# path\n3 2\n0 1\n1 2\nS: 0\nT: 2\n"
    g, s, t = parse_pebble_text(text)
    assert g == PATH3 and s == (0,) and t == (2,)
    out = format_pebble_path(pebble_solve(g, s, t))
    assert out == "moves: 2\n0 0 1\n0 1 2\n"


@pytest.mark.parametrize("text", ["", "3\n", "3 2\n0 1\nS: 0\nT: 1\n", "2 1\n0 1\nS: 0\n",
                                  "2 1\n0 1 1\nS: 0\nT: 1\n"])
def test_text_format_errors(text):
    with pytest.raises(ValueError):
        parse_pebble_text(text)


@st.composite
def instance(draw, max_n=8, max_k=4):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.sets(st.sampled_from(pairs), max_size=len(pairs))) if pairs else set()
    k = draw(st.integers(0, min(max_k, n)))
    s = draw(st.permutations(range(n)))[:k]
    t = draw(st.permutations(range(n)))[:k]
    return Graph(n, frozenset(edges)), tuple(s), tuple(t)


@settings(max_examples=300, deadline=None)
@given(instance())
def test_solver_matches_oracle(inst):
    g, s, t = inst
    reachable, _ = brute_force_pebble_oracle(g, s, t)
    assert reachable == equivalent(g, s, t)
    if reachable:
        pp = pebble_solve(g, s, t)
        assert validate_pebble_path(g, pp, t)
        assert set(pp.final()) == set(t)
    else:
        with pytest.raises(NotEquivalent):
            pebble_solve(g, s, t)


@settings(max_examples=100, deadline=None)
@given(instance(max_n=10, max_k=5))
def test_solver_is_deterministic(inst):
    g, s, t = inst
    if equivalent(g, s, t):
        assert pebble_solve(g, s, t) == pebble_solve(g, s, t)

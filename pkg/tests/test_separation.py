import itertools
import warnings

import pytest
from hypothesis import given

from dmgwalk import separation
from dmgwalk.algebra import Mark
from dmgwalk.graph import DirectedMixedGraph, canonicalize, new_graph, trim
from dmgwalk.marginal import marginalize
from dmgwalk.separation import (
    CanonicalizationWarning, SeparationError, SeparationQuery, UndirectedGraph,
    ancestral_m_separated, augment, collider_connected_pair, d_separated, decide_batch,
    m_separated, m_separated_via_augmentation, separated, t_separated, u_separated,
)
from dmgwalk.testbench import brute_force_walk
from dmgwalk.walks import ancestrally_blocked, blocked, collider_connected, is_t_connected
from strategies import graph_and_query, graphs


def test_fig1_printed_separations(fig1):
    assert m_separated(fig1, ["V1"], ["V2"]).separated
    assert m_separated(fig1, ["V2"], ["V4"], ["V1", "V3"]).separated
    for r in range(4):
        for L in itertools.combinations(["V1", "V2", "V3"], r):
            assert not m_separated(fig1, ["V4"], ["V5"], L).separated


def test_fig1_v1_v2_only_unconditionally(fig1):
    assert not m_separated(fig1, ["V1"], ["V2"], ["V3"]).separated
    assert not m_separated(fig1, ["V1"], ["V2"], ["V4"]).separated


def test_printed_witness(fig1):
    v = m_separated(fig1, ["V4"], ["V5"], ["V2", "V3"])
    assert v.render_witness(fig1.labels) == "V4 <-> V1 -> V3 <- V1 <-> V5"


def test_witness_is_shortest(fig1):
    for j, k in itertools.combinations(range(5), 2):
        rest = [v for v in range(5) if v not in (j, k)]
        for r in range(len(rest) + 1):
            for L in itertools.combinations(rest, r):
                v = m_separated(fig1, [j], [k], L)
                if v.separated:
                    continue
                w = v.witness
                assert not blocked(w, set(L))
                for n in range(1, len(w.steps)):
                    assert brute_force_walk(fig1, "m", [j], [k], L, n) is None


def test_empty_sets_are_separated(fig1):
    assert m_separated(fig1, [], ["V1"]).separated
    assert m_separated_via_augmentation(fig1, ["V1"], []).separated
    assert t_separated(fig1, [], []).separated


def test_overlap_is_an_error(fig1):
    with pytest.raises(SeparationError):
        m_separated(fig1, ["V1"], ["V2"], ["V1"])
    with pytest.raises(SeparationError):
        separated(fig1, "t", ["V1"], ["V1"])


def test_unknown_kind(fig1):
    with pytest.raises(SeparationError):
        separated(fig1, "q", ["V1"], ["V2"])


def test_chain_and_collider():
    chain = new_graph(["1", "2", "3"], [("1", "2"), ("2", "3")])
    assert d_separated(chain, ["1"], ["3"], ["2"]).separated
    assert not d_separated(chain, ["1"], ["3"]).separated
    col = new_graph(["1", "2", "3"], [("1", "3"), ("2", "3")])
    assert d_separated(col, ["1"], ["2"]).separated
    assert not d_separated(col, ["1"], ["2"], ["3"]).separated


def test_no_bidirected_means_no_trek():
    g = new_graph(["1", "2", "3"], [("1", "2"), ("2", "3")])
    assert t_separated(g, ["1"], ["3"]).separated


def test_t_fig1_v1_v2(fig1):
    assert t_separated(fig1, ["V1"], ["V2"]).separated


def test_ancestral_four_vertex(four):
    v = ancestral_m_separated(four, ["V1"], ["V2"], ["V4"])
    assert not v.separated
    assert v.render_witness(four.labels) == "V1 -> V3 <- V2"
    assert not ancestrally_blocked(v.witness, {3}, four)


def test_augment_collider_triangle():
    g = new_graph(["1", "2", "3"], [("1", "3"), ("2", "3")])
    with pytest.warns(CanonicalizationWarning):
        ug = augment(g)
    assert ug.edges == {(0, 1), (0, 2), (1, 2)}


def test_augment_edgeless():
    with pytest.warns(CanonicalizationWarning):
        assert augment(DirectedMixedGraph(["a", "b"])).edges == frozenset()


def test_augment_fig1_v4_v5(fig1):
    # V4 <-> V1 <-> V5 has V1 as its only (collider) interior vertex
    assert (3, 4) in augment(fig1).edges
    m = marginalize(fig1, ["V2", "V3", "V4", "V5"])
    assert (2, 3) in augment(m).edges


def test_collider_matrix_matches_walk_algebra(fig1):
    C = collider_connected(fig1)
    for j, k in itertools.permutations(range(5), 2):
        assert collider_connected_pair(fig1, j, k) == bool(C[j, k])


def test_u_separated_basics():
    path = UndirectedGraph(("1", "2", "3"), frozenset({(0, 1), (1, 2)}))
    assert u_separated(path, ["1"], ["3"], ["2"]).separated
    tri = UndirectedGraph(("1", "2", "3"), frozenset({(0, 1), (1, 2), (0, 2)}))
    assert not u_separated(tri, [0], [2], [1]).separated
    with pytest.raises(Exception):
        UndirectedGraph(("1",), frozenset({(0, 0)}))


def test_via_augmentation_on_collider():
    g = canonicalize(new_graph(["1", "2", "3"], [("1", "3"), ("2", "3")]))
    assert m_separated_via_augmentation(g, ["1"], ["2"]).separated
    assert not m_separated_via_augmentation(g, ["1"], ["2"], ["3"]).separated
    assert m_separated(g, ["1"], ["2"]).separated
    assert not m_separated(g, ["1"], ["2"], ["3"]).separated


def test_via_augmentation_notes_canonicalization(fig1):
    v = m_separated_via_augmentation(trim(fig1), ["V1"], ["V2"])
    assert v.separated and v.warnings


def test_fig1_all_kinds_agree(fig1):
    for j, k in itertools.combinations(range(5), 2):
        rest = [v for v in range(5) if v not in (j, k)]
        for r in range(len(rest) + 1):
            for L in itertools.combinations(rest, r):
                vals = {separated(fig1, kind, [j], [k], L).separated for kind in ("m", "t", "am", "aug")}
                assert len(vals) == 1


def test_decide_batch(fig1):
    qs = [SeparationQuery("m", frozenset({0}), frozenset({1})),
          SeparationQuery("t", frozenset({3}), frozenset({4}), frozenset({1, 2}))]
    a = decide_batch(fig1, qs)
    b = decide_batch(fig1, qs, workers=2)
    assert [v.separated for v in a] == [v.separated for v in b] == [True, False]


def test_collider_rule_canary(fig1):
    old = separation.COLLIDER_RULE
    separation.COLLIDER_RULE = False
    try:
        assert not m_separated(fig1, ["V1"], ["V2"]).separated
    finally:
        separation.COLLIDER_RULE = old
    assert m_separated(fig1, ["V1"], ["V2"]).separated


@given(graph_and_query(max_d=5))
def test_witnesses_are_valid(q):
    g, j, k, L = q
    for fn in (m_separated, d_separated):
        v = fn(g, [j], [k], L)
        if v.witness is not None:
            assert v.witness.start == j and v.witness.end == k
            assert not blocked(v.witness, L)
            if fn is d_separated:
                assert all(s.mark != Mark.BIDIRECTED for s in v.witness.steps)
    v = t_separated(g, [j], [k], L)
    if v.witness is not None:
        assert is_t_connected(v.witness, L)


@given(graph_and_query(max_d=5))
def test_agrees_with_brute_force(q):
    g, j, k, L = q
    for kind, fn in (("m", m_separated), ("t", t_separated), ("d", d_separated)):
        assert fn(g, [j], [k], L).separated == (brute_force_walk(g, kind, [j], [k], L) is None)


@given(graph_and_query(max_d=5, canonical=True))
def test_monotone_in_J_and_K(q):
    g, j, k, L = q
    rest = [v for v in range(g.d) if v not in L and v not in (j, k)]
    J, K = {j} | set(rest[:1]), {k} | set(rest[1:2])
    if m_separated(g, J, K, L).separated:
        assert m_separated(g, [j], [k], L).separated


@given(graph_and_query(max_d=5, canonical=True))
def test_augmentation_pipeline(q):
    g, j, k, L = q
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert m_separated(g, [j], [k], L).separated == \
            m_separated_via_augmentation(g, [j], [k], L).separated

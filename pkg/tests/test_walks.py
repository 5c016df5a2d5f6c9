import pytest
from hypothesis import given

from dmgwalk.algebra import Mark, Step, Walk
from dmgwalk.graph import new_graph, trim
from dmgwalk.walks import (
    ancestral_paths, ancestrally_blocked, blocked, classify_walk, collider_positions,
    confounding_arcs, confounding_paths, d_connected_arcs, dconn_walks, directed_walks,
    districts, is_confounding_path, is_t_connected, iter_paths, m_connected_arcs, mconn_walks,
    paths_only, tconn_walks, treks, unblocked_directed_walks, unblocked_treks, walk_matrix,
)
from strategies import graph_and_query, graphs


def rendered(ws):
    return sorted(w.render() for w in ws)


def W(*triples):
    return Walk.from_steps([Step(a, b, Mark(m)) for a, b, m in triples])


def test_trek_entries(fig1):
    T = treks(fig1)
    assert T.exact
    assert rendered(T[0, 3]) == sorted(["V1 <-> V4", "V1 <-> V1 -> V3 -> V4"])
    assert rendered(T[2, 2]) == sorted(
        ["V3 <-> V3", "V3 <- V1 <-> V1 -> V3", "V3 <- V2 <-> V2 -> V3"])


def test_directed_walks_have_no_backward_entries(fig1):
    R = directed_walks(fig1)
    assert R[4, 0] == frozenset()
    assert rendered(R[1, 4]) == sorted(["V2 -> V5", "V2 -> V3 -> V5"])


def test_classify_walk():
    c = classify_walk(W((0, 2, 0), (2, 1, 1)))
    assert c.colliders == ((1, 2),) and not c.is_arc
    t = classify_walk(W((2, 0, 1), (0, 3, 2)))
    assert t.is_trek and t.is_arc and t.is_path and t.bidirected_count == 1
    with pytest.raises(ValueError):
        classify_walk(Walk.trivial(0))


def test_blocking_rules(four):
    w = W((0, 2, 0), (2, 1, 1))            # V1 -> V3 <- V2
    assert blocked(w, set())
    assert not blocked(w, {2})
    assert blocked(w, {3})
    assert not ancestrally_blocked(w, {3}, four)   # V3 is an ancestor of V4


def test_arc_with_clean_interior_is_unblocked():
    w = W((0, 1, 0), (1, 2, 0))
    assert not blocked(w, set()) and blocked(w, {1})


def test_districts(fig1):
    assert districts(fig1) == [frozenset({0, 3, 4}), frozenset({1}), frozenset({2})]


def test_confounding_path_definition():
    assert is_confounding_path(W((0, 1, 2)))
    assert not is_confounding_path(W((0, 1, 0)))
    assert is_confounding_path(W((0, 1, 1), (1, 2, 0)))          # 0 <- 1 -> 2
    assert is_confounding_path(W((0, 1, 2), (1, 2, 1), (2, 3, 2)))  # two confounding arcs
    assert not is_confounding_path(W((0, 1, 0), (1, 2, 1)))      # directed into collider


def test_mconn_contains_printed_witness(fig1):
    M = mconn_walks(fig1, {1, 2}, budget=4)
    assert "V4 <-> V1 -> V3 <- V1 <-> V5" in rendered(M[3, 4])


def test_mconn_without_L_is_marcs(fig1):
    assert mconn_walks(fig1, set(), 4) == m_connected_arcs(fig1, 4)


def test_tconn_subset_of_mconn(fig1):
    for L in [set(), {2}, {1, 2}]:
        assert tconn_walks(fig1, L, 4).issubset(mconn_walks(fig1, L, 4))


def test_dconn_has_no_bidirected(fig1):
    D = dconn_walks(fig1, {2}, 5)
    assert all(s.mark != Mark.BIDIRECTED for w in D.walks() for s in w.steps)


def test_unblocked_interiors_avoid_L(fig1):
    L = {2}
    for M in (unblocked_directed_walks(fig1, L), unblocked_treks(fig1, L)):
        for w in M.walks():
            assert not set(w.vertices[1:-1]) & L


def test_unblocked_treks_match_filter(fig1):
    L = {0}
    expect = treks(fig1, 6).filter(lambda w: not set(w.vertices[1:-1]) & L)
    assert unblocked_treks(fig1, L, 6) == expect


def test_iter_paths_endpoint_stop(fig1):
    ps = list(iter_paths(fig1, start=0, end=3))
    assert all(w.start == 0 and w.end == 3 and 3 not in w.vertices[:-1] for w in ps)
    assert "V1 <-> V4" in rendered(ps)


def test_ancestral_paths(fig1):
    A = ancestral_paths(fig1, "m")
    assert A[0, 1] == frozenset()
    with pytest.raises(ValueError):
        ancestral_paths(fig1, "x")


def test_trimmed_paths(fig1):
    P = paths_only(m_connected_arcs(trim(fig1)))
    assert rendered(P[0, 3]) == sorted(["V1 <-> V4", "V1 -> V3 -> V4"])
    assert rendered(P[2, 3]) == sorted(["V3 -> V4", "V3 <- V1 <-> V4"])


def test_confounding_paths_are_paths(fig1):
    C = confounding_paths(fig1)
    assert all(is_confounding_path(w) for w in C.walks())
    assert confounding_arcs(fig1).filter(lambda w: w.steps[0].mark == Mark.FORWARD
                                         and all(s.mark == Mark.FORWARD for s in w.steps)
                                         ).is_empty()


def test_walk_matrix_dispatch(fig1):
    assert walk_matrix(fig1, "trek") == treks(fig1)
    assert walk_matrix(fig1, "directed", {2}) == unblocked_directed_walks(fig1, {2})
    with pytest.raises(ValueError):
        walk_matrix(fig1, "nope")


def test_budget_truncation_reported():
    g = new_graph(["A", "B"], [("A", "B"), ("B", "A")], [("A", "A")])
    assert not walk_matrix(g, "mconn", budget=3).exact


@given(graphs(max_d=4))
def test_arc_families_partition(g):
    n = 5
    for w in treks(g, n).walks():
        c = classify_walk(w)
        assert c.is_trek and not c.colliders
    for w in d_connected_arcs(g, n).walks():
        c = classify_walk(w)
        assert c.is_d_connected
    for w in m_connected_arcs(g, n).walks():
        assert classify_walk(w).is_arc


@given(graph_and_query(max_d=4))
def test_tconn_walks_are_t_connected(q):
    g, j, k, L = q
    for w in tconn_walks(g, L, 5)[j, k]:
        assert is_t_connected(w, L)
    for w in mconn_walks(g, L, 5)[j, k]:
        assert not blocked(w, L)


@given(graphs(max_d=4))
def test_paths_only_idempotent(g):
    P = paths_only(m_connected_arcs(g, 4))
    assert paths_only(P) == P
    for w in P.walks():
        assert len(set(w.vertices)) == len(w.vertices)
        assert collider_positions(w) == []

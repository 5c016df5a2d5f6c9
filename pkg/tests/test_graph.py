import numpy as np
import pytest
from hypothesis import given

from dmgwalk.graph import (
    DirectedMixedGraph, GraphError, ancestral_closure, canonicalize, classify, descendants,
    induced_subgraph, is_acyclic, new_graph, topological_order, trim,
)
from strategies import graphs


def test_fig1_flags(fig1):
    f = classify(fig1)
    assert f.canonical and f.acyclic and f.canonical_acyclic
    assert not f.canonically_directed and not f.bidirected_canonical


def test_matrices_match_edges(fig1):
    assert fig1.D.sum() == 5 and fig1.D[0, 2] == 1 and fig1.D[2, 0] == 0
    assert (fig1.B == fig1.B.T).all()
    assert fig1.B[0, 3] == fig1.B[3, 0] == 1
    assert np.diag(fig1.B).all()


def test_matrices_are_read_only(fig1):
    with pytest.raises(ValueError):
        fig1.D[0, 0] = 1
    with pytest.raises(AttributeError):
        fig1.labels = ("x",)


def test_directed_self_loop_rejected():
    with pytest.raises(GraphError, match="self-loop"):
        new_graph(["A"], [("A", "A")])


def test_bidirected_loop_allowed():
    g = new_graph(["A"], bidirected=[("A", "A")])
    assert g.has_bidirected(0, 0)


@pytest.mark.parametrize("directed,bidirected", [
    ([("A", "B"), ("A", "B")], []),
    ([], [("A", "B"), ("B", "A")]),
])
def test_duplicates_rejected(directed, bidirected):
    with pytest.raises(GraphError, match="duplicate"):
        new_graph(["A", "B"], directed, bidirected)


def test_unknown_endpoint():
    with pytest.raises(GraphError, match="unknown"):
        new_graph(["A"], [("A", "Z")])


def test_duplicate_label():
    with pytest.raises(GraphError):
        new_graph(["A", "A"])


def test_index_and_vset(fig1):
    assert fig1.index("V3") == 2 and fig1.index(2) == 2
    assert fig1.vset(["V1", 4]) == frozenset({0, 4})
    with pytest.raises(GraphError):
        fig1.index("V9")
    with pytest.raises(GraphError):
        fig1.index(7)


def test_trim_and_canonicalize(fig1):
    t = trim(fig1)
    assert not classify(t).canonical
    assert t.bidirected == {(0, 3), (0, 4)}
    assert canonicalize(t) == fig1


def test_cycle_detection():
    g = new_graph(["A", "B", "C"], [("A", "B"), ("B", "C"), ("C", "A")])
    assert not is_acyclic(g) and topological_order(g) is None


def test_topological_order(fig1):
    order = topological_order(fig1)
    pos = {v: i for i, v in enumerate(order)}
    assert all(pos[t] < pos[h] for t, h in fig1.directed)


def test_ancestors_and_descendants(fig1):
    assert ancestral_closure(fig1, ["V4"]) == {0, 1, 2, 3}
    assert descendants(fig1, ["V1"]) == {2, 3, 4}
    assert descendants(fig1, ["V4"]) == frozenset()


def test_induced_subgraph(fig1):
    sub = induced_subgraph(fig1, ["V1", "V3", "V4"])
    assert sub.labels == ("V1", "V3", "V4")
    assert sub.directed == {(0, 1), (1, 2)}
    assert (0, 2) in sub.bidirected


def test_to_dict_roundtrip(fig1):
    d = fig1.to_dict()
    assert new_graph(d["vertices"], d["directed"], d["bidirected"]) == fig1


def test_empty_graph():
    g = DirectedMixedGraph([])
    assert g.d == 0 and classify(g).canonical and is_acyclic(g)


@given(graphs())
def test_trim_canonicalize_roundtrip(g):
    assert trim(canonicalize(g)) == trim(g)
    assert classify(canonicalize(g)).canonical


@given(graphs(acyclic=True))
def test_acyclic_generation_is_acyclic(g):
    assert is_acyclic(g)
    for v in range(g.d):
        assert v not in descendants(g, [v])

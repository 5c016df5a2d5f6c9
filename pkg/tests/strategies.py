"""Hypothesis strategies for small directed mixed graphs."""
from hypothesis import strategies as st

from dmgwalk.graph import DirectedMixedGraph


@st.composite
def graphs(draw, max_d=5, canonical=None, acyclic=False, directed_only=False):
    d = draw(st.integers(1, max_d))
    pairs = [(a, b) for a in range(d) for b in range(d) if a != b]
    if acyclic:
        pairs = [(a, b) for a, b in pairs if a < b]
    directed = [p for p in pairs if draw(st.booleans())]
    bpairs = [] if directed_only else [(a, b) for a in range(d) for b in range(a + 1, d)]
    bid = [p for p in bpairs if draw(st.booleans())]
    if canonical is None:
        loops = [(v, v) for v in range(d) if draw(st.booleans())]
    elif canonical:
        loops = [(v, v) for v in range(d)]
    else:
        loops = []
    return DirectedMixedGraph([f"V{i + 1}" for i in range(d)], directed, bid + loops)


@st.composite
def graph_and_query(draw, **kw):
    g = draw(graphs(**kw).filter(lambda g: g.d >= 2))
    j, k = draw(st.lists(st.integers(0, g.d - 1), min_size=2, max_size=2, unique=True))
    rest = [v for v in range(g.d) if v not in (j, k)]
    L = frozenset(v for v in rest if draw(st.booleans()))
    return g, j, k, L

"""Exact separation oracles, witness extraction and the augmentation map.

All verdicts are decided by reachability over a finite state space, so no
length budget is involved.  For m- and d-separation a state is a vertex
together with a flag recording whether the walk arrived there with an
arrowhead; leaving with an arrowhead at the same vertex makes it a collider.
A walk is unblocked iff at every non-endpoint the collider status agrees
with membership in ``L``, which is a local condition on (state, next step).
Hence a J-K walk exists iff some K vertex is reachable in this automaton.

For t-separation the flag is a phase: on the left leg of a trek (arrived
by a backward step) or past its bidirected edge.  A trek ends with an
arrowhead and the next one starts with one, so junctions are colliders and
must lie in ``L``; every other interior vertex is a non-collider and must
avoid ``L``.  Targets count only when a trek is complete.

Breadth-first search expanding steps in canonical order returns the
shortest witness, ties broken by the canonical walk order.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels
from .algebra import Mark, Step, Walk
from .graph import (
    DirectedMixedGraph, GraphError, ancestral_closure, canonicalize, classify, induced_subgraph,
)

# Mutation canary: when False, colliders outside L no longer block.  Only
# the testbench flips this to confirm the suites can detect a broken rule.
COLLIDER_RULE = True

KINDS = ("m", "t", "d", "am", "ad", "u", "aug")


class SeparationError(ValueError):
    """Raised for malformed separation queries (e.g. overlapping sets)."""


class CanonicalizationWarning(UserWarning):
    """A non-canonical graph was canonicalized before augmentation."""


@dataclass(frozen=True)
class SeparationVerdict:
    """Outcome of a separation query.

    ``witness`` is present iff the sets are connected.  For the undirected
    kinds it is a walk whose steps are reported as bidirected marks.
    """

    separated: bool
    witness: Walk | None = None
    kind: str = "m"
    warnings: tuple = ()

    def __bool__(self):
        return self.separated

    def render_witness(self, labels=None) -> str | None:
        return None if self.witness is None else self.witness.render(labels)


@dataclass(frozen=True)
class SeparationQuery:
    kind: str
    J: frozenset
    K: frozenset
    L: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class UndirectedGraph:
    """A simple undirected graph: no loops, edges as sorted index pairs."""

    labels: tuple
    edges: frozenset

    def __post_init__(self):
        d = len(self.labels)
        for a, b in self.edges:
            if not (0 <= a < b < d):
                raise GraphError(f"invalid undirected edge ({a}, {b})")

    @property
    def d(self) -> int:
        return len(self.labels)

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.d, self.d), dtype=np.uint8)
        for a, b in self.edges:
            A[a, b] = A[b, a] = 1
        return A

    def neighbours(self, v: int) -> list:
        return sorted({b for a, b in self.edges if a == v} | {a for a, b in self.edges if b == v})

    def to_dict(self) -> dict:
        lab = self.labels
        return {"vertices": list(lab), "edges": [[lab[a], lab[b]] for a, b in sorted(self.edges)]}


def _mask(d: int, S) -> np.ndarray:
    m = np.zeros(d, dtype=np.uint8)
    for v in S:
        m[v] = 1
    return m


def _resolve(g, J, K, L):
    J, K, L = g.vset(J), g.vset(K), g.vset(L)
    if J & K or J & L or K & L:
        raise SeparationError("J, K and L must be pairwise disjoint")
    return J, K, L


def _rebuild(d: int, end: int, prev, code) -> Walk:
    steps = []
    s = end
    while s < 2 * d:
        p = int(prev[s])
        src = p - 2 * d if p >= 2 * d else p >> 1
        steps.append(Step(src, s >> 1, Mark(int(code[s]))))
        s = p
    steps.reverse()
    return Walk.from_steps(steps)


def _reach_verdict(g, J, K, L, kind, directed_only=False):
    d = g.d
    if kind == "t":
        end, prev, code = _kernels.trek_reach(g.D, g.B, _mask(d, J), _mask(d, K), _mask(d, L))
    else:
        end, prev, code = _kernels.mixed_reach(g.D, g.B, _mask(d, J), _mask(d, K), _mask(d, L),
                                               directed_only, COLLIDER_RULE)
    if end < 0:
        return SeparationVerdict(True, None, kind)
    return SeparationVerdict(False, _rebuild(d, int(end), prev, code), kind)


def m_separated(g: DirectedMixedGraph, J, K, L=()) -> SeparationVerdict:
    """Decide whether no walk from ``J`` to ``K`` is unblocked by ``L``.

    Parameters
    ----------
    g : DirectedMixedGraph
    J, K, L : iterable of labels or indices
        Pairwise disjoint.  Empty ``J`` or ``K`` gives a separated verdict.

    Returns
    -------
    SeparationVerdict
        With the shortest (then canonically least) unblocked walk as
        witness when connected.
    """
    J, K, L = _resolve(g, J, K, L)
    if not J or not K:
        return SeparationVerdict(True, None, "m")
    return _reach_verdict(g, J, K, L, "m")


def d_separated(g: DirectedMixedGraph, J, K, L=()) -> SeparationVerdict:
    """As :func:`m_separated` but walks may use directed edges only."""
    J, K, L = _resolve(g, J, K, L)
    if not J or not K:
        return SeparationVerdict(True, None, "d")
    return _reach_verdict(g, J, K, L, "d", directed_only=True)


def t_separated(g: DirectedMixedGraph, J, K, L=()) -> SeparationVerdict:
    """Decide whether no unblocked walk made of treks joined in ``L`` links ``J`` and ``K``."""
    J, K, L = _resolve(g, J, K, L)
    if not J or not K:
        return SeparationVerdict(True, None, "t")
    return _reach_verdict(g, J, K, L, "t")


def _ancestral(g, J, K, L, kind, directed_only):
    J, K, L = _resolve(g, J, K, L)
    if not J or not K:
        return SeparationVerdict(True, None, kind)
    d = g.d
    anc = _mask(d, ancestral_closure(g, L))
    src, tgt, cond = _mask(d, J), _mask(d, K), _mask(d, L)
    # iterative deepening gives the shortest, canonically least path
    for n in range(1, d):
        path = _kernels.ancestral_path(g.D, g.B, src, tgt, cond, anc, directed_only, n)
        if path is not None:
            return SeparationVerdict(False, Walk.from_steps([Step(a, b, Mark(m)) for a, b, m in path]),
                                     kind)
    return SeparationVerdict(True, None, kind)


def ancestral_m_separated(g: DirectedMixedGraph, J, K, L=()) -> SeparationVerdict:
    """Decide whether every J-K path is ancestrally blocked by ``L`` (exact path search)."""
    return _ancestral(g, J, K, L, "am", False)


def ancestral_d_separated(g: DirectedMixedGraph, J, K, L=()) -> SeparationVerdict:
    """Path version of :func:`d_separated` under ancestral blocking."""
    return _ancestral(g, J, K, L, "ad", True)


# -- augmentation ----------------------------------------------------------

def _district_relation(g: DirectedMixedGraph) -> np.ndarray:
    from .walks import districts

    R = np.zeros((g.d, g.d), dtype=bool)
    for comp in districts(g):
        idx = sorted(comp)
        R[np.ix_(idx, idx)] = True
    return R


def _collider_matrix(g: DirectedMixedGraph) -> np.ndarray:
    # j - k iff j (->)? x (<->...<->)? y (<-)? k with x == y or x, y in one
    # district; the loops never matter because x == y is already allowed.
    D = g.D.astype(bool)
    I = np.eye(g.d, dtype=bool)
    reach = (I | _district_relation(g)).astype(np.int64)
    left = (I | D).astype(np.int64)
    M = (left @ reach @ left.T) > 0
    np.fill_diagonal(M, False)
    return M


def collider_connected_pair(g: DirectedMixedGraph, j, k) -> bool:
    """Whether some walk from ``j`` to ``k`` has only colliders as non-endpoints."""
    j, k = g.index(j), g.index(k)
    if j == k:
        raise SeparationError("collider connection is defined for distinct vertices")
    return bool(_collider_matrix(g)[j, k])


def augment(g: DirectedMixedGraph) -> UndirectedGraph:
    """Join every collider-connected pair (moralization for directed graphs).

    Non-canonical inputs are canonicalized first, with a
    :class:`CanonicalizationWarning`.
    """
    if not classify(g).canonical:
        warnings.warn("graph is not canonical; bidirected loops added before augmentation",
                      CanonicalizationWarning, stacklevel=2)
        g = canonicalize(g)
    M = _collider_matrix(g)
    edges = frozenset((a, b) for a in range(g.d) for b in range(a + 1, g.d) if M[a, b])
    return UndirectedGraph(g.labels, edges)


def u_separated(ug: UndirectedGraph, J, K, L=()) -> SeparationVerdict:
    """Whether every J-K path in ``ug`` has a non-endpoint in ``L``."""
    index = {lab: i for i, lab in enumerate(ug.labels)}

    def res(S):
        if S is None:
            return frozenset()
        if isinstance(S, (str, int, np.integer)):
            S = [S]
        out = set()
        for v in S:
            if isinstance(v, str):
                if v not in index:
                    raise GraphError(f"unknown vertex label {v!r}")
                out.add(index[v])
            else:
                out.add(int(v))
        return frozenset(out)

    J, K, L = res(J), res(K), res(L)
    if J & K or J & L or K & L:
        raise SeparationError("J, K and L must be pairwise disjoint")
    if not J or not K:
        return SeparationVerdict(True, None, "u")
    nbrs = [ug.neighbours(v) for v in range(ug.d)]
    prev = {v: None for v in sorted(J)}
    frontier = sorted(J)
    while frontier:
        nxt = []
        for v in frontier:
            if v in L or (v in K):
                continue
            for w in nbrs[v]:
                if w in prev:
                    continue
                prev[w] = v
                if w in K:
                    steps = []
                    x = w
                    while prev[x] is not None:
                        steps.append(Step(prev[x], x, Mark.BIDIRECTED))
                        x = prev[x]
                    return SeparationVerdict(False, Walk.from_steps(steps[::-1]), "u")
                nxt.append(w)
        frontier = nxt
    return SeparationVerdict(True, None, "u")


def m_separated_via_augmentation(g: DirectedMixedGraph, J, K, L=()) -> SeparationVerdict:
    """m-separation through the augmented graph of the ancestral margin.

    Takes the ancestral closure of ``J | K | L``, restricts ``g`` to it (for
    an ancestral set this equals the marginal graph), augments and checks
    undirected separation.  The witness, if any, is an undirected path in
    that augmented graph, reported with indices of ``g``.
    """
    J, K, L = _resolve(g, J, K, L)
    notes = ()
    if not classify(g).canonical:
        notes = ("graph is not canonical; bidirected loops added before augmentation",)
        g = canonicalize(g)
    if not J or not K:
        return SeparationVerdict(True, None, "aug", notes)
    keep = sorted(ancestral_closure(g, J | K | L))
    sub = induced_subgraph(g, keep)
    pos = {v: i for i, v in enumerate(keep)}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CanonicalizationWarning)
        ug = augment(sub)
    v = u_separated(ug, [pos[x] for x in J], [pos[x] for x in K], [pos[x] for x in L])
    witness = None
    if v.witness is not None:
        witness = Walk.from_steps([Step(keep[s.src], keep[s.dst], s.mark) for s in v.witness.steps])
    return SeparationVerdict(v.separated, witness, "aug", notes)


def augmented_separated(g: DirectedMixedGraph, J, K, L=()) -> SeparationVerdict:
    """Undirected separation in the augmentation of the whole graph."""
    J, K, L = _resolve(g, J, K, L)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CanonicalizationWarning)
        ug = augment(g)
    return u_separated(ug, J, K, L)


_DISPATCH = {
    "m": m_separated,
    "t": t_separated,
    "d": d_separated,
    "am": ancestral_m_separated,
    "ad": ancestral_d_separated,
    "u": augmented_separated,
    "aug": m_separated_via_augmentation,
}


def separated(g: DirectedMixedGraph, kind: str, J, K, L=()) -> SeparationVerdict:
    """Dispatch on ``kind`` (one of :data:`KINDS`)."""
    try:
        fn = _DISPATCH[kind]
    except KeyError:
        raise SeparationError(f"unknown separation kind {kind!r}") from None
    return fn(g, J, K, L)


def decide_batch(g: DirectedMixedGraph, queries: Iterable[SeparationQuery],
                 workers: int | None = None) -> list:
    """Evaluate many queries against one graph, optionally on a thread pool."""
    queries = list(queries)
    run = lambda q: separated(g, q.kind, q.J, q.K, q.L)  # noqa: E731
    if workers is None or workers <= 1:
        return [run(q) for q in queries]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(run, queries))

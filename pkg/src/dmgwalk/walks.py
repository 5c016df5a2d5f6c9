"""Constructors for the named walk families and per-walk predicates.

Every constructor returns a :class:`~dmgwalk.algebra.WalkMatrix` truncated at
a length budget (default ``2 * d``) and carries the ``exact`` flag of the
underlying series.  These matrices are for display and for cross-checking;
separation decisions go through :mod:`dmgwalk.separation`, which never
truncates.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .algebra import (
    EMPTY, Mark, Walk, WalkMatrix, basic_bidirected, basic_directed, entrywise_difference,
    identity, multiply, transpose, truncated_series,
)
from .graph import DirectedMixedGraph, ancestral_closure


class WalkKind(str, Enum):
    DIRECTED_RIGHT = "directed"
    DIRECTED_LEFT = "left-directed"
    TREK = "trek"
    D_CONNECTED_ARC = "d-arc"
    M_CONNECTED_ARC = "m-arc"
    CONFOUNDING_ARC = "confounding-arc"
    COLLIDER_CONNECTED = "collider"
    BIDIRECTED_CHAIN = "bidirected-chain"
    M_CONN_WALK = "mconn"
    T_CONN_WALK = "tconn"
    D_CONN_WALK = "dconn"


@dataclass(frozen=True)
class WalkClassification:
    """Structural summary of a nonempty walk.

    Attributes
    ----------
    colliders : tuple of (int, int)
        ``(position, vertex)`` for every non-endpoint occurrence where both
        adjacent steps carry an arrowhead.
    bidirected_count : int
    is_path : bool
        No vertex repeats.
    """

    colliders: tuple
    bidirected_count: int
    is_path: bool
    is_trek: bool
    is_d_connected: bool
    is_arc: bool


def default_budget(g: DirectedMixedGraph) -> int:
    return max(2 * g.d, 1)


def _budget(g, budget):
    return default_budget(g) if budget is None else int(budget)


# -- per-walk predicates ---------------------------------------------------

def collider_positions(w: Walk) -> list:
    """Indices ``i`` (into ``w.vertices``) of collider occurrences."""
    st = w.steps
    return [i for i in range(1, len(st)) if st[i - 1].head_at_dst and st[i].head_at_src]


def is_path(w: Walk) -> bool:
    vs = w.vertices
    return len(set(vs)) == len(vs)


def classify_walk(w: Walk) -> WalkClassification:
    """Classify a nonempty walk by its colliders and bidirected edges.

    >>> from dmgwalk.algebra import Step, Mark
    >>> w = Walk.from_steps([Step(0, 2, Mark.FORWARD), Step(2, 1, Mark.BACKWARD)])
    >>> classify_walk(w).colliders
    ((1, 2),)
    """
    if not w.steps:
        raise ValueError("cannot classify the trivial walk")
    vs = w.vertices
    col = tuple((i, vs[i]) for i in collider_positions(w))
    nb = sum(1 for s in w.steps if s.mark == Mark.BIDIRECTED)
    arc = not col
    return WalkClassification(col, nb, is_path(w), arc and nb == 1, arc and nb == 0, arc)


def blocked(w: Walk, L) -> bool:
    """True iff some collider lies outside ``L`` or some other non-endpoint lies in ``L``."""
    L = frozenset(L)
    vs = w.vertices
    cols = set(collider_positions(w))
    for i in range(1, len(vs) - 1):
        if (i in cols) != (vs[i] in L):
            return True
    return False


def ancestrally_blocked(w: Walk, L, g: DirectedMixedGraph) -> bool:
    """Like :func:`blocked`, but a collider only needs a directed walk into ``L``."""
    L = frozenset(L)
    anc = ancestral_closure(g, L)
    vs = w.vertices
    cols = set(collider_positions(w))
    for i in range(1, len(vs) - 1):
        if i in cols:
            if vs[i] not in anc:
                return True
        elif vs[i] in L:
            return True
    return False


def arc_segments(w: Walk) -> list:
    """Split ``w`` at its colliders into maximal collider-free walks."""
    cuts = [0] + collider_positions(w) + [len(w.steps)]
    return [Walk(w.vertices[a], w.steps[a:b]) for a, b in zip(cuts, cuts[1:])]


def is_directed_walk(w: Walk) -> bool:
    return bool(w.steps) and all(s.mark == Mark.FORWARD for s in w.steps)


def is_left_directed_walk(w: Walk) -> bool:
    return bool(w.steps) and all(s.mark == Mark.BACKWARD for s in w.steps)


def is_t_connected(w: Walk, L) -> bool:
    """Unblocked by ``L`` and made of treks joined at colliders."""
    if not w.steps or blocked(w, L):
        return False
    return all(classify_walk(seg).is_trek for seg in arc_segments(w))


def is_d_connected_walk(w: Walk, L) -> bool:
    return bool(w.steps) and all(s.is_directed for s in w.steps) and not blocked(w, L)


def is_confounding_path(w: Walk) -> bool:
    """A path whose maximal collider-free segments are all non-directed."""
    if not w.steps or not is_path(w):
        return False
    return not any(is_directed_walk(s) or is_left_directed_walk(s) for s in arc_segments(w))


# -- matrix constructors ---------------------------------------------------

def _interior_avoids(L):
    L = frozenset(L)
    return lambda w: not any(v in L for v in w.vertices[1:-1])


def _head_at_end(w: Walk) -> bool:
    return w.steps[-1].head_at_dst


def _head_at_start(w: Walk) -> bool:
    return w.steps[0].head_at_src


def directed_walks(g: DirectedMixedGraph, budget: int | None = None) -> WalkMatrix:
    return truncated_series(basic_directed(g), _budget(g, budget))


def left_directed_walks(g: DirectedMixedGraph, budget: int | None = None) -> WalkMatrix:
    return transpose(directed_walks(g, budget))


def treks(g: DirectedMixedGraph, budget: int | None = None) -> WalkMatrix:
    """``(Id + left) . B . (Id + right)``, truncated."""
    n = _budget(g, budget)
    I = identity(g.d)
    R = directed_walks(g, n)
    return multiply(multiply(I + R.T, basic_bidirected(g), n), I + R, n)


def d_connected_arcs(g: DirectedMixedGraph, budget: int | None = None) -> WalkMatrix:
    """``(Id + left) . (Id + right)`` without the trivial walks."""
    n = _budget(g, budget)
    I = identity(g.d)
    R = directed_walks(g, n)
    return entrywise_difference(multiply(I + R.T, I + R, n), I)


def m_connected_arcs(g: DirectedMixedGraph, budget: int | None = None) -> WalkMatrix:
    n = _budget(g, budget)
    return treks(g, n) + d_connected_arcs(g, n)


def confounding_arcs(g: DirectedMixedGraph, budget: int | None = None) -> WalkMatrix:
    """Arcs that are neither right- nor left-directed walks."""
    n = _budget(g, budget)
    R = directed_walks(g, n)
    return entrywise_difference(entrywise_difference(m_connected_arcs(g, n), R), R.T)


def paths_only(W: WalkMatrix) -> WalkMatrix:
    return W.filter(is_path)


def _path_series(W: WalkMatrix, max_len: int) -> WalkMatrix:
    # Every prefix of a path is a path, so pruning non-paths after each
    # multiplication yields exactly paths_only of the full series.
    base = paths_only(W)
    acc = base
    delta = base
    while not delta.is_empty():
        nxt = paths_only(multiply(delta, base, max_len))
        fresh = entrywise_difference(nxt, acc)
        acc = acc + fresh
        delta = fresh
    return acc


def confounding_paths(g: DirectedMixedGraph, budget: int | None = None) -> WalkMatrix:
    """Paths that are concatenations of one or more confounding arcs."""
    n = _budget(g, budget)
    return _path_series(confounding_arcs(g, n), n)


def unblocked_directed_walks(g: DirectedMixedGraph, L=(), budget: int | None = None) -> WalkMatrix:
    """Right-directed walks whose non-endpoints avoid ``L``."""
    n = _budget(g, budget)
    L = g.vset(L)
    Lc = frozenset(range(g.d)) - L
    D = basic_directed(g)
    inner = identity(g.d).mask(Lc, Lc)
    if Lc and n >= 1:
        inner = inner + truncated_series(D.mask(Lc, Lc), n)
    through = multiply(multiply(D.mask(cols=Lc), inner, n), D.mask(rows=Lc), n)
    return D + through


def unblocked_treks(g: DirectedMixedGraph, L=(), budget: int | None = None) -> WalkMatrix:
    """Treks whose non-endpoints avoid ``L``."""
    n = _budget(g, budget)
    L = g.vset(L)
    Lc = frozenset(range(g.d)) - L
    B = basic_bidirected(g)
    R = unblocked_directed_walks(g, L, n)
    Lt = R.T
    out = B
    out = out + multiply(B.mask(cols=Lc), R.mask(rows=Lc), n)
    out = out + multiply(Lt.mask(cols=Lc), B.mask(rows=Lc), n)
    out = out + multiply(multiply(Lt.mask(cols=Lc), B.mask(Lc, Lc), n), R.mask(rows=Lc), n)
    return out


def collider_connected(g: DirectedMixedGraph, budget: int | None = None) -> WalkMatrix:
    """Walks whose non-endpoints are all colliders."""
    n = _budget(g, budget)
    I = identity(g.d)
    D = basic_directed(g)
    chains = I + truncated_series(basic_bidirected(g), n)
    return entrywise_difference(multiply(multiply(I + D, chains, n), I + D.T, n), I)


def bidirected_chains(g: DirectedMixedGraph, budget: int | None = None) -> WalkMatrix:
    return truncated_series(basic_bidirected(g), _budget(g, budget))


def districts(g: DirectedMixedGraph) -> list:
    """Connected components of the non-loop bidirected edges, ordered by least member."""
    parent = list(range(g.d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in g.bidirected:
        if a != b:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict = {}
    for v in range(g.d):
        groups.setdefault(find(v), set()).add(v)
    return sorted((frozenset(s) for s in groups.values()), key=min)


def _chain_through(A: WalkMatrix, L: frozenset, n: int) -> WalkMatrix:
    # A + A[:, L] . (Id + series(C)) . A[L, :], where C keeps arcs between L
    # vertices with arrowheads at both ends (so every junction is a collider).
    if not L:
        return A
    ends = A.filter(_head_at_end).mask(cols=L)
    starts = A.filter(_head_at_start).mask(rows=L)
    C = A.filter(lambda w: _head_at_start(w) and _head_at_end(w)).mask(L, L)
    mid = identity(A.dim).mask(L, L) + truncated_series(C, n)
    return A + multiply(multiply(ends, mid, n), starts, n)


def mconn_walks(g: DirectedMixedGraph, L=(), budget: int | None = None) -> WalkMatrix:
    """Walks unblocked by ``L``: arcs joined at colliders in ``L``."""
    n = _budget(g, budget)
    L = g.vset(L)
    A = m_connected_arcs(g, n).filter(_interior_avoids(L))
    return _chain_through(A, L, n)


def tconn_walks(g: DirectedMixedGraph, L=(), budget: int | None = None) -> WalkMatrix:
    """Unblocked walks made of treks joined at vertices of ``L``."""
    n = _budget(g, budget)
    L = g.vset(L)
    return _chain_through(unblocked_treks(g, L, n), L, n)


def dconn_walks(g: DirectedMixedGraph, L=(), budget: int | None = None) -> WalkMatrix:
    """Unblocked walks using directed edges only."""
    n = _budget(g, budget)
    L = g.vset(L)
    A = d_connected_arcs(g, n).filter(_interior_avoids(L))
    return _chain_through(A, L, n)


# -- exact path enumeration ------------------------------------------------

def iter_paths(g: DirectedMixedGraph, directed_only: bool = False, start=None, end=None):
    """Yield every path (no repeated vertex, at least one step) of ``g``.

    ``start`` / ``end`` restrict the endpoints; paths never continue past
    ``end`` once it is reached.
    """
    from .algebra import Step

    D, B = g.D, g.B
    d = g.d

    def steps_from(v):
        for w in range(d):
            if D[v, w]:
                yield Step(v, w, Mark.FORWARD)
            if D[w, v]:
                yield Step(v, w, Mark.BACKWARD)
            if not directed_only and B[v, w] and v != w:
                yield Step(v, w, Mark.BIDIRECTED)

    def rec(first, steps, onpath):
        v = steps[-1].dst if steps else first
        for s in steps_from(v):
            if s.dst in onpath:
                continue
            nxt = steps + (s,)
            if end is None or s.dst == end:
                yield Walk(first, nxt)
                if end is not None:
                    continue
            onpath.add(s.dst)
            yield from rec(first, nxt, onpath)
            onpath.discard(s.dst)

    starts = range(d) if start is None else [start]
    for j in starts:
        yield from rec(j, (), {j})


def ancestral_paths(g: DirectedMixedGraph, kind: str, L=()) -> WalkMatrix:
    """Paths of the given kind that are not ancestrally blocked by ``L``.

    ``kind`` is ``"m"`` (any path), ``"d"`` (directed edges only) or
    ``"confounding"`` (paths built from confounding arcs).  Paths have at
    most ``d - 1`` steps, so the result is exact.
    """
    if kind not in ("m", "d", "confounding"):
        raise ValueError(f"unknown path kind {kind!r}")
    L = g.vset(L)
    entries: dict = {}
    for w in iter_paths(g, directed_only=(kind == "d")):
        if kind == "confounding" and not is_confounding_path(w):
            continue
        if ancestrally_blocked(w, L, g):
            continue
        entries.setdefault((w.start, w.end), set()).add(w)
    return WalkMatrix.from_entries(g.d, entries)


_CONSTRUCTORS = {
    WalkKind.DIRECTED_RIGHT: lambda g, L, n: directed_walks(g, n),
    WalkKind.DIRECTED_LEFT: lambda g, L, n: left_directed_walks(g, n),
    WalkKind.TREK: lambda g, L, n: unblocked_treks(g, L, n) if L else treks(g, n),
    WalkKind.D_CONNECTED_ARC: lambda g, L, n: d_connected_arcs(g, n),
    WalkKind.M_CONNECTED_ARC: lambda g, L, n: m_connected_arcs(g, n),
    WalkKind.CONFOUNDING_ARC: lambda g, L, n: confounding_arcs(g, n),
    WalkKind.COLLIDER_CONNECTED: lambda g, L, n: collider_connected(g, n),
    WalkKind.BIDIRECTED_CHAIN: lambda g, L, n: bidirected_chains(g, n),
    WalkKind.M_CONN_WALK: lambda g, L, n: mconn_walks(g, L, n),
    WalkKind.T_CONN_WALK: lambda g, L, n: tconn_walks(g, L, n),
    WalkKind.D_CONN_WALK: lambda g, L, n: dconn_walks(g, L, n),
}


def walk_matrix(g: DirectedMixedGraph, kind, L=(), budget: int | None = None) -> WalkMatrix:
    """Dispatch to the constructor for ``kind`` (a :class:`WalkKind` or its value).

    Kinds that do not take a conditioning set ignore ``L``, except
    ``trek`` which returns the unblocked treks when ``L`` is nonempty.
    """
    try:
        kind = WalkKind(kind)
    except ValueError:
        raise ValueError(f"unknown walk kind {kind!r}") from None
    if kind == WalkKind.DIRECTED_RIGHT and L:
        return unblocked_directed_walks(g, L, budget)
    return _CONSTRUCTORS[kind](g, g.vset(L), _budget(g, budget))


__all__ = [
    "EMPTY", "WalkKind", "WalkClassification", "default_budget", "collider_positions",
    "is_path", "classify_walk", "blocked", "ancestrally_blocked", "arc_segments",
    "is_directed_walk", "is_left_directed_walk", "is_t_connected", "is_d_connected_walk",
    "is_confounding_path", "directed_walks", "left_directed_walks", "treks",
    "d_connected_arcs", "m_connected_arcs", "confounding_arcs", "paths_only",
    "confounding_paths", "unblocked_directed_walks", "unblocked_treks", "collider_connected",
    "bidirected_chains", "districts", "mconn_walks", "tconn_walks", "dconn_walks",
    "iter_paths", "ancestral_paths", "walk_matrix",
]

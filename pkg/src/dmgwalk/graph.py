"""Directed mixed graphs: construction, class predicates and basic surgery.

Vertices are identified by label in every external format and by a dense
integer index internally.  Bidirected edges are stored once per unordered
pair ``(i, j)`` with ``i <= j``; a pair ``(i, i)`` is a bidirected loop.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised when a graph description violates a structural rule."""


class EdgeKind(str, Enum):
    DIRECTED = "directed"
    BIDIRECTED = "bidirected"


class Edge(NamedTuple):
    tail: int
    head: int
    kind: EdgeKind

    @classmethod
    def bidirected(cls, a: int, b: int) -> "Edge":
        return cls(min(a, b), max(a, b), EdgeKind.BIDIRECTED)


@dataclass(frozen=True)
class GraphClassFlags:
    canonical: bool
    bidirected_canonical: bool
    canonically_directed: bool
    acyclic: bool
    canonical_acyclic: bool
    canonically_directed_acyclic: bool


class DirectedMixedGraph:
    """An immutable directed mixed graph.

    Parameters
    ----------
    labels : sequence of str
        Vertex labels; position gives the vertex index.
    directed : iterable of (int, int)
        Ordered index pairs ``(tail, head)``.
    bidirected : iterable of (int, int)
        Unordered index pairs; ``(i, i)`` is a bidirected loop.
    """

    __slots__ = ("labels", "directed", "bidirected", "_index", "_D", "_B")

    def __init__(self, labels: Sequence[str], directed=(), bidirected=()):
        labels = tuple(str(x) for x in labels)
        index = {}
        for i, lab in enumerate(labels):
            if lab in index:
                raise GraphError(f"duplicate label {lab!r}")
            index[lab] = i
        d = len(labels)
        dset = set()
        for t, h in directed:
            t, h = int(t), int(h)
            if not (0 <= t < d and 0 <= h < d):
                raise GraphError(f"directed edge ({t}, {h}) references an unknown vertex")
            if t == h:
                raise GraphError(f"directed self-loop at {labels[t]!r}")
            if (t, h) in dset:
                raise GraphError(f"duplicate directed edge {labels[t]} -> {labels[h]}")
            dset.add((t, h))
        bset = set()
        for a, b in bidirected:
            a, b = int(a), int(b)
            if not (0 <= a < d and 0 <= b < d):
                raise GraphError(f"bidirected edge ({a}, {b}) references an unknown vertex")
            key = (min(a, b), max(a, b))
            if key in bset:
                raise GraphError(f"duplicate bidirected edge {labels[a]} <-> {labels[b]}")
            bset.add(key)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "directed", frozenset(dset))
        object.__setattr__(self, "bidirected", frozenset(bset))
        object.__setattr__(self, "_index", index)
        D = np.zeros((d, d), dtype=np.uint8)
        B = np.zeros((d, d), dtype=np.uint8)
        for t, h in dset:
            D[t, h] = 1
        for a, b in bset:
            B[a, b] = B[b, a] = 1
        D.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "_D", D)
        object.__setattr__(self, "_B", B)

    def __setattr__(self, name, value):
        raise AttributeError("DirectedMixedGraph is immutable")

    # -- basic accessors -------------------------------------------------
    def __len__(self) -> int:
        return len(self.labels)

    @property
    def d(self) -> int:
        return len(self.labels)

    @property
    def D(self) -> np.ndarray:
        """Directed adjacency, ``D[j, k] == 1`` iff ``j -> k``."""
        return self._D

    @property
    def B(self) -> np.ndarray:
        """Symmetric bidirected adjacency (diagonal holds the loops)."""
        return self._B

    def index(self, v) -> int:
        if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            v = int(v)
            if not 0 <= v < self.d:
                raise GraphError(f"vertex index {v} out of range")
            return v
        try:
            return self._index[v]
        except KeyError:
            raise GraphError(f"unknown vertex label {v!r}") from None

    def vset(self, vs) -> frozenset:
        """Resolve an iterable of labels and/or indices to a frozenset of indices."""
        if vs is None:
            return frozenset()
        if isinstance(vs, (str, int, np.integer)):
            vs = [vs]
        return frozenset(self.index(v) for v in vs)

    def names(self, vs: Iterable[int]) -> list:
        return [self.labels[i] for i in sorted(vs)]

    def edges(self) -> list:
        out = [Edge(t, h, EdgeKind.DIRECTED) for t, h in sorted(self.directed)]
        out += [Edge(a, b, EdgeKind.BIDIRECTED) for a, b in sorted(self.bidirected)]
        return out

    def parents(self, v: int) -> list:
        return [int(i) for i in np.flatnonzero(self._D[:, v])]

    def children(self, v: int) -> list:
        return [int(i) for i in np.flatnonzero(self._D[v])]

    def has_directed(self, t: int, h: int) -> bool:
        return bool(self._D[t, h])

    def has_bidirected(self, a: int, b: int) -> bool:
        return bool(self._B[a, b])

    def __eq__(self, other):
        if not isinstance(other, DirectedMixedGraph):
            return NotImplemented
        return (self.labels == other.labels and self.directed == other.directed
                and self.bidirected == other.bidirected)

    def __hash__(self):
        return hash((self.labels, self.directed, self.bidirected))

    def __repr__(self):
        lab = self.labels
        dirs = ", ".join(f"{lab[t]}->{lab[h]}" for t, h in sorted(self.directed))
        bis = ", ".join(f"{lab[a]}<->{lab[b]}" for a, b in sorted(self.bidirected))
        return f"DirectedMixedGraph([{', '.join(lab)}]; {dirs}; {bis})"

    def to_dict(self) -> dict:
        lab = self.labels
        return {
            "vertices": list(lab),
            "directed": [[lab[t], lab[h]] for t, h in sorted(self.directed)],
            "bidirected": [[lab[a], lab[b]] for a, b in sorted(self.bidirected)],
        }


def new_graph(labels, directed=(), bidirected=()) -> DirectedMixedGraph:
    """Build a graph from labels and label pairs.

    >>> g = new_graph(["A", "B"], directed=[("A", "B")], bidirected=[("B", "B")])
    >>> g.has_directed(0, 1), g.has_bidirected(1, 1)
    (True, True)
    """
    labels = list(labels)
    pos = {}
    for i, lab in enumerate(labels):
        if lab in pos:
            raise GraphError(f"duplicate label {lab!r}")
        pos[lab] = i

    def lookup(x):
        try:
            return pos[x]
        except KeyError:
            raise GraphError(f"unknown endpoint {x!r}") from None

    dpairs = [(lookup(a), lookup(b)) for a, b in directed]
    bpairs = [(lookup(a), lookup(b)) for a, b in bidirected]
    return DirectedMixedGraph(labels, dpairs, bpairs)


def is_acyclic(g: DirectedMixedGraph) -> bool:
    return topological_order(g) is not None


def topological_order(g: DirectedMixedGraph):
    """Kahn's algorithm on the directed edges; ``None`` if there is a cycle."""
    indeg = g.D.sum(axis=0).astype(int).tolist()
    ready = [v for v in range(g.d) if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop()
        order.append(v)
        for w in g.children(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return order if len(order) == g.d else None


def classify(g: DirectedMixedGraph) -> GraphClassFlags:
    canonical = all(g.B[v, v] for v in range(g.d))
    only_loops = all(a == b for a, b in g.bidirected)
    acyclic = is_acyclic(g)
    cd = canonical and only_loops
    return GraphClassFlags(
        canonical=canonical,
        bidirected_canonical=canonical and not g.directed,
        canonically_directed=cd,
        acyclic=acyclic,
        canonical_acyclic=canonical and acyclic,
        canonically_directed_acyclic=cd and acyclic,
    )


def trim(g: DirectedMixedGraph) -> DirectedMixedGraph:
    """Remove every bidirected loop."""
    return DirectedMixedGraph(g.labels, g.directed, [(a, b) for a, b in g.bidirected if a != b])


def canonicalize(g: DirectedMixedGraph) -> DirectedMixedGraph:
    """Add a bidirected loop at every vertex lacking one."""
    return DirectedMixedGraph(g.labels, g.directed, g.bidirected | {(v, v) for v in range(g.d)})


def ancestral_closure(g: DirectedMixedGraph, S) -> frozenset:
    """``S`` together with every vertex having a directed walk into ``S``."""
    S = g.vset(S)
    seen = set(S)
    stack = list(S)
    while stack:
        v = stack.pop()
        for p in g.parents(v):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return frozenset(seen)


def descendants(g: DirectedMixedGraph, S) -> frozenset:
    """Vertices reachable from ``S`` by a directed walk of length >= 1."""
    S = g.vset(S)
    seen = set()
    stack = list(S)
    while stack:
        v = stack.pop()
        for c in g.children(v):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return frozenset(seen)


def induced_subgraph(g: DirectedMixedGraph, keep) -> DirectedMixedGraph:
    keep = sorted(g.vset(keep))
    new = {v: i for i, v in enumerate(keep)}
    return DirectedMixedGraph(
        [g.labels[v] for v in keep],
        [(new[t], new[h]) for t, h in g.directed if t in new and h in new],
        [(new[a], new[b]) for a, b in g.bidirected if a in new and b in new],
    )

"""Latent projection of directed mixed graphs and its action on walks.

With ``U`` the dropped vertices, the marginal on ``keep`` has ``j -> k`` iff
``g`` has a directed walk from ``j`` to ``k`` whose interior lies in ``U``,
and ``j <-> k`` iff it has such a trek.  Both are decided by reachability,
so cyclic graphs need no length budget.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .algebra import Mark, Step, Walk
from .graph import DirectedMixedGraph, GraphError, classify, is_acyclic
from .walks import collider_positions, is_directed_walk, is_left_directed_walk


class MarginalVariant(str, Enum):
    GENERAL = "general"
    ADMG_PATHS = "admg"


@dataclass(frozen=True)
class MarginalSpec:
    keep: frozenset
    variant: MarginalVariant = MarginalVariant.GENERAL


def _split(g: DirectedMixedGraph, keep):
    keep = sorted(g.vset(keep))
    U = np.ones(g.d, dtype=np.uint8)
    U[keep] = 0
    return keep, U


def _anc_through(g, U, v):
    """``v`` plus every ``u`` in ``U`` with a directed walk ``u -> ... -> v`` inside ``U``."""
    back = _kernels.walk_reach(g.D.T, v, U)
    return [v] + [int(u) for u in np.flatnonzero(back & U)]


def marginalize(g: DirectedMixedGraph, keep, self_loops: str = "raise") -> DirectedMixedGraph:
    """Latent projection of ``g`` onto ``keep``.

    Parameters
    ----------
    g : DirectedMixedGraph
    keep : iterable of labels or indices
    self_loops : {"raise", "drop"}
        What to do when a directed cycle through dropped vertices returns to
        a kept vertex.  ``"drop"`` omits the resulting directed self-loop,
        which no unblocked walk can use in a canonical graph.

    Returns
    -------
    DirectedMixedGraph
        On the kept vertices in their original order.

    Raises
    ------
    GraphError
        If a directed self-loop would be created and ``self_loops`` is
        ``"raise"``; the graph type does not allow them.
    """
    if self_loops not in ("raise", "drop"):
        raise ValueError(f"self_loops must be 'raise' or 'drop', not {self_loops!r}")
    keep, U = _split(g, keep)
    pos = {v: i for i, v in enumerate(keep)}
    directed = []
    for j in keep:
        reach = _kernels.walk_reach(g.D, j, U)
        for k in keep:
            if reach[k]:
                if j == k:
                    if self_loops == "drop":
                        continue
                    raise GraphError(
                        f"marginal would contain a directed self-loop at {g.labels[j]!r}")
                directed.append((pos[j], pos[k]))
    anc = {j: _anc_through(g, U, j) for j in keep}
    B = g.B
    bidirected = []
    for a, j in enumerate(keep):
        for k in keep[a:]:
            if B[np.ix_(anc[j], anc[k])].any():
                bidirected.append((pos[j], pos[k]))
    return DirectedMixedGraph([g.labels[v] for v in keep], directed, bidirected)


def _paths_inside(g: DirectedMixedGraph, j: int, k: int, U, accept, directed_only: bool):
    # depth-first search over paths j .. k whose interior lies in U
    D, B = g.D, g.B
    d = g.d

    def rec(v, steps, seen):
        for w in range(d):
            if w in seen:
                continue
            cand = []
            if D[v, w]:
                cand.append(Mark.FORWARD)
            if D[w, v]:
                cand.append(Mark.BACKWARD)
            if not directed_only and B[v, w]:
                cand.append(Mark.BIDIRECTED)
            for m in cand:
                nxt = steps + (Step(v, w, m),)
                if w == k:
                    if accept(Walk(j, nxt)):
                        return True
                elif U[w]:
                    seen.add(w)
                    if rec(w, nxt, seen):
                        return True
                    seen.discard(w)
        return False

    return rec(j, (), {j})


def _is_confounding_arc(w: Walk) -> bool:
    return not collider_positions(w) and not is_directed_walk(w) and not is_left_directed_walk(w)


def marginalize_admg(gs: DirectedMixedGraph, keep) -> DirectedMixedGraph:
    """Marginal of a trimmed acyclic graph using path existence.

    ``j -> k`` iff a directed path from ``j`` to ``k`` has its interior
    outside ``keep``; ``j <-> k`` iff such a path is a confounding arc
    (no collider, and not directed in either direction).  The result is
    trimmed.
    """
    if any(a == b for a, b in gs.bidirected):
        raise GraphError("marginalize_admg expects a trimmed graph (no bidirected loops)")
    if not is_acyclic(gs):
        raise GraphError("marginalize_admg expects an acyclic graph")
    keep, U = _split(gs, keep)
    pos = {v: i for i, v in enumerate(keep)}
    directed, bidirected = [], []
    for j in keep:
        for k in keep:
            if j == k:
                continue
            if _paths_inside(gs, j, k, U, is_directed_walk, True):
                directed.append((pos[j], pos[k]))
            if j < k and _paths_inside(gs, j, k, U, _is_confounding_arc, False):
                bidirected.append((pos[j], pos[k]))
    return DirectedMixedGraph([gs.labels[v] for v in keep], directed, bidirected)


def _segment_image(seg: Walk, pos) -> Step | None:
    if collider_positions(seg):
        return None
    a, b = pos[seg.start], pos[seg.end]
    if is_directed_walk(seg):
        return Step(a, b, Mark.FORWARD)
    if is_left_directed_walk(seg):
        return Step(a, b, Mark.BACKWARD)
    nb = sum(1 for s in seg.steps if s.mark == Mark.BIDIRECTED)
    if nb == 1:
        return Step(a, b, Mark.BIDIRECTED)
    return None


def marginal_walk_image(w: Walk, keep, g: DirectedMixedGraph | None = None) -> Walk | None:
    """Image of a walk of ``g`` in the marginal graph on ``keep``.

    The walk is cut at every non-endpoint occurrence of a kept vertex.  Each
    piece must have its endpoints kept and interior dropped, and must be a
    directed walk (either way) or a trek; it then maps to the corresponding
    single edge.  Returns ``None`` when some piece has no image.  Indices of
    the result refer to the marginal graph (kept vertices renumbered in
    order).
    """
    keep = sorted(g.vset(keep)) if g is not None else sorted(int(v) for v in keep)
    pos = {v: i for i, v in enumerate(keep)}
    vs = w.vertices
    if vs[0] not in pos or vs[-1] not in pos:
        return None
    if not w.steps:
        return Walk.trivial(pos[w.start])
    cuts = [0] + [i for i in range(1, len(vs) - 1) if vs[i] in pos] + [len(w.steps)]
    steps = []
    for a, b in zip(cuts, cuts[1:]):
        img = _segment_image(Walk(vs[a], w.steps[a:b]), pos)
        if img is None:
            return None
        steps.append(img)
    return Walk.from_steps(steps)


def _directed_walk_inside(g, j, k, U) -> list | None:
    # shortest directed walk j -> ... -> k with interior in U (BFS)
    prev = {}
    queue = deque([j])
    while queue:
        v = queue.popleft()
        for w in g.children(v):
            if w == k:
                steps = [Step(v, k, Mark.FORWARD)]
                while v != j:
                    steps.insert(0, Step(prev[v], v, Mark.FORWARD))
                    v = prev[v]
                return steps
            if U[w] and w not in prev:
                prev[w] = v
                queue.append(w)
    return None


def marginal_walk_preimage(g: DirectedMixedGraph, keep, w: Walk) -> Walk | None:
    """One walk of ``g`` whose image is ``w`` (a walk of the marginal graph).

    Returns ``None`` if some step of ``w`` is not an edge of the marginal.
    """
    keep, U = _split(g, keep)
    if not w.steps:
        return Walk.trivial(keep[w.start])
    out = []
    for s in w.steps:
        j, k = keep[s.src], keep[s.dst]
        if s.mark == Mark.FORWARD:
            piece = _directed_walk_inside(g, j, k, U)
        elif s.mark == Mark.BACKWARD:
            fwd = _directed_walk_inside(g, k, j, U)
            piece = None if fwd is None else [t.reversed() for t in reversed(fwd)]
        else:
            piece = _trek_inside(g, j, k, U)
        if piece is None:
            return None
        out.extend(piece)
    return Walk.from_steps(out)


def _trek_inside(g, j, k, U) -> list | None:
    B = g.B
    for x in _anc_through(g, U, j):
        for y in _anc_through(g, U, k):
            if not B[x, y]:
                continue
            left = [] if x == j else _directed_walk_inside(g, x, j, U)
            right = [] if y == k else _directed_walk_inside(g, y, k, U)
            if left is None or right is None:
                continue
            return ([t.reversed() for t in reversed(left)] + [Step(x, y, Mark.BIDIRECTED)]
                    + right)
    return None


def is_marginal_canonical(g: DirectedMixedGraph, keep) -> bool:
    return classify(marginalize(g, keep)).canonical

"""Fixtures, random generators, brute-force oracles and property suites.

The suites here are what the acceptance tests and ``dmgwalk verify`` run.
Each suite is a function ``check(g, rng) -> list of failing queries`` applied
to graphs drawn either exhaustively (small ``d``) or at random.
"""
from __future__ import annotations

import contextlib
import itertools
import json
import os
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linear, separation
from .algebra import (
    Mark, Step, Walk, WalkMatrix, entrywise_difference, identity, multiply, transpose,
)
from .graph import (
    DirectedMixedGraph, GraphClassFlags, GraphError, ancestral_closure, classify, is_acyclic,
    new_graph, trim,
)
from .marginal import marginalize
from .separation import (
    CanonicalizationWarning, ancestral_d_separated, ancestral_m_separated, collider_connected_pair,
    d_separated, m_separated, m_separated_via_augmentation, t_separated,
)
from .walks import blocked, classify_walk, collider_positions, iter_paths

DEFAULT_SEED = 20240611

# -- fixtures ----------------------------------------------------------------

_V = ["V1", "V2", "V3", "V4", "V5"]


@dataclass(frozen=True)
class Fixture:
    name: str
    graph: DirectedMixedGraph
    weights: dict | None = None


FIG1 = new_graph(
    _V,
    [("V1", "V3"), ("V2", "V3"), ("V2", "V5"), ("V3", "V4"), ("V3", "V5")],
    [(v, v) for v in _V] + [("V1", "V4"), ("V1", "V5")],
)

FIG1B = new_graph(
    _V,
    [("V1", "V3"), ("V2", "V3"), ("V2", "V5"), ("V3", "V4"), ("V3", "V5"), ("V4", "V5")],
    [(v, v) for v in _V] + [("V1", "V4"), ("V1", "V5"), ("V4", "V5")],
)

FOUR = new_graph(["V1", "V2", "V3", "V4"], [("V1", "V3"), ("V2", "V3"), ("V3", "V4")],
                 [(v, v) for v in ["V1", "V2", "V3", "V4"]])

# Trimmed marginals of FIG1 as drawn: keep set -> (directed, bidirected)
FIG3 = {
    "a": (tuple(_V),
          {("V1", "V3"), ("V2", "V3"), ("V2", "V5"), ("V3", "V4"), ("V3", "V5")},
          {("V1", "V4"), ("V1", "V5")}),
    "b": (("V1", "V2", "V4", "V5"),
          {("V1", "V4"), ("V1", "V5"), ("V2", "V4"), ("V2", "V5")},
          {("V1", "V4"), ("V1", "V5"), ("V4", "V5")}),
    "c": (("V2", "V3", "V4", "V5"),
          {("V2", "V3"), ("V2", "V5"), ("V3", "V4"), ("V3", "V5")},
          {("V3", "V4"), ("V3", "V5")}),
    "d": (("V2", "V4", "V5"),
          {("V2", "V4"), ("V2", "V5")},
          {("V4", "V5")}),
}

FIXTURES = {f.name: f for f in (Fixture("FIG1", FIG1), Fixture("FIG1B", FIG1B),
                                Fixture("FOUR", FOUR))}


def edge_labels(g: DirectedMixedGraph, loops: bool = False):
    """``(directed, bidirected)`` as sets of label pairs."""
    lab = g.labels
    dset = {(lab[t], lab[h]) for t, h in g.directed}
    bset = {(lab[a], lab[b]) for a, b in g.bidirected if loops or a != b}
    return dset, bset


# -- random graphs -----------------------------------------------------------

_CLASSES = {
    "any": dict(),
    "acyclic": dict(acyclic=True),
    "canonical": dict(canonical=True),
    "canonical_acyclic": dict(canonical=True, acyclic=True),
    "canonically_directed": dict(canonical=True, directed_only=True),
    "canonically_directed_acyclic": dict(canonical=True, acyclic=True, directed_only=True),
    "bidirected_canonical": dict(canonical=True, no_directed=True),
}


def _class_request(cls) -> dict:
    if isinstance(cls, str):
        try:
            return _CLASSES[cls]
        except KeyError:
            raise GraphError(f"unknown graph class {cls!r}") from None
    if isinstance(cls, GraphClassFlags):
        f = cls
        implied_canon = f.bidirected_canonical or f.canonically_directed or f.canonical_acyclic \
            or f.canonically_directed_acyclic
        implied_acyc = f.canonical_acyclic or f.canonically_directed_acyclic
        if (implied_canon and not f.canonical) or (implied_acyc and not f.acyclic) \
                or (f.canonically_directed_acyclic and not f.canonically_directed):
            raise GraphError("unsatisfiable class combination")
        if f.bidirected_canonical and f.acyclic is False:
            raise GraphError("unsatisfiable class combination")
        return dict(canonical=f.canonical, acyclic=f.acyclic,
                    directed_only=f.canonically_directed, no_directed=f.bidirected_canonical)
    raise TypeError("class must be a name or GraphClassFlags")


def random_graph(d: int, cls="canonical", density: float = 0.3, seed=None) -> DirectedMixedGraph:
    """A random graph of the requested class.

    Parameters
    ----------
    d : int
        Number of vertices, at least 1.
    cls : str or GraphClassFlags
        One of ``any``, ``acyclic``, ``canonical``, ``canonical_acyclic``,
        ``canonically_directed``, ``canonically_directed_acyclic`` and
        ``bidirected_canonical``.  A flags object is read as a target.
    density : float
        Independent probability of each possible edge.
    seed : int or Generator
    """
    if d < 1:
        raise GraphError("d must be at least 1")
    req = _class_request(cls)
    rng = np.random.default_rng(seed)
    order = rng.permutation(d) if req.get("acyclic") else None
    directed = []
    if not req.get("no_directed"):
        for a in range(d):
            for b in range(d):
                if a == b:
                    continue
                if order is not None and not order[a] < order[b]:
                    continue
                if rng.random() < density:
                    directed.append((a, b))
    bidirected = []
    for a in range(d):
        if req.get("canonical") or rng.random() < 0.5:
            bidirected.append((a, a))
    if not req.get("directed_only"):
        for a, b in itertools.combinations(range(d), 2):
            if rng.random() < density:
                bidirected.append((a, b))
    g = DirectedMixedGraph([f"V{i + 1}" for i in range(d)], directed, bidirected)
    if req.get("acyclic") is False and is_acyclic(g):
        raise GraphError("cyclicity cannot be forced by the generator")
    return g


def all_graphs(d: int, cls="canonical"):
    """Every graph on ``d`` vertices in the class (small ``d`` only)."""
    req = _class_request(cls)
    labels = [f"V{i + 1}" for i in range(d)]
    dpairs = [] if req.get("no_directed") else \
        [(a, b) for a in range(d) for b in range(d) if a != b]
    bpairs = [] if req.get("directed_only") else list(itertools.combinations(range(d), 2))
    loop_choices = [tuple(range(d))] if req.get("canonical") else \
        [tuple(v for v in range(d) if m >> v & 1) for m in range(2 ** d)]
    for dm in range(2 ** len(dpairs)):
        directed = [p for i, p in enumerate(dpairs) if dm >> i & 1]
        g0 = DirectedMixedGraph(labels, directed)
        if req.get("acyclic") and not is_acyclic(g0):
            continue
        for bm in range(2 ** len(bpairs)):
            bid = [p for i, p in enumerate(bpairs) if bm >> i & 1]
            for loops in loop_choices:
                yield DirectedMixedGraph(labels, directed, bid + [(v, v) for v in loops])


def singleton_queries(d: int, max_L: int | None = None, ordered: bool = False):
    """All ``(j, k, L)`` with ``j != k`` and ``L`` disjoint from both."""
    pairs = itertools.permutations(range(d), 2) if ordered else itertools.combinations(range(d), 2)
    for j, k in pairs:
        rest = [v for v in range(d) if v not in (j, k)]
        top = len(rest) if max_L is None else min(max_L, len(rest))
        for r in range(top + 1):
            for L in itertools.combinations(rest, r):
                yield j, k, frozenset(L)


def random_query(d: int, rng, max_L: int | None = None):
    j, k = (int(x) for x in rng.choice(d, 2, replace=False))
    rest = [v for v in range(d) if v not in (j, k)]
    L = frozenset(v for v in rest if rng.random() < 0.4)
    if max_L is not None and len(L) > max_L:
        L = frozenset(sorted(L)[:max_L])
    return j, k, L


# -- brute-force oracle ------------------------------------------------------

def _steps_from(g, v, directed_only):
    D, B = g.D, g.B
    for w in range(g.d):
        if D[v, w]:
            yield Step(v, w, Mark.FORWARD)
        if D[w, v]:
            yield Step(v, w, Mark.BACKWARD)
        if not directed_only and B[v, w]:
            yield Step(v, w, Mark.BIDIRECTED)


def _trek_prefix(seg_marks) -> bool:
    # a prefix of  <-* (<->) ->*  (only the last segment can be incomplete)
    phase = 0
    for m in seg_marks:
        if phase == 0:
            if m == Mark.BIDIRECTED:
                phase = 1
            elif m == Mark.FORWARD:
                return False
        elif m != Mark.FORWARD:
            return False
    return True


def _t_prefix_ok(w: Walk) -> bool:
    cuts = [0] + collider_positions(w) + [len(w.steps)]
    segs = [w.steps[a:b] for a, b in zip(cuts, cuts[1:])]
    for seg in segs[:-1]:
        if not classify_walk(Walk(seg[0].src, seg)).is_trek:
            return False
    return _trek_prefix([s.mark for s in segs[-1]])


def _continuation_key(w: Walk, kind: str):
    # Whether a prefix can still be completed depends only on where it ends,
    # whether it arrived with an arrowhead and, for t, how far into the
    # current trek it is: blocking is a condition on each vertex and its two
    # neighbouring steps, and earlier segments are already settled.
    last = w.steps[-1]
    if kind != "t":
        return last.dst, last.head_at_dst
    _, seg = _last_segment(w)
    past_top = any(s.mark != Mark.BACKWARD for s in seg)
    return last.dst, last.head_at_dst, past_top


def brute_force_walk(g: DirectedMixedGraph, kind: str, J, K, L=(), budget: int | None = None,
                     memo: bool = True):
    """First walk of at most ``budget`` steps from ``J`` to ``K`` that connects them.

    Walks are enumerated depth first and each prefix is tested with the
    walk predicates (:func:`~dmgwalk.walks.blocked`, and the trek
    decomposition for ``t``).  A blocked prefix is abandoned, since extending
    a walk never unblocks an interior vertex.  With ``memo`` a prefix is also
    skipped when an earlier prefix with the same continuation key failed with
    at least as much budget left; ``memo=False`` is plain enumeration.
    """
    J, K, L = g.vset(J), g.vset(K), g.vset(L)
    budget = 2 * g.d if budget is None else budget
    directed_only = kind == "d"
    if kind not in ("m", "t", "d"):
        raise ValueError(f"brute force supports m, t and d, not {kind!r}")
    failed: dict = {}

    def ok(w):
        if blocked(w, L):
            return False
        return kind != "t" or _t_prefix_ok(w)

    def complete(w):
        return kind != "t" or classify_walk(Walk(*_last_segment(w))).is_trek

    def rec(start, steps):
        left = budget - len(steps)
        if left <= 0:
            return None
        v = steps[-1].dst if steps else start
        for s in _steps_from(g, v, directed_only):
            w = Walk(start, steps + (s,))
            if not ok(w):
                continue
            if s.dst in K and complete(w):
                return w
            if memo:
                key = _continuation_key(w, kind)
                if failed.get(key, 0) >= left - 1:
                    continue
            found = rec(start, w.steps)
            if found is not None:
                return found
            if memo:
                failed[key] = max(failed.get(key, 0), left - 1)
        return None

    for j in sorted(J):
        found = rec(j, ())
        if found is not None:
            return found
    return None


def _last_segment(w: Walk):
    cuts = collider_positions(w)
    a = cuts[-1] if cuts else 0
    return w.vertices[a], w.steps[a:]


def brute_force_connected(g: DirectedMixedGraph, kind: str, j, k, L=(), budget=None,
                          memo: bool = True) -> bool:
    """Whether a connecting walk of at most ``budget`` steps exists (default ``2 d``)."""
    J = j if isinstance(j, (set, frozenset, list, tuple)) else [j]
    K = k if isinstance(k, (set, frozenset, list, tuple)) else [k]
    return brute_force_walk(g, kind, J, K, L, budget, memo) is not None


_DECIDERS = {"m": m_separated, "t": t_separated, "d": d_separated}


def oracle_agrees(g, kind, j, k, L) -> bool:
    return (not _DECIDERS[kind](g, [j], [k], L).separated) == brute_force_connected(g, kind, j, k, L)


# -- existence deciders for unblocked arcs ---------------------------------------

def _anc_avoiding(g, v, L) -> list:
    # v plus every x outside L with a directed walk x -> ... -> v avoiding L
    from . import _kernels

    allowed = np.ones(g.d, dtype=np.uint8)
    for x in L:
        allowed[x] = 0
    back = _kernels.walk_reach(g.D.T, v, allowed)
    return [v] + [int(x) for x in np.flatnonzero(back & allowed) if x != v]


def unblocked_trek_exists(g, j, k, L) -> bool:
    L = g.vset(L)
    A, C = _anc_avoiding(g, j, L), _anc_avoiding(g, k, L)
    return bool(g.B[np.ix_(A, C)].any())


def unblocked_darc_exists(g, j, k, L) -> bool:
    L = g.vset(L)
    return bool(set(_anc_avoiding(g, j, L)) & set(_anc_avoiding(g, k, L)))


def unblocked_marc_exists(g, j, k, L) -> bool:
    return unblocked_trek_exists(g, j, k, L) or unblocked_darc_exists(g, j, k, L)


def arc_path_exists(g, j, k, L, directed_only=False) -> bool:
    L = g.vset(L)
    for w in iter_paths(g, directed_only=directed_only, start=j, end=k):
        if not collider_positions(w) and not any(v in L for v in w.vertices[1:-1]):
            return True
    return False


# -- property checks ---------------------------------------------------------

@dataclass
class Failure:
    seed: int | None
    graph: dict
    query: dict

    def to_dict(self):
        return {"seed": self.seed, "graph": self.graph, "query": self.query}


def _q(j, k, L, **extra):
    return {"j": j, "k": k, "L": sorted(L), **extra}


def check_oracle(g, kinds=("m", "t", "d"), queries=None):
    bad = []
    for j, k, L in (queries if queries is not None else singleton_queries(g.d)):
        for kind in kinds:
            if not oracle_agrees(g, kind, j, k, L):
                bad.append(_q(j, k, L, kind=kind))
    return bad


def check_arc_existence(g, queries=None):
    """Equivalent existence statements for unblocked arcs (canonical ``g``)."""
    bad = []
    flags = classify(g)
    gt = trim(g)
    for j, k, L in (queries if queries is not None else singleton_queries(g.d)):
        vals = [unblocked_trek_exists(g, j, k, L), unblocked_marc_exists(g, j, k, L),
                arc_path_exists(g, j, k, L), unblocked_marc_exists(gt, j, k, L),
                arc_path_exists(gt, j, k, L)]
        if flags.canonically_directed_acyclic:
            vals += [unblocked_darc_exists(g, j, k, L), arc_path_exists(g, j, k, L, True),
                     unblocked_darc_exists(gt, j, k, L), arc_path_exists(gt, j, k, L, True)]
        if len(set(vals)) != 1:
            bad.append(_q(j, k, L, values=vals))
    return bad


def check_separation_chain(g, queries=None):
    """t-, m- and ancestral m-separation agree; plus the d versions when canonically directed."""
    bad = []
    cd = classify(g).canonically_directed
    for j, k, L in (queries if queries is not None else singleton_queries(g.d)):
        vals = [t_separated(g, [j], [k], L).separated, m_separated(g, [j], [k], L).separated,
                ancestral_m_separated(g, [j], [k], L).separated]
        if cd:
            vals += [d_separated(g, [j], [k], L).separated,
                     ancestral_d_separated(g, [j], [k], L).separated]
        if len(set(vals)) != 1:
            bad.append(_q(j, k, L, values=vals))
    return bad


def check_marginal_collider(g, queries=None):
    """m-separation iff no collider connection in the smallest marginal."""
    bad = []
    for j, k, L in (queries if queries is not None else singleton_queries(g.d)):
        keep = sorted({j, k} | L)
        m = marginalize(g, keep, self_loops="drop")
        cc = collider_connected_pair(m, keep.index(j), keep.index(k))
        if m_separated(g, [j], [k], L).separated == cc:
            bad.append(_q(j, k, L))
    return bad


def check_marginal_invariance(g, queries=None, part="m"):
    """Separation verdicts are unchanged by marginalizing onto any superset of the query.

    ``part`` is ``"m"`` (m in both graphs), ``"d"`` (d in both) or ``"dm"``
    (d in ``g`` against m in the marginal).
    """
    bad = []
    if part not in ("m", "d", "dm"):
        raise ValueError(f"unknown part {part!r}")
    fn_g = m_separated if part == "m" else d_separated
    fn = d_separated if part == "d" else m_separated
    for j, k, L in (queries if queries is not None else singleton_queries(g.d)):
        base = fn_g(g, [j], [k], L).separated
        rest = [v for v in range(g.d) if v not in {j, k} | L]
        for r in range(len(rest) + 1):
            for extra in itertools.combinations(rest, r):
                keep = sorted({j, k} | L | set(extra))
                m = marginalize(g, keep, self_loops="drop")
                pos = {v: i for i, v in enumerate(keep)}
                got = fn(m, [pos[j]], [pos[k]], [pos[x] for x in L]).separated
                if got != base:
                    bad.append(_q(j, k, L, keep=keep))
    return bad


def check_augmentation(g, queries=None):
    bad = []
    for j, k, L in (queries if queries is not None else singleton_queries(g.d)):
        if m_separated(g, [j], [k], L).separated != \
                m_separated_via_augmentation(g, [j], [k], L).separated:
            bad.append(_q(j, k, L))
    return bad


def check_witnesses(g, queries=None):
    """Every witness is a walk from J to K that the blocking predicate accepts."""
    bad = []
    for j, k, L in (queries if queries is not None else singleton_queries(g.d)):
        for fn in (m_separated, d_separated):
            v = fn(g, [j], [k], L)
            w = v.witness
            if w is not None and (w.start != j or w.end != k or blocked(w, L)):
                bad.append(_q(j, k, L, kind=v.kind))
    return bad


def check_adjustment(g, rng, draws: int = 20, queries=None, tol: float = 1e-8):
    """The marginal and the direct adjustment conditions agree; gamma matches when they hold."""
    bad = []
    systems = None
    for j, k, L in (queries if queries is not None else singleton_queries(g.d, ordered=True)):
        pm = all(linear.adjustment_criterion_marginal(g, j, k, L))
        pg = all(linear.adjustment_criterion(g, j, k, L))
        if pm != pg:
            bad.append(_q(j, k, L, marginal=pm, direct=pg))
            continue
        if not pm:
            continue
        if systems is None:
            systems = [linear.random_weights(g, rng) for _ in range(draws)]
        keep = sorted({j, k} | L)
        for s in systems:
            gamma = linear.regression_coefficient(s, k, j, L)
            direct = linear.unblocked_path_effect(s, j, k, L)
            ms = linear.marginal_system(s, keep)
            tilde = ms.beta_matrix[keep.index(j), keep.index(k)]
            if abs(gamma - direct) > tol or abs(gamma - tilde) > tol:
                bad.append(_q(j, k, L, gamma=gamma, paths=direct, marginal=tilde))
                break
    return bad


def check_symmetric(g, rng, draws: int = 20, queries=None, tol: float = 1e-8):
    """When the symmetric criterion holds and ``j`` is an ancestor of ``k``, gamma is the total effect."""
    bad = []
    systems = None
    from .graph import descendants

    for j, k, L in (queries if queries is not None else singleton_queries(g.d, ordered=True)):
        if k not in descendants(g, [j]):
            continue
        if not linear.symmetric_no_confounding(g, j, k, L):
            continue
        if systems is None:
            systems = [linear.random_weights(g, rng) for _ in range(draws)]
        for s in systems:
            gamma = linear.regression_coefficient(s, k, j, L)
            total = linear.total_causal_effect(s, j, k)
            if abs(gamma - total) > tol:
                bad.append(_q(j, k, L, gamma=gamma, total=total))
                break
    return bad


def check_trek_rule(s: linear.WeightedLinearSystem, tol: float = 1e-9):
    S = linear.covariance_closed_form(s)
    T = linear.trek_rule_covariance(s)
    err = float(np.abs(S - T.values).max()) if s.d else 0.0
    return [] if T.exact and err <= tol else [{"error": err, "exact": T.exact}]


def truncation_errors(s: linear.WeightedLinearSystem, budgets) -> list:
    S = linear.covariance_closed_form(s)
    return [float(np.abs(S - linear.trek_sum_by_length(s, n)).max()) for n in budgets]


def check_truncation_monotone(s, budgets=range(1, 25), slack: float = 1e-12):
    errs = truncation_errors(s, list(budgets))
    for a, b in zip(errs, errs[1:]):
        if b > a + slack:
            return [{"errors": errs}]
    return []


def check_path_analysis(s, tol: float = 1e-9):
    S = linear.covariance_closed_form(s)
    bad = []
    for j, k in itertools.combinations(range(s.d), 2):
        v = linear.path_analysis_covariance(s, j, k)
        if abs(v - S[j, k]) > tol:
            bad.append({"j": j, "k": k, "path": v, "closed": float(S[j, k])})
    return bad


def check_marginal_system(s, rng, tol: float = 1e-9):
    """Covariance of the marginal system is the submatrix; two stages equal one."""
    d = s.d
    S = linear.covariance_closed_form(s)
    keep = sorted(v for v in range(d) if rng.random() < 0.6) or [0]
    inner = sorted(v for v in keep if rng.random() < 0.7) or [keep[0]]
    one = linear.marginal_system(s, inner)
    m1 = linear.marginal_system(s, keep)
    two = linear.marginal_system(m1, [keep.index(v) for v in inner])
    bad = []
    e1 = float(np.abs(linear.covariance_closed_form(m1) - S[np.ix_(keep, keep)]).max())
    e2 = max(float(np.abs(one.beta_matrix - two.beta_matrix).max()),
             float(np.abs(one.lambda_matrix - two.lambda_matrix).max()))
    if e1 > tol or e2 > tol or one.graph != two.graph:
        bad.append({"keep": keep, "inner": inner, "submatrix_error": e1, "two_stage_error": e2})
    return bad


def check_global_markov(s, max_L: int = 2, tol: float = 1e-8):
    bad = []
    for j, k, L in singleton_queries(s.d, max_L=max_L):
        if m_separated(s.graph, [j], [k], L).separated:
            ok, stat = linear.conditionally_independent(s, j, k, L, tol)
            if not ok:
                bad.append(_q(j, k, L, statistic=stat))
    return bad


def check_precision_zeros(s, tol: float = 1e-8):
    """No collider connection between j and k means a zero entry of the precision matrix."""
    bad = []
    g = s.graph
    S = linear.covariance_closed_form(s)
    P = np.linalg.solve(S, np.eye(s.d))
    for j, k in itertools.combinations(range(s.d), 2):
        if not collider_connected_pair(g, j, k):
            stat = abs(P[j, k]) / np.sqrt(P[j, j] * P[k, k])
            if stat > tol:
                bad.append({"j": j, "k": k, "statistic": float(stat)})
    return bad


# -- dioid laws --------------------------------------------------------------

def random_walk_matrix(g: DirectedMixedGraph, rng, max_len: int = 2, keep: float = 0.5) -> WalkMatrix:
    """A random sub-matrix of all walks of ``g`` with at most ``max_len`` steps."""
    from .walks import walk_matrix

    pool = walk_matrix(g, "m-arc", budget=max_len) + multiply(
        walk_matrix(g, "collider", budget=max_len), identity(g.d))
    rows = [[frozenset(w for w in e if rng.random() < keep) for e in row] for row in pool.rows]
    if rng.random() < 0.3:
        rows = [[e | (frozenset({Walk.trivial(j)}) if j == k else frozenset())
                 for k, e in enumerate(row)] for j, row in enumerate(rows)]
    return WalkMatrix(rows)


def check_dioid(A, B, C):
    """Structural dioid laws; returns the names of the laws that fail."""
    Z = WalkMatrix.empty(A.dim)
    I = identity(A.dim)
    laws = {
        "add_assoc": (A + B) + C == A + (B + C),
        "add_comm": A + B == B + A,
        "add_idem": A + A == A,
        "add_zero": A + Z == A,
        "mul_assoc": (A * B) * C == A * (B * C),
        "mul_identity": I * A == A and A * I == A,
        "left_distrib": A * (B + C) == A * B + A * C,
        "right_distrib": (A + B) * C == A * C + B * C,
        "absorption": Z * A == Z and A * Z == Z,
        "transpose_involution": transpose(transpose(A)) == A,
        "transpose_product": transpose(A * B) == transpose(B) * transpose(A),
        "difference": entrywise_difference(A + B, B) + B == A + B,
    }
    return [name for name, ok in laws.items() if not ok]


# -- mutation canary ---------------------------------------------------------

@contextlib.contextmanager
def collider_rule_dropped():
    """Temporarily disable the collider rule in the separation automaton."""
    old = separation.COLLIDER_RULE
    separation.COLLIDER_RULE = False
    try:
        yield
    finally:
        separation.COLLIDER_RULE = old


# -- verification driver -----------------------------------------------------

@dataclass
class PropertyResult:
    property: str
    trials: int = 0
    failures: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self):
        return {"property": self.property, "trials": self.trials,
                "failures": [f.to_dict() for f in self.failures], "elapsed": round(self.elapsed, 4)}


@dataclass
class VerificationReport:
    results: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def n_failures(self) -> int:
        return sum(len(r.failures) for r in self.results)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        by = {r.property: PropertyResult(r.property, r.trials, list(r.failures), r.elapsed)
              for r in self.results}
        for r in other.results:
            cur = by.setdefault(r.property, PropertyResult(r.property))
            cur.trials += r.trials
            cur.failures.extend(r.failures)
            cur.elapsed += r.elapsed
        return VerificationReport(list(by.values()), self.elapsed + other.elapsed)

    def to_list(self) -> list:
        return [r.to_dict() for r in self.results]

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_list(), **kw)

    def summary(self) -> str:
        lines = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(f"{status} {r.property}: {r.trials} trials, {len(r.failures)} failures "
                         f"({r.elapsed:.2f}s)")
        return "\n".join(lines)


@dataclass(frozen=True)
class VerifyConfig:
    d_max: int = 6
    trials: int = 200
    seed: int | None = None

    def resolved_seed(self) -> int:
        if self.seed is not None:
            return int(self.seed)
        env = os.environ.get("DMG_SEED")
        return int(env) if env else DEFAULT_SEED


def _graph_trial(cls, check, d_min=2, density=(0.2, 0.5)):
    def run(rng, d_max):
        d = int(rng.integers(d_min, max(d_min, d_max) + 1))
        g = random_graph(d, cls, float(rng.uniform(*density)), rng)
        if d <= 5:
            return g, {}, check(g, rng, None)
        qs = [random_query(d, rng) for _ in range(3)]
        return g, {}, check(g, rng, qs)
    return run


def _system_trial(cls, check, d_min=2, density=(0.2, 0.5)):
    def run(rng, d_max):
        d = int(rng.integers(d_min, max(d_min, d_max) + 1))
        g = random_graph(d, cls, float(rng.uniform(*density)), rng)
        s = linear.random_weights(g, rng)
        return g, {}, check(s, rng)
    return run


def _stable_cyclic(rng, d):
    # redraw until the graph has a cycle; weights from random_weights are stable
    for _ in range(100):
        g = random_graph(d, "canonical", float(rng.uniform(0.3, 0.6)), rng)
        if not is_acyclic(g):
            return g
    return None


def _cyclic_trial(rng, d_max):
    d = int(rng.integers(2, max(2, d_max) + 1))
    g = _stable_cyclic(rng, d)
    if g is None:
        return DirectedMixedGraph([]), {}, []
    s = linear.random_weights(g, rng)
    return g, {}, check_truncation_monotone(s)


def _dioid_trial(rng, d_max):
    d = int(rng.integers(1, min(d_max, 4) + 1))
    g = random_graph(d, "any", 0.4, rng)
    A, B, C = (random_walk_matrix(g, rng) for _ in range(3))
    return g, {}, [{"law": x} for x in check_dioid(A, B, C)]


PROPERTIES: dict = {
    "oracle_m": _graph_trial("any", lambda g, r, q: check_oracle(g, ("m",), q)),
    "oracle_t": _graph_trial("any", lambda g, r, q: check_oracle(g, ("t",), q)),
    "oracle_d": _graph_trial("any", lambda g, r, q: check_oracle(g, ("d",), q)),
    "witness": _graph_trial("any", lambda g, r, q: check_witnesses(g, q)),
    "arc_existence": _graph_trial("canonical", lambda g, r, q: check_arc_existence(g, q)),
    "arc_existence_directed": _graph_trial("canonically_directed_acyclic",
                                           lambda g, r, q: check_arc_existence(g, q)),
    "separation_chain": _graph_trial("canonical", lambda g, r, q: check_separation_chain(g, q)),
    "separation_chain_directed": _graph_trial("canonically_directed",
                                               lambda g, r, q: check_separation_chain(g, q)),
    "marginal_collider": _graph_trial("canonical", lambda g, r, q: check_marginal_collider(g, q)),
    "marginal_invariance": _graph_trial("canonical", lambda g, r, q: check_marginal_invariance(g, q, "m")),
    "augmentation": _graph_trial("canonical", lambda g, r, q: check_augmentation(g, q)),
    "adjustment_equivalence": _graph_trial(
        "canonical_acyclic", lambda g, r, q: check_adjustment(g, r, 5, q)),
    "symmetric_criterion": _graph_trial(
        "canonical_acyclic", lambda g, r, q: check_symmetric(g, r, 5, q)),
    "trek_rule": _system_trial("canonical_acyclic", lambda s, r: check_trek_rule(s)),
    "truncation_monotone": _cyclic_trial,
    "path_analysis": _system_trial("canonical_acyclic", lambda s, r: check_path_analysis(s)),
    "marginal_system": _system_trial("canonical_acyclic", check_marginal_system),
    "global_markov": _system_trial("canonical_acyclic", lambda s, r: check_global_markov(s)),
    "precision_zeros": _system_trial("canonical_acyclic", lambda s, r: check_precision_zeros(s)),
    "dioid_laws": _dioid_trial,
}


def run_property(name: str, trials: int, seed: int, d_max: int) -> PropertyResult:
    fn = PROPERTIES[name]
    res = PropertyResult(name)
    t0 = time.perf_counter()
    base = np.random.SeedSequence([seed, sum(map(ord, name))])
    for i, child in enumerate(base.spawn(trials)):
        trial_seed = int(child.generate_state(1)[0])
        rng = np.random.default_rng(trial_seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CanonicalizationWarning)
            g, query, bad = fn(rng, d_max)
        res.trials += 1
        for b in bad:
            res.failures.append(Failure(trial_seed, g.to_dict(), {**query, **b}))
    res.elapsed = time.perf_counter() - t0
    return res


def verify_all(config: VerifyConfig | dict | None = None, properties=None,
               workers: int | None = None) -> VerificationReport:
    """Run every property suite for ``config.trials`` seeded trials.

    Trials are independent, so properties may run on a thread pool; the
    report does not depend on the order in which they finish.
    """
    if config is None:
        config = VerifyConfig()
    elif isinstance(config, dict):
        config = VerifyConfig(**config)
    seed = config.resolved_seed()
    names = list(properties or PROPERTIES)
    t0 = time.perf_counter()
    if workers and workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(lambda n: run_property(n, config.trials, seed, config.d_max),
                                  names))
    else:
        results = [run_property(n, config.trials, seed, config.d_max) for n in names]
    return VerificationReport(results, time.perf_counter() - t0)


def exhaustive(check: Callable, d_values, cls, queries_for=None) -> list:
    """Apply ``check(g, queries)`` to every graph of the class for each ``d``."""
    bad = []
    for d in d_values:
        for g in all_graphs(d, cls):
            qs = list(queries_for(d)) if queries_for else None
            for b in check(g, qs):
                bad.append((g, b))
    return bad


__all__ = [
    "FIG1", "FIG1B", "FOUR", "FIG3", "FIXTURES", "Fixture", "edge_labels", "random_graph",
    "all_graphs", "singleton_queries", "random_query", "brute_force_walk",
    "brute_force_connected", "oracle_agrees", "unblocked_trek_exists", "unblocked_darc_exists",
    "unblocked_marc_exists", "arc_path_exists", "check_oracle", "check_arc_existence", "check_separation_chain",
    "check_marginal_collider", "check_marginal_invariance", "check_augmentation", "check_witnesses", "check_adjustment",
    "check_symmetric", "check_trek_rule", "truncation_errors", "check_truncation_monotone",
    "check_path_analysis", "check_marginal_system", "check_global_markov", "check_precision_zeros",
    "random_walk_matrix", "check_dioid", "collider_rule_dropped", "PropertyResult",
    "VerificationReport", "VerifyConfig", "PROPERTIES", "run_property", "verify_all",
    "exhaustive",
]

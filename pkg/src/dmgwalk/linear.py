"""Gaussian linear systems on directed mixed graphs.

A system ``V = beta^T V + E`` with ``Cov(E) = Lambda`` is attached to a graph:
``beta[j, k]`` may be nonzero only for edges ``j -> k`` and ``Lambda[j, k]``
only for bidirected pairs (the diagonal for loops).  All closed forms use
linear solves rather than explicit inverses.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

import numpy as np

from . import _kernels
from .algebra import Mark, Walk, WalkMatrix
from .graph import DirectedMixedGraph, GraphError, classify, descendants, is_acyclic
from .marginal import marginalize
from .walks import (
    ancestrally_blocked, collider_positions, is_confounding_path, is_directed_walk, iter_paths,
    treks,
)

STRUCTURAL_ZERO = 1e-8
IDENTITY_TOL = 1e-9
PSD_FLOOR = -1e-10


class LinearSystemError(ValueError):
    """Raised for singular systems or weights that do not match the graph."""


@dataclass(frozen=True)
class RegularityFlags:
    nonsingular: bool
    principally_nonsingular: bool
    stable: bool
    principally_stable: bool
    lambda_psd: bool
    lambda_pd: bool


class WeightedLinearSystem:
    """A graph with edge weights.

    Parameters
    ----------
    graph : DirectedMixedGraph
    beta : mapping of (tail, head) index pairs to float
    lam : mapping of index pairs to float
        Pairs are unordered; ``(j, j)`` is the noise variance of ``V_j``.
    """

    __slots__ = ("graph", "beta", "lam", "_B", "_L")

    def __init__(self, graph: DirectedMixedGraph, beta: Mapping = None, lam: Mapping = None):
        d = graph.d
        Bm = np.zeros((d, d))
        Lm = np.zeros((d, d))
        bclean, lclean = {}, {}
        for (t, h), w in (beta or {}).items():
            t, h = graph.index(t), graph.index(h)
            if (t, h) not in graph.directed:
                raise LinearSystemError(
                    f"beta weight on non-edge {graph.labels[t]} -> {graph.labels[h]}")
            Bm[t, h] = float(w)
            bclean[(t, h)] = float(w)
        for (a, b), w in (lam or {}).items():
            a, b = graph.index(a), graph.index(b)
            key = (min(a, b), max(a, b))
            if key not in graph.bidirected:
                raise LinearSystemError(
                    f"lambda weight on non-edge {graph.labels[a]} <-> {graph.labels[b]}")
            if key in lclean and lclean[key] != float(w):
                raise LinearSystemError("conflicting lambda weights for one pair")
            Lm[a, b] = Lm[b, a] = float(w)
            lclean[key] = float(w)
        Bm.setflags(write=False)
        Lm.setflags(write=False)
        self.graph = graph
        self.beta = bclean
        self.lam = lclean
        self._B = Bm
        self._L = Lm

    @classmethod
    def from_matrices(cls, graph: DirectedMixedGraph, beta: np.ndarray, lam: np.ndarray,
                      atol: float = 0.0) -> "WeightedLinearSystem":
        """Build from dense matrices; entries off the edge pattern must be (near) zero."""
        beta = np.asarray(beta, dtype=float)
        lam = np.asarray(lam, dtype=float)
        if not np.allclose(lam, lam.T, atol=1e-12, rtol=0):
            raise LinearSystemError("lambda must be symmetric")
        bd, ld = {}, {}
        for t in range(graph.d):
            for h in range(graph.d):
                if (t, h) in graph.directed:
                    bd[(t, h)] = beta[t, h]
                elif abs(beta[t, h]) > atol:
                    raise LinearSystemError(f"beta[{t}, {h}] = {beta[t, h]} off the edge pattern")
                if t <= h:
                    if (t, h) in graph.bidirected:
                        ld[(t, h)] = lam[t, h]
                    elif abs(lam[t, h]) > atol:
                        raise LinearSystemError(
                            f"lambda[{t}, {h}] = {lam[t, h]} off the edge pattern")
        return cls(graph, bd, ld)

    @property
    def beta_matrix(self) -> np.ndarray:
        return self._B

    @property
    def lambda_matrix(self) -> np.ndarray:
        return self._L

    @property
    def d(self) -> int:
        return self.graph.d

    def __repr__(self):
        return f"WeightedLinearSystem({self.graph!r}, {len(self.beta)} beta, {len(self.lam)} lambda)"


# -- regularity ------------------------------------------------------------

def _subsets(d):
    for r in range(1, d + 1):
        yield from combinations(range(d), r)


def _spectral_radius(M):
    return float(np.max(np.abs(np.linalg.eigvals(M)))) if M.size else 0.0


def _nonsingular(M, tol=1e-12):
    return bool(M.size == 0 or np.linalg.svd(M, compute_uv=False).min() > tol)


def check_regularity(sys: WeightedLinearSystem) -> RegularityFlags:
    """Singularity, stability and definiteness flags.

    Principal versions enumerate every principal submatrix, so this is
    meant for the small graphs the library targets (``d`` up to about 12).
    """
    B = sys.beta_matrix
    A = np.eye(sys.d) - B
    nonsing = _nonsingular(A)
    stable = _spectral_radius(B) < 1
    p_nonsing = nonsing
    p_stable = stable
    for S in _subsets(sys.d):
        ix = np.ix_(S, S)
        if p_nonsing and not _nonsingular(A[ix]):
            p_nonsing = False
        if p_stable and _spectral_radius(B[ix]) >= 1:
            p_stable = False
        if not (p_nonsing or p_stable):
            break
    ev = np.linalg.eigvalsh(sys.lambda_matrix) if sys.d else np.zeros(0)
    scale = max(1.0, float(np.abs(ev).max())) if sys.d else 1.0
    psd = bool(sys.d == 0 or ev.min() >= PSD_FLOOR * scale)
    pd = bool(sys.d == 0 or ev.min() > 1e-12 * scale)
    return RegularityFlags(nonsing, p_nonsing, stable, p_stable, psd, pd)


# -- sigma and covariances -------------------------------------------------

def _step_weight(sys: WeightedLinearSystem, s) -> float:
    g = sys.graph
    if s.mark == Mark.FORWARD:
        key = (s.src, s.dst)
        if key not in g.directed:
            raise LinearSystemError(f"walk uses missing edge {key}")
        return sys.beta_matrix[key]
    if s.mark == Mark.BACKWARD:
        key = (s.dst, s.src)
        if key not in g.directed:
            raise LinearSystemError(f"walk uses missing edge {key}")
        return sys.beta_matrix[key]
    key = (min(s.src, s.dst), max(s.src, s.dst))
    if key not in g.bidirected:
        raise LinearSystemError(f"walk uses missing bidirected edge {key}")
    return sys.lambda_matrix[key]


def sigma_walk(w: Walk, sys: WeightedLinearSystem) -> float:
    out = 1.0
    for s in w.steps:
        out *= _step_weight(sys, s)
    return out


def sigma_of(ws, sys: WeightedLinearSystem) -> float:
    """Sum over walks of the product of their edge weights (``sigma(id) = 1``)."""
    return float(sum(sigma_walk(w, sys) for w in ws))


def sigma_matrix(W: WalkMatrix, sys: WeightedLinearSystem) -> np.ndarray:
    return np.array([[sigma_of(e, sys) for e in row] for row in W.rows]).reshape(W.dim, W.dim)


def _inv_apply(A, X):
    return np.linalg.solve(A, X)


def covariance_closed_form(sys: WeightedLinearSystem) -> np.ndarray:
    """``(I - beta)^{-T} Lambda (I - beta)^{-1}`` via two solves."""
    A = np.eye(sys.d) - sys.beta_matrix
    if not _nonsingular(A):
        raise LinearSystemError("I - beta is singular")
    X = np.linalg.solve(A.T, sys.lambda_matrix)       # A^{-T} Lambda
    S = np.linalg.solve(A.T, X.T).T                   # (A^{-T} X^T)^T = X A^{-1}
    return (S + S.T) / 2


def neumann_truncated(sys: WeightedLinearSystem, Q: int) -> np.ndarray:
    """``sum_{q=0}^{Q} beta^q``."""
    B = sys.beta_matrix
    out = np.eye(sys.d)
    term = np.eye(sys.d)
    for _ in range(Q):
        term = term @ B
        out = out + term
    return out


def trek_sum_by_length(sys: WeightedLinearSystem, max_len: int) -> np.ndarray:
    """Weight of all treks with at most ``max_len`` steps, from matrix powers.

    A trek with left leg ``a`` and right leg ``b`` steps has ``a + b + 1``
    steps, so this is ``sum_{a + b < max_len} (beta^a)^T Lambda beta^b``.
    """
    B = sys.beta_matrix
    powers = [np.eye(sys.d)]
    for _ in range(max(max_len - 1, 0)):
        powers.append(powers[-1] @ B)
    out = np.zeros((sys.d, sys.d))
    for a in range(max_len):
        for b in range(max_len - a):
            out += powers[a].T @ sys.lambda_matrix @ powers[b]
    return out


@dataclass(frozen=True)
class SymbolicCovariance:
    """Trek sets per pair with their weights.

    ``exact`` is True when no trek exceeded the budget, in which case
    ``values`` is the covariance matrix itself.
    """

    treks: WalkMatrix
    values: np.ndarray
    exact: bool

    def terms(self, j: int, k: int, labels=None) -> list:
        from .algebra import sorted_walks
        return [w.render(labels) for w in sorted_walks(self.treks[j, k])]


def trek_rule_covariance(sys: WeightedLinearSystem, budget: int | None = None) -> SymbolicCovariance:
    """Covariance as the weight of the trek matrix (truncated at ``budget``)."""
    T = treks(sys.graph, budget)
    return SymbolicCovariance(T, sigma_matrix(T, sys), T.exact)


def _root(w: Walk) -> int:
    for i, s in enumerate(w.steps):
        if s.mark == Mark.FORWARD:
            return w.vertices[i]
    return w.end


def path_analysis_terms(g: DirectedMixedGraph, j: int, k: int):
    """Trek paths from ``j`` to ``k`` and the d-connected paths grouped by root."""
    trek_paths, by_root = [], {}
    for w in iter_paths(g, start=j, end=k):
        if collider_positions(w):
            continue
        nb = sum(1 for s in w.steps if s.mark == Mark.BIDIRECTED)
        if nb == 1:
            trek_paths.append(w)
        elif nb == 0:
            by_root.setdefault(_root(w), []).append(w)
    return trek_paths, by_root


def path_analysis_covariance(sys: WeightedLinearSystem, j, k) -> float:
    """Covariance from paths only: trek paths plus d-connected paths times root variances.

    Requires an acyclic graph and ``j != k``.
    """
    g = sys.graph
    j, k = g.index(j), g.index(k)
    if j == k:
        raise LinearSystemError("path analysis needs two distinct vertices")
    if not is_acyclic(g):
        raise GraphError("path analysis requires an acyclic graph")
    trek_paths, by_root = path_analysis_terms(g, j, k)
    var = np.diag(trek_rule_covariance(sys).values)
    return sigma_of(trek_paths, sys) + sum(sigma_of(ws, sys) * var[r] for r, ws in by_root.items())


# -- marginal systems --------------------------------------------------------

def marginal_system(sys: WeightedLinearSystem, keep) -> WeightedLinearSystem:
    """Eliminate the dropped vertices by Schur complement.

    ``beta~ = beta_VV + beta_VU C`` and
    ``Lambda~ = Lambda_VV + Lambda_VU C + C^T Lambda_UV + C^T Lambda_UU C``
    with ``C = (I - beta_UU)^{-1} beta_UV``.  The result lives on
    :func:`~dmgwalk.marginal.marginalize` of the graph.
    """
    g = sys.graph
    keep = sorted(g.vset(keep))
    drop = [v for v in range(g.d) if v not in set(keep)]
    mg = marginalize(g, keep)
    B, L = sys.beta_matrix, sys.lambda_matrix
    kv, uu = np.ix_(keep, keep), np.ix_(drop, drop)
    if drop:
        A_uu = np.eye(len(drop)) - B[uu]
        if not _nonsingular(A_uu):
            raise LinearSystemError("I - beta_UU is singular")
        C = np.linalg.solve(A_uu, B[np.ix_(drop, keep)])
        Bt = B[kv] + B[np.ix_(keep, drop)] @ C
        L_vu = L[np.ix_(keep, drop)]
        Lt = L[kv] + L_vu @ C + C.T @ L_vu.T + C.T @ L[uu] @ C
    else:
        Bt, Lt = B[kv].copy(), L[kv].copy()
    Lt = (Lt + Lt.T) / 2
    scale = max(1.0, float(np.abs(Bt).max(initial=0)), float(np.abs(Lt).max(initial=0)))
    for M, pattern in ((Bt, mg.D), (Lt, mg.B)):
        off = pattern == 0
        if np.any(np.abs(M[off]) > STRUCTURAL_ZERO * scale):
            raise LinearSystemError("marginal weights leak outside the marginal graph")
        M[off] = 0.0
    return WeightedLinearSystem.from_matrices(mg, Bt, Lt)


# -- conditional independence and regression ---------------------------------

def _precision_on(sys: WeightedLinearSystem, idx: list) -> np.ndarray:
    S = covariance_closed_form(sys)[np.ix_(idx, idx)]
    if not _nonsingular(S):
        raise LinearSystemError("marginal covariance is singular")
    return np.linalg.solve(S, np.eye(len(idx)))


def partial_correlation(sys: WeightedLinearSystem, j, k, L=()) -> float:
    g = sys.graph
    j, k, L = g.index(j), g.index(k), sorted(g.vset(L))
    if j == k or j in L or k in L:
        raise LinearSystemError("j, k and L must be disjoint")
    P = _precision_on(sys, [j, k] + L)
    return float(-P[0, 1] / np.sqrt(P[0, 0] * P[1, 1]))


def conditionally_independent(sys: WeightedLinearSystem, j, k, L=(), tol: float = STRUCTURAL_ZERO):
    """Test ``V_j`` independent of ``V_k`` given ``L``.

    Returns
    -------
    (bool, float)
        The verdict and the statistic: the absolute partial correlation of
        ``j`` and ``k`` given ``L``, i.e. the scaled precision entry of the
        marginal covariance of ``{j, k} | L``.
    """
    stat = abs(partial_correlation(sys, j, k, L))
    return stat < tol, stat


def regression_coefficient(sys: WeightedLinearSystem, k, j, L=()) -> float:
    """Coefficient of ``V_j`` in the regression of ``V_k`` on ``V_j`` and ``L``."""
    g = sys.graph
    j, k, L = g.index(j), g.index(k), sorted(g.vset(L))
    if j == k or j in L or k in L:
        raise LinearSystemError("j, k and L must be disjoint")
    P = _precision_on(sys, [j, k] + L)
    return float(-P[0, 1] / P[1, 1])


def directed_paths(g: DirectedMixedGraph, j: int, k: int, avoid=()) -> list:
    """Directed paths ``j -> ... -> k`` whose non-endpoints avoid ``avoid``."""
    avoid = frozenset(avoid)
    return [w for w in iter_paths(g, directed_only=True, start=j, end=k)
            if is_directed_walk(w) and not any(v in avoid for v in w.vertices[1:-1])]


def total_causal_effect(sys: WeightedLinearSystem, j, k) -> float:
    """Weight of all directed paths from ``j`` to ``k`` (acyclic graphs)."""
    g = sys.graph
    if not is_acyclic(g):
        raise GraphError("total effects are defined here for acyclic graphs only")
    j, k = g.index(j), g.index(k)
    return sigma_of(directed_paths(g, j, k), sys)


def unblocked_path_effect(sys: WeightedLinearSystem, j, k, L=()) -> float:
    """Weight of directed paths from ``j`` to ``k`` with no non-endpoint in ``L``."""
    g = sys.graph
    j, k = g.index(j), g.index(k)
    return sigma_of(directed_paths(g, j, k, g.vset(L)), sys)


# -- adjustment criteria -----------------------------------------------------

def _require_canonical_acyclic(g, j, k, L):
    flags = classify(g)
    if not flags.canonical_acyclic:
        raise GraphError("adjustment criteria need a canonical acyclic graph")
    j, k, L = g.index(j), g.index(k), g.vset(L)
    if j == k or j in L or k in L:
        raise LinearSystemError("j, k and L must be disjoint")
    return j, k, L


def adjustment_criterion_marginal(g: DirectedMixedGraph, j, k, L=()) -> tuple:
    """The two conditions evaluated on the marginal graph over ``{j, k} | L``.

    1. Every path from ``j`` to ``k`` in the marginal that is not blocked by
       ``L`` is the single edge ``j -> k``.  In that graph every
       non-endpoint lies in ``L``, so such paths are exactly those whose
       interior vertices are all colliders.
    2. No vertex of ``L`` is a descendant of ``k`` in the marginal.
    """
    j, k, L = _require_canonical_acyclic(g, j, k, L)
    keep = sorted({j, k} | L)
    m = marginalize(g, keep)
    pos = {v: i for i, v in enumerate(keep)}
    mj, mk = pos[j], pos[k]
    c1 = True
    for w in iter_paths(m, start=mj, end=mk):
        if len(collider_positions(w)) != len(w.steps) - 1:
            continue
        if not (len(w.steps) == 1 and w.steps[0].mark == Mark.FORWARD):
            c1 = False
            break
    c2 = not (descendants(m, [mk]) & {pos[x] for x in L})
    return c1, c2


def adjustment_criterion(g: DirectedMixedGraph, j, k, L=()) -> tuple:
    """The three conditions evaluated on ``g`` itself.

    1. Every path from ``j`` to ``k`` not ancestrally blocked by ``L`` is
       right-directed.
    2. No vertex of ``L`` is a descendant of ``k``.
    3. No vertex ``l`` outside ``{j, k} | L`` lies on a directed walk from
       ``j`` to ``k`` unblocked by ``L`` while having a descendant in ``L``.
    """
    j, k, L = _require_canonical_acyclic(g, j, k, L)
    c1 = all(is_directed_walk(w) for w in iter_paths(g, start=j, end=k)
             if not ancestrally_blocked(w, L, g))
    c2 = not (descendants(g, [k]) & L)
    allowed = np.ones(g.d, dtype=np.uint8)
    for v in L:
        allowed[v] = 0
    from_j = _kernels.walk_reach(g.D, j, allowed)
    c3 = True
    for v in range(g.d):
        if v in L or v in (j, k) or not from_j[v]:
            continue
        if _kernels.walk_reach(g.D, v, allowed)[k] and descendants(g, [v]) & L:
            c3 = False
            break
    return c1, c2, c3


def confounding_path_escapes(g: DirectedMixedGraph, j: int, k: int, L) -> Walk | None:
    """A confounding path from ``j`` to ``k`` not ancestrally blocked by ``L``, if any."""
    L = g.vset(L)
    for w in iter_paths(g, start=j, end=k):
        if is_confounding_path(w) and not ancestrally_blocked(w, L, g):
            return w
    return None


def symmetric_no_confounding(g: DirectedMixedGraph, j, k, L=()) -> bool:
    """Symmetric no-confounding criterion.

    True iff ``L`` holds no descendant of ``j`` or ``k`` and every
    confounding path between them is ancestrally blocked by ``L``.
    """
    j, k, L = _require_canonical_acyclic(g, j, k, L)
    if descendants(g, [j, k]) & L:
        return False
    return confounding_path_escapes(g, j, k, L) is None


# -- random weights ------------------------------------------------------------

def random_weights(g: DirectedMixedGraph, rng=None, max_tries: int = 50) -> WeightedLinearSystem:
    """Generic random weights on ``g``.

    ``beta`` entries have magnitude uniform on ``[0.2, 0.9] / d`` with a
    random sign, so every row sum of ``|beta|`` stays below 0.9 and the
    system is stable.  ``Lambda`` is ``A A^T + 0.1 I`` restricted to the
    bidirected pattern, redrawn until positive definite on the vertices
    with a loop (falling back to diagonal dominance).  Vertices without a
    loop get a zero row.
    """
    rng = np.random.default_rng(rng)
    d = g.d
    beta = {}
    for t, h in sorted(g.directed):
        beta[(t, h)] = float(rng.choice((-1.0, 1.0)) * rng.uniform(0.2, 0.9) / max(d, 1))
    loops = [v for v in range(d) if (v, v) in g.bidirected]
    pattern = g.B.astype(bool).copy()
    for v in range(d):
        if v not in loops:
            pattern[v, :] = pattern[:, v] = False
    Lm = None
    for _ in range(max_tries):
        A = rng.normal(size=(d, d))
        M = np.where(pattern, A @ A.T + 0.1 * np.eye(d), 0.0)
        sub = M[np.ix_(loops, loops)]
        try:
            np.linalg.cholesky(sub)
            Lm = M
            break
        except np.linalg.LinAlgError:
            continue
    if Lm is None:
        off = np.where(pattern & ~np.eye(d, dtype=bool), rng.uniform(-1, 1, (d, d)), 0.0)
        off = np.triu(off, 1)
        off = off + off.T
        Lm = off + np.diag([np.abs(off[v]).sum() + 0.1 + rng.uniform(0, 1) if v in loops else 0.0
                            for v in range(d)])
    lam = {(a, b): float(Lm[a, b]) for a, b in g.bidirected}
    return WeightedLinearSystem(g, beta, lam)


def path_analysis_matrix(sys: WeightedLinearSystem) -> np.ndarray:
    """Full covariance from path analysis, with variances from the trek rule."""
    if not is_acyclic(sys.graph):
        raise GraphError("path analysis requires an acyclic graph")
    S = np.diag(np.diag(trek_rule_covariance(sys).values))
    for j, k in combinations(range(sys.d), 2):
        S[j, k] = S[k, j] = path_analysis_covariance(sys, j, k)
    return S

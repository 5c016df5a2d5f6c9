"""Matrices of walk sets under union, concatenation and transpose.

Walk sets are plain ``frozenset`` objects of :class:`Walk`.  Matrices carry an
``exact`` flag that is cleared whenever a length budget discarded a walk, so
callers can tell a truncated enumeration from a complete one.
"""
from __future__ import annotations

from enum import IntEnum
from typing import Iterable, NamedTuple, Sequence

EMPTY: frozenset = frozenset()


class Mark(IntEnum):
    """How a step traverses its edge."""

    FORWARD = 0     # a -> b
    BACKWARD = 1    # a <- b (directed edge b -> a walked against its direction)
    BIDIRECTED = 2  # a <-> b

    @property
    def arrow(self) -> str:
        return ("->", "<-", "<->")[self]


class Step(NamedTuple):
    src: int
    dst: int
    mark: Mark

    @property
    def head_at_src(self) -> bool:
        return self.mark != Mark.FORWARD

    @property
    def head_at_dst(self) -> bool:
        return self.mark != Mark.BACKWARD

    @property
    def is_directed(self) -> bool:
        return self.mark != Mark.BIDIRECTED

    @property
    def edge(self) -> tuple:
        """Edge key: ``("D", tail, head)`` or ``("B", min, max)``."""
        if self.mark == Mark.FORWARD:
            return ("D", self.src, self.dst)
        if self.mark == Mark.BACKWARD:
            return ("D", self.dst, self.src)
        return ("B", min(self.src, self.dst), max(self.src, self.dst))

    def reversed(self) -> "Step":
        if self.mark == Mark.FORWARD:
            return Step(self.dst, self.src, Mark.BACKWARD)
        if self.mark == Mark.BACKWARD:
            return Step(self.dst, self.src, Mark.FORWARD)
        return Step(self.dst, self.src, Mark.BIDIRECTED)


class Walk(NamedTuple):
    """A walk: a start vertex and a (possibly empty) tuple of connected steps."""

    start: int
    steps: tuple = ()

    @classmethod
    def trivial(cls, v: int) -> "Walk":
        return cls(v, ())

    @classmethod
    def from_steps(cls, steps: Sequence[Step]) -> "Walk":
        steps = tuple(Step(s.src, s.dst, Mark(s.mark)) for s in steps)
        if not steps:
            raise ValueError("use Walk.trivial for the empty walk")
        for a, b in zip(steps, steps[1:]):
            if a.dst != b.src:
                raise ValueError("steps are not connected")
        return cls(steps[0].src, steps)

    @property
    def end(self) -> int:
        return self.steps[-1].dst if self.steps else self.start

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def vertices(self) -> tuple:
        return (self.start,) + tuple(s.dst for s in self.steps)

    def concat(self, other: "Walk") -> "Walk":
        if self.end != other.start:
            raise ValueError("cannot concatenate walks with mismatched endpoints")
        return Walk(self.start, self.steps + other.steps)

    def transpose(self) -> "Walk":
        return Walk(self.end, tuple(s.reversed() for s in reversed(self.steps)))

    def render(self, labels: Sequence[str] | None = None) -> str:
        name = (lambda v: labels[v]) if labels is not None else (lambda v: f"V{v + 1}")
        if not self.steps:
            return f"id({name(self.start)})"
        parts = [name(self.start)]
        for s in self.steps:
            parts.append(s.mark.arrow if isinstance(s.mark, Mark) else Mark(s.mark).arrow)
            parts.append(name(s.dst))
        return " ".join(parts)


def walk_key(w: Walk):
    """Canonical order: shorter first, then lexicographic on the step sequence."""
    return (len(w.steps), w.start, w.steps)


def sorted_walks(ws: Iterable[Walk]) -> list:
    return sorted(ws, key=walk_key)


def concat_sets(A, B, max_len: int | None = None):
    """All pairwise concatenations; returns ``(set, dropped_any)``."""
    out = set()
    dropped = False
    for a in A:
        for b in B:
            if max_len is not None and len(a.steps) + len(b.steps) > max_len:
                dropped = True
                continue
            out.add(Walk(a.start, a.steps + b.steps))
    return frozenset(out), dropped


class WalkMatrix:
    """A ``dim x dim`` matrix whose ``(j, k)`` entry is a set of walks from j to k."""

    __slots__ = ("dim", "rows", "exact")

    def __init__(self, rows, exact: bool = True):
        rows = tuple(tuple(frozenset(e) for e in row) for row in rows)
        for row in rows:
            if len(row) != len(rows):
                raise ValueError("walk matrix must be square")
        self.dim = len(rows)
        self.rows = rows
        self.exact = bool(exact)

    @classmethod
    def empty(cls, dim: int) -> "WalkMatrix":
        return cls([[EMPTY] * dim for _ in range(dim)])

    @classmethod
    def from_entries(cls, dim: int, entries: dict, exact: bool = True) -> "WalkMatrix":
        rows = [[EMPTY] * dim for _ in range(dim)]
        for (j, k), ws in entries.items():
            rows[j][k] = frozenset(ws)
        return cls(rows, exact)

    def __getitem__(self, jk):
        j, k = jk
        return self.rows[j][k]

    def __eq__(self, other):
        if not isinstance(other, WalkMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return multiply(self, other)

    def __repr__(self):
        n = sum(len(e) for row in self.rows for e in row)
        return f"WalkMatrix(dim={self.dim}, walks={n}, exact={self.exact})"

    @property
    def T(self) -> "WalkMatrix":
        return transpose(self)

    def is_empty(self) -> bool:
        return all(not e for row in self.rows for e in row)

    def support(self):
        """Boolean nested list: which entries are nonempty."""
        return [[bool(e) for e in row] for row in self.rows]

    def walks(self):
        for row in self.rows:
            for e in row:
                yield from e

    def issubset(self, other: "WalkMatrix") -> bool:
        _check_dims(self, other)
        return all(a <= b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    def mask(self, rows=None, cols=None) -> "WalkMatrix":
        """Keep entries whose row is in ``rows`` and column in ``cols`` (``None`` = all)."""
        out = [[e if (rows is None or j in rows) and (cols is None or k in cols) else EMPTY
                for k, e in enumerate(row)] for j, row in enumerate(self.rows)]
        return WalkMatrix(out, self.exact)

    def filter(self, pred) -> "WalkMatrix":
        return WalkMatrix([[frozenset(w for w in e if pred(w)) for e in row] for row in self.rows],
                          self.exact)

    def render(self, labels: Sequence[str] | None = None) -> str:
        name = (lambda v: labels[v]) if labels is not None else (lambda v: f"V{v + 1}")
        lines = []
        for j, row in enumerate(self.rows):
            for k, e in enumerate(row):
                if e:
                    ws = ", ".join(w.render(labels) for w in sorted_walks(e))
                    lines.append(f"[{name(j)}, {name(k)}] = {{{ws}}}")
        return "\n".join(lines) if lines else "(empty)"


def _check_dims(a: WalkMatrix, b: WalkMatrix):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def identity(d: int) -> WalkMatrix:
    return WalkMatrix([[frozenset({Walk.trivial(j)}) if j == k else EMPTY for k in range(d)]
                       for j in range(d)])


def add(W: WalkMatrix, V: WalkMatrix) -> WalkMatrix:
    _check_dims(W, V)
    return WalkMatrix([[a | b for a, b in zip(ra, rb)] for ra, rb in zip(W.rows, V.rows)],
                      W.exact and V.exact)


def multiply(W: WalkMatrix, V: WalkMatrix, max_len: int | None = None) -> WalkMatrix:
    """Matrix product under concatenation; walks longer than ``max_len`` are dropped."""
    _check_dims(W, V)
    d = W.dim
    rows = [[set() for _ in range(d)] for _ in range(d)]
    dropped = False
    for j in range(d):
        for l, A in enumerate(W.rows[j]):
            if not A:
                continue
            for k, Bset in enumerate(V.rows[l]):
                if Bset:
                    prod, lost = concat_sets(A, Bset, max_len)
                    rows[j][k] |= prod
                    dropped |= lost
    return WalkMatrix(rows, W.exact and V.exact and not dropped)


def transpose(W: WalkMatrix) -> WalkMatrix:
    d = W.dim
    return WalkMatrix([[frozenset(w.transpose() for w in W.rows[k][j]) for k in range(d)]
                       for j in range(d)], W.exact)


def entrywise_intersect(W: WalkMatrix, V: WalkMatrix) -> WalkMatrix:
    _check_dims(W, V)
    return WalkMatrix([[a & b for a, b in zip(ra, rb)] for ra, rb in zip(W.rows, V.rows)],
                      W.exact and V.exact)


def entrywise_difference(W: WalkMatrix, V: WalkMatrix) -> WalkMatrix:
    _check_dims(W, V)
    return WalkMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(W.rows, V.rows)],
                      W.exact and V.exact)


def truncate(W: WalkMatrix, max_len: int) -> WalkMatrix:
    dropped = any(len(w.steps) > max_len for w in W.walks())
    out = W.filter(lambda w: len(w.steps) <= max_len)
    out.exact = W.exact and not dropped
    return out


def truncated_series(W: WalkMatrix, max_len: int) -> WalkMatrix:
    """``W + W^2 + W^3 + ...`` keeping walks of at most ``max_len`` steps.

    The result is flagged exact iff no walk was discarded, i.e. the series
    terminated within the budget.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    base = truncate(W, max_len)
    exact = base.exact
    acc = [[set(e) for e in row] for row in base.rows]
    delta = base
    d = W.dim
    while not delta.is_empty():
        nxt = multiply(delta, W, max_len)
        exact &= nxt.exact
        new_rows = []
        for j in range(d):
            row = []
            for k in range(d):
                fresh = nxt.rows[j][k] - acc[j][k]
                acc[j][k] |= fresh
                row.append(fresh)
            new_rows.append(row)
        delta = WalkMatrix(new_rows)
    return WalkMatrix(acc, exact)


def basic_directed(g) -> WalkMatrix:
    """Directed edge matrix: entry ``(j, k)`` is ``{j -> k}`` when the edge exists."""
    return WalkMatrix.from_entries(
        g.d, {(t, h): {Walk(t, (Step(t, h, Mark.FORWARD),))} for t, h in g.directed})


def basic_bidirected(g) -> WalkMatrix:
    """Bidirected edge matrix, holding both orientations of every edge (and loops)."""
    entries = {}
    for a, b in g.bidirected:
        entries[(a, b)] = {Walk(a, (Step(a, b, Mark.BIDIRECTED),))}
        entries[(b, a)] = {Walk(b, (Step(b, a, Mark.BIDIRECTED),))}
    return WalkMatrix.from_entries(g.d, entries)

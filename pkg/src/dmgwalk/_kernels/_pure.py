"""Pure-Python reachability kernels (reference implementation).

Every function here has a twin in ``_fast.pyx`` with the same signature and
results.  Arguments are uint8 numpy arrays: ``D`` (directed adjacency),
``B`` (symmetric bidirected adjacency), and 0/1 vertex masks.

Step marks: 0 forward (a -> b), 1 backward (a <- b), 2 bidirected (a <-> b).

State numbering for the reachability automata: ``2*v + h`` for an interior
visit of ``v`` (``h`` = mark flag, see each kernel) and ``2*d + v`` for the
start state at ``v``.  ``prev``/``code`` record the BFS tree so the caller
can rebuild the (shortest, lexicographically least) witness walk.
"""
from collections import deque

import numpy as np

BACKEND = "python"


def _steps_from(Dl, Bl, v, d, directed_only):
    # (dst, mark, head_at_src, head_at_dst) in canonical step order
    out = []
    for w in range(d):
        if Dl[v][w]:
            out.append((w, 0, 0, 1))
        if Dl[w][v]:
            out.append((w, 1, 1, 0))
        if not directed_only and Bl[v][w]:
            out.append((w, 2, 1, 1))
    return out


def mixed_reach(D, B, src, tgt, cond, directed_only, collider_rule):
    """BFS for a walk from ``src`` to ``tgt`` not blocked by ``cond``.

    Interior state flag ``h`` = 1 iff the walk arrived at the vertex with an
    arrowhead.  Leaving with an arrowhead at the vertex as well makes it a
    collider; colliders must lie in ``cond`` and non-colliders outside it.
    With ``collider_rule`` false the first requirement is dropped (used only
    for mutation canaries).

    Returns ``(end_state, prev, code)``; ``end_state`` is -1 when separated.
    """
    d = D.shape[0]
    Dl = D.tolist()
    Bl = B.tolist()
    n = 3 * d
    prev = np.full(n, -1, dtype=np.int64)
    code = np.full(n, -1, dtype=np.int8)
    seen = [False] * n
    queue = deque()
    for v in range(d):
        if src[v]:
            seen[2 * d + v] = True
            queue.append(2 * d + v)
    adj = [_steps_from(Dl, Bl, v, d, directed_only) for v in range(d)]
    while queue:
        s = queue.popleft()
        if s >= 2 * d:
            v, h, start = s - 2 * d, 0, True
        else:
            v, h, start = s >> 1, s & 1, False
        for w, mark, hs, hd in adj[v]:
            if not start:
                collider = h and hs
                if cond[v]:
                    if not collider:
                        continue
                elif collider and collider_rule:
                    continue
            t = 2 * w + hd
            if seen[t]:
                continue
            seen[t] = True
            prev[t] = s
            code[t] = mark
            if tgt[w]:
                return t, prev, code
            queue.append(t)
    return -1, prev, code


def trek_reach(D, B, src, tgt, cond):
    """BFS for a walk made of treks joined at colliders in ``cond``.

    Interior state flag: 0 = on the left leg of the current trek (arrived by
    a backward step, so with a tail), 1 = past the bidirected edge (arrived
    with an arrowhead).  A new trek may start only from phase 1 at a vertex
    of ``cond``; that vertex is then a collider.  Other interior vertices are
    non-colliders and must avoid ``cond``.  A target is accepted only in
    phase 1, i.e. after a complete trek.
    """
    d = D.shape[0]
    Dl = D.tolist()
    Bl = B.tolist()
    n = 3 * d
    prev = np.full(n, -1, dtype=np.int64)
    code = np.full(n, -1, dtype=np.int8)
    seen = [False] * n
    queue = deque()
    for v in range(d):
        if src[v]:
            seen[2 * d + v] = True
            queue.append(2 * d + v)
    adj = [_steps_from(Dl, Bl, v, d, False) for v in range(d)]
    while queue:
        s = queue.popleft()
        if s >= 2 * d:
            v, phase, start = s - 2 * d, 0, True
        else:
            v, phase, start = s >> 1, s & 1, False
        for w, mark, hs, hd in adj[v]:
            if start or phase == 0:
                if mark == 0:
                    continue
                if not start and cond[v]:
                    continue
                nphase = 1 if mark == 2 else 0
            else:
                if mark == 0:
                    if cond[v]:
                        continue
                    nphase = 1
                else:
                    if not cond[v]:
                        continue
                    nphase = 1 if mark == 2 else 0
            t = 2 * w + nphase
            if seen[t]:
                continue
            seen[t] = True
            prev[t] = s
            code[t] = mark
            if nphase == 1 and tgt[w]:
                return t, prev, code
            queue.append(t)
    return -1, prev, code


def walk_reach(A, start, allowed):
    """Endpoints of walks ``start -> ... -> w`` (length >= 1) along ``A``
    whose interior vertices all lie in ``allowed``."""
    d = A.shape[0]
    Al = A.tolist()
    out = np.zeros(d, dtype=np.uint8)
    expanded = [False] * d
    stack = [start]
    expanded[start] = True
    while stack:
        v = stack.pop()
        row = Al[v]
        for w in range(d):
            if row[w] and not out[w]:
                out[w] = 1
                if allowed[w] and not expanded[w]:
                    expanded[w] = True
                    stack.append(w)
    return out


def ancestral_path(D, B, src, tgt, cond, anc, directed_only, max_len):
    """Depth-first search for a path (no repeated vertex) of at most
    ``max_len`` steps from ``src`` to ``tgt`` that is not ancestrally blocked:
    colliders must lie in ``anc`` and non-colliders must avoid ``cond``.

    Returns a list of ``(src, dst, mark)`` triples or ``None``.  Searching
    with increasing ``max_len`` yields the shortest, lexicographically least
    witness.
    """
    d = D.shape[0]
    Dl = D.tolist()
    Bl = B.tolist()
    adj = [_steps_from(Dl, Bl, v, d, directed_only) for v in range(d)]
    onpath = [False] * d
    path = []

    def dfs(v, h, first):
        if len(path) >= max_len:
            return False
        for w, mark, hs, hd in adj[v]:
            if onpath[w]:
                continue
            if not first:
                if h and hs:
                    if not anc[v]:
                        continue
                elif cond[v]:
                    continue
            path.append((v, w, mark))
            if tgt[w]:
                return True
            onpath[w] = True
            if dfs(w, hd, False):
                return True
            onpath[w] = False
            path.pop()
        return False

    for j in range(d):
        if src[j]:
            onpath[j] = True
            if dfs(j, 0, True):
                return list(path)
            onpath[j] = False
    return None

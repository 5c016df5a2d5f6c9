# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled reachability kernels; see ``_pure.py`` for the semantics."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

ctypedef const unsigned char[:, ::1] adj_t
ctypedef const unsigned char[::1] mask_t


cdef int _fill_steps(adj_t D, adj_t B, int v, int d, bint directed_only,
                     int[:, ::1] out) noexcept nogil:
    # rows of out: dst, mark, head_at_src, head_at_dst
    cdef int w, n = 0
    for w in range(d):
        if D[v, w]:
            out[n, 0] = w; out[n, 1] = 0; out[n, 2] = 0; out[n, 3] = 1
            n += 1
        if D[w, v]:
            out[n, 0] = w; out[n, 1] = 1; out[n, 2] = 1; out[n, 3] = 0
            n += 1
        if not directed_only and B[v, w]:
            out[n, 0] = w; out[n, 1] = 2; out[n, 2] = 1; out[n, 3] = 1
            n += 1
    return n


def _adjacency(adj_t D, adj_t B, bint directed_only):
    cdef int d = D.shape[0]
    steps = np.zeros((d, 3 * d, 4), dtype=np.intc)
    counts = np.zeros(d, dtype=np.intc)
    cdef int[:, :, ::1] sv = steps
    cdef int[::1] cv = counts
    cdef int v
    for v in range(d):
        cv[v] = _fill_steps(D, B, v, d, directed_only, sv[v])
    return steps, counts


def mixed_reach(D, B, src, tgt, cond, bint directed_only, bint collider_rule):
    cdef adj_t Dv = np.ascontiguousarray(D, dtype=np.uint8)
    cdef adj_t Bv = np.ascontiguousarray(B, dtype=np.uint8)
    cdef mask_t sv = np.ascontiguousarray(src, dtype=np.uint8)
    cdef mask_t tv = np.ascontiguousarray(tgt, dtype=np.uint8)
    cdef mask_t cv = np.ascontiguousarray(cond, dtype=np.uint8)
    cdef int d = Dv.shape[0]
    cdef int n = 3 * d
    prev = np.full(n, -1, dtype=np.int64)
    code = np.full(n, -1, dtype=np.int8)
    cdef long long[::1] pv = prev
    cdef signed char[::1] kv = code
    steps, counts = _adjacency(Dv, Bv, directed_only)
    cdef int[:, :, ::1] st = steps
    cdef int[::1] cnt = counts
    seen_arr = np.zeros(n, dtype=np.uint8)
    queue_arr = np.zeros(n, dtype=np.intc)
    cdef unsigned char[::1] seen = seen_arr
    cdef int[::1] queue = queue_arr
    cdef int head = 0, tail = 0, v, s, i, w, mark, hs, hd, t, h, found = -1
    cdef bint start, collider
    for v in range(d):
        if sv[v]:
            seen[2 * d + v] = 1
            queue[tail] = 2 * d + v
            tail += 1
    with nogil:
        while head < tail:
            s = queue[head]
            head += 1
            if s >= 2 * d:
                v = s - 2 * d
                h = 0
                start = True
            else:
                v = s >> 1
                h = s & 1
                start = False
            for i in range(cnt[v]):
                w = st[v, i, 0]; mark = st[v, i, 1]; hs = st[v, i, 2]; hd = st[v, i, 3]
                if not start:
                    collider = h and hs
                    if cv[v]:
                        if not collider:
                            continue
                    elif collider and collider_rule:
                        continue
                t = 2 * w + hd
                if seen[t]:
                    continue
                seen[t] = 1
                pv[t] = s
                kv[t] = mark
                if tv[w]:
                    found = t
                    break
                queue[tail] = t
                tail += 1
            if found >= 0:
                break
    return found, prev, code


def trek_reach(D, B, src, tgt, cond):
    cdef adj_t Dv = np.ascontiguousarray(D, dtype=np.uint8)
    cdef adj_t Bv = np.ascontiguousarray(B, dtype=np.uint8)
    cdef mask_t sv = np.ascontiguousarray(src, dtype=np.uint8)
    cdef mask_t tv = np.ascontiguousarray(tgt, dtype=np.uint8)
    cdef mask_t cv = np.ascontiguousarray(cond, dtype=np.uint8)
    cdef int d = Dv.shape[0]
    cdef int n = 3 * d
    prev = np.full(n, -1, dtype=np.int64)
    code = np.full(n, -1, dtype=np.int8)
    cdef long long[::1] pv = prev
    cdef signed char[::1] kv = code
    steps, counts = _adjacency(Dv, Bv, False)
    cdef int[:, :, ::1] st = steps
    cdef int[::1] cnt = counts
    seen_arr = np.zeros(n, dtype=np.uint8)
    queue_arr = np.zeros(n, dtype=np.intc)
    cdef unsigned char[::1] seen = seen_arr
    cdef int[::1] queue = queue_arr
    cdef int head = 0, tail = 0, v, s, i, w, mark, t, phase, nphase, found = -1
    cdef bint start
    for v in range(d):
        if sv[v]:
            seen[2 * d + v] = 1
            queue[tail] = 2 * d + v
            tail += 1
    with nogil:
        while head < tail:
            s = queue[head]
            head += 1
            if s >= 2 * d:
                v = s - 2 * d
                phase = 0
                start = True
            else:
                v = s >> 1
                phase = s & 1
                start = False
            for i in range(cnt[v]):
                w = st[v, i, 0]; mark = st[v, i, 1]
                if start or phase == 0:
                    if mark == 0:
                        continue
                    if not start and cv[v]:
                        continue
                    nphase = 1 if mark == 2 else 0
                else:
                    if mark == 0:
                        if cv[v]:
                            continue
                        nphase = 1
                    else:
                        if not cv[v]:
                            continue
                        nphase = 1 if mark == 2 else 0
                t = 2 * w + nphase
                if seen[t]:
                    continue
                seen[t] = 1
                pv[t] = s
                kv[t] = mark
                if nphase == 1 and tv[w]:
                    found = t
                    break
                queue[tail] = t
                tail += 1
            if found >= 0:
                break
    return found, prev, code


def walk_reach(A, int start, allowed):
    cdef adj_t Av = np.ascontiguousarray(A, dtype=np.uint8)
    cdef mask_t al = np.ascontiguousarray(allowed, dtype=np.uint8)
    cdef int d = Av.shape[0]
    out = np.zeros(d, dtype=np.uint8)
    cdef unsigned char[::1] ov = out
    expanded_arr = np.zeros(d, dtype=np.uint8)
    stack_arr = np.zeros(d + 1, dtype=np.intc)
    cdef unsigned char[::1] expanded = expanded_arr
    cdef int[::1] stack = stack_arr
    cdef int top = 0, v, w
    stack[top] = start
    top += 1
    expanded[start] = 1
    with nogil:
        while top > 0:
            top -= 1
            v = stack[top]
            for w in range(d):
                if Av[v, w] and not ov[w]:
                    ov[w] = 1
                    if al[w] and not expanded[w]:
                        expanded[w] = 1
                        stack[top] = w
                        top += 1
    return out


cdef bint _dfs(int v, int h, bint first, int depth, int max_len, int d,
               int[:, :, ::1] st, int[::1] cnt, mask_t tv, mask_t cv, mask_t av,
               unsigned char[::1] onpath, int[:, ::1] path, int* found_len) noexcept nogil:
    cdef int i, w, mark, hs, hd
    if depth >= max_len:
        return False
    for i in range(cnt[v]):
        w = st[v, i, 0]; mark = st[v, i, 1]; hs = st[v, i, 2]; hd = st[v, i, 3]
        if onpath[w]:
            continue
        if not first:
            if h and hs:
                if not av[v]:
                    continue
            elif cv[v]:
                continue
        path[depth, 0] = v; path[depth, 1] = w; path[depth, 2] = mark
        if tv[w]:
            found_len[0] = depth + 1
            return True
        onpath[w] = 1
        if _dfs(w, hd, False, depth + 1, max_len, d, st, cnt, tv, cv, av, onpath, path, found_len):
            return True
        onpath[w] = 0
    return False


def ancestral_path(D, B, src, tgt, cond, anc, bint directed_only, int max_len):
    cdef adj_t Dv = np.ascontiguousarray(D, dtype=np.uint8)
    cdef adj_t Bv = np.ascontiguousarray(B, dtype=np.uint8)
    cdef mask_t sv = np.ascontiguousarray(src, dtype=np.uint8)
    cdef mask_t tv = np.ascontiguousarray(tgt, dtype=np.uint8)
    cdef mask_t cv = np.ascontiguousarray(cond, dtype=np.uint8)
    cdef mask_t av = np.ascontiguousarray(anc, dtype=np.uint8)
    cdef int d = Dv.shape[0]
    steps, counts = _adjacency(Dv, Bv, directed_only)
    cdef int[:, :, ::1] st = steps
    cdef int[::1] cnt = counts
    onpath_arr = np.zeros(d, dtype=np.uint8)
    path_arr = np.zeros((max(d, 1), 3), dtype=np.intc)
    cdef unsigned char[::1] onpath = onpath_arr
    cdef int[:, ::1] path = path_arr
    cdef int j, found_len = 0, cap = max_len
    if cap > d:
        cap = d
    for j in range(d):
        if sv[j]:
            onpath[j] = 1
            if _dfs(j, 0, True, 0, cap, d, st, cnt, tv, cv, av, onpath, path, &found_len):
                return [(int(path_arr[i, 0]), int(path_arr[i, 1]), int(path_arr[i, 2]))
                        for i in range(found_len)]
            onpath[j] = 0
    return None

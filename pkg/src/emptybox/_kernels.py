"""Compiled inner loops for the canonical-box placement search.

Both routines work on precomputed integer cell indices, so they decide
exactly the same question as the dense window counts in ``gridcount``: is
there an anchor ``j`` (with ``0 <= j < anchors``) such that no point has its
cell index in ``[j, j + m)`` on every axis.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _build_candidates(q, idx, cnt, t, anchors, cand, ncand):
    c = 0
    cand[t, c] = 0
    c += 1
    for r in range(cnt):
        v = q[t, idx[t, r]] + 1
        if v < anchors[t]:
            cand[t, c] = v
            c += 1
    row = np.sort(cand[t, :c])
    u = 0
    for i in range(c):
        if i == 0 or row[i] != row[i - 1]:
            cand[t, u] = row[i]
            u += 1
    ncand[t] = u


@njit(cache=True, nogil=True)
def _first_uncovered(vals, cnt, m, limit):
    """Smallest ``v`` in ``0..limit-1`` outside every ``[q - m + 1, q]``, or -1."""
    row = np.sort(vals[:cnt])
    v = 0
    for r in range(cnt):
        qv = row[r]
        if qv - m + 1 > v:
            break
        if qv >= v:
            v = qv + 1
    if v < limit:
        return v
    return -1


@njit(cache=True, nogil=True)
def _tree_add(mn, add, stack, size, a, b, val):
    """Add ``val`` on leaves ``a..b`` of a min tree with per-node pending adds."""
    # stack rows: node, lo, hi; partially covered nodes are refreshed
    # afterwards in reverse visiting order, children before parents
    stack[0, 0], stack[0, 1], stack[0, 2] = 1, 0, size - 1
    seen = 1
    i = 0
    while i < seen:
        node, lo, hi = stack[i, 0], stack[i, 1], stack[i, 2]
        i += 1
        if b < lo or hi < a:
            stack[i - 1, 0] = 0
            continue
        if a <= lo and hi <= b:
            mn[node] += val
            add[node] += val
            stack[i - 1, 0] = 0
            continue
        mid = (lo + hi) // 2
        stack[seen, 0], stack[seen, 1], stack[seen, 2] = 2 * node, lo, mid
        stack[seen + 1, 0], stack[seen + 1, 1], stack[seen + 1, 2] = 2 * node + 1, mid + 1, hi
        seen += 2
    for j in range(seen - 1, -1, -1):
        node = stack[j, 0]
        if node:
            mn[node] = min(mn[2 * node], mn[2 * node + 1]) + add[node]


@njit(cache=True, nogil=True)
def _tree_first_zero(mn, add, size):
    if mn[1] != 0:
        return -1
    node, lo, hi, acc = 1, 0, size - 1, 0
    while lo < hi:
        acc += add[node]
        mid = (lo + hi) // 2
        if mn[2 * node] + acc == 0:
            node, hi = 2 * node, mid
        else:
            node, lo = 2 * node + 1, mid + 1
    return lo


@njit(cache=True, nogil=True)
def _first_free_2d(u, w, cnt, m, lim_u, lim_w, res, mn, add, stack):
    """Lexicographically smallest ``(s, t)`` with ``0 <= s < lim_u``,
    ``0 <= t < lim_w`` not inside any ``[u_p - m + 1, u_p] x [w_p - m + 1, w_p]``.

    Sweeps ``s`` over its candidates (0 and ``u_p + 1``). Sorted by ``u``, the
    points covering ``s`` form a contiguous run that only slides right, and a
    min segment tree over the candidate ``t`` values tracks how often each is
    covered.
    """
    if cnt == 0:
        res[0] = 0
        res[1] = 0
        return True
    order = np.argsort(u[:cnt], kind="mergesort")
    us = u[:cnt][order]
    ws = w[:cnt][order]
    # candidate t values: 0 and w_p + 1 inside the anchor range
    tc = np.empty(cnt + 1, dtype=np.int64)
    c = 0
    tc[c] = 0
    c += 1
    for r in range(cnt):
        if ws[r] + 1 < lim_w:
            tc[c] = ws[r] + 1
            c += 1
    tc = np.unique(tc[:c])
    size = tc.shape[0]
    # each point covers candidate indices [tlo, thi]
    tlo = np.searchsorted(tc, ws - m + 1, side="left")
    thi = np.searchsorted(tc, ws, side="right") - 1
    sc = np.empty(cnt + 1, dtype=np.int64)
    c = 0
    sc[c] = 0
    c += 1
    for r in range(cnt):
        if us[r] + 1 < lim_u:
            sc[c] = us[r] + 1
            c += 1
    sc = np.unique(sc[:c])
    for i in range(4 * size + 4):
        mn[i] = 0
        add[i] = 0
    enter = 0
    leave = 0
    for i in range(sc.shape[0]):
        s = sc[i]
        # add points with u - m + 1 <= s, drop points with u < s
        while enter < cnt and us[enter] - m + 1 <= s:
            if tlo[enter] <= thi[enter]:
                _tree_add(mn, add, stack, size, tlo[enter], thi[enter], 1)
            enter += 1
        while leave < enter and us[leave] < s:
            if tlo[leave] <= thi[leave]:
                _tree_add(mn, add, stack, size, tlo[leave], thi[leave], -1)
            leave += 1
        j = _tree_first_zero(mn, add, size)
        if j >= 0:
            res[0] = s
            res[1] = tc[j]
            return True
    return False


@njit(cache=True, nogil=True)
def first_free_anchor(q, anchors, m, out):
    """Lexicographically smallest anchor whose ``m``-cell window holds no point.

    ``q`` is ``(d, n)`` cell indices, ``anchors`` the number of valid anchors
    per axis. Writes the anchor to ``out`` and returns True, or returns False.

    Point ``p`` blocks anchors ``q_p - m + 1 .. q_p`` on each axis. The smallest
    free anchor coordinate on an axis is 0 or one past some blocking
    interval, so a depth-first walk over those candidates, keeping only the
    points that still block the current prefix, finds it. The last two axes
    are settled together by a sweep.
    """
    d = q.shape[0]
    n = q.shape[1]
    for t in range(d):
        if anchors[t] <= 0:
            return False
    if n == 0:
        for t in range(d):
            out[t] = 0
        return True
    vals = np.empty(n, dtype=np.int64)
    if d == 1:
        for p in range(n):
            vals[p] = q[0, p]
        v = _first_uncovered(vals, n, m, anchors[0])
        if v < 0:
            return False
        out[0] = v
        return True
    u = np.empty(n, dtype=np.int64)
    w = np.empty(n, dtype=np.int64)
    res = np.zeros(2, dtype=np.int64)
    mn = np.zeros(4 * n + 8, dtype=np.int64)
    add = np.zeros(4 * n + 8, dtype=np.int64)
    stack = np.zeros((4 * n + 8, 3), dtype=np.int64)
    a2 = d - 2
    if d == 2:
        for p in range(n):
            u[p] = q[0, p]
            w[p] = q[1, p]
        if _first_free_2d(u, w, n, m, anchors[0], anchors[1], res, mn, add, stack):
            out[0] = res[0]
            out[1] = res[1]
            return True
        return False
    # idx[t, :cnt[t]] are the points blocking the anchor prefix out[:t]
    idx = np.empty((d, n), dtype=np.int64)
    cnt = np.zeros(d, dtype=np.int64)
    for p in range(n):
        idx[0, p] = p
    cnt[0] = n
    cand = np.empty((d, n + 1), dtype=np.int64)
    ncand = np.zeros(d, dtype=np.int64)
    pos = np.zeros(d, dtype=np.int64)
    t = 0
    _build_candidates(q, idx, cnt[0], 0, anchors, cand, ncand)
    while True:
        if pos[t] >= ncand[t]:
            if t == 0:
                return False
            t -= 1
            pos[t] += 1
            continue
        v = cand[t, pos[t]]
        out[t] = v
        c = 0
        for r in range(cnt[t]):
            p = idx[t, r]
            if q[t, p] - m + 1 <= v and v <= q[t, p]:
                idx[t + 1, c] = p
                c += 1
        if c == 0:
            for s in range(t + 1, d):
                out[s] = 0
            return True
        if t + 1 == a2:
            for r in range(c):
                u[r] = q[a2, idx[a2, r]]
                w[r] = q[a2 + 1, idx[a2, r]]
            if _first_free_2d(u, w, c, m, anchors[a2], anchors[a2 + 1], res, mn, add, stack):
                out[a2] = res[0]
                out[a2 + 1] = res[1]
                return True
            pos[t] += 1
            continue
        t += 1
        cnt[t] = c
        _build_candidates(q, idx, c, t, anchors, cand, ncand)
        pos[t] = 0


@njit(cache=True, nogil=True)
def descend_last_axis(QQ, AA, EE, m, prefix, y_hi, y_lo, out, counters):
    """Try last-axis exponents ``y_hi, y_hi - 1, ..., y_lo`` after a fixed prefix.

    Returns the first exponent with a free anchor (anchor in ``out``) or -1.
    ``counters`` accumulates [tests, placements, max placements per grid,
    max grid cells].
    """
    d = QQ.shape[0]
    n = QQ.shape[2]
    q = np.empty((d, n), dtype=np.int64)
    anchors = np.empty(d, dtype=np.int64)
    pl_prefix = 1
    cells_prefix = 1
    for t in range(d - 1):
        q[t, :] = QQ[t, prefix[t], :]
        anchors[t] = AA[t, prefix[t]]
        pl_prefix *= max(anchors[t], 0)
        cells_prefix *= EE[t, prefix[t]]
    for y in range(y_hi, y_lo - 1, -1):
        q[d - 1, :] = QQ[d - 1, y, :]
        anchors[d - 1] = AA[d - 1, y]
        pl = pl_prefix * max(anchors[d - 1], 0)
        cells = cells_prefix * EE[d - 1, y]
        counters[0] += 1
        counters[1] += pl
        if pl > counters[2]:
            counters[2] = pl
        if cells > counters[3]:
            counters[3] = cells
        if first_free_anchor(q, anchors, m, out):
            return y
    return -1

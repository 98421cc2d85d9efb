"""Numba-compiled kernel implementations.

Each function mirrors its np_impl twin operation for operation so the two
backends emit bit-identical results; keep them in sync when editing either.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def _uniform(state):
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return state, (z >> np.uint64(11)) * 2.0**-53


@njit(cache=True)
def greedy_list(t, f, h):
    m = t.size
    tb = t.copy()
    ft = np.empty(m)
    for j in range(m):
        ft[j] = f[j] * tb[j]
    alive = np.ones(m, dtype=np.bool_)
    order = np.empty(h, dtype=np.int64)
    values = np.empty(h)
    total = 0.0
    for i in range(h):
        k = -1
        best = -np.inf
        for j in range(m):
            if alive[j] and ft[j] > best:
                best = ft[j]
                k = j
        inc = ft[k]
        total += inc
        order[i] = k
        values[i] = total
        alive[k] = False
        tk = tb[k]
        fk = f[k]
        for j in range(m):
            if alive[j]:
                if tb[j] <= tk:
                    tb[j] = tb[j] * (1.0 - fk)
                else:
                    tb[j] = tb[j] - inc
                ft[j] = f[j] * tb[j]
    return order, values


@njit(cache=True)
def _sift_down(keys, vals, start, end):
    # Max heap on (key desc, val asc).
    root = start
    while True:
        child = 2 * root + 1
        if child > end:
            break
        if child + 1 <= end and (
            keys[child + 1] > keys[child]
            or (keys[child + 1] == keys[child] and vals[child + 1] < vals[child])
        ):
            child += 1
        if keys[child] > keys[root] or (
            keys[child] == keys[root] and vals[child] < vals[root]
        ):
            keys[root], keys[child] = keys[child], keys[root]
            vals[root], vals[child] = vals[child], vals[root]
            root = child
        else:
            break


@njit(cache=True)
def greedy_heap(t, f, h):
    m = t.size
    tb = t.copy()
    alive = np.ones(m, dtype=np.bool_)
    order = np.empty(h, dtype=np.int64)
    values = np.empty(h)
    keys = np.empty(m)
    vals = np.empty(m, dtype=np.int64)
    total = 0.0
    for i in range(h):
        # rebuild the heap: every surviving key changed last iteration
        n = 0
        for j in range(m):
            if alive[j]:
                keys[n] = f[j] * tb[j]
                vals[n] = j
                n += 1
        for s in range(n // 2 - 1, -1, -1):
            _sift_down(keys, vals, s, n - 1)
        k = vals[0]
        inc = f[k] * tb[k]
        total += inc
        order[i] = k
        values[i] = total
        alive[k] = False
        tk = tb[k]
        fk = f[k]
        for j in range(m):
            if alive[j]:
                if tb[j] <= tk:
                    tb[j] = tb[j] * (1.0 - fk)
                else:
                    tb[j] = tb[j] - inc
    return order, values


@njit(cache=True)
def dp_fill(t, f, g, H):
    m = t.size
    prev = np.zeros(H + 1)
    cur = np.zeros(H + 1)
    take = np.zeros((m, H + 1), dtype=np.uint8)
    for j in range(m):
        gj = int(g[j])
        ft = f[j] * t[j]
        omf = 1.0 - f[j]
        for h in range(H + 1):
            keep = prev[h]
            if h >= gj:
                cand = omf * prev[h - gj] + ft
                if cand > keep:
                    cur[h] = cand
                    take[j, h] = 1
                    continue
            cur[h] = keep
            take[j, h] = 0
        prev, cur = cur, prev
    return prev.copy(), take


@njit(cache=True)
def fptas_fill(t, f, g, unit, nV):
    m = t.size
    prev = np.full(nV, np.inf)
    prev[0] = 0.0
    cur = np.empty(nV)
    nbytes = (nV + 7) // 8
    take_bits = np.zeros((m, nbytes), dtype=np.uint8)
    for j in range(m):
        fj = f[j]
        tj = t[j]
        gj = g[j]
        denom = (1.0 - fj) * unit
        for i in range(nV):
            v = unit * i
            old = prev[i]
            if tj >= v:
                if fj < 1.0:
                    delta = np.floor((fj * (tj - v)) / denom)
                    w = int(max(i - delta, 0.0))
                    cand = gj + prev[w]
                else:
                    cand = gj
                if cand < old:
                    cur[i] = cand
                    take_bits[j, i >> 3] |= np.uint8(1) << np.uint8(i & 7)
                    continue
            cur[i] = old
        prev, cur = cur, prev
    return prev.copy(), take_bits


@njit(cache=True)
def _mask_value(t, f, mask):
    v = 0.0
    reject = 1.0
    for j in range(t.size - 1, -1, -1):
        if mask[j]:
            v += f[j] * t[j] * reject
            reject *= 1.0 - f[j]
    return v


@njit(cache=True)
def sa_run(t, f, g, H, init_mask, n_iters, temp, cooling, seed):
    m = t.size
    state = np.uint64(seed)
    cur = init_mask.astype(np.uint8)
    cur_cost = 0.0
    for j in range(m):
        if cur[j]:
            cur_cost += g[j]
    cur_val = _mask_value(t, f, cur)
    best = cur.copy()
    best_val = cur_val
    cand = np.empty(m, dtype=np.uint8)
    pool = np.empty(m, dtype=np.int64)
    for _ in range(n_iters):
        cand[:] = cur
        cost = cur_cost
        n_out = 0
        for j in range(m):
            if not cand[j]:
                pool[n_out] = j
                n_out += 1
        while cost <= H and n_out > 0:
            state, u = _uniform(state)
            pick = int(u * n_out)
            j = pool[pick]
            cand[j] = 1
            cost += g[j]
            n_out -= 1
            pool[pick] = pool[n_out]
        n_orig = 0
        for j in range(m):
            if cur[j]:
                pool[n_orig] = j
                n_orig += 1
        err = 0
        while cost > H:
            if n_orig == 0:
                err = 1
                break
            state, u = _uniform(state)
            pick = int(u * n_orig)
            j = pool[pick]
            cand[j] = 0
            cost -= g[j]
            n_orig -= 1
            pool[pick] = pool[n_orig]
        if err:
            return best, best_val, 1
        cand_val = _mask_value(t, f, cand)
        delta = cand_val - cur_val
        if delta >= 0:
            accept = True
        else:
            state, u = _uniform(state)
            accept = temp > 0.0 and u < np.exp(delta / temp)
        if accept:
            cur[:] = cand
            cur_cost = cost
            cur_val = cand_val
            if cur_val > best_val:
                best_val = cur_val
                best[:] = cur
        temp *= cooling
    return best, best_val, 0

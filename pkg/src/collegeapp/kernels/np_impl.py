"""Pure-numpy kernel implementations.

Fallback path used when numba is unavailable or when the backend env flag
selects "numpy".  Each function here must produce bit-identical output to
its numba twin in nb_impl; the cross-backend tests enforce that.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

NAME = "numpy"

_M64 = (1 << 64) - 1


def _splitmix64(state: int):
    """One step of splitmix64; returns (new_state, uniform in [0, 1))."""
    state = (state + 0x9E3779B97F4A7C15) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    z = z ^ (z >> 31)
    return state, (z >> 11) * 2.0**-53


def greedy_list(t, f, h):
    """Greedy portfolio build with a plain array scan for the argmax."""
    m = t.size
    tb = t.copy()
    ft = f * tb
    alive = np.ones(m, dtype=bool)
    order = np.empty(h, dtype=np.int64)
    values = np.empty(h)
    total = 0.0
    for i in range(h):
        k = int(np.argmax(np.where(alive, ft, -np.inf)))
        inc = ft[k]
        total += inc
        order[i] = k
        values[i] = total
        alive[k] = False
        tk = tb[k]
        fk = f[k]
        low = tb <= tk
        tb = np.where(alive & low, tb * (1.0 - fk), np.where(alive, tb - inc, tb))
        ft = np.where(alive, f * tb, ft)
    return order, values


def greedy_heap(t, f, h):
    """Greedy portfolio build storing candidates in a max heap.

    The transformed utilities of every surviving candidate change each
    iteration, so the heap is drained and rebuilt from scratch before each
    extraction; identical output to greedy_list by construction.
    """
    m = t.size
    tb = t.copy()
    alive = np.ones(m, dtype=bool)
    order = np.empty(h, dtype=np.int64)
    values = np.empty(h)
    total = 0.0
    for i in range(h):
        heap = [(-(f[j] * tb[j]), j) for j in range(m) if alive[j]]
        heapq.heapify(heap)
        negft, k = heapq.heappop(heap)
        inc = f[k] * tb[k]
        total += inc
        order[i] = k
        values[i] = total
        alive[k] = False
        tk = tb[k]
        fk = f[k]
        low = tb <= tk
        tb = np.where(alive & low, tb * (1.0 - fk), np.where(alive, tb - inc, tb))
    return order, values


def dp_fill(t, f, g, H):
    """Budget-indexed Bellman table, two rolling rows.

    Returns the final value row (length H+1) and a uint8 take[j, h] matrix
    marking where including school j strictly beats skipping it.
    """
    m = t.size
    prev = np.zeros(H + 1)
    take = np.zeros((m, H + 1), dtype=np.uint8)
    for j in range(m):
        gj = int(g[j])
        ft = f[j] * t[j]
        omf = 1.0 - f[j]
        cur = prev.copy()
        cand = omf * prev[: H + 1 - gj] + ft
        better = cand > prev[gj:]
        cur[gj:] = np.where(better, cand, prev[gj:])
        take[j, gj:] = better
        prev = cur
    return prev, take


def fptas_delta(fj, tj, v, denom):
    """Scaled value decrement when school j joins a portfolio at value v."""
    return math.floor((fj * (tj - v)) / denom)


def fptas_fill(t, f, g, unit, nV):
    """Value-indexed min-cost table over the fixed-point value grid.

    Returns the final cost row and bit-packed take flags (little-endian
    within each byte), one packed row per school.
    """
    m = t.size
    vgrid = unit * np.arange(nV)
    idx = np.arange(nV)
    prev = np.full(nV, np.inf)
    prev[0] = 0.0
    nbytes = (nV + 7) // 8
    take_bits = np.zeros((m, nbytes), dtype=np.uint8)
    for j in range(m):
        ok = t[j] >= vgrid
        if f[j] < 1.0:
            denom = (1.0 - f[j]) * unit
            delta = np.floor((f[j] * (t[j] - vgrid)) / denom)
            w = np.maximum(idx - delta, 0.0).astype(np.int64)
            cand = g[j] + prev[np.where(ok, w, 0)]
        else:
            cand = np.full(nV, g[j])
        cand = np.where(ok, cand, np.inf)
        better = cand < prev
        take_bits[j] = np.packbits(better, bitorder="little")
        prev = np.where(better, cand, prev)
    return prev, take_bits


def _mask_value(t, f, mask):
    # Sequential descending accumulation; must mirror nb_impl exactly.
    v = 0.0
    reject = 1.0
    for j in range(t.size - 1, -1, -1):
        if mask[j]:
            v += f[j] * t[j] * reject
            reject *= 1.0 - f[j]
    return v


def sa_run(t, f, g, H, init_mask, n_iters, temp, cooling, seed):
    """Simulated-annealing walk over portfolios.

    Neighbors are produced by adding random outside schools until the budget
    breaks, then removing random original members until it is restored.
    Returns (best_mask, best_value, error_flag); error_flag is 1 only if
    feasibility could not be restored, which canonical markets never hit
    when the current portfolio outweighs the costliest addable school.
    """
    m = t.size
    state = int(seed) & _M64
    cur = init_mask.astype(np.uint8).copy()
    cur_cost = 0.0
    for j in range(m):
        if cur[j]:
            cur_cost += g[j]
    cur_val = float(_mask_value(t, f, cur))
    best = cur.copy()
    best_val = cur_val
    cand = np.empty(m, dtype=np.uint8)
    pool = np.empty(m, dtype=np.int64)
    for _ in range(n_iters):
        cand[:] = cur
        cost = cur_cost
        # add outside schools until infeasible (or none left)
        n_out = 0
        for j in range(m):
            if not cand[j]:
                pool[n_out] = j
                n_out += 1
        while cost <= H and n_out > 0:
            state, u = _splitmix64(state)
            pick = int(u * n_out)
            j = pool[pick]
            cand[j] = 1
            cost += g[j]
            n_out -= 1
            pool[pick] = pool[n_out]
        # remove original members until feasible again
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
            state, u = _splitmix64(state)
            pick = int(u * n_orig)
            j = pool[pick]
            cand[j] = 0
            cost -= g[j]
            n_orig -= 1
            pool[pick] = pool[n_orig]
        if err:
            return best, best_val, 1
        cand_val = float(_mask_value(t, f, cand))
        delta = cand_val - cur_val
        if delta >= 0:
            accept = True
        else:
            state, u = _splitmix64(state)
            accept = temp > 0.0 and u < math.exp(delta / temp)
        if accept:
            cur[:] = cand
            cur_cost = cost
            cur_val = cand_val
            if cur_val > best_val:
                best_val = cur_val
                best[:] = cur
        temp *= cooling
    return best, best_val, 0

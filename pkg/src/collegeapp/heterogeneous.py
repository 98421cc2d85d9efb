"""Solvers for markets with heterogeneous application fees.

Four routes to a portfolio under a cash budget: exact best-first branch and
bound (small m only), an exact dynamic program over integer expenditures,
a value-indexed approximation scheme with a hard (1 - eps) guarantee, and
a simulated-annealing heuristic.  All of them require canonical markets and
return a :class:`SolveReport`.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels.np_impl import fptas_delta
from .market import Market, MarketError, Portfolio, SolverRefusal, valuate

__all__ = [
    "SolveReport",
    "SaParams",
    "BnbNode",
    "FixedPointScale",
    "DpValueTable",
    "lp_upper_bound",
    "branch_and_bound",
    "dp_costs",
    "dp_value_table",
    "fptas",
    "simulated_annealing",
    "greedy_ratio_portfolio",
]

BNB_CAP = 35
DEFAULT_MEMORY_BUDGET = 1 << 30  # bytes of table storage a DP may allocate


@dataclass(frozen=True)
class SolveReport:
    """What a solver produced and how much trust it deserves.

    ``certificate`` is "exact", "bound" (value >= (1-epsilon) * optimum), or
    "heuristic" (no guarantee).  ``portfolio.value`` is always the exact
    re-valuation of the returned members, in the canonical (shifted) scale.
    """

    solver: str
    portfolio: Portfolio
    market: Market
    certificate: str
    wall_ms: float
    epsilon: float | None = None
    fixed_point_value: float | None = None
    scale: "FixedPointScale | None" = None
    nodes: int | None = None
    iterations: int | None = None
    incumbent_trace: tuple = ()

    @property
    def value(self) -> float:
        return self.portfolio.value

    @property
    def value_original_scale(self) -> float:
        return self.portfolio.value + self.market.shift

    @property
    def optimum_upper_bound(self) -> float | None:
        if self.certificate == "exact":
            return self.value
        if self.certificate == "bound":
            return self.value / (1.0 - self.epsilon)
        return None


@dataclass(frozen=True)
class SaParams:
    """Annealing schedule: start temperature, per-step cooling factor,
    iteration count, and the RNG seed that makes the run reproducible."""

    temperature: float = 0.25
    cooling: float = 1.0 / 16.0
    iterations: int = 500
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.temperature) and self.temperature >= 0):
            raise MarketError("temperature must be >= 0")
        if not (0 < self.cooling <= 1):
            raise MarketError("cooling factor must be in (0, 1]")
        if self.iterations < 0:
            raise MarketError("iteration count must be >= 0")


@dataclass(frozen=True)
class BnbNode:
    """Three-way school split: committed in, ruled out, still negotiable.

    ``tbar`` holds the negotiable schools' utilities after folding the
    committed ones out; ``offset`` is the folded-out constant, which equals
    the valuation of the committed set and is the node's lower bound.
    """

    in_set: tuple
    out_set: tuple
    negotiable: tuple
    tbar: np.ndarray
    offset: float
    residual: float
    upper: float

    @property
    def lower(self) -> float:
        return self.offset

    @property
    def is_leaf(self) -> bool:
        return not self.negotiable


def lp_upper_bound(tbar, f, g, budget, offset: float = 0.0) -> float:
    """Continuous-knapsack bound: fill by f*t/g ratio, split the last item.

    Relaxing both the integrality and the rejection discounting bounds any
    feasible portfolio's value on this branch from above.
    """
    tbar = np.asarray(tbar, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if tbar.size == 0:
        return offset
    ft = f * tbar
    order = np.argsort(-(ft / g), kind="stable")
    remaining = float(budget)
    total = 0.0
    for j in order:
        if g[j] <= remaining:
            total += ft[j]
            remaining -= g[j]
        else:
            total += ft[j] * remaining / g[j]
            break
    return offset + total


def _eliminate_within(tbar: np.ndarray, f: np.ndarray, pos: int):
    """Fold entry ``pos`` out of a working utility vector (same transform
    as market.eliminate, but on bare arrays)."""
    tk = tbar[pos]
    fk = f[pos]
    out = np.where(tbar <= tk, (1.0 - fk) * tbar, tbar - fk * tk)
    return np.delete(out, pos), float(fk * tk)


def branch_and_bound(market: Market, cap: int = BNB_CAP) -> SolveReport:
    """Best-first branch and bound, exact but exponential.

    Branches on the negotiable school with the best f*t/g ratio; the
    include child re-discounts the survivors, the exclude child just drops
    the school.  Nodes whose LP bound cannot beat the incumbent are
    fathomed.  Refuses markets beyond ``cap`` schools: use dp_costs (integer
    fees) or fptas instead.
    """
    market.require_canonical()
    m = market.size
    if m > cap:
        raise SolverRefusal(
            f"branch and bound refuses m={m} > cap={cap}; use dp_costs or fptas"
        )
    start = time.perf_counter()
    f_all, g_all = market.admit_prob, market.cost

    root_neg = tuple(range(m))
    root = BnbNode(
        in_set=(),
        out_set=(),
        negotiable=root_neg,
        tbar=market.utility.copy(),
        offset=0.0,
        residual=float(market.budget),
        upper=lp_upper_bound(market.utility, f_all, g_all, market.budget),
    )
    best_value = 0.0
    best_set: tuple = ()
    trace = [(1, 0.0)]
    generated = 1
    counter = 0
    # max-heap on upper bound, then lower bound, then FIFO
    frontier = [(-root.upper, -root.lower, counter, root)]

    while frontier:
        _, _, _, node = heapq.heappop(frontier)
        if node.upper <= best_value:
            continue  # fathomed after insertion
        neg = np.fromiter(node.negotiable, dtype=np.int64, count=len(node.negotiable))
        affordable = neg[g_all[neg] <= node.residual]
        children = []
        if affordable.size == 0:
            # nothing else fits: the committed set is this branch's optimum
            children.append(
                BnbNode(
                    in_set=node.in_set,
                    out_set=node.out_set + node.negotiable,
                    negotiable=(),
                    tbar=np.empty(0),
                    offset=node.offset,
                    residual=node.residual,
                    upper=node.offset,
                )
            )
        else:
            ratios = f_all[affordable] * node.tbar[np.searchsorted(neg, affordable)] / g_all[affordable]
            jstar = int(affordable[int(np.argmax(ratios))])
            pos = int(np.searchsorted(neg, jstar))
            child_neg = node.negotiable[:pos] + node.negotiable[pos + 1 :]
            tbar_in, gain = _eliminate_within(node.tbar, f_all[neg], pos)
            residual_in = node.residual - float(g_all[jstar])
            offset_in = node.offset + gain
            neg_in = np.fromiter(child_neg, dtype=np.int64, count=len(child_neg))
            children.append(
                BnbNode(
                    in_set=node.in_set + (jstar,),
                    out_set=node.out_set,
                    negotiable=child_neg,
                    tbar=tbar_in,
                    offset=offset_in,
                    residual=residual_in,
                    upper=lp_upper_bound(tbar_in, f_all[neg_in], g_all[neg_in], residual_in, offset_in),
                )
            )
            tbar_out = np.delete(node.tbar, pos)
            children.append(
                BnbNode(
                    in_set=node.in_set,
                    out_set=node.out_set + (jstar,),
                    negotiable=child_neg,
                    tbar=tbar_out,
                    offset=node.offset,
                    residual=node.residual,
                    upper=lp_upper_bound(tbar_out, f_all[neg_in], g_all[neg_in], node.residual, node.offset),
                )
            )
        for child in children:
            generated += 1
            if child.lower > best_value:
                best_value = child.lower
                best_set = child.in_set
                trace.append((generated, best_value))
            if not child.is_leaf and child.upper > best_value:
                counter += 1
                heapq.heappush(frontier, (-child.upper, -child.lower, counter, child))

    members = frozenset(best_set)
    value = valuate(market, members)
    return SolveReport(
        solver="branch_and_bound",
        portfolio=Portfolio(members=members, value=value),
        market=market,
        certificate="exact",
        wall_ms=(time.perf_counter() - start) * 1e3,
        nodes=generated,
        incumbent_trace=tuple(trace),
    )


def _integer_costs(market: Market):
    g = market.cost
    if not (np.all(g == np.round(g)) and float(market.budget).is_integer()):
        raise MarketError(
            "dp_costs needs integer costs and budget; use fptas for fractional fees"
        )
    return g.astype(np.int64), int(market.budget)


def dp_costs(
    market: Market,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    backend: str | None = None,
) -> SolveReport:
    """Exact DP over integer expenditures, O(H*m) time and table space.

    Bellman step: at budget h, school j either stays out, or joins and
    discounts the best portfolio over the cheaper prefix by its rejection
    probability.  Membership backtracks where including strictly won.
    """
    market.require_canonical()
    g, H = _integer_costs(market)
    m = market.size
    est_bytes = m * (H + 1) + 3 * (H + 1) * 8
    if est_bytes > memory_budget:
        raise SolverRefusal(
            f"dp_costs table would need ~{est_bytes} bytes (> {memory_budget}); "
            "raise memory_budget or use fptas"
        )
    start = time.perf_counter()
    k = kernels.active(backend)
    final_row, take = k.dp_fill(market.utility, market.admit_prob, g, H)
    members = []
    h = H
    for j in range(m - 1, -1, -1):
        if take[j, h]:
            members.append(j)
            h -= int(g[j])
    members = frozenset(members)
    value = valuate(market, members)
    return SolveReport(
        solver="dp_costs",
        portfolio=Portfolio(members=members, value=value),
        market=market,
        certificate="exact",
        wall_ms=(time.perf_counter() - start) * 1e3,
    )


@dataclass(frozen=True)
class DpValueTable:
    """Full (m+1) x (H+1) value table for inspection; h < 0 is infeasible.

    Reference construction in plain numpy, independent of the kernels; the
    kernel path must reproduce row m exactly.
    """

    values: np.ndarray
    costs: np.ndarray

    def value(self, j: int, h: int) -> float | None:
        """Optimal value over the first j schools at budget h; None marks
        the infeasible h < 0 region."""
        if h < 0:
            return None
        return float(self.values[j, h])


def dp_value_table(market: Market) -> DpValueTable:
    market.require_canonical()
    g, H = _integer_costs(market)
    m = market.size
    V = np.zeros((m + 1, H + 1))
    for j in range(1, m + 1):
        gj = int(g[j - 1])
        ft = market.admit_prob[j - 1] * market.utility[j - 1]
        omf = 1.0 - market.admit_prob[j - 1]
        V[j] = V[j - 1]
        take = omf * V[j - 1, : H + 1 - gj] + ft
        V[j, gj:] = np.maximum(V[j - 1, gj:], take)
    return DpValueTable(values=V, costs=g)


@dataclass(frozen=True)
class FixedPointScale:
    """Binary fixed-point grid the approximation scheme works on.

    ``unit`` = 2**-precision is at most eps * upper_bound / m**2, the only
    property the accuracy guarantee needs; values are stored as integer
    multiples of ``unit`` up to ``grid_size - 1``.
    """

    precision: int
    unit: float
    upper_bound: float
    grid_size: int

    @staticmethod
    def build(market: Market, epsilon: float, memory_budget: int) -> "FixedPointScale":
        m = market.size
        ubar = float(np.sum(market.admit_prob * market.utility))
        if ubar <= 0:
            return FixedPointScale(precision=0, unit=1.0, upper_bound=0.0, grid_size=1)
        precision = max(0, math.ceil(math.log2(m * m / (epsilon * ubar))))
        unit = 2.0**-precision
        grid_max = math.floor(ubar / unit)
        if grid_max >= 1 << 62:
            eps_floor = m * m * 2.0 ** (math.log2(ubar) - 62)
            raise SolverRefusal(
                f"fixed-point scale overflows a 64-bit integer; epsilon must be >= {eps_floor:.3g}"
            )
        n_grid = grid_max + 1
        est_bytes = m * ((n_grid + 7) // 8) + 2 * n_grid * 8
        if est_bytes > memory_budget:
            # coarsest precision whose table fits, mapped back to an epsilon
            eps_floor = epsilon * est_bytes / memory_budget
            raise SolverRefusal(
                f"fptas table would need ~{est_bytes} bytes (> {memory_budget}); "
                f"epsilon of roughly {eps_floor:.3g} or larger would fit"
            )
        return FixedPointScale(precision=precision, unit=unit, upper_bound=ubar, grid_size=n_grid)


def fptas(
    market: Market,
    epsilon: float,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    backend: str | None = None,
) -> SolveReport:
    """(1 - epsilon)-optimal portfolio via a value-indexed DP.

    Tabulates the cheapest portfolio reaching each grid value using only a
    school prefix; rounding the value decrement down at every join keeps the
    grid value an underestimate of the true valuation, so the best grid
    value affordable within budget certifies the guarantee.
    """
    market.require_canonical()
    if not (0 < epsilon < 1):
        raise MarketError("epsilon must be in (0, 1)")
    start = time.perf_counter()
    scale = FixedPointScale.build(market, epsilon, memory_budget)
    m = market.size
    if scale.upper_bound == 0.0:
        return SolveReport(
            solver="fptas",
            portfolio=Portfolio(members=frozenset(), value=0.0),
            market=market,
            certificate="bound",
            epsilon=epsilon,
            fixed_point_value=0.0,
            scale=scale,
            wall_ms=(time.perf_counter() - start) * 1e3,
        )
    k = kernels.active(backend)
    cost_row, take_bits = k.fptas_fill(
        market.utility, market.admit_prob, market.cost, scale.unit, scale.grid_size
    )
    feasible = np.flatnonzero(cost_row <= market.budget)
    v = int(feasible[-1])
    achieved = v * scale.unit
    members = []
    f, t = market.admit_prob, market.utility
    for j in range(m - 1, -1, -1):
        if (take_bits[j, v >> 3] >> (v & 7)) & 1:
            members.append(j)
            if f[j] < 1.0:
                delta = fptas_delta(f[j], t[j], scale.unit * v, (1.0 - f[j]) * scale.unit)
                v = max(v - delta, 0)
            else:
                v = 0
    members = frozenset(members)
    value = valuate(market, members)
    return SolveReport(
        solver="fptas",
        portfolio=Portfolio(members=members, value=value),
        market=market,
        certificate="bound",
        epsilon=epsilon,
        fixed_point_value=achieved,
        scale=scale,
        wall_ms=(time.perf_counter() - start) * 1e3,
    )


def greedy_ratio_portfolio(market: Market) -> frozenset:
    """Schools added by descending f*t/g as long as they fit the budget.

    Cheap starting point for the annealer; can be arbitrarily far from
    optimal on adversarial fee structures.
    """
    market.require_canonical()
    ratio = market.admit_prob * market.utility / market.cost
    members = []
    remaining = float(market.budget)
    for j in np.argsort(-ratio, kind="stable"):
        if market.cost[j] <= remaining:
            members.append(int(j))
            remaining -= float(market.cost[j])
    return frozenset(members)


def simulated_annealing(
    market: Market, params: SaParams, backend: str | None = None
) -> SolveReport:
    """Seeded annealing walk; returns the best portfolio it visited.

    Neighbor moves add random outside schools until the budget breaks, then
    shed random original members until it holds again.  Worsening moves pass
    with probability exp(delta / T); T decays geometrically.  Deterministic
    given (market, params).
    """
    market.require_canonical()
    start = time.perf_counter()
    init = greedy_ratio_portfolio(market)
    init_mask = np.zeros(market.size, dtype=np.uint8)
    for j in init:
        init_mask[j] = 1
    k = kernels.active(backend)
    best_mask, _, err = k.sa_run(
        market.utility,
        market.admit_prob,
        market.cost,
        float(market.budget),
        init_mask,
        int(params.iterations),
        float(params.temperature),
        float(params.cooling),
        np.uint64(params.seed & ((1 << 64) - 1)),
    )
    if err:
        raise RuntimeError(
            "annealer could not restore feasibility by shedding original members"
        )
    members = frozenset(int(j) for j in np.flatnonzero(best_mask))
    value = valuate(market, members)
    return SolveReport(
        solver="simulated_annealing",
        portfolio=Portfolio(members=members, value=value),
        market=market,
        certificate="heuristic",
        iterations=int(params.iterations),
        wall_ms=(time.perf_counter() - start) * 1e3,
    )

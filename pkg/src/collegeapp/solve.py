"""One front door for solving: algorithm dispatch, what-if queries, and the
JSON report shapes shared by the CLI and the HTTP service."""

from __future__ import annotations

import math
import time

import numpy as np

from .heterogeneous import (
    SaParams,
    SolveReport,
    branch_and_bound,
    dp_costs,
    fptas,
    simulated_annealing,
)
from .homogeneous import greedy_optimal
from .instances import RawMarket
from .market import (
    Market,
    MarketError,
    Portfolio,
    SolverRefusal,
    TrivialInstance,
    attendance_probs,
    eliminate,
)

ALGORITHMS = ("auto", "greedy", "bnb", "dp", "fptas", "sa")
DEFAULT_EPSILON = 0.05


def has_integer_costs(market: Market) -> bool:
    return bool(np.all(market.cost == np.round(market.cost))) and float(
        market.budget
    ).is_integer()


def auto_algorithm(market: Market) -> str:
    """Unit fees get the exact greedy, integer fees the exact DP, anything
    else the approximation scheme."""
    if market.unit_costs:
        return "greedy"
    if has_integer_costs(market):
        return "dp"
    return "fptas"


def _empty_report(raw: RawMarket, solver: str) -> SolveReport:
    market = Market(
        utility=np.empty(0),
        admit_prob=np.empty(0),
        cost=np.empty(0),
        budget=raw.budget,
        outside_utility=0.0,
        shift=raw.t0,
    )
    return SolveReport(
        solver=solver,
        portfolio=Portfolio(members=frozenset(), value=0.0),
        market=market,
        certificate="exact",
        wall_ms=0.0,
    )


def solve_market(
    market: Market,
    algorithm: str = "auto",
    *,
    h: int | None = None,
    epsilon: float = DEFAULT_EPSILON,
    sa_params: SaParams | None = None,
    backend: str | None = None,
) -> SolveReport:
    """Dispatch to a solver, refusing algorithm/instance mismatches early."""
    market.require_canonical()
    if algorithm not in ALGORITHMS:
        raise MarketError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    if algorithm == "auto":
        algorithm = auto_algorithm(market)

    if algorithm == "greedy":
        if not market.unit_costs:
            raise SolverRefusal(
                "greedy requires unit application costs; use bnb, dp, fptas, or sa"
            )
        if h is None:
            h = min(market.size, int(math.floor(market.budget)))
        start = time.perf_counter()
        front = greedy_optimal(market, h, backend=backend)
        wall = (time.perf_counter() - start) * 1e3
        return SolveReport(
            solver="greedy",
            portfolio=front.portfolio(h),
            market=market,
            certificate="exact",
            wall_ms=wall,
        )
    if algorithm == "bnb":
        return branch_and_bound(market)
    if algorithm == "dp":
        if not has_integer_costs(market):
            raise SolverRefusal(
                "dp requires integer costs and budget; use fptas instead"
            )
        return dp_costs(market, backend=backend)
    if algorithm == "fptas":
        return fptas(market, epsilon, backend=backend)
    return simulated_annealing(market, sa_params or SaParams(), backend=backend)


def solve_document(
    doc,
    algorithm: str = "auto",
    *,
    h: int | None = None,
    epsilon: float = DEFAULT_EPSILON,
    sa_params: SaParams | None = None,
    backend: str | None = None,
) -> SolveReport:
    """Solve a market given as a RawMarket; trivial instances (nothing worth
    applying to) come back as the empty portfolio rather than an error."""
    raw = doc if isinstance(doc, RawMarket) else None
    if raw is None:
        from .instances import market_from_document

        raw = market_from_document(doc)
    try:
        market = raw.to_market()
    except TrivialInstance:
        return _empty_report(raw, algorithm)
    return solve_market(
        market, algorithm, h=h, epsilon=epsilon, sa_params=sa_params, backend=backend
    )


class WhatIfError(MarketError):
    """Invalid lock sets in a what-if query."""

    def __init__(self, message: str, code: str):
        super().__init__(message)
        self.code = code


class WhatIfResult:
    """Outcome of a what-if query: the residual solve plus the bookkeeping
    needed to report the combined strategy on the original market."""

    def __init__(self, raw, locked_in, locked_out, residual_budget, offset, report):
        self.raw = raw
        self.locked_in = tuple(locked_in)
        self.locked_out = tuple(locked_out)
        self.residual_budget = residual_budget
        self.offset = offset
        self.residual_report = report

    @property
    def residual_sources(self) -> tuple:
        market = self.residual_report.market
        return tuple(
            market.source_index[j] for j in sorted(self.residual_report.portfolio.members)
        )

    @property
    def combined_sources(self) -> tuple:
        return tuple(sorted(set(self.locked_in) | set(self.residual_sources)))

    @property
    def total_value_canonical(self) -> float:
        return self.residual_report.portfolio.value + self.offset

    @property
    def total_value(self) -> float:
        return self.total_value_canonical + self.raw.t0

    def document(self) -> dict:
        rep = self.residual_report
        doc = {
            "solver": rep.solver,
            "certificate": rep.certificate,
            "members": list(self.combined_sources),
            "locked_in": list(self.locked_in),
            "locked_out": list(self.locked_out),
            "residual_budget": self.residual_budget,
            "schools": [
                {"index": j, "label": self.raw.schools[j].label}
                for j in self.combined_sources
            ],
            "value": self.total_value,
            "canonical_value": self.total_value_canonical,
            "wall_ms": rep.wall_ms,
        }
        if rep.epsilon is not None:
            doc["epsilon"] = rep.epsilon
        if rep.nodes is not None:
            doc["nodes"] = rep.nodes
        if rep.iterations is not None:
            doc["iterations"] = rep.iterations
        doc["attendance"] = self._attendance()
        return doc

    def _attendance(self) -> list:
        try:
            full = self.raw.to_market()
        except TrivialInstance:
            full = None
        rows = []
        outside = 1.0
        if full is not None:
            present = {src: k for k, src in enumerate(full.source_index)}
            members = [present[s] for s in self.combined_sources if s in present]
            probs = attendance_probs(full, members)
            outside = probs.outside
            by_source = {full.source_index[k]: probs.of_school(k) for k in members}
        else:
            by_source = {}
        rows.append({"index": None, "probability": outside})
        for s in self.combined_sources:
            rows.append({"index": s, "probability": by_source.get(s, 0.0)})
        return rows


def what_if(
    raw: RawMarket,
    locked_in,
    locked_out,
    algorithm: str = "auto",
    *,
    epsilon: float = DEFAULT_EPSILON,
    sa_params: SaParams | None = None,
    backend: str | None = None,
) -> WhatIfResult:
    """Best completion of a partially committed application strategy.

    ``locked_in`` / ``locked_out`` are positions in the submitted school
    array.  Committed schools are paid for up front and folded out of the
    valuation one at a time (lowest utility first); the residual market is
    then solved normally, and the folded-out constants restore the combined
    portfolio's exact value.
    """
    n = len(raw.schools)
    locked_in = sorted(set(int(j) for j in locked_in))
    locked_out = sorted(set(int(j) for j in locked_out))
    for j in locked_in + locked_out:
        if not 0 <= j < n:
            raise WhatIfError(f"school index {j} out of range 0..{n - 1}", "index_range")
    if set(locked_in) & set(locked_out):
        raise WhatIfError("locked_in and locked_out overlap", "lock_overlap")

    lock_cost = sum(raw.schools[j].g for j in locked_in)
    if lock_cost > raw.budget:
        raise WhatIfError(
            f"locked-in schools cost {lock_cost}, over budget {raw.budget}",
            "locked_in_infeasible",
        )
    residual_budget = raw.budget - lock_cost

    # Only schools that are admissible and beat the outside option can affect
    # valuations; locked-in ones outside that set just burn budget, free ones
    # can never be worth applying to.
    def viable(s):
        return s.f > 0 and s.t > raw.t0

    effective = [j for j in locked_in if viable(raw.schools[j])]
    locked = set(locked_in) | set(locked_out)
    rest = [j for j, s in enumerate(raw.schools) if j not in locked and viable(s)]
    order = sorted(effective + rest, key=lambda j: (raw.schools[j].t, j))
    work = None
    if order:
        work = Market(
            utility=np.array([raw.schools[j].t - raw.t0 for j in order]),
            admit_prob=np.array([raw.schools[j].f for j in order]),
            cost=np.array([raw.schools[j].g for j in order]),
            budget=raw.budget,
            outside_utility=0.0,
            shift=raw.t0,
            labels=tuple(raw.schools[j].label for j in order),
            source_index=tuple(order),
        )

    offset = 0.0
    if work is not None:
        for src in sorted(effective, key=lambda j: (raw.schools[j].t, j)):
            k = work.source_index.index(src)
            result = eliminate(work, k)
            offset += result.offset
            work = result.reduced

    report = None
    if work is not None and residual_budget > 0:
        try:
            residual = canonical_submarket(work, residual_budget)
            report = solve_market(
                residual,
                algorithm,
                epsilon=epsilon,
                sa_params=sa_params,
                backend=backend,
            )
        except TrivialInstance:
            report = None
    if report is None:
        report = _empty_report(
            RawMarket(t0=raw.t0, budget=raw.budget, schools=()), algorithm
        )
    return WhatIfResult(raw, locked_in, locked_out, residual_budget, offset, report)


def canonical_submarket(market: Market, budget: float) -> Market:
    """Re-filter an already shifted market against a new budget."""
    if budget <= 0:
        raise TrivialInstance("no budget left")
    keep = [
        j
        for j in range(market.size)
        if market.utility[j] > 0 and market.cost[j] <= budget
    ]
    if not keep:
        raise TrivialInstance("nothing affordable improves on the outside option")
    return Market(
        utility=market.utility[keep],
        admit_prob=market.admit_prob[keep],
        cost=market.cost[keep],
        budget=float(budget),
        outside_utility=0.0,
        shift=market.shift,
        labels=tuple(market.labels[j] for j in keep),
        source_index=tuple(market.source_index[j] for j in keep),
    )


# ---------------------------------------------------------------------------
# JSON report shapes


def report_document(report: SolveReport) -> dict:
    """Serialize a solve report; school indices are positions in the
    caller's submitted school array."""
    market = report.market
    members = sorted(report.portfolio.members)
    sources = sorted(market.source_index[j] for j in members)
    doc = {
        "solver": report.solver,
        "certificate": report.certificate,
        "members": sources,
        "schools": [
            {"index": market.source_index[j], "label": market.labels[j]} for j in members
        ],
        "value": report.value_original_scale,
        "canonical_value": report.value,
        "optimum_upper_bound": report.optimum_upper_bound,
        "wall_ms": report.wall_ms,
    }
    if report.epsilon is not None:
        doc["epsilon"] = report.epsilon
    if report.fixed_point_value is not None:
        doc["fixed_point_value"] = report.fixed_point_value
    if report.nodes is not None:
        doc["nodes"] = report.nodes
    if report.iterations is not None:
        doc["iterations"] = report.iterations
    probs = attendance_probs(market, members)
    attendance = [{"index": None, "probability": probs.outside}]
    for j in members:
        attendance.append(
            {"index": market.source_index[j], "probability": probs.of_school(j)}
        )
    doc["attendance"] = attendance
    return doc


def frontier_document(front) -> dict:
    market = front.market
    entries = []
    for pos, j in enumerate(front.order):
        entries.append(
            {
                "h": pos + 1,
                "index": market.source_index[j],
                "label": market.labels[j],
                "value": front.values[pos] + market.shift,
            }
        )
    return {"entries": entries, "t0": market.shift, "budget": market.budget}

"""Admissions markets and portfolio valuation.

A market is a list of schools, each carrying a utility, an admission
probability, and an application cost, plus a total application budget and
an outside-option utility for attending no school.  A portfolio is a subset
of schools; its valuation is the expected utility of the best admission
outcome, counting the outside option.

Most callers should build markets through :func:`canonicalize`, which
removes dominated schools, sorts by utility, and shifts the outside option
to zero.  All solvers in this package require canonical markets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Market",
    "Portfolio",
    "AttendanceDistribution",
    "EliminationResult",
    "MarketError",
    "TrivialInstance",
    "SolverRefusal",
    "canonicalize",
    "attendance_probs",
    "valuate",
    "valuate_with_utilities",
    "valuate_variance_penalized",
    "eliminate",
    "brute_force",
]

BRUTE_FORCE_CAP = 20


class MarketError(ValueError):
    """Invalid market data or invalid indices into a market."""


class SolverRefusal(RuntimeError):
    """A solver declined to run because an instance exceeds its cap."""


class TrivialInstance(Exception):
    """No school survived preprocessing; the empty portfolio is optimal."""


@dataclass(frozen=True)
class Market:
    """An admissions market, sorted ascending by utility.

    ``utility``, ``admit_prob``, and ``cost`` are parallel read-only arrays.
    ``outside_utility`` is the utility of attending no school (zero for
    canonical markets).  ``shift`` records how much was subtracted from all
    utilities during canonicalization so that reported valuations can be
    restored to the caller's original scale.  ``source_index`` maps each
    school back to its position in the input that produced this market.
    """

    utility: np.ndarray
    admit_prob: np.ndarray
    cost: np.ndarray
    budget: float
    outside_utility: float = 0.0
    shift: float = 0.0
    labels: tuple = ()
    source_index: tuple = ()

    def __post_init__(self):
        t = np.asarray(self.utility, dtype=np.float64)
        f = np.asarray(self.admit_prob, dtype=np.float64)
        g = np.asarray(self.cost, dtype=np.float64)
        if not (t.ndim == f.ndim == g.ndim == 1 and t.size == f.size == g.size):
            raise MarketError("utility, admit_prob, and cost must be 1-d and equal length")
        for name, arr in (("utility", t), ("admit_prob", f), ("cost", g)):
            if not np.all(np.isfinite(arr)):
                raise MarketError(f"non-finite {name} value")
        if not np.isfinite(self.budget) or self.budget <= 0:
            raise MarketError("budget must be positive and finite")
        if np.any((f <= 0) | (f > 1)):
            raise MarketError("admission probabilities must lie in (0, 1]")
        if np.any(g <= 0):
            raise MarketError("costs must be positive")
        if np.any(t[:-1] > t[1:]):
            raise MarketError("schools must be sorted ascending by utility")
        for arr in (t, f, g):
            arr.setflags(write=False)
        object.__setattr__(self, "utility", t)
        object.__setattr__(self, "admit_prob", f)
        object.__setattr__(self, "cost", g)
        if not self.labels:
            object.__setattr__(self, "labels", (None,) * t.size)
        if not self.source_index and t.size:
            object.__setattr__(self, "source_index", tuple(range(t.size)))

    @property
    def size(self) -> int:
        return self.utility.size

    @property
    def is_canonical(self) -> bool:
        return self.outside_utility == 0.0

    @property
    def unit_costs(self) -> bool:
        return bool(np.all(self.cost == 1.0))

    def require_canonical(self) -> None:
        if not self.is_canonical:
            raise MarketError("market must be canonicalized first")

    def check_members(self, members: Iterable[int]) -> np.ndarray:
        """Validate and return members as a sorted, duplicate-free index array."""
        idx = np.unique(np.fromiter(members, dtype=np.int64, count=-1))
        if idx.size and (idx[0] < 0 or idx[-1] >= self.size):
            raise MarketError(f"school index out of range 0..{self.size - 1}")
        return idx

    def label_of(self, j: int) -> str:
        lab = self.labels[j]
        return lab if lab is not None else f"school {self.source_index[j] + 1}"


@dataclass(frozen=True)
class Portfolio:
    """A set of school indices into a market, with its cached valuation."""

    members: frozenset
    value: float

    def sorted_members(self) -> tuple:
        return tuple(sorted(self.members))


@dataclass(frozen=True)
class AttendanceDistribution:
    """Probability of ending up at each school; slot 0 is the outside option."""

    probs: np.ndarray

    def __post_init__(self):
        self.probs.setflags(write=False)

    @property
    def outside(self) -> float:
        return float(self.probs[0])

    def of_school(self, j: int) -> float:
        return float(self.probs[j + 1])


@dataclass(frozen=True)
class EliminationResult:
    """Market with one school committed and folded out of the decision.

    For every portfolio X over the remaining schools,
    ``valuate(reduced, X) + offset == valuate(original, X + {k})``.
    """

    reduced: Market
    offset: float
    eliminated: int


def canonicalize(
    market: Market | None = None,
    *,
    t0: float | None = None,
    schools: Sequence[tuple] | None = None,
    budget: float | None = None,
) -> Market:
    """Preprocess a market into the canonical form the solvers require.

    Removes schools that can never help (zero admission probability, utility
    at or below the outside option, cost above the budget), sorts ascending
    by utility with input order breaking ties, and shifts utilities so the
    outside option is zero.  The applied shift is recorded on the result.

    Accepts either an existing :class:`Market` or raw ``t0`` / ``schools`` /
    ``budget`` data, where each school is ``(label, t, f, g)``.

    Raises :class:`TrivialInstance` if no school survives, and
    :class:`MarketError` for invalid data.
    """
    if market is not None:
        t0 = market.outside_utility
        budget = float(market.budget)
        schools = [
            (market.labels[j], market.utility[j], market.admit_prob[j], market.cost[j])
            for j in range(market.size)
        ]
        sources = market.source_index
    else:
        if t0 is None or schools is None or budget is None:
            raise MarketError("canonicalize needs a market or t0, schools, and budget")
        sources = tuple(range(len(schools)))
    if not np.isfinite(budget) or budget <= 0:
        raise MarketError("budget must be positive and finite")
    if not np.isfinite(t0):
        raise MarketError("outside-option utility must be finite")

    rows = []
    for src, (label, t, f, g) in zip(sources, schools):
        t, f, g = float(t), float(f), float(g)
        for name, x in (("t", t), ("f", f), ("g", g)):
            if not np.isfinite(x):
                raise MarketError(f"non-finite {name} for school at input position {src}")
        if f < 0 or f > 1:
            raise MarketError(f"admission probability out of [0, 1] at input position {src}")
        if g <= 0:
            raise MarketError(f"nonpositive cost at input position {src}")
        if f == 0 or t <= t0 or g > budget:
            continue
        rows.append((t, src, label, f, g))
    if not rows:
        raise TrivialInstance("no school can improve on the outside option within budget")

    rows.sort(key=lambda r: (r[0], r[1]))
    t = np.array([r[0] for r in rows]) - t0
    return Market(
        utility=t,
        admit_prob=np.array([r[3] for r in rows]),
        cost=np.array([r[4] for r in rows]),
        budget=float(budget),
        outside_utility=0.0,
        shift=float(t0),
        labels=tuple(r[2] for r in rows),
        source_index=tuple(r[1] for r in rows),
    )


def attendance_probs(market: Market, members: Iterable[int]) -> AttendanceDistribution:
    """Probability of attending each school under portfolio ``members``.

    The student attends school j iff she applies, is admitted, and is
    rejected from every portfolio school she prefers (higher index).  Slot 0
    of the result is the probability of falling back to the outside option.
    """
    idx = market.check_members(members)
    p = np.zeros(market.size + 1)
    rejected_above = 1.0
    for j in idx[::-1]:
        p[j + 1] = market.admit_prob[j] * rejected_above
        rejected_above *= 1.0 - market.admit_prob[j]
    p[0] = rejected_above
    return AttendanceDistribution(p)


def valuate(market: Market, members: Iterable[int]) -> float:
    """Expected utility of the best admission outcome of ``members``."""
    idx = market.check_members(members)
    return _value_sorted(
        market.utility, market.admit_prob, idx, market.outside_utility
    )


def valuate_with_utilities(
    market: Market, members: Iterable[int], utility: np.ndarray, u0: float = 0.0
) -> float:
    """Valuate ``members`` with substitute utilities but the market's own
    preference order and admission probabilities."""
    idx = market.check_members(members)
    return _value_sorted(np.asarray(utility, dtype=np.float64), market.admit_prob, idx, u0)


def _value_sorted(t, f, idx, t0):
    v = 0.0
    reject = 1.0
    for j in idx[::-1]:
        v += f[j] * t[j] * reject
        reject *= 1.0 - f[j]
    return v + t0 * reject


def valuate_variance_penalized(market: Market, members: Iterable[int], beta: float) -> float:
    """Mean-minus-variance valuation: E[outcome] - beta * Var(outcome).

    Expands to a plain valuation under utilities t - beta*t^2 plus
    beta times the squared plain valuation.
    """
    market.require_canonical()
    if beta < 0:
        raise MarketError("variance penalty must be nonnegative")
    v = valuate(market, members)
    tau = market.utility - beta * market.utility**2
    return valuate_with_utilities(market, members, tau) + beta * v * v


def eliminate(market: Market, k: int) -> EliminationResult:
    """Commit to school ``k`` and fold it out of the market.

    The remaining utilities are discounted by how much ``k`` already
    covers: schools no better than ``k`` keep their utility only when ``k``
    rejects, while better schools lose the expected utility ``k`` provides.
    The constant ``f_k * t_k`` moves into the returned offset.
    """
    market.require_canonical()
    if not 0 <= k < market.size:
        raise MarketError(f"school index {k} out of range 0..{market.size - 1}")
    t, f = market.utility, market.admit_prob
    tk, fk = t[k], f[k]
    tbar = np.where(t <= tk, (1.0 - fk) * t, t - fk * tk)
    keep = np.arange(market.size) != k
    reduced = Market(
        utility=tbar[keep],
        admit_prob=f[keep],
        cost=market.cost[keep],
        budget=market.budget,
        outside_utility=0.0,
        shift=market.shift,
        labels=tuple(market.labels[j] for j in range(market.size) if j != k),
        source_index=tuple(market.source_index[j] for j in range(market.size) if j != k),
    )
    return EliminationResult(reduced=reduced, offset=float(fk * tk), eliminated=k)


def brute_force(
    market: Market,
    *,
    cap: int = BRUTE_FORCE_CAP,
    require: Iterable[int] = (),
    forbid: Iterable[int] = (),
) -> Portfolio:
    """Exhaustively enumerate feasible portfolios and return a best one.

    Test oracle: evaluates every subset directly from the defining sum, with
    no shared code with the solvers.  Ties break toward the lexicographically
    smallest member tuple.  ``require`` / ``forbid`` restrict the search to
    portfolios containing / avoiding the given schools.
    """
    market.require_canonical()
    m = market.size
    if m > cap:
        raise SolverRefusal(
            f"brute force refuses m={m} > cap={cap}; raise cap explicitly if intended"
        )
    req = market.check_members(require)
    ban = market.check_members(forbid)
    if np.intersect1d(req, ban).size:
        raise MarketError("require and forbid overlap")

    t, f, g = market.utility, market.admit_prob, market.cost
    n = 1 << m
    codes = np.arange(n, dtype=np.uint32)
    member = np.zeros((n, m), dtype=bool)
    for j in range(m):
        member[:, j] = (codes >> j) & 1
    feasible = member @ g <= market.budget
    for j in req:
        feasible &= member[:, j]
    for j in ban:
        feasible &= ~member[:, j]
    if not feasible.any():
        raise MarketError("no feasible portfolio satisfies the constraints")

    # Direct evaluation of the defining sum, vectorized across subsets.
    values = np.zeros(n)
    reject = np.ones(n)
    for j in range(m - 1, -1, -1):
        values += np.where(member[:, j], f[j] * t[j] * reject, 0.0)
        reject *= np.where(member[:, j], 1.0 - f[j], 1.0)
    values[~feasible] = -np.inf

    best = values.max()
    ties = np.flatnonzero(values == best)
    best_set = min(tuple(np.flatnonzero(member[i])) for i in ties)
    return Portfolio(members=frozenset(int(j) for j in best_set), value=float(best))


def all_subsets(m: int):
    """Yield every subset of range(m) as a tuple; test helper."""
    for r in range(m + 1):
        yield from itertools.combinations(range(m), r)

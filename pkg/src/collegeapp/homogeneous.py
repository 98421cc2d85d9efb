"""Solvers for the unit-cost market: pick at most h schools, one fee each.

The exact greedy exploits two structural facts: optimal portfolios are
nested as the application limit grows, and after committing to a school the
remaining problem is again a portfolio problem over discounted utilities.
Each of the h rounds therefore just grabs the school with the largest
expected utility f*t and discounts the survivors, O(hm) total.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .market import Market, MarketError, Portfolio, valuate

__all__ = ["Frontier", "naive_portfolio", "greedy_optimal", "frontier", "greedy_trace"]


@dataclass(frozen=True)
class Frontier:
    """Entry order and optimal values for every application limit.

    ``order[i]`` is the school entering at limit i+1; the optimal portfolio
    of size h is the first h entries and is worth ``values[h-1]``.
    """

    order: tuple
    values: tuple
    market: Market

    def __len__(self) -> int:
        return len(self.order)

    def portfolio(self, h: int) -> Portfolio:
        if not 1 <= h <= len(self.order):
            raise MarketError(f"h must be in 1..{len(self.order)}")
        return Portfolio(members=frozenset(self.order[:h]), value=self.values[h - 1])

    def priorities(self) -> tuple:
        """priority[j] = smallest limit at which school j is included (1-based)."""
        prio = [0] * len(self.order)
        for pos, j in enumerate(self.order):
            prio[j] = pos + 1
        return tuple(prio)

    def entry_sources(self) -> tuple:
        """Entry order as positions in the caller's original school list."""
        return tuple(self.market.source_index[j] for j in self.order)


def _check_h(market: Market, h: int) -> int:
    if not isinstance(h, (int, np.integer)) or isinstance(h, bool):
        raise MarketError("h must be an integer")
    if not 1 <= h <= market.size:
        raise MarketError(f"h must be in 1..{market.size}, got {h}")
    return int(h)


def naive_portfolio(market: Market, h: int) -> Portfolio:
    """The h schools with the largest standalone expected utility f*t.

    A tempting shortcut, and at worst a factor h below the optimum: it
    maximizes the expected sum of admitted utilities, not the expected best.
    """
    market.require_canonical()
    h = _check_h(market, h)
    ft = market.admit_prob * market.utility
    picks = np.argsort(-ft, kind="stable")[:h]
    members = frozenset(int(j) for j in picks)
    return Portfolio(members=members, value=valuate(market, members))


def greedy_optimal(
    market: Market, h: int, strategy: str = "list", backend: str | None = None
) -> Frontier:
    """Exact greedy for the unit-cost problem.

    ``strategy`` picks the candidate store: "list" rescans an array for the
    argmax, "heap" drains and rebuilds a max heap each round.  Both return
    identical output; the list variant is the fast one in practice.
    """
    market.require_canonical()
    h = _check_h(market, h)
    k = kernels.active(backend)
    if strategy == "list":
        order, values = k.greedy_list(market.utility, market.admit_prob, h)
    elif strategy == "heap":
        order, values = k.greedy_heap(market.utility, market.admit_prob, h)
    else:
        raise MarketError(f"unknown strategy {strategy!r}; use 'list' or 'heap'")
    return Frontier(
        order=tuple(int(j) for j in order),
        values=tuple(float(v) for v in values),
        market=market,
    )


def frontier(market: Market, backend: str | None = None) -> Frontier:
    """Full nested family: greedy run to h = m."""
    return greedy_optimal(market, market.size, backend=backend)


def greedy_trace(market: Market, h: int | None = None):
    """Reference greedy that yields each round's candidate view.

    Yields (chosen, candidates, discounted_ft) per round, where
    ``candidates`` are the survivors entering the round and
    ``discounted_ft`` their current f*t values.  Kept independent of the
    kernels as a cross-check and for inspecting intermediate state.
    """
    market.require_canonical()
    h = market.size if h is None else _check_h(market, h)
    t = market.utility.copy()
    f = market.admit_prob
    alive = list(range(market.size))
    for _ in range(h):
        ft = {j: f[j] * t[j] for j in alive}
        k = max(alive, key=lambda j: (ft[j], -j))
        yield k, tuple(alive), tuple(ft[j] for j in alive)
        alive.remove(k)
        for j in alive:
            if t[j] <= t[k]:
                t[j] = t[j] * (1.0 - f[k])
            else:
                t[j] = t[j] - ft[k]

"""Shared fixtures: reference markets and enumeration oracles."""

import itertools

import numpy as np
import pytest

from collegeapp.instances import GeneratorConfig, generate_market
from collegeapp.market import Market, canonicalize


def make_market(t, f, g, budget, t0=0.0, labels=None):
    labels = labels or [None] * len(t)
    return canonicalize(
        t0=t0,
        schools=[(labels[j], t[j], f[j], g[j]) for j in range(len(t))],
        budget=budget,
    )


@pytest.fixture
def example1():
    """Three schools, unit fees: the f*t ranking misses the optimum."""
    return make_market([70, 80, 90], [0.4, 0.4, 0.3], [1, 1, 1], 2)


@pytest.fixture
def solar_market():
    """Eight planet schools, unit fees; the worked m=8 instance."""
    return make_market(
        [200, 250, 300, 350, 400, 450, 500, 550],
        [0.39, 0.33, 0.24, 0.24, 0.05, 0.03, 0.10, 0.12],
        [1] * 8,
        8,
        labels=[
            "Mercury University",
            "Venus University",
            "Mars University",
            "Jupiter University",
            "Saturn University",
            "Uranus University",
            "Neptune University",
            "Pluto College",
        ],
    )


def non_nested_market(budget):
    """Two cheap twins and one pricey standout; optima flip between budgets."""
    return make_market([1, 1, 219], [0.5, 0.5, 0.5], [1, 1, 3], budget)


@pytest.fixture
def ratio_trap_market():
    """Greedy-by-ratio grabs the cheap dud and leaves no room for the prize."""
    return make_market([10, 2021], [0.1, 0.1], [1, 500], 500)


def committed_pair_market():
    """Five schools with mixed fees; the worked branching example."""
    return make_market([20, 40, 60, 80, 100], [0.5] * 5, [3, 2, 3, 2, 3], 8)


def surrogate_gap_market(m=6):
    """Sum-of-f*t surrogate ties the singleton prize with m-1 sure duds."""
    t = [1.0 / (m - 1)] * (m - 1) + [float(m - 1)]
    f = [1.0] * (m - 1) + [1.0 / (m - 1)]
    g = [1.0] * (m - 1) + [float(m - 1)]
    return make_market(t, f, g, m - 1)


def tightness_market(h, eps):
    """h sure singles against h long shots; the f*t ranking ties them all."""
    t = [1.0] * h + [eps ** -(k + 1) for k in range(h)]
    f = [1.0] * h + [eps ** (k + 1) for k in range(h)]
    return make_market(t, f, [1] * 2 * h, h)


def random_market(seed, m, mode="heterogeneous"):
    return generate_market(GeneratorConfig(m=m, mode=mode, seed=seed))


def uniform_market(rng, m, unit_costs=False, max_budget=None):
    """Broad-spectrum random market, not tied to the generator protocol."""
    t = np.sort(rng.uniform(0.5, 100.0, m))
    f = rng.uniform(0.02, 0.98, m)
    if unit_costs:
        g = np.ones(m)
        budget = float(rng.integers(1, m + 1))
    else:
        g = rng.uniform(0.5, 10.0, m)
        budget = float(rng.uniform(g.max(), max_budget or g.sum()))
    schools = [(None, t[j], f[j], g[j]) for j in range(m)]
    return canonicalize(t0=0.0, schools=schools, budget=budget)


def enumerate_values(market: Market):
    """(members, cost, value) for every subset, straight from the defining
    sum; the test-side oracle."""
    m = market.size
    t, f, g = market.utility, market.admit_prob, market.cost
    out = []
    for r in range(m + 1):
        for combo in itertools.combinations(range(m), r):
            v = 0.0
            reject = 1.0
            for j in reversed(combo):
                v += f[j] * t[j] * reject
                reject *= 1.0 - f[j]
            out.append((combo, sum(g[j] for j in combo), v))
    return out


def best_value_by_cardinality(market: Market):
    """Optimal value for every cardinality limit h, by exhaustive
    enumeration; the budget is ignored (limits are the constraint here)."""
    best = [0.0] * (market.size + 1)
    for combo, _, v in enumerate_values(market):
        r = len(combo)
        if v > best[r]:
            best[r] = v
    for h in range(1, market.size + 1):
        best[h] = max(best[h], best[h - 1])
    return best[1:]


def best_feasible(market: Market, require=(), forbid=()):
    """Exhaustive optimum (members, value) under the budget and lock sets."""
    req, ban = set(require), set(forbid)
    best = None
    for combo, cost, v in enumerate_values(market):
        if cost > market.budget or not req <= set(combo) or ban & set(combo):
            continue
        if best is None or v > best[1] + 1e-15:
            best = (combo, v)
    return best

"""Timing and accuracy experiments over synthetic markets.

Protocol per cell: generate ``instances`` markets, run one untimed warm-up,
then time each market ``reps`` times keeping the fastest run, and report the
mean and standard deviation of those per-market minima.  Generation,
canonicalization (which includes sorting), and I/O stay outside the timed
region.  Absolute times are machine-dependent; only orderings and growth
rates are meaningful across machines.
"""

from __future__ import annotations

import math
import platform
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .heterogeneous import SaParams, branch_and_bound, dp_costs, fptas, simulated_annealing
from .homogeneous import greedy_optimal
from .instances import GeneratorConfig, generate_market

__all__ = [
    "BenchRow",
    "BenchReport",
    "RatioReport",
    "experiment1",
    "experiment2",
    "experiment3",
    "experiment_backends",
    "environment_info",
]

EXP1_SIZES = (16, 64, 256, 1024)
EXP2_SIZES = (8, 16, 32, 64)
BNB_SIZE_LIMIT = 32
EXP3_RANGE = (2**3, 2**11)


@dataclass(frozen=True)
class BenchRow:
    experiment: str
    m: int
    algorithm: str
    params: str
    mean_ms: float
    std_ms: float
    n: int


@dataclass(frozen=True)
class BenchReport:
    experiment: str
    rows: tuple
    environment: dict

    def to_csv(self) -> str:
        lines = ["experiment,m,algorithm,params,mean_ms,std_ms,n"]
        for r in self.rows:
            lines.append(
                f"{r.experiment},{r.m},{r.algorithm},{r.params},{r.mean_ms:.6f},{r.std_ms:.6f},{r.n}"
            )
        return "\n".join(lines) + "\n"

    def mean_of(self, algorithm: str, m: int, params: str | None = None) -> float:
        for r in self.rows:
            if r.algorithm == algorithm and r.m == m and (params is None or r.params == params):
                return r.mean_ms
        raise KeyError((algorithm, m, params))


@dataclass(frozen=True)
class RatioReport:
    """Per-instance heuristic optimality ratios: value(SA) / value(exact)."""

    points: tuple  # (m, ratio) pairs
    environment: dict

    def to_csv(self) -> str:
        lines = ["m,ratio"]
        for m, ratio in self.points:
            lines.append(f"{m},{ratio:.9f}")
        return "\n".join(lines) + "\n"

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r for _, r in self.points])


def environment_info(backend: str | None = None) -> dict:
    return {
        "host": platform.node(),
        "platform": platform.platform(),
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "backend": backend or kernels.default_backend(),
    }


def _child_seed(*key) -> int:
    return int(np.random.SeedSequence(list(key)).generate_state(1)[0])


def _best_of(fn, reps: int) -> float:
    best = math.inf
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        best = min(best, (time.perf_counter_ns() - t0) / 1e6)
    return best


def _cell(experiment, m, algorithm, params, markets, run, reps) -> BenchRow:
    run(markets[0])  # warm-up: jit compilation, allocator, caches
    times = [_best_of(lambda mk=mk: run(mk), reps) for mk in markets]
    mean = float(np.mean(times))
    std = 0.0 if len(times) < 2 else float(np.std(times, ddof=1))
    return BenchRow(experiment, m, algorithm, params, mean, std, len(times))


def experiment1(
    sizes=EXP1_SIZES, instances=50, reps=3, seed=0, backend: str | None = None
) -> BenchReport:
    """Unit-cost markets: greedy with a list store versus a heap store."""
    rows = []
    for m in sizes:
        h = m // 2
        markets = [
            generate_market(GeneratorConfig(m, "homogeneous", seed=_child_seed(seed, 1, m, i)))
            for i in range(instances)
        ]
        for strategy in ("list", "heap"):
            rows.append(
                _cell(
                    "1",
                    m,
                    "greedy",
                    f"strategy={strategy};h={h}",
                    markets,
                    lambda mk, s=strategy: greedy_optimal(mk, min(h, mk.size), s, backend=backend),
                    reps,
                )
            )
    return BenchReport("1", tuple(rows), environment_info(backend))


def experiment2(
    sizes=EXP2_SIZES,
    instances=50,
    reps=3,
    seed=0,
    backend: str | None = None,
    bnb_limit=BNB_SIZE_LIMIT,
) -> BenchReport:
    """Integer-fee markets: branch and bound (small m), exact DP, and the
    approximation scheme at loose and tight tolerances."""
    rows = []
    for m in sizes:
        markets = [
            generate_market(GeneratorConfig(m, "heterogeneous", seed=_child_seed(seed, 2, m, i)))
            for i in range(instances)
        ]
        if m <= bnb_limit:
            rows.append(
                _cell("2", m, "bnb", "", markets, lambda mk: branch_and_bound(mk), reps)
            )
        rows.append(
            _cell("2", m, "dp", "", markets, lambda mk: dp_costs(mk, backend=backend), reps)
        )
        for eps in (0.5, 0.05):
            rows.append(
                _cell(
                    "2",
                    m,
                    "fptas",
                    f"epsilon={eps}",
                    markets,
                    lambda mk, e=eps: fptas(mk, e, backend=backend),
                    reps,
                )
            )
    return BenchReport("2", tuple(rows), environment_info(backend))


def experiment3(
    count=500,
    m_range=EXP3_RANGE,
    sa_params: SaParams | None = None,
    seed=0,
    backend: str | None = None,
) -> RatioReport:
    """Annealer accuracy against the exact DP on log-uniform market sizes."""
    base = sa_params or SaParams()
    lo, hi = m_range
    rng = np.random.default_rng(np.random.PCG64(_child_seed(seed, 3)))
    points = []
    for i in range(count):
        m = int(round(2.0 ** rng.uniform(math.log2(lo), math.log2(hi))))
        m = max(lo, min(hi, m))
        market = generate_market(
            GeneratorConfig(m, "heterogeneous", seed=_child_seed(seed, 3, m, i))
        )
        exact = dp_costs(market, backend=backend)
        sa = simulated_annealing(
            market,
            SaParams(
                temperature=base.temperature,
                cooling=base.cooling,
                iterations=base.iterations,
                seed=_child_seed(seed, 3, m, i, 1),
            ),
            backend=backend,
        )
        points.append((m, sa.value / exact.value))
    return RatioReport(tuple(points), environment_info(backend))


def experiment_backends(
    sizes=(64, 256), instances=10, reps=3, seed=0
) -> BenchReport:
    """Same solvers, numba kernels versus the pure-numpy fallback."""
    rows = []
    for m in sizes:
        markets = [
            generate_market(GeneratorConfig(m, "heterogeneous", seed=_child_seed(seed, 4, m, i)))
            for i in range(instances)
        ]
        unit_markets = [
            generate_market(GeneratorConfig(m, "homogeneous", seed=_child_seed(seed, 5, m, i)))
            for i in range(instances)
        ]
        for backend in kernels.available_backends():
            rows.append(
                _cell(
                    "backends",
                    m,
                    "greedy",
                    f"backend={backend}",
                    unit_markets,
                    lambda mk, b=backend: greedy_optimal(mk, mk.size // 2, backend=b),
                    reps,
                )
            )
            rows.append(
                _cell(
                    "backends",
                    m,
                    "dp",
                    f"backend={backend}",
                    markets,
                    lambda mk, b=backend: dp_costs(mk, backend=b),
                    reps,
                )
            )
            rows.append(
                _cell(
                    "backends",
                    m,
                    "fptas",
                    f"backend={backend};epsilon=0.05",
                    markets,
                    lambda mk, b=backend: fptas(mk, 0.05, backend=b),
                    reps,
                )
            )
            rows.append(
                _cell(
                    "backends",
                    m,
                    "sa",
                    f"backend={backend}",
                    markets,
                    lambda mk, b=backend: simulated_annealing(
                        mk, SaParams(seed=seed), backend=b
                    ),
                    reps,
                )
            )
    return BenchReport("backends", tuple(rows), environment_info())

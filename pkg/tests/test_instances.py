"""Generator protocol, knapsack reduction, and market JSON round-trips."""

import itertools
import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from collegeapp.heterogeneous import dp_costs
from collegeapp.instances import (
    GeneratorConfig,
    KnapsackInstance,
    SchemaViolation,
    bundled_market,
    document_from_market,
    generate_market,
    knapsack_to_market,
    market_from_document,
    read_knapsack,
    read_market,
    write_market,
)
from collegeapp.market import MarketError, TrivialInstance, brute_force

DATA = Path(__file__).parent / "data"


def knapsack_brute_force(kp: KnapsackInstance) -> int:
    """Independent knapsack oracle by full enumeration."""
    best = 0
    n = kp.size
    for code in range(1 << n):
        weight = value = 0
        for j in range(n):
            if code >> j & 1:
                weight += kp.weights[j]
                value += kp.utilities[j]
        if weight <= kp.capacity and value > best:
            best = value
    return best


def random_knapsack(rng, m):
    w = rng.integers(1, 12, m)
    u = rng.integers(1, 30, m)
    cap = int(max(w.max(), np.ceil(w.sum() / 2)))
    return KnapsackInstance(
        utilities=tuple(int(x) for x in u),
        weights=tuple(int(x) for x in w),
        capacity=cap,
    )


class TestGenerator:
    def test_reproducible(self):
        a = generate_market(GeneratorConfig(m=16, seed=7))
        b = generate_market(GeneratorConfig(m=16, seed=7))
        assert write_market(a) == write_market(b)

    def test_golden_file_pinned(self):
        got = write_market(generate_market(GeneratorConfig(m=8, seed=42)))
        want = (DATA / "golden_seed42_m8.json").read_text()
        assert got == want

    def test_probability_and_utility_ranges(self):
        mk = generate_market(GeneratorConfig(m=500, seed=3))
        assert np.all(mk.admit_prob > 0) and np.all(mk.admit_prob <= 1)
        assert np.all(mk.utility >= 1)
        assert np.all(mk.utility == np.round(mk.utility))

    def test_heterogeneous_budget_is_half_total(self):
        for seed in range(5):
            config = GeneratorConfig(m=40, seed=seed)
            mk = generate_market(config)
            assert mk.budget == np.floor(mk.cost.sum() / 2)
            assert set(mk.cost) <= set(range(5, 11))

    def test_homogeneous_limit(self):
        mk = generate_market(GeneratorConfig(m=9, mode="homogeneous", seed=1))
        assert mk.unit_costs
        assert mk.budget == 4.0

    def test_pre_round_utilities_center_on_scale(self):
        # replays the generator's first draw with the same seeded PCG64
        rng = np.random.default_rng(np.random.PCG64(11))
        raw = rng.exponential(10.0, 10_000)
        assert abs(raw.mean() - 10.0) <= 0.5
        mk = generate_market(GeneratorConfig(m=10_000, seed=11))
        assert np.array_equal(np.sort(np.maximum(np.ceil(raw), 1.0)), mk.utility)

    def test_config_validation(self):
        with pytest.raises(MarketError):
            GeneratorConfig(m=0)
        with pytest.raises(MarketError):
            GeneratorConfig(m=1, mode="homogeneous")
        with pytest.raises(MarketError):
            GeneratorConfig(m=4, mode="flat")


class TestKnapsackReduction:
    def test_two_item_example(self):
        kp = KnapsackInstance(utilities=(1, 2), weights=(1, 2), capacity=2)
        market, bridge = knapsack_to_market(kp)
        assert bridge.delta == Fraction(1, 6)
        assert np.allclose(market.admit_prob, [1 / 6, 1 / 6])
        assert np.allclose(market.utility, [6.0, 12.0])
        assert market.budget == 2.0
        best = brute_force(market)
        assert best.members == {1}
        assert abs(best.value - 2.0) < 1e-12
        assert bridge.knapsack_value(best.members) == 2

    def test_empty_portfolio_maps_to_zero(self):
        kp = KnapsackInstance(utilities=(3, 5), weights=(1, 1), capacity=2)
        _, bridge = knapsack_to_market(kp)
        assert bridge.knapsack_value([]) == 0

    def test_sandwich_exact(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            kp = random_knapsack(rng, int(rng.integers(2, 9))).normalized()
            _, bridge = knapsack_to_market(kp)
            for r in range(1, kp.size + 1):
                for combo in itertools.combinations(range(kp.size), r):
                    total = sum(kp.utilities[j] for j in combo)
                    v = bridge.exact_valuation(combo)
                    assert total - 1 < v <= total
                    assert bridge.knapsack_value(combo) == total

    def test_dp_on_reduction_recovers_optimum(self):
        rng = np.random.default_rng(19)
        for _ in range(25):
            kp = random_knapsack(rng, int(rng.integers(2, 11)))
            market, bridge = knapsack_to_market(kp)
            report = dp_costs(market)
            got = bridge.knapsack_value(report.portfolio.members)
            assert got == knapsack_brute_force(kp)

    def test_rejects_empty_and_bad_values(self):
        with pytest.raises(MarketError):
            KnapsackInstance(utilities=(), weights=(), capacity=3)
        with pytest.raises(MarketError):
            KnapsackInstance(utilities=(0,), weights=(1,), capacity=3)
        with pytest.raises(MarketError):
            KnapsackInstance(utilities=(1,), weights=(5,), capacity=3)

    def test_normalized_sorts_by_utility(self):
        kp = KnapsackInstance(utilities=(5, 2, 9), weights=(1, 1, 1), capacity=2)
        assert kp.normalized().utilities == (2, 5, 9)


class TestMarketJson:
    def test_round_trip_bundled_sample(self):
        path = Path("src/collegeapp/data/solar_system.json")
        text = path.read_text()
        raw = read_market(text)
        assert write_market(raw) == text

    def test_bundled_samples_load(self):
        solar = bundled_market("solar_system")
        assert len(solar.schools) == 8
        twins = bundled_market("non_nested")
        assert twins.budget == 3.0

    def test_round_trip_generated(self):
        mk = generate_market(GeneratorConfig(m=6, seed=2))
        doc = document_from_market(mk)
        again = market_from_document(json.loads(write_market(mk)))
        assert again.to_document() == doc

    def test_probability_above_one_names_field(self):
        doc = {"t0": 0, "budget": 2, "schools": [{"t": 1, "f": 1.2, "g": 1}]}
        with pytest.raises(SchemaViolation) as err:
            market_from_document(doc)
        assert err.value.path == "schools[0].f"

    def test_unknown_field_rejected(self):
        doc = {"t0": 0, "budget": 2, "bonus": 1, "schools": []}
        with pytest.raises(SchemaViolation):
            market_from_document(doc)
        doc = {"t0": 0, "budget": 2, "schools": [{"t": 1, "f": 0.5, "g": 1, "x": 2}]}
        with pytest.raises(SchemaViolation):
            market_from_document(doc)

    def test_missing_field_rejected(self):
        with pytest.raises(SchemaViolation):
            market_from_document({"t0": 0, "schools": []})

    def test_empty_schools_is_trivial_market(self):
        raw = market_from_document({"t0": 1.5, "budget": 2, "schools": []})
        with pytest.raises(TrivialInstance):
            raw.to_market()

    def test_non_finite_rejected(self):
        with pytest.raises(SchemaViolation):
            read_market('{"t0": Infinity, "budget": 2, "schools": []}')
        with pytest.raises(SchemaViolation):
            market_from_document(
                {"t0": 0, "budget": float("nan"), "schools": []}
            )

    def test_malformed_json(self):
        with pytest.raises(SchemaViolation, match="malformed"):
            read_market("{not json")

    def test_knapsack_json(self):
        kp = read_knapsack('{"u": [1, 2], "w": [1, 2], "W": 2}')
        assert kp.capacity == 2
        with pytest.raises(SchemaViolation):
            read_knapsack('{"u": [1], "w": [1]}')
        with pytest.raises(SchemaViolation):
            read_knapsack('{"u": [1], "w": [1], "W": 2, "extra": 1}')

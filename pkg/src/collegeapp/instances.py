"""Synthetic market generation, the knapsack reduction, and market JSON I/O.

The generator follows a fixed protocol: integer utilities from a rounded-up
exponential draw, admission probabilities inversely related to utility, and
either unit fees with a half-size application limit or small integer fees
with a half-total budget.  The RNG is numpy's PCG64 so identical seeds give
identical markets on every platform.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterable

import jsonschema
import numpy as np

from .market import Market, MarketError, canonicalize

__all__ = [
    "GeneratorConfig",
    "generate_market",
    "KnapsackInstance",
    "ReductionMap",
    "knapsack_to_market",
    "SchemaViolation",
    "RawMarket",
    "RawSchool",
    "market_schema",
    "validate_market_document",
    "market_from_document",
    "document_from_market",
    "read_market",
    "write_market",
    "read_knapsack",
    "bundled_market",
]

COST_CHOICES = (5, 6, 7, 8, 9, 10)


class SchemaViolation(MarketError):
    """Market JSON that does not match the interchange schema."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.reason = message


def _is_posint(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool) and x > 0


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for the synthetic-market protocol; fixed seed, fixed output."""

    m: int
    mode: str = "heterogeneous"
    seed: int = 0
    scale: float = 10.0

    def __post_init__(self):
        if self.m < 1:
            raise MarketError("m must be >= 1")
        if self.mode not in ("homogeneous", "heterogeneous"):
            raise MarketError("mode must be 'homogeneous' or 'heterogeneous'")
        if self.mode == "homogeneous" and self.m < 2:
            raise MarketError("homogeneous mode needs m >= 2 so the limit m//2 is positive")
        if self.scale <= 0:
            raise MarketError("scale must be positive")


def generate_market(config: GeneratorConfig) -> Market:
    """Draw a market per the synthetic protocol.

    Utilities are Exp(scale) draws rounded up to integers; each admission
    probability is 1/(t + scale*Q) with Q uniform on [0, 1), so better
    schools are harder to get into.  Heterogeneous mode draws fees uniformly
    from {5..10} and sets the budget to half their sum; homogeneous mode
    uses unit fees and a limit of m//2.
    """
    rng = np.random.default_rng(np.random.PCG64(config.seed))
    t = np.ceil(rng.exponential(config.scale, config.m))
    t = np.maximum(t, 1.0)
    q = rng.random(config.m)
    f = 1.0 / (t + config.scale * q)
    if config.mode == "homogeneous":
        g = np.ones(config.m)
        budget = float(config.m // 2)
    else:
        g = rng.integers(COST_CHOICES[0], COST_CHOICES[-1] + 1, config.m).astype(np.float64)
        budget = float(math.floor(g.sum() / 2.0))
    schools = [(None, t[j], f[j], g[j]) for j in range(config.m)]
    return canonicalize(t0=0.0, schools=schools, budget=budget)


@dataclass(frozen=True)
class KnapsackInstance:
    """0/1 knapsack data; utilities and weights are positive integers."""

    utilities: tuple
    weights: tuple
    capacity: int
    target: int | None = None

    def __post_init__(self):
        if len(self.utilities) != len(self.weights):
            raise MarketError("utilities and weights must have equal length")
        if not self.utilities:
            raise MarketError("knapsack instance has no items")
        if not _is_posint(self.capacity):
            raise MarketError("capacity must be a positive integer")
        object.__setattr__(self, "capacity", int(self.capacity))
        for u in self.utilities:
            if not _is_posint(u):
                raise MarketError("utilities must be positive integers")
        for w in self.weights:
            if not _is_posint(w):
                raise MarketError("weights must be positive integers")
            if w > self.capacity:
                raise MarketError("every weight must fit the capacity alone")
        object.__setattr__(self, "utilities", tuple(int(u) for u in self.utilities))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))

    @property
    def size(self) -> int:
        return len(self.utilities)

    def normalized(self) -> "KnapsackInstance":
        """Items reordered ascending by utility (stable)."""
        order = sorted(range(self.size), key=lambda j: (self.utilities[j], j))
        return KnapsackInstance(
            utilities=tuple(self.utilities[j] for j in order),
            weights=tuple(self.weights[j] for j in order),
            capacity=self.capacity,
            target=self.target,
        )


@dataclass(frozen=True)
class ReductionMap:
    """Exact bridge between a reduced market and its knapsack instance.

    Valuations on the reduced market land strictly between the knapsack
    utility minus one and the utility itself, so the utility is recovered as
    the ceiling.  Arithmetic is exact rational to keep that sandwich safe.
    """

    delta: Fraction
    utilities: tuple

    def exact_valuation(self, members: Iterable[int]) -> Fraction:
        # f*t telescopes to the bare utility: delta * (u/delta) == u.
        idx = sorted(set(members))
        v = Fraction(0)
        reject = Fraction(1)
        for j in reversed(idx):
            v += Fraction(self.utilities[j]) * reject
            reject *= 1 - self.delta
        return v

    def knapsack_value(self, members: Iterable[int]) -> int:
        members = list(members)
        if not members:
            return 0
        return math.ceil(self.exact_valuation(members))


def knapsack_to_market(kp: KnapsackInstance) -> tuple[Market, ReductionMap]:
    """Encode a knapsack instance as an admissions market.

    Every school gets the same tiny admission probability delta and utility
    u/delta, so portfolio valuations collapse to nearly-linear sums of the
    knapsack utilities; budget and fees carry over unchanged.
    """
    kp = kp.normalized()
    m = kp.size
    u_max = sum(kp.utilities)
    delta = Fraction(1, m * u_max)
    schools = [
        (None, float(Fraction(u) / delta), float(delta), float(w))
        for u, w in zip(kp.utilities, kp.weights)
    ]
    market = canonicalize(t0=0.0, schools=schools, budget=float(kp.capacity))
    return market, ReductionMap(delta=delta, utilities=kp.utilities)


# ---------------------------------------------------------------------------
# JSON interchange


def market_schema() -> dict:
    with resources.files("collegeapp.data").joinpath("market.schema.json").open() as fh:
        return json.load(fh)


_VALIDATOR = jsonschema.Draft202012Validator(
    json.loads(resources.files("collegeapp.data").joinpath("market.schema.json").read_text())
)


def _format_path(error: jsonschema.ValidationError) -> str:
    parts = []
    for token in error.absolute_path:
        if isinstance(token, int):
            parts.append(f"[{token}]")
        else:
            parts.append(f".{token}" if parts else token)
    return "".join(parts)


def validate_market_document(doc) -> None:
    """Raise :class:`SchemaViolation` (with a field path) unless ``doc``
    matches the interchange schema and contains only finite numbers."""
    best = jsonschema.exceptions.best_match(_VALIDATOR.iter_errors(doc))
    if best is not None:
        raise SchemaViolation(best.message, _format_path(best))
    for key in ("t0", "budget"):
        if not math.isfinite(doc[key]):
            raise SchemaViolation("must be finite", key)
    for i, school in enumerate(doc["schools"]):
        for key in ("t", "f", "g"):
            if not math.isfinite(school[key]):
                raise SchemaViolation("must be finite", f"schools[{i}].{key}")


@dataclass(frozen=True)
class RawSchool:
    t: float
    f: float
    g: float
    label: str | None = None


@dataclass(frozen=True)
class RawMarket:
    """A market document as read: unfiltered, unsorted, unshifted."""

    t0: float
    budget: float
    schools: tuple

    def to_market(self) -> Market:
        return canonicalize(
            t0=self.t0,
            schools=[(s.label, s.t, s.f, s.g) for s in self.schools],
            budget=self.budget,
        )

    def to_document(self) -> dict:
        schools = []
        for s in self.schools:
            row = {} if s.label is None else {"label": s.label}
            row.update({"t": s.t, "f": s.f, "g": s.g})
            schools.append(row)
        return {"t0": self.t0, "budget": self.budget, "schools": schools}


def _reject_constant(name):
    raise SchemaViolation(f"non-finite literal {name} is not allowed")


def market_from_document(doc) -> RawMarket:
    validate_market_document(doc)
    return RawMarket(
        t0=float(doc["t0"]),
        budget=float(doc["budget"]),
        schools=tuple(
            RawSchool(t=float(s["t"]), f=float(s["f"]), g=float(s["g"]), label=s.get("label"))
            for s in doc["schools"]
        ),
    )


def document_from_market(market: Market) -> dict:
    """Serialize a (canonical) market in its own school order."""
    schools = []
    for j in range(market.size):
        row = {} if market.labels[j] is None else {"label": market.labels[j]}
        row.update(
            {"t": float(market.utility[j]), "f": float(market.admit_prob[j]), "g": float(market.cost[j])}
        )
        schools.append(row)
    return {"t0": float(market.outside_utility), "budget": float(market.budget), "schools": schools}


def _loads(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"malformed JSON: {exc}") from exc


def read_market(source) -> RawMarket:
    """Parse and validate market JSON from a path, file object, or string."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
    return market_from_document(_loads(text))


def write_market(market, sink=None) -> str:
    """Serialize a RawMarket or Market to JSON with full float precision."""
    doc = market.to_document() if isinstance(market, RawMarket) else document_from_market(market)
    text = json.dumps(doc, indent=2) + "\n"
    if sink is not None:
        if hasattr(sink, "write"):
            sink.write(text)
        else:
            with open(sink, "w", encoding="utf-8") as fh:
                fh.write(text)
    return text


def read_knapsack(source) -> KnapsackInstance:
    """Parse knapsack JSON: {"u": [...], "w": [...], "W": int, "U": int?}."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
    doc = _loads(text)
    if not isinstance(doc, dict):
        raise SchemaViolation("knapsack document must be an object")
    unknown = set(doc) - {"u", "w", "W", "U"}
    if unknown:
        raise SchemaViolation(f"unknown fields {sorted(unknown)}")
    for key in ("u", "w", "W"):
        if key not in doc:
            raise SchemaViolation("missing required field", key)
    return KnapsackInstance(
        utilities=tuple(doc["u"]), weights=tuple(doc["w"]), capacity=doc["W"], target=doc.get("U")
    )


def bundled_market(name: str) -> RawMarket:
    """Load one of the sample markets shipped with the package."""
    text = resources.files("collegeapp.data").joinpath(f"{name}.json").read_text()
    return market_from_document(_loads(text))

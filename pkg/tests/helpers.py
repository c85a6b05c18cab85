"""Shared builders for the test suite: reference curves, plans, random data."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from spectariff import (
    Harmonic,
    PlanPiece,
    PricePlan,
    TimeInterval,
    TrigCurve,
)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

UNIT = TimeInterval(0.0, 1.0)


def trig(mean: float, *terms: tuple, interval: TimeInterval = UNIT) -> TrigCurve:
    """Shorthand: ``trig(50, (5, 0, 20), (20, 10, 0))``; terms are (n, cos, sin)."""
    return TrigCurve(interval, mean, tuple(Harmonic(n, c, s) for n, c, s in terms))


# reference loads: two residential shapes with content at 5, 20 and 100
LOAD_A = trig(50.0, (5, 0.0, 20.0), (20, 10.0, 0.0), (100, 0.0, 5.0))
LOAD_B = trig(40.0, (5, 0.0, 5.0), (20, 10.0, 0.0), (100, 0.0, 20.0))

# three homes sharing one 20 Hz component in different phases
HOME_3 = trig(30.0, (20, 15.0, 9.0))
HOME_4 = trig(40.0, (20, 15.0, 5.0))
HOME_5 = trig(50.0, (20, -25.0, -15.0))

# plans: flat band below 10, logarithmic ramp above
PLAN_1 = PricePlan(
    "plan1",
    (
        PlanPiece(0.0, 10.0, "constant", c=20.0),
        PlanPiece(10.0, math.inf, "logshift", k=3.0, s=0.0, c=20.0),
    ),
)
PLAN_2 = PricePlan(
    "plan2",
    (
        PlanPiece(0.0, 10.0, "constant", c=10.0),
        PlanPiece(10.0, math.inf, "logshift", k=30.0, s=0.0, c=10.0),
    ),
)
FLAT_20_25 = PricePlan(
    "flat",
    (PlanPiece(0.0, math.inf, "constant", c=20.0),),
    (PlanPiece(0.0, math.inf, "constant", c=25.0),),
)


def energy_only_plan(price: float, fundamental: float = 1.0) -> PricePlan:
    """Plan that prices energy and nothing else (zero above the fundamental)."""
    return PricePlan(
        f"energy-only-{price:g}",
        (
            PlanPiece(0.0, fundamental, "constant", c=price),
            PlanPiece(fundamental, math.inf, "constant", c=0.0),
        ),
    )


# ---------------------------------------------------------------------------
# random data
# ---------------------------------------------------------------------------


def random_trig(
    rng: np.random.Generator,
    interval: TimeInterval = UNIT,
    max_harmonic: int = 64,
    max_terms: int = 6,
    amp: float = 50.0,
) -> TrigCurve:
    """Random trigonometric curve with amplitudes safely above prune dust."""
    n_terms = int(rng.integers(0, max_terms + 1))
    ns = rng.choice(np.arange(1, max_harmonic + 1), size=min(n_terms, max_harmonic), replace=False)

    def draw() -> float:
        # keep magnitudes in [0.01, amp] so pruning never bites
        magnitude = rng.uniform(0.01, amp)
        return float(magnitude * rng.choice([-1.0, 1.0]))

    terms = tuple(Harmonic(int(n), draw(), draw()) for n in sorted(ns))
    return TrigCurve(interval, float(rng.uniform(-amp, amp)), terms)


def random_positive_plan(rng: np.random.Generator, name: str) -> PricePlan:
    """Random plan with positive magnitudes: 1 to 3 bands, optional log ramp."""
    cuts = sorted(float(c) for c in rng.uniform(1.0, 80.0, size=int(rng.integers(0, 3))))
    edges = [0.0] + cuts + [math.inf]
    alpha = []
    for lo, hi in zip(edges, edges[1:]):
        if lo > 0.0 and rng.random() < 0.3:
            alpha.append(
                PlanPiece(lo, hi, "logshift", k=float(rng.uniform(1.0, 10.0)), s=0.0, c=float(rng.uniform(1.0, 20.0)))
            )
        else:
            alpha.append(PlanPiece(lo, hi, "constant", c=float(rng.uniform(0.5, 30.0))))
    beta = tuple(PlanPiece(p.f_lo, p.f_hi, "constant", c=float(rng.uniform(0.5, 30.0))) for p in alpha)
    return PricePlan(name, tuple(alpha), beta)

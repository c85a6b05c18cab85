"""Price plans over frequency and their resolution into signed prices.

A price plan assigns every frequency ``f >= 0`` a price magnitude for the
cosine channel (``alpha``) and the sine channel (``beta``). Magnitudes are
piecewise over frequency bands; each piece is either a constant ``c`` or a
logarithmic ramp ``k*log10(f - s) + c``. Plans only fix magnitudes: the
*sign* of each price comes from the supply-side spectrum at settlement time,
so a source is paid for content it injects and pays for content it absorbs.

For several sources feeding one bus the per-source prices collapse into
equivalent bus prices: the value every source books at a frequency, divided
by the total demand coefficient there. Frequencies where demand cancels to
(numerically) nothing are degenerate: the price is zero and the orphaned
numerator is kept on the side so settlement can account for it.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    BusImbalanceError,
    IntervalMismatchError,
    PlanCoverageError,
    ZeroEnergyBusError,
)
from .spectrum import FourierSpectrum

#: Bus sums (generation vs demand) must agree within this fraction of scale.
BALANCE_RTOL = 1e-6

#: A demand denominator below this fraction of the bus scale is degenerate.
DEGENERATE_RTOL = 1e-9

PIECE_FORMS = ("constant", "logshift")


# ---------------------------------------------------------------------------
# plan pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlanPiece:
    """Price magnitude on the frequency band ``[f_lo, f_hi)``.

    ``form`` selects the shape: ``"constant"`` evaluates to ``c`` and
    ``"logshift"`` to ``k * log10(f - s) + c`` (requiring ``f_lo > s`` so the
    logarithm stays defined across the band).
    """

    f_lo: float
    f_hi: float
    form: str = "constant"
    c: float = 0.0
    k: float = 0.0
    s: float = 0.0

    def __post_init__(self) -> None:
        if self.form not in PIECE_FORMS:
            raise ValueError(f"unknown piece form {self.form!r}; expected one of {PIECE_FORMS}")
        if not math.isfinite(self.f_lo) or self.f_lo < 0:
            raise ValueError(f"f_lo must be finite and >= 0, got {self.f_lo!r}")
        if math.isnan(self.f_hi) or self.f_hi <= self.f_lo:
            raise ValueError(f"piece needs f_lo < f_hi, got [{self.f_lo}, {self.f_hi})")
        for name in ("c", "k", "s"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"piece parameter {name} must be finite")
        if self.form == "logshift" and self.f_lo <= self.s:
            raise ValueError(
                f"logshift piece needs f_lo > s, got f_lo={self.f_lo}, s={self.s}"
            )

    def magnitude(self, f: float) -> float:
        if self.form == "constant":
            return self.c
        return self.k * math.log10(f - self.s) + self.c


def _validate_pieces(pieces: Sequence[PlanPiece], channel: str) -> tuple[PlanPiece, ...]:
    if not pieces:
        raise ValueError(f"{channel}: needs at least one piece")
    ordered = tuple(sorted(pieces, key=lambda p: p.f_lo))
    if ordered[0].f_lo != 0.0:
        raise ValueError(f"{channel}: first piece must start at f=0, got {ordered[0].f_lo}")
    for left, right in zip(ordered, ordered[1:]):
        if left.f_hi != right.f_lo:
            raise ValueError(
                f"{channel}: bands must tile [0, inf) without gaps or overlap; "
                f"piece ending at {left.f_hi} meets piece starting at {right.f_lo}"
            )
    if ordered[-1].f_hi != math.inf:
        raise ValueError(f"{channel}: last piece must extend to infinity")
    return ordered


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PricePlan:
    """Named pair of piecewise magnitude schedules over frequency.

    ``alpha`` prices the cosine channel, ``beta`` the sine channel. Both must
    tile ``[0, inf)``; the energy price ``alpha(0)`` must be nonzero so pure
    energy is never free. ``beta`` defaults to the alpha schedule.
    """

    name: str
    alpha: tuple[PlanPiece, ...]
    beta: tuple[PlanPiece, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("plan needs a nonempty name")
        alpha = _validate_pieces(tuple(self.alpha), f"plan {self.name!r} alpha")
        beta = tuple(self.beta) or alpha
        beta = _validate_pieces(beta, f"plan {self.name!r} beta")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        if self.alpha_magnitude(0.0) == 0.0:
            raise ValueError(f"plan {self.name!r}: energy price alpha(0) must be nonzero")

    @staticmethod
    def _lookup(pieces: tuple[PlanPiece, ...], f: float) -> float:
        if not math.isfinite(f) or f < 0:
            raise PlanCoverageError(f"frequency must be finite and >= 0, got {f!r}")
        idx = bisect_right([p.f_lo for p in pieces], f) - 1
        piece = pieces[idx]
        if not (piece.f_lo <= f < piece.f_hi):  # tiling makes this unreachable
            raise PlanCoverageError(f"no band covers f={f}")
        return piece.magnitude(f)

    def alpha_magnitude(self, f: float) -> float:
        """Cosine-channel price magnitude at frequency ``f``."""
        return self._lookup(self.alpha, f)

    def beta_magnitude(self, f: float) -> float:
        """Sine-channel price magnitude at frequency ``f``."""
        return self._lookup(self.beta, f)


def constant_plan(name: str, alpha: float, beta: float | None = None) -> PricePlan:
    """Flat plan: one magnitude per channel across all frequencies."""
    alpha_pieces = (PlanPiece(0.0, math.inf, "constant", alpha),)
    beta_pieces = () if beta is None else (PlanPiece(0.0, math.inf, "constant", beta),)
    return PricePlan(name, alpha_pieces, beta_pieces)


# ---------------------------------------------------------------------------
# signed prices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HarmonicPrice:
    """Signed per-channel prices at harmonic ``n``."""

    n: int
    alpha: float
    beta: float


@dataclass(frozen=True)
class SignedPrices:
    """Plan magnitudes with polarity resolved against a supply spectrum."""

    plan_name: str
    alpha0: float
    per_harmonic: tuple[HarmonicPrice, ...]

    def price_at(self, n: int) -> HarmonicPrice:
        for hp in self.per_harmonic:
            if hp.n == n:
                return hp
        raise PlanCoverageError(f"no resolved price at harmonic {n}")

    def as_mapping(self) -> Mapping[int, HarmonicPrice]:
        return {hp.n: hp for hp in self.per_harmonic}


def _sign(x: float) -> float:
    # polarity convention: zero supply content prices positive
    return -1.0 if x < 0 else 1.0


def resolve_prices(
    plan: PricePlan,
    supply: FourierSpectrum,
    harmonics: Iterable[int] = (),
) -> SignedPrices:
    """Turn plan magnitudes into signed prices against a supply spectrum.

    Each harmonic present in the supply spectrum (plus any extra indices the
    caller needs priced, e.g. demand-side harmonics the aggregate cancelled)
    gets per-channel prices whose sign equals the sign of the corresponding
    supply coefficient, with zero treated as positive. The constant term is
    signed by ``a0`` the same way.
    """
    f0 = supply.interval.fundamental
    alpha0 = _sign(supply.a0) * plan.alpha_magnitude(0.0)
    indices = sorted(set(supply.harmonic_indices()) | set(harmonics))
    resolved = []
    for n in indices:
        a_n, b_n = supply.coefficients(n)
        f = n * f0
        resolved.append(
            HarmonicPrice(
                n,
                _sign(a_n) * plan.alpha_magnitude(f),
                _sign(b_n) * plan.beta_magnitude(f),
            )
        )
    return SignedPrices(plan.name, alpha0, tuple(resolved))


# ---------------------------------------------------------------------------
# equivalent bus prices for multiple sources
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualEntry:
    """Orphaned numerator at a degenerate frequency.

    ``value`` is ``sum_i price_i_n * coef_i_n`` over the sources, left
    unallocated because total demand at the harmonic is numerically zero.
    ``component`` is ``"a"`` (cosine) or ``"b"`` (sine).
    """

    n: int
    component: str
    value: float


@dataclass(frozen=True)
class EquivalentPrices:
    """Single equivalent price schedule for a whole bus."""

    alpha0: float
    per_harmonic: tuple[HarmonicPrice, ...]
    unallocated: tuple[ResidualEntry, ...] = ()

    def price_at(self, n: int) -> HarmonicPrice:
        for hp in self.per_harmonic:
            if hp.n == n:
                return hp
        raise PlanCoverageError(f"no equivalent price at harmonic {n}")

    def as_mapping(self) -> Mapping[int, HarmonicPrice]:
        return {hp.n: hp for hp in self.per_harmonic}


def equivalent_prices(
    sources: Sequence[tuple[SignedPrices, FourierSpectrum]],
    demand: Sequence[FourierSpectrum],
    *,
    balance_rtol: float = BALANCE_RTOL,
    degenerate_rtol: float = DEGENERATE_RTOL,
) -> EquivalentPrices:
    """Collapse per-source signed prices into one bus-wide schedule.

    At each harmonic the equivalent price is the total value booked by the
    sources divided by the total demand coefficient, channel by channel; the
    constant term works the same way on ``a0``. Preconditions checked here:
    all spectra share one interval, generation and demand sums agree within
    ``balance_rtol`` of the bus scale, and total demand energy is nonzero.
    Demand denominators below ``degenerate_rtol`` of the bus scale yield a
    zero price with the numerator recorded in ``unallocated``.
    """
    if not demand:
        raise ZeroEnergyBusError("no demand spectra; equivalent prices undefined")
    interval = demand[0].interval
    for s in list(demand) + [spec for _, spec in sources]:
        if s.interval != interval:
            raise IntervalMismatchError(
                f"spectra on different intervals: {s.interval} vs {interval}"
            )

    demand_a0 = sum(s.a0 for s in demand)
    supply_a0 = sum(spec.a0 for _, spec in sources)

    coef_scale = max(
        [abs(demand_a0), abs(supply_a0)]
        + [abs(c) for s in demand for line in s.lines for c in (line.a, line.b)]
        + [abs(c) for _, s in sources for line in s.lines for c in (line.a, line.b)]
    )
    if abs(demand_a0) <= 1e-12 * max(1.0, coef_scale):
        raise ZeroEnergyBusError(
            f"total demand energy coefficient is numerically zero ({demand_a0!r})"
        )
    bus_scale = abs(demand_a0)

    if abs(supply_a0 - demand_a0) > balance_rtol * bus_scale:
        raise BusImbalanceError(
            f"energy coefficients differ: generation {supply_a0!r} vs demand {demand_a0!r}"
        )

    all_ns = sorted(
        {line.n for s in demand for line in s.lines}
        | {line.n for _, s in sources for line in s.lines}
    )

    alpha0 = sum(prices.alpha0 * spec.a0 for prices, spec in sources) / demand_a0

    per_harmonic: list[HarmonicPrice] = []
    residuals: list[ResidualEntry] = []
    for n in all_ns:
        den_a = sum(s.coefficients(n)[0] for s in demand)
        den_b = sum(s.coefficients(n)[1] for s in demand)
        sup_a = sum(spec.coefficients(n)[0] for _, spec in sources)
        sup_b = sum(spec.coefficients(n)[1] for _, spec in sources)
        if abs(sup_a - den_a) > balance_rtol * bus_scale or abs(sup_b - den_b) > balance_rtol * bus_scale:
            raise BusImbalanceError(
                f"harmonic {n}: generation ({sup_a!r}, {sup_b!r}) "
                f"vs demand ({den_a!r}, {den_b!r})"
            )
        num_a = 0.0
        num_b = 0.0
        for prices, spec in sources:
            a_i, b_i = spec.coefficients(n)
            if a_i == 0.0 and b_i == 0.0:
                continue
            price = prices.price_at(n)
            num_a += price.alpha * a_i
            num_b += price.beta * b_i
        if abs(den_a) < degenerate_rtol * bus_scale:
            alpha_n = 0.0
            if num_a != 0.0:
                residuals.append(ResidualEntry(n, "a", num_a))
        else:
            alpha_n = num_a / den_a
        if abs(den_b) < degenerate_rtol * bus_scale:
            beta_n = 0.0
            if num_b != 0.0:
                residuals.append(ResidualEntry(n, "b", num_b))
        else:
            beta_n = num_b / den_b
        per_harmonic.append(HarmonicPrice(n, alpha_n, beta_n))

    return EquivalentPrices(alpha0, tuple(per_harmonic), tuple(residuals))

"""Settlement: turn spectra and signed prices into bills, incomes and audits.

Every bill is built the same way from a party's spectrum and a price
schedule: the constant term is charged ``alpha0 * (T0/2) * a0`` (price times
energy) and each harmonic line is charged ``T0 * price * coefficient`` per
channel. What varies between bus topologies is only where the prices come
from:

* one source, one subscriber: prices signed against the subscriber's own
  spectrum (generation mirrors the load exactly).
* one source, many subscribers: prices signed against the aggregate demand;
  every subscriber is billed with the same schedule, so deviation from the
  aggregate shape shows up as transfer payments between subscribers.
* many sources, one subscriber: the load is split into declared parts, each
  billed independently against its source's plan.
* many sources, many subscribers: per-source prices collapse into equivalent
  bus prices; subscribers pay the equivalent schedule, sources earn their own.

The audit re-checks money conservation from the finished breakdowns rather
than by construction: total billed must equal total income plus whatever was
recorded as unallocated at degenerate frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from . import curve as curve_ops
from .curve import LoadCurve, TimeInterval
from .errors import (
    AllocationError,
    BusImbalanceError,
    PlanCoverageError,
    ScenarioFormatError,
)
from .spectrum import DEFAULT_ORDER, FourierSpectrum, decompose, energy
from .tariff import (
    EquivalentPrices,
    HarmonicPrice,
    PricePlan,
    equivalent_prices,
    resolve_prices,
)

#: Curve-level bus balance tolerance, relative to the total load norm.
CURVE_BALANCE_RTOL = 1e-6

#: Money conservation tolerance, relative to the sum of absolute bill totals.
AUDIT_RTOL = 1e-6

TOPOLOGIES = ("one-one", "one-multi", "multi-one", "multi-multi")


# ---------------------------------------------------------------------------
# bills
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BillLine:
    """One charge row: harmonic index, channel, coefficient, price, money.

    ``kind`` is ``"a0"`` for the constant term (charge is price times
    energy) and ``"a"``/``"b"`` for the cosine/sine channels (charge is
    ``T0 * price * coefficient``).
    """

    n: int
    kind: str
    coefficient: float
    price: float
    charge: float


@dataclass(frozen=True)
class BillBreakdown:
    """Per-party settlement: line charges plus totals.

    ``party`` is the subscriber (or source, for incomes) being settled;
    ``counterparty`` names the other side when the settlement is pairwise
    (load/plan combinations, per-source parts of a split load).
    """

    party: str
    lines: tuple[BillLine, ...]
    non_dynamic_total: float
    dynamic_total: float
    total: float
    counterparty: str | None = None


def _breakdown(
    party: str,
    spectrum: FourierSpectrum,
    alpha0: float,
    prices: Mapping[int, HarmonicPrice],
    counterparty: str | None = None,
) -> BillBreakdown:
    span = spectrum.interval.span
    lines = [BillLine(0, "a0", spectrum.a0, alpha0, alpha0 * 0.5 * span * spectrum.a0)]
    for line in spectrum.lines:
        hp = prices.get(line.n)
        if hp is None:
            raise PlanCoverageError(f"no price resolved at harmonic {line.n}")
        lines.append(BillLine(line.n, "a", line.a, hp.alpha, span * hp.alpha * line.a))
        lines.append(BillLine(line.n, "b", line.b, hp.beta, span * hp.beta * line.b))
    non_dynamic = lines[0].charge
    dynamic = sum(l.charge for l in lines[1:])
    return BillBreakdown(party, tuple(lines), non_dynamic, dynamic, non_dynamic + dynamic, counterparty)


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnallocatedCharge:
    """Money that bypassed subscriber bills at a degenerate frequency.

    ``amount`` is signed so that total billed equals total income plus the
    sum of these amounts: sources still earn on their own content at a
    degenerate harmonic while subscribers are priced zero there, so each
    amount is minus the interval length times the orphaned numerator.
    """

    n: int
    component: str
    amount: float


@dataclass(frozen=True)
class FrequencyFlow:
    """Money moved at one (harmonic, channel) slot, both sides of the bus."""

    n: int
    component: str
    billed: float
    earned: float
    unallocated: float


@dataclass(frozen=True)
class AuditReport:
    """Conservation check over a finished settlement."""

    passed: bool
    total_billed: float
    total_income: float
    total_unallocated: float
    residual: float
    tolerance: float
    energy_generated: float
    energy_consumed: float
    energy_residual: float
    energy_tolerance: float
    flows: tuple[FrequencyFlow, ...] = ()
    negative_parties: tuple[str, ...] = ()


def audit_conservation(
    bills: Sequence[BillBreakdown],
    incomes: Sequence[BillBreakdown],
    *,
    unallocated: Sequence[UnallocatedCharge] = (),
    energy_generated: float = 0.0,
    energy_consumed: float = 0.0,
    rtol: float = AUDIT_RTOL,
) -> AuditReport:
    """Check that billed money equals source income plus unallocated residue.

    The identity is re-derived from the finished breakdowns, not assumed:
    ``sum(bills) - sum(incomes) - sum(unallocated)`` must vanish within
    ``rtol`` of the total absolute billed money. Bus energy in and out must
    agree within the same relative tolerance. Parties with negative totals
    are flagged, not rejected: a negative bill is a legitimate reward for a
    load shape the bus wants.
    """
    total_billed = sum(b.total for b in bills)
    total_income = sum(b.total for b in incomes)
    total_unallocated = sum(u.amount for u in unallocated)
    residual = total_billed - total_income - total_unallocated
    tolerance = rtol * sum(abs(b.total) for b in bills)
    energy_residual = energy_generated - energy_consumed
    energy_tolerance = rtol * max(abs(energy_generated), abs(energy_consumed))

    slots: dict[tuple[int, str], list[float]] = {}

    def _tally(breakdowns: Sequence[BillBreakdown], side: int) -> None:
        for b in breakdowns:
            for line in b.lines:
                slot = slots.setdefault((line.n, line.kind), [0.0, 0.0, 0.0])
                slot[side] += line.charge

    _tally(bills, 0)
    _tally(incomes, 1)
    for u in unallocated:
        slot = slots.setdefault((u.n, u.component), [0.0, 0.0, 0.0])
        slot[2] += u.amount
    flows = tuple(
        FrequencyFlow(n, comp, billed, earned, extra)
        for (n, comp), (billed, earned, extra) in sorted(slots.items())
    )

    negative = tuple(
        b.party for b in list(bills) + list(incomes) if b.total < 0.0
    )

    passed = abs(residual) <= tolerance and abs(energy_residual) <= energy_tolerance
    return AuditReport(
        passed=passed,
        total_billed=total_billed,
        total_income=total_income,
        total_unallocated=total_unallocated,
        residual=residual,
        tolerance=tolerance,
        energy_generated=energy_generated,
        energy_consumed=energy_consumed,
        energy_residual=energy_residual,
        energy_tolerance=energy_tolerance,
        flows=flows,
        negative_parties=negative,
    )


# ---------------------------------------------------------------------------
# topology settlements
# ---------------------------------------------------------------------------


def settle_one_one(
    load: LoadCurve,
    plan: PricePlan,
    order: int = DEFAULT_ORDER,
    *,
    subscriber_id: str = "subscriber",
    source_id: str | None = None,
) -> BillBreakdown:
    """Bill a single load against a single plan.

    With one source feeding one subscriber the generation curve is the load
    curve, so price polarity is resolved against the subscriber's own
    spectrum.
    """
    spectrum = decompose(load, order)
    prices = resolve_prices(plan, spectrum)
    return _breakdown(subscriber_id, spectrum, prices.alpha0, prices.as_mapping(), source_id)


def settle_one_source_multi(
    loads: Sequence[tuple[str, LoadCurve]],
    plan: PricePlan,
    order: int = DEFAULT_ORDER,
    *,
    source_id: str = "source",
) -> tuple[list[BillBreakdown], BillBreakdown]:
    """Bill several subscribers of one source; return their bills and its income.

    Prices are signed once against the aggregate demand spectrum and applied
    to every subscriber, so a subscriber whose content opposes the aggregate
    at some harmonic is paid there by the ones reinforcing it. Harmonics
    that cancel out of the aggregate entirely are priced with positive sign
    (zero supply content) and net to zero across the bills. The source's
    income prices the aggregate itself, which equals the sum of the bills up
    to roundoff.
    """
    if not loads:
        raise ScenarioFormatError("one-multi settlement needs at least one subscriber")
    aggregate = curve_ops.total([c for _, c in loads])
    agg_spectrum = decompose(aggregate, order)
    spectra = [(sub_id, decompose(c, order)) for sub_id, c in loads]
    needed = {n for _, s in spectra for n in s.harmonic_indices()}
    prices = resolve_prices(plan, agg_spectrum, needed)
    price_map = prices.as_mapping()
    bills = [
        _breakdown(sub_id, s, prices.alpha0, price_map, source_id) for sub_id, s in spectra
    ]
    income = _breakdown(source_id, agg_spectrum, prices.alpha0, price_map)
    return bills, income


def settle_multi_source_one(
    parts: Sequence[tuple[str, LoadCurve, PricePlan]],
    order: int = DEFAULT_ORDER,
    *,
    subscriber_id: str = "subscriber",
    expected_total: LoadCurve | None = None,
) -> tuple[list[BillBreakdown], float]:
    """Bill one subscriber whose load is split into per-source parts.

    Each part is a (source id, partial curve, plan) triple; the partial is
    decomposed and billed on its own, with price polarity taken from the
    partial itself (each source's generation mirrors its slice of the load).
    When ``expected_total`` is given the parts must sum to it within the
    curve balance tolerance. Returns the per-source bills and their sum.
    """
    if not parts:
        raise ScenarioFormatError("multi-one settlement needs at least one source part")
    if expected_total is not None:
        combined = curve_ops.total([c for _, c, _ in parts])
        tol = CURVE_BALANCE_RTOL * curve_ops.norm(expected_total) + 1e-12
        gap = curve_ops.distance(combined, expected_total)
        if gap > tol:
            raise AllocationError(
                f"declared parts miss the subscriber load by {gap:g} (tolerance {tol:g})"
            )
    bills = []
    for source_id, part, plan in parts:
        spectrum = decompose(part, order)
        prices = resolve_prices(plan, spectrum)
        bills.append(
            _breakdown(subscriber_id, spectrum, prices.alpha0, prices.as_mapping(), source_id)
        )
    return bills, sum(b.total for b in bills)


def settle_multi_multi(
    sources: Sequence[tuple[str, LoadCurve, PricePlan]],
    loads: Sequence[tuple[str, LoadCurve]],
    order: int = DEFAULT_ORDER,
) -> "SettlementResult":
    """Settle a bus with several sources and several subscribers.

    Per-source prices (signed against each source's own spectrum) collapse
    into one equivalent schedule; every subscriber is billed with it, and
    every source earns on its own injected content. Degenerate frequencies
    (demand cancels) bill nothing, and the value sources booked there is
    carried as unallocated charges so the audit identity still closes.
    """
    if not sources and not loads:
        audit = audit_conservation([], [])
        return SettlementResult((), (), None, audit)
    source_spectra = [(sid, decompose(c, order), plan) for sid, c, plan in sources]
    load_spectra = [(sub_id, decompose(c, order)) for sub_id, c in loads]
    priced = [
        (sid, resolve_prices(plan, spec), spec) for sid, spec, plan in source_spectra
    ]
    equivalent = equivalent_prices(
        [(prices, spec) for _, prices, spec in priced],
        [spec for _, spec in load_spectra],
    )
    eq_map = equivalent.as_mapping()
    bills = tuple(
        _breakdown(sub_id, spec, equivalent.alpha0, eq_map) for sub_id, spec in load_spectra
    )
    incomes = tuple(
        _breakdown(sid, spec, prices.alpha0, prices.as_mapping())
        for sid, prices, spec in priced
    )
    span = loads[0][1].interval.span if loads else sources[0][1].interval.span
    unallocated = tuple(
        UnallocatedCharge(entry.n, entry.component, -span * entry.value)
        for entry in equivalent.unallocated
    )
    audit = audit_conservation(
        bills,
        incomes,
        unallocated=unallocated,
        energy_generated=sum(energy(spec) for _, _, spec in priced),
        energy_consumed=sum(energy(spec) for _, spec in load_spectra),
    )
    return SettlementResult(bills, incomes, equivalent, audit, unallocated)


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SourceSpec:
    """Declared source: identifier, plan, and (topology permitting) a curve."""

    id: str
    plan: PricePlan
    curve: LoadCurve | None = None


@dataclass(frozen=True)
class SubscriberSpec:
    """Declared subscriber load."""

    id: str
    curve: LoadCurve


@dataclass(frozen=True)
class AllocationSpec:
    """Declared slice of one subscriber's load served by one source."""

    subscriber_id: str
    source_id: str
    curve: LoadCurve


@dataclass(frozen=True)
class Scenario:
    """One bus to settle: interval, truncation order, parties, topology.

    Structural rules are enforced at construction; curve-level balance is
    checked by :meth:`check_balance` (called by :func:`run_scenario`) so a
    scenario object can be inspected even when its data is inconsistent.
    """

    interval: TimeInterval
    topology: str
    sources: tuple[SourceSpec, ...]
    subscribers: tuple[SubscriberSpec, ...]
    allocation: tuple[AllocationSpec, ...] = ()
    order: int = DEFAULT_ORDER
    title: str = ""

    def __post_init__(self) -> None:
        if self.topology not in TOPOLOGIES:
            raise ScenarioFormatError(
                f"unknown topology {self.topology!r}; expected one of {TOPOLOGIES}"
            )
        if not isinstance(self.order, int) or isinstance(self.order, bool) or self.order < 1:
            raise ScenarioFormatError(f"order must be a positive integer, got {self.order!r}")
        source_ids = [s.id for s in self.sources]
        sub_ids = [s.id for s in self.subscribers]
        if len(set(source_ids)) != len(source_ids):
            raise ScenarioFormatError(f"duplicate source ids: {source_ids}")
        if len(set(sub_ids)) != len(sub_ids):
            raise ScenarioFormatError(f"duplicate subscriber ids: {sub_ids}")
        for s in self.sources:
            if s.curve is not None and s.curve.interval != self.interval:
                raise ScenarioFormatError(f"source {s.id!r}: curve interval differs from scenario")
        for s in self.subscribers:
            if s.curve.interval != self.interval:
                raise ScenarioFormatError(f"subscriber {s.id!r}: curve interval differs from scenario")
        for a in self.allocation:
            if a.curve.interval != self.interval:
                raise ScenarioFormatError(
                    f"allocation {a.subscriber_id!r}/{a.source_id!r}: interval differs from scenario"
                )

        topo = self.topology
        if topo == "one-one":
            if not self.sources or not self.subscribers:
                raise ScenarioFormatError("one-one needs at least one source and one subscriber")
            if any(s.curve is not None for s in self.sources):
                raise ScenarioFormatError(
                    "one-one sources carry plans only; generation mirrors each load exactly"
                )
            if self.allocation:
                raise ScenarioFormatError("one-one does not take an allocation section")
        elif topo == "one-multi":
            if len(self.sources) != 1:
                raise ScenarioFormatError(f"one-multi needs exactly 1 source, got {len(self.sources)}")
            if not self.subscribers:
                raise ScenarioFormatError("one-multi needs at least one subscriber")
            if self.allocation:
                raise ScenarioFormatError("one-multi does not take an allocation section")
        elif topo == "multi-one":
            if len(self.subscribers) != 1:
                raise ScenarioFormatError(
                    f"multi-one needs exactly 1 subscriber, got {len(self.subscribers)}"
                )
            if not self.sources:
                raise ScenarioFormatError("multi-one needs at least one source")
            alloc_sources = {a.source_id for a in self.allocation}
            sub_id = self.subscribers[0].id
            for a in self.allocation:
                if a.subscriber_id != sub_id:
                    raise ScenarioFormatError(
                        f"allocation names unknown subscriber {a.subscriber_id!r}"
                    )
                if a.source_id not in set(source_ids):
                    raise ScenarioFormatError(f"allocation names unknown source {a.source_id!r}")
            if len(alloc_sources) != len(self.allocation):
                raise ScenarioFormatError("duplicate allocation rows for one source")
            for s in self.sources:
                if s.curve is None and s.id not in alloc_sources:
                    raise ScenarioFormatError(
                        f"source {s.id!r} needs a curve or an allocation row"
                    )
        else:  # multi-multi
            if self.allocation:
                raise ScenarioFormatError("multi-multi settles without an allocation section")
            for s in self.sources:
                if s.curve is None:
                    raise ScenarioFormatError(f"source {s.id!r} needs a generation curve")

    # -- balance ------------------------------------------------------------

    def _total_load(self) -> LoadCurve:
        return curve_ops.total([s.curve for s in self.subscribers], self.interval)

    def check_balance(self) -> None:
        """Verify declared curves balance across the bus within tolerance."""
        if self.topology == "one-multi":
            declared = self.sources[0].curve
            if declared is not None:
                self._require_close(
                    declared, self._total_load(), BusImbalanceError, "declared generation", "total load"
                )
        elif self.topology == "multi-one":
            load = self.subscribers[0].curve
            parts = [c for _, c, _ in self._parts()]
            self._require_close(
                curve_ops.total(parts, self.interval), load, AllocationError, "allocated parts", "subscriber load"
            )
            if self.allocation:
                by_source = {a.source_id: a.curve for a in self.allocation}
                for s in self.sources:
                    if s.curve is not None and s.id in by_source:
                        self._require_close(
                            by_source[s.id], s.curve, AllocationError,
                            f"allocation for {s.id!r}", "its declared curve",
                        )
        elif self.topology == "multi-multi":
            if self.sources or self.subscribers:
                gen = curve_ops.total([s.curve for s in self.sources], self.interval)
                self._require_close(
                    gen, self._total_load(), BusImbalanceError, "total generation", "total load"
                )

    @staticmethod
    def _require_close(
        lhs: LoadCurve, rhs: LoadCurve, exc: type, lhs_name: str, rhs_name: str
    ) -> None:
        tol = CURVE_BALANCE_RTOL * curve_ops.norm(rhs) + 1e-12
        gap = curve_ops.distance(lhs, rhs)
        if gap > tol:
            raise exc(f"{lhs_name} differs from {rhs_name} by {gap:g} (tolerance {tol:g})")

    def _parts(self) -> list[tuple[str, LoadCurve, PricePlan]]:
        """Per-source slices for multi-one: allocation rows win over curves."""
        by_source = {a.source_id: a.curve for a in self.allocation}
        parts = []
        for s in self.sources:
            c = by_source.get(s.id, s.curve)
            assert c is not None  # construction guarantees a curve or a row
            parts.append((s.id, c, s.plan))
        return parts


@dataclass(frozen=True)
class SettlementResult:
    """Everything a settlement produced: bills, incomes, prices, audit."""

    bills: tuple[BillBreakdown, ...]
    incomes: tuple[BillBreakdown, ...]
    equivalent: EquivalentPrices | None
    audit: AuditReport
    unallocated: tuple[UnallocatedCharge, ...] = ()


def run_scenario(scenario: Scenario) -> SettlementResult:
    """Settle a scenario according to its topology.

    one-one settles every subscriber x source combination independently
    (each row of a price-comparison table is one combination); the other
    topologies settle the bus once. Balance is checked before any billing.
    """
    scenario.check_balance()
    order = scenario.order

    if scenario.topology == "one-one":
        bills = []
        incomes = []
        for sub in scenario.subscribers:
            for src in scenario.sources:
                bill = settle_one_one(
                    sub.curve, src.plan, order, subscriber_id=sub.id, source_id=src.id
                )
                bills.append(bill)
                incomes.append(replace(bill, party=src.id, counterparty=sub.id))
        consumed = sum(
            energy(decompose(sub.curve, order)) for sub in scenario.subscribers
        ) * len(scenario.sources)
        audit = audit_conservation(
            bills, incomes, energy_generated=consumed, energy_consumed=consumed
        )
        return SettlementResult(tuple(bills), tuple(incomes), None, audit)

    if scenario.topology == "one-multi":
        src = scenario.sources[0]
        bills, income = settle_one_source_multi(
            [(s.id, s.curve) for s in scenario.subscribers], src.plan, order, source_id=src.id
        )
        consumed = sum(energy(decompose(s.curve, order)) for s in scenario.subscribers)
        generated = 0.5 * scenario.interval.span * income.lines[0].coefficient
        audit = audit_conservation(
            bills, [income], energy_generated=generated, energy_consumed=consumed
        )
        return SettlementResult(tuple(bills), (income,), None, audit)

    if scenario.topology == "multi-one":
        sub = scenario.subscribers[0]
        bills, _ = settle_multi_source_one(
            scenario._parts(), order, subscriber_id=sub.id, expected_total=sub.curve
        )
        incomes = [replace(b, party=b.counterparty or "source", counterparty=b.party) for b in bills]
        generated = sum(b.lines[0].coefficient for b in bills) * 0.5 * scenario.interval.span
        consumed = energy(decompose(sub.curve, order))
        audit = audit_conservation(
            bills, incomes, energy_generated=generated, energy_consumed=consumed
        )
        return SettlementResult(tuple(bills), tuple(incomes), None, audit)

    return settle_multi_multi(
        [(s.id, s.curve, s.plan) for s in scenario.sources],
        [(s.id, s.curve) for s in scenario.subscribers],
        order,
    )

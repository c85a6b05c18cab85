"""Spectral electricity billing.

Decompose load and generation curves into Fourier spectra, price each
harmonic with frequency-dependent plans, and settle single- or multi-party
buses with conservation audits.
"""

from .curve import (
    Harmonic,
    LoadCurve,
    SampledCurve,
    TimeInterval,
    TrigCurve,
    add,
    approx_equal,
    distance,
    evaluate,
    inner_product,
    norm,
    read_meter_csv,
    scale,
    subtract,
    to_sampled,
    zero,
)
from .errors import (
    AliasingBoundError,
    AllocationError,
    BusImbalanceError,
    IntervalMismatchError,
    PlanCoverageError,
    SampleGridError,
    ScenarioFormatError,
    SpectariffError,
    ZeroEnergyBusError,
)
from .report import write_curve_csv, write_settlement
from .scenario import find_curve, load_scenario, parse_scenario
from .settlement import (
    AllocationSpec,
    AuditReport,
    BillBreakdown,
    BillLine,
    Scenario,
    SettlementResult,
    SourceSpec,
    SubscriberSpec,
    UnallocatedCharge,
    audit_conservation,
    run_scenario,
    settle_multi_multi,
    settle_multi_source_one,
    settle_one_one,
    settle_one_source_multi,
)
from .spectrum import (
    FourierSpectrum,
    SpectrumLine,
    decompose,
    energy,
    orthonormal_basis,
    parseval_residual,
    read_spectrum_csv,
    reconstruct,
    write_spectrum_csv,
)
from .tariff import (
    EquivalentPrices,
    HarmonicPrice,
    PlanPiece,
    PricePlan,
    ResidualEntry,
    SignedPrices,
    constant_plan,
    equivalent_prices,
    resolve_prices,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingBoundError",
    "AllocationError",
    "AllocationSpec",
    "AuditReport",
    "BillBreakdown",
    "BillLine",
    "BusImbalanceError",
    "EquivalentPrices",
    "FourierSpectrum",
    "Harmonic",
    "HarmonicPrice",
    "IntervalMismatchError",
    "LoadCurve",
    "PlanCoverageError",
    "PlanPiece",
    "PricePlan",
    "ResidualEntry",
    "SampleGridError",
    "SampledCurve",
    "Scenario",
    "ScenarioFormatError",
    "SettlementResult",
    "SignedPrices",
    "SourceSpec",
    "SpectariffError",
    "SpectrumLine",
    "SubscriberSpec",
    "TimeInterval",
    "TrigCurve",
    "UnallocatedCharge",
    "ZeroEnergyBusError",
    "add",
    "approx_equal",
    "audit_conservation",
    "constant_plan",
    "decompose",
    "distance",
    "energy",
    "equivalent_prices",
    "evaluate",
    "find_curve",
    "inner_product",
    "load_scenario",
    "norm",
    "orthonormal_basis",
    "parse_scenario",
    "parseval_residual",
    "read_meter_csv",
    "read_spectrum_csv",
    "reconstruct",
    "resolve_prices",
    "run_scenario",
    "scale",
    "settle_multi_multi",
    "settle_multi_source_one",
    "settle_one_one",
    "settle_one_source_multi",
    "subtract",
    "to_sampled",
    "write_curve_csv",
    "write_settlement",
    "write_spectrum_csv",
    "zero",
]

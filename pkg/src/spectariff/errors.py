"""Exception types raised by the spectral billing pipeline."""

from __future__ import annotations


class SpectariffError(ValueError):
    """Base class for all domain errors raised by this package."""


class IntervalMismatchError(SpectariffError):
    """Two curves or spectra were combined across different time intervals."""


class SampleGridError(SpectariffError):
    """Sampled curves were combined across incompatible sample grids."""


class AliasingBoundError(SpectariffError):
    """Requested truncation order exceeds what the sample count supports."""


class PlanCoverageError(SpectariffError):
    """A price plan could not produce a magnitude for a requested frequency."""


class BusImbalanceError(SpectariffError):
    """Generation and load on the bus do not agree within tolerance."""


class ZeroEnergyBusError(SpectariffError):
    """Total consumed energy on the bus is zero; equivalent prices undefined."""


class AllocationError(SpectariffError):
    """Declared per-pair allocation does not reproduce the declared curves."""


class ScenarioFormatError(SpectariffError):
    """A scenario file is malformed or references unknown identifiers."""

"""Fourier decomposition of load curves and spectrum bookkeeping.

The series is taken over the billing interval itself, so the fundamental
frequency is ``f0 = 1/T0`` and the constant term follows the ``a0/2``
convention:

    p(t) = a0/2 + sum_n a_n*cos(2*pi*n*f0*t) + b_n*sin(2*pi*n*f0*t)

with ``a_n = (2/T0) * integral p(t) cos(2*pi*n*f0*t) dt`` and similarly for
``b_n``. Consumed energy over the interval is ``(T0/2) * a0``.

Decomposing a trigonometric polynomial is an exact read-off (truncated at
the requested order; content above the order is dropped and can be measured
with :func:`parseval_residual`). Decomposing a sampled curve uses trapezoid
quadrature on the closed uniform grid, guarded by the anti-aliasing bound
``2*N < count - 1``: with exactly ``2*N`` grid intervals the quadrature
corrupts the top harmonic (cosine coefficient doubles, sine coefficient
vanishes) instead of degrading gracefully, so the bound is enforced as an
error rather than a warning.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curve import Harmonic, LoadCurve, TimeInterval, TrigCurve, inner_product
from .errors import AliasingBoundError, IntervalMismatchError

#: Harmonic lines whose coefficients are both below this fraction of
#: max(1, |a0|) are dropped as quadrature dust.
PRUNE_RTOL = 1e-9

#: Default truncation order when a scenario does not set one.
DEFAULT_ORDER = 128


@dataclass(frozen=True)
class SpectrumLine:
    """Coefficient pair ``(a_n, b_n)`` at harmonic ``n >= 1``."""

    n: int
    a: float
    b: float


@dataclass(frozen=True)
class FourierSpectrum:
    """Truncated Fourier series of a curve on its interval.

    Attributes
    ----------
    interval:
        Interval the series was taken over; fixes ``f0``.
    a0:
        Twice the mean level (``a0/2`` convention).
    lines:
        Harmonic coefficient lines, sorted by index, all within ``order``.
    order:
        Truncation order the decomposition was requested at.
    """

    interval: TimeInterval
    a0: float
    lines: tuple[SpectrumLine, ...]
    order: int

    def __post_init__(self) -> None:
        if not isinstance(self.order, int) or self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order!r}")
        if not math.isfinite(self.a0):
            raise ValueError("a0 must be finite")
        ns = [line.n for line in self.lines]
        if ns != sorted(set(ns)):
            raise ValueError(f"lines must be sorted with distinct indices, got {ns}")
        for line in self.lines:
            if line.n < 1 or line.n > self.order:
                raise ValueError(f"line index {line.n} outside 1..{self.order}")
            if not (math.isfinite(line.a) and math.isfinite(line.b)):
                raise ValueError(f"line {line.n}: coefficients must be finite")

    @property
    def mean(self) -> float:
        return 0.5 * self.a0

    def coefficients(self, n: int) -> tuple[float, float]:
        """Pair ``(a_n, b_n)``, zero when the line is absent."""
        for line in self.lines:
            if line.n == n:
                return line.a, line.b
        return 0.0, 0.0

    def harmonic_indices(self) -> tuple[int, ...]:
        return tuple(line.n for line in self.lines)


def _prune(a0: float, raw: list[SpectrumLine]) -> tuple[SpectrumLine, ...]:
    threshold = PRUNE_RTOL * max(1.0, abs(a0))
    return tuple(line for line in raw if abs(line.a) >= threshold or abs(line.b) >= threshold)


def decompose(p: LoadCurve, order: int = DEFAULT_ORDER) -> FourierSpectrum:
    """Fourier coefficients of ``p`` up to harmonic ``order``.

    Trigonometric curves are read off exactly; harmonics above the order are
    dropped (use :func:`parseval_residual` to quantify what was lost).
    Sampled curves are integrated with the trapezoid rule, which requires
    ``2*order < count - 1`` to avoid aliasing; violating that raises
    :class:`~spectariff.errors.AliasingBoundError`. Lines with both
    coefficients below ``1e-9 * max(1, |a0|)`` are pruned so billing never
    carries quadrature dust.
    """
    if not isinstance(order, int) or isinstance(order, bool) or order < 1:
        raise ValueError(f"order must be a positive integer, got {order!r}")
    if isinstance(p, TrigCurve):
        a0 = 2.0 * p.mean
        raw = [SpectrumLine(h.n, h.cos_amp, h.sin_amp) for h in p.harmonics if h.n <= order]
        return FourierSpectrum(p.interval, a0, _prune(a0, raw), order)

    count = p.count
    # closed grid has count-1 intervals; product frequencies reach 2*order,
    # and the quadrature corrupts the top harmonic right at 2*order intervals
    max_order = (count - 2) // 2
    if order > max_order:
        raise AliasingBoundError(
            f"order {order} exceeds the aliasing bound for {count} samples "
            f"(max safe order {max_order}; need 2*order < count - 1)"
        )
    span = p.interval.span
    t = p.times()
    dx = p.step
    vals = p.values
    a0 = (2.0 / span) * float(np.trapezoid(vals, dx=dx))
    w0 = 2.0 * math.pi * p.interval.fundamental
    raw = []
    for n in range(1, order + 1):
        angle = (w0 * n) * t
        a_n = (2.0 / span) * float(np.trapezoid(vals * np.cos(angle), dx=dx))
        b_n = (2.0 / span) * float(np.trapezoid(vals * np.sin(angle), dx=dx))
        raw.append(SpectrumLine(n, a_n, b_n))
    return FourierSpectrum(p.interval, a0, _prune(a0, raw), order)


def reconstruct(s: FourierSpectrum) -> TrigCurve:
    """Trigonometric curve carrying exactly the spectrum's content."""
    terms = tuple(Harmonic(line.n, line.a, line.b) for line in s.lines)
    return TrigCurve(s.interval, 0.5 * s.a0, terms)


def energy(s: FourierSpectrum) -> float:
    """Energy consumed over the interval: ``(T0/2) * a0``."""
    return 0.5 * s.interval.span * s.a0


def parseval_residual(p: LoadCurve, s: FourierSpectrum) -> float:
    """Fraction of ``||p||^2`` not captured by the spectrum.

    By Parseval the captured part is
    ``T0*(a0/2)^2 + (T0/2)*sum(a_n^2 + b_n^2)``; the residual is what the
    truncation (or pruning) dropped, expressed relative to ``||p||^2``.
    Zero-norm curves report 0.
    """
    if p.interval != s.interval:
        raise IntervalMismatchError(
            f"curve interval {p.interval} does not match spectrum interval {s.interval}"
        )
    norm_sq = inner_product(p, p)
    span = s.interval.span
    captured = span * (0.5 * s.a0) ** 2 + 0.5 * span * sum(
        line.a**2 + line.b**2 for line in s.lines
    )
    if norm_sq <= 0.0:
        return 0.0
    return (norm_sq - captured) / norm_sq


def orthonormal_basis(interval: TimeInterval, order: int) -> list[TrigCurve]:
    """Orthonormal harmonic basis up to ``order``: constant, then cos/sin pairs."""
    span = interval.span
    basis: list[TrigCurve] = [TrigCurve(interval, 1.0 / math.sqrt(span), ())]
    amp = math.sqrt(2.0 / span)
    for n in range(1, order + 1):
        basis.append(TrigCurve(interval, 0.0, (Harmonic(n, amp, 0.0),)))
        basis.append(TrigCurve(interval, 0.0, (Harmonic(n, 0.0, amp),)))
    return basis


# ---------------------------------------------------------------------------
# spectrum CSV format: header n,a_n,b_n; first row is 0,a0,0
# ---------------------------------------------------------------------------


def write_spectrum_csv(s: FourierSpectrum, path: "str | Path") -> None:
    """Write the spectrum as ``n,a_n,b_n`` rows, constant term first."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "a_n", "b_n"])
        writer.writerow(["0", repr(s.a0), repr(0.0)])
        for line in s.lines:
            writer.writerow([str(line.n), repr(line.a), repr(line.b)])


def read_spectrum_csv(
    path: "str | Path", interval: TimeInterval, order: int | None = None
) -> FourierSpectrum:
    """Read a spectrum written by :func:`write_spectrum_csv`.

    The CSV carries no interval metadata, so the caller supplies it. The
    order defaults to the highest harmonic present (or 1 for a bare constant).
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip().lower() for c in rows[0]] != ["n", "a_n", "b_n"]:
        raise ValueError(f"{path}: expected header 'n,a_n,b_n'")
    body = [row for row in rows[1:] if row and any(cell.strip() for cell in row)]
    if not body:
        raise ValueError(f"{path}: missing constant-term row")
    a0 = None
    lines: list[SpectrumLine] = []
    for lineno, row in enumerate(body, start=2):
        if len(row) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 columns")
        try:
            n, a, b = int(row[0]), float(row[1]), float(row[2])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: bad row {row!r}") from exc
        if n == 0:
            if a0 is not None:
                raise ValueError(f"{path}:{lineno}: duplicate constant-term row")
            a0 = a
        else:
            lines.append(SpectrumLine(n, a, b))
    if a0 is None:
        raise ValueError(f"{path}: no constant-term row (n=0)")
    if order is None:
        order = max((line.n for line in lines), default=1)
    return FourierSpectrum(interval, a0, tuple(sorted(lines, key=lambda l: l.n)), order)

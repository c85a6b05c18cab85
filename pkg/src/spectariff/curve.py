"""Load and generation curves on a billing interval.

A curve is an element of the space of square-integrable real functions on a
fixed interval ``[t1, t2]``. Two interchangeable representations are
supported:

* :class:`TrigCurve` holds an exact trigonometric polynomial: a mean level
  plus cosine/sine amplitudes at integer multiples of the interval's
  fundamental frequency ``f0 = 1/(t2 - t1)``.
* :class:`SampledCurve` holds a uniformly sampled trace (meter data), with
  both endpoints included. The sampling period is ``span / (count - 1)``.

All vector-space and inner-product operations live here as module functions
so they work uniformly across both representations. Mixing the two resolves
onto the sampled grid: the trigonometric side is evaluated at the sample
times and the result is a :class:`SampledCurve`.

Inner products between two trigonometric polynomials use the closed form
(orthogonality of the harmonic basis); anything involving samples uses the
trapezoid rule on the closed uniform grid, which is exact for band-limited
periodic data whenever every product frequency stays below the number of
grid intervals.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .errors import IntervalMismatchError, SampleGridError

#: Two curves count as the same function when their distance is below this
#: fraction of max(1, ||p||).
EQUALITY_RTOL = 1e-9


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimeInterval:
    """Half-open-in-spirit billing window ``[t1, t2]`` with ``t1 < t2``.

    Attributes
    ----------
    t1, t2:
        Interval endpoints in time units (hours in the shipped scenarios).
    """

    t1: float
    t2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t1) and math.isfinite(self.t2)):
            raise ValueError("interval endpoints must be finite")
        if not self.t1 < self.t2:
            raise ValueError(f"interval needs t1 < t2, got [{self.t1}, {self.t2}]")

    @property
    def span(self) -> float:
        """Interval length ``T0 = t2 - t1``."""
        return self.t2 - self.t1

    @property
    def fundamental(self) -> float:
        """Fundamental frequency ``f0 = 1 / span``."""
        return 1.0 / self.span


@dataclass(frozen=True)
class Harmonic:
    """One harmonic term ``cos_amp*cos(2*pi*n*f0*t) + sin_amp*sin(2*pi*n*f0*t)``."""

    n: int
    cos_amp: float = 0.0
    sin_amp: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ValueError(f"harmonic index must be a positive integer, got {self.n!r}")
        if not (math.isfinite(self.cos_amp) and math.isfinite(self.sin_amp)):
            raise ValueError(f"harmonic {self.n}: amplitudes must be finite")


@dataclass(frozen=True)
class TrigCurve:
    """Exact trigonometric polynomial on an interval.

    ``p(t) = mean + sum_n cos_amp_n*cos(2*pi*n*f0*t) + sin_amp_n*sin(2*pi*n*f0*t)``
    where the phase is taken against absolute time ``t``, not ``t - t1``.

    Harmonics are stored sorted by index with duplicates rejected; terms whose
    amplitudes are both exactly zero are dropped so the zero curve has a
    single canonical form.
    """

    interval: TimeInterval
    mean: float = 0.0
    harmonics: tuple[Harmonic, ...] = ()

    def __post_init__(self) -> None:
        if not math.isfinite(self.mean):
            raise ValueError("mean must be finite")
        kept = tuple(
            sorted(
                (h for h in self.harmonics if h.cos_amp != 0.0 or h.sin_amp != 0.0),
                key=lambda h: h.n,
            )
        )
        seen = [h.n for h in kept]
        if len(set(seen)) != len(seen):
            raise ValueError(f"duplicate harmonic indices: {seen}")
        object.__setattr__(self, "harmonics", kept)

    @property
    def max_harmonic(self) -> int:
        return self.harmonics[-1].n if self.harmonics else 0


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Uniformly sampled trace over an interval, endpoints included.

    ``values[k]`` is the reading at ``t1 + k * span/(count-1)``. At least two
    samples are required and every reading must be finite; NaN or infinity in
    meter data is rejected outright.
    """

    interval: TimeInterval
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError(f"samples must be one-dimensional, got shape {arr.shape}")
        if arr.size < 2:
            raise ValueError(f"need at least 2 samples, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite (no NaN or infinity)")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def count(self) -> int:
        return int(self.values.size)

    @property
    def step(self) -> float:
        """Sampling period ``span / (count - 1)``."""
        return self.interval.span / (self.count - 1)

    def times(self) -> np.ndarray:
        return np.linspace(self.interval.t1, self.interval.t2, self.count)


LoadCurve = Union[TrigCurve, SampledCurve]


# ---------------------------------------------------------------------------
# construction helpers
# ---------------------------------------------------------------------------


def zero(interval: TimeInterval) -> TrigCurve:
    """The additive identity on ``interval``."""
    return TrigCurve(interval, 0.0, ())


def constant(interval: TimeInterval, level: float) -> TrigCurve:
    return TrigCurve(interval, level, ())


def grid(interval: TimeInterval, count: int) -> np.ndarray:
    """Closed uniform grid of ``count`` points across the interval."""
    if count < 2:
        raise ValueError(f"grid needs at least 2 points, got {count}")
    return np.linspace(interval.t1, interval.t2, count)


def evaluate(p: LoadCurve, t: "float | np.ndarray") -> "float | np.ndarray":
    """Evaluate a curve at time(s) ``t``.

    Trigonometric polynomials are exact everywhere; sampled curves are
    linearly interpolated between readings (and clamped to the end readings
    outside the interval).
    """
    if isinstance(p, TrigCurve):
        t_arr = np.asarray(t, dtype=float)
        w0 = 2.0 * math.pi * p.interval.fundamental
        out = np.full_like(t_arr, p.mean, dtype=float)
        for h in p.harmonics:
            out = out + h.cos_amp * np.cos(w0 * h.n * t_arr) + h.sin_amp * np.sin(w0 * h.n * t_arr)
        return float(out) if np.isscalar(t) or getattr(t, "ndim", 1) == 0 else out
    t_arr = np.asarray(t, dtype=float)
    out = np.interp(t_arr, p.times(), p.values)
    return float(out) if np.isscalar(t) or getattr(t, "ndim", 1) == 0 else out


def to_sampled(p: LoadCurve, count: int) -> SampledCurve:
    """Resample any curve onto a closed uniform grid of ``count`` points."""
    if isinstance(p, SampledCurve) and p.count == count:
        return p
    return SampledCurve(p.interval, np.asarray(evaluate(p, grid(p.interval, count))))


# ---------------------------------------------------------------------------
# vector-space operations
# ---------------------------------------------------------------------------


def _check_intervals(p: LoadCurve, q: LoadCurve) -> TimeInterval:
    if p.interval != q.interval:
        raise IntervalMismatchError(
            f"curves live on different intervals: {p.interval} vs {q.interval}"
        )
    return p.interval


def add(p: LoadCurve, q: LoadCurve) -> LoadCurve:
    """Pointwise sum of two curves on the same interval.

    Trig + trig merges harmonic amplitudes exactly. Sampled + sampled
    requires identical sample counts. Mixed representations resolve onto the
    sampled grid.
    """
    interval = _check_intervals(p, q)
    if isinstance(p, TrigCurve) and isinstance(q, TrigCurve):
        amps: dict[int, list[float]] = {}
        for h in p.harmonics + q.harmonics:
            acc = amps.setdefault(h.n, [0.0, 0.0])
            acc[0] += h.cos_amp
            acc[1] += h.sin_amp
        terms = tuple(Harmonic(n, c, s) for n, (c, s) in sorted(amps.items()))
        return TrigCurve(interval, p.mean + q.mean, terms)
    if isinstance(p, SampledCurve) and isinstance(q, SampledCurve):
        if p.count != q.count:
            raise SampleGridError(
                f"sample counts differ: {p.count} vs {q.count}; resample first"
            )
        return SampledCurve(interval, p.values + q.values)
    # mixed: evaluate the trig side on the meter grid
    sampled, trig = (p, q) if isinstance(p, SampledCurve) else (q, p)
    return SampledCurve(interval, sampled.values + np.asarray(evaluate(trig, sampled.times())))


def scale(a: float, p: LoadCurve) -> LoadCurve:
    """Scalar multiple ``a * p``."""
    if not math.isfinite(a):
        raise ValueError(f"scale factor must be finite, got {a!r}")
    if isinstance(p, TrigCurve):
        terms = tuple(Harmonic(h.n, a * h.cos_amp, a * h.sin_amp) for h in p.harmonics)
        return TrigCurve(p.interval, a * p.mean, terms)
    return SampledCurve(p.interval, a * p.values)


def subtract(p: LoadCurve, q: LoadCurve) -> LoadCurve:
    return add(p, scale(-1.0, q))


def total(curves: Iterable[LoadCurve], interval: TimeInterval | None = None) -> LoadCurve:
    """Sum a collection of curves; empty input needs an explicit interval."""
    acc: LoadCurve | None = None
    for c in curves:
        acc = c if acc is None else add(acc, c)
    if acc is None:
        if interval is None:
            raise ValueError("cannot sum zero curves without an interval")
        return zero(interval)
    return acc


# ---------------------------------------------------------------------------
# inner-product structure
# ---------------------------------------------------------------------------


def inner_product(p: LoadCurve, q: LoadCurve) -> float:
    """L2 inner product ``<p, q> = integral of p(t) q(t) dt`` over the interval.

    For two trigonometric polynomials this is the closed form
    ``T0*m1*m2 + (T0/2) * sum_n (c1_n*c2_n + s1_n*s2_n)``; the harmonic basis
    is orthogonal so only shared indices contribute. When samples are
    involved the integral is the trapezoid rule on the common closed grid,
    which is exact whenever the product's harmonic content stays below the
    number of grid intervals and always exact for the constant term.
    """
    interval = _check_intervals(p, q)
    span = interval.span
    if isinstance(p, TrigCurve) and isinstance(q, TrigCurve):
        amps_q = {h.n: h for h in q.harmonics}
        acc = span * p.mean * q.mean
        for h in p.harmonics:
            other = amps_q.get(h.n)
            if other is not None:
                acc += 0.5 * span * (h.cos_amp * other.cos_amp + h.sin_amp * other.sin_amp)
        return acc
    if isinstance(p, SampledCurve) and isinstance(q, SampledCurve):
        if p.count != q.count:
            raise SampleGridError(
                f"sample counts differ: {p.count} vs {q.count}; resample first"
            )
        return float(np.trapezoid(p.values * q.values, dx=p.step))
    sampled, other = (p, q) if isinstance(p, SampledCurve) else (q, p)
    other_vals = np.asarray(evaluate(other, sampled.times()))
    return float(np.trapezoid(sampled.values * other_vals, dx=sampled.step))


def norm(p: LoadCurve) -> float:
    """L2 norm ``sqrt(<p, p>)``; the square is clamped at zero against roundoff."""
    return math.sqrt(max(0.0, inner_product(p, p)))


def distance(p: LoadCurve, q: LoadCurve) -> float:
    """Metric induced by the norm: ``||p - q||``."""
    return norm(subtract(p, q))


def approx_equal(p: LoadCurve, q: LoadCurve, rtol: float = EQUALITY_RTOL) -> bool:
    """Whether two curves are the same function up to the equality tolerance."""
    return distance(p, q) <= rtol * max(1.0, norm(p))


# ---------------------------------------------------------------------------
# meter data
# ---------------------------------------------------------------------------

#: Relative slack allowed between individual time steps and the mean step.
_GRID_UNIFORMITY_RTOL = 1e-6


def read_meter_csv(path: "str | Path") -> SampledCurve:
    """Load a meter trace from a two-column CSV file.

    The file must carry a ``t,p`` header followed by rows of time/power
    readings. Times must be strictly increasing and uniformly spaced; the
    curve's interval is taken from the first and last timestamps.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty meter file")
    header = [cell.strip().lower() for cell in rows[0]]
    if header != ["t", "p"]:
        raise ValueError(f"{path}: expected header 't,p', got {rows[0]!r}")
    times: list[float] = []
    values: list[float] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
        try:
            t_val, p_val = float(row[0]), float(row[1])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: non-numeric reading: {row!r}") from exc
        times.append(t_val)
        values.append(p_val)
    if len(times) < 2:
        raise ValueError(f"{path}: need at least 2 readings, got {len(times)}")
    t_arr = np.asarray(times)
    if not np.all(np.isfinite(t_arr)):
        raise ValueError(f"{path}: timestamps must be finite")
    steps = np.diff(t_arr)
    if np.any(steps <= 0):
        raise ValueError(f"{path}: timestamps must be strictly increasing")
    mean_step = float(steps.mean())
    if np.any(np.abs(steps - mean_step) > _GRID_UNIFORMITY_RTOL * mean_step):
        raise ValueError(f"{path}: timestamps must be uniformly spaced")
    interval = TimeInterval(float(t_arr[0]), float(t_arr[-1]))
    return SampledCurve(interval, np.asarray(values))

"""Curve representations and the inner-product space they live in."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectariff import (
    Harmonic,
    IntervalMismatchError,
    SampleGridError,
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
from spectariff.curve import grid, total

from helpers import LOAD_A, LOAD_B, UNIT, random_trig, trig


class TestTimeInterval:
    def test_span_and_fundamental(self):
        iv = TimeInterval(1.0, 3.0)
        assert iv.span == 2.0
        assert iv.fundamental == 0.5

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            TimeInterval(1.0, 1.0)
        with pytest.raises(ValueError):
            TimeInterval(2.0, 1.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            TimeInterval(0.0, math.inf)
        with pytest.raises(ValueError):
            TimeInterval(math.nan, 1.0)


class TestTrigCurve:
    def test_harmonics_sorted_and_zero_terms_dropped(self):
        p = TrigCurve(UNIT, 1.0, (Harmonic(7, 1.0, 0.0), Harmonic(2, 0.0, 0.0), Harmonic(3, 0.0, 2.0)))
        assert [h.n for h in p.harmonics] == [3, 7]

    def test_duplicate_index_rejected(self):
        with pytest.raises(ValueError):
            TrigCurve(UNIT, 0.0, (Harmonic(3, 1.0, 0.0), Harmonic(3, 0.0, 1.0)))

    def test_bad_harmonic_index(self):
        with pytest.raises(ValueError):
            Harmonic(0, 1.0, 0.0)
        with pytest.raises(ValueError):
            Harmonic(-2, 1.0, 0.0)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            TrigCurve(UNIT, math.nan)
        with pytest.raises(ValueError):
            Harmonic(1, math.inf, 0.0)

    def test_evaluate_matches_formula(self):
        # mean + cos + sin terms at t=0 collapse to mean + sum of cosine amps
        assert evaluate(LOAD_A, 0.0) == pytest.approx(60.0, abs=1e-12)
        t = 0.123
        expected = (
            50.0
            + 20.0 * math.sin(2 * math.pi * 5 * t)
            + 10.0 * math.cos(2 * math.pi * 20 * t)
            + 5.0 * math.sin(2 * math.pi * 100 * t)
        )
        assert evaluate(LOAD_A, t) == pytest.approx(expected, rel=1e-12)


class TestSampledCurve:
    def test_needs_two_samples(self):
        with pytest.raises(ValueError):
            SampledCurve(UNIT, np.array([1.0]))

    def test_rejects_nan_and_inf(self):
        with pytest.raises(ValueError):
            SampledCurve(UNIT, np.array([1.0, math.nan, 2.0]))
        with pytest.raises(ValueError):
            SampledCurve(UNIT, np.array([1.0, math.inf, 2.0]))

    def test_rejects_matrix(self):
        with pytest.raises(ValueError):
            SampledCurve(UNIT, np.ones((2, 2)))

    def test_values_read_only(self):
        s = SampledCurve(UNIT, np.array([1.0, 2.0, 3.0]))
        with pytest.raises(ValueError):
            s.values[0] = 9.0

    def test_accepts_discontinuous_data(self):
        # square-wave samples: jumps are fine, only NaN/Inf are rejected
        square = np.where(np.arange(101) < 50, 1.0, -1.0)
        s = SampledCurve(UNIT, square)
        assert s.count == 101
        assert s.step == pytest.approx(0.01)

    def test_times_grid(self):
        s = SampledCurve(TimeInterval(2.0, 4.0), np.array([0.0, 1.0, 4.0]))
        assert np.allclose(s.times(), [2.0, 3.0, 4.0])


class TestVectorOps:
    def test_add_merges_amplitudes(self):
        p = add(LOAD_A, LOAD_B)
        assert isinstance(p, TrigCurve)
        assert p.mean == 90.0
        by_n = {h.n: h for h in p.harmonics}
        assert by_n[5].sin_amp == 25.0
        assert by_n[20].cos_amp == 20.0
        assert by_n[100].sin_amp == 25.0

    def test_add_requires_same_interval(self):
        other = trig(1.0, interval=TimeInterval(0.0, 2.0))
        with pytest.raises(IntervalMismatchError):
            add(LOAD_A, other)

    def test_sampled_add_requires_same_count(self):
        a = SampledCurve(UNIT, np.ones(5))
        b = SampledCurve(UNIT, np.ones(6))
        with pytest.raises(SampleGridError):
            add(a, b)

    def test_mixed_add_resolves_to_samples(self):
        s = to_sampled(LOAD_B, 301)
        mixed = add(LOAD_A, s)
        assert isinstance(mixed, SampledCurve)
        t = mixed.times()
        expected = np.asarray(evaluate(LOAD_A, t)) + np.asarray(evaluate(LOAD_B, t))
        assert np.allclose(mixed.values, expected, rtol=0, atol=1e-12)

    def test_scale(self):
        p = scale(-2.0, LOAD_A)
        assert p.mean == -100.0
        assert p.harmonics[0].sin_amp == -40.0
        with pytest.raises(ValueError):
            scale(math.nan, LOAD_A)

    def test_subtract_self_is_zero(self):
        d = subtract(LOAD_A, LOAD_A)
        assert d.mean == 0.0
        assert d.harmonics == ()

    def test_total_needs_interval_when_empty(self):
        assert total([], UNIT).mean == 0.0
        with pytest.raises(ValueError):
            total([])


class TestInnerProduct:
    def test_frozen_oracle_values(self):
        # hand-computed: T0*m^2 + (T0/2)*sum(amp^2)
        assert inner_product(LOAD_A, LOAD_A) == pytest.approx(2762.5, abs=1e-12)
        assert inner_product(LOAD_A, LOAD_B) == pytest.approx(2150.0, abs=1e-12)
        assert norm(LOAD_A) == pytest.approx(math.sqrt(2762.5), rel=1e-15)
        assert distance(LOAD_A, LOAD_B) == pytest.approx(math.sqrt(325.0), rel=1e-15)

    def test_constant_inner_product_exact(self):
        c = trig(3.0)
        assert inner_product(c, c) == 9.0

    def test_disjoint_harmonics_orthogonal(self):
        p = trig(0.0, (3, 1.0, 0.0))
        q = trig(0.0, (4, 1.0, 0.0))
        assert inner_product(p, q) == 0.0

    def test_trapezoid_matches_closed_form(self):
        # closed uniform grid keeps the quadrature spectrally exact
        s = to_sampled(LOAD_A, 1601)
        assert inner_product(s, s) == pytest.approx(2762.5, rel=1e-9)
        assert inner_product(s, LOAD_B) == pytest.approx(2150.0, rel=1e-9)
        assert inner_product(LOAD_B, s) == pytest.approx(2150.0, rel=1e-9)

    def test_sampled_constant_exact(self):
        s = SampledCurve(UNIT, np.full(11, 4.0))
        assert inner_product(s, s) == pytest.approx(16.0, abs=1e-14)

    def test_interval_mismatch(self):
        other = trig(1.0, interval=TimeInterval(0.0, 0.5))
        with pytest.raises(IntervalMismatchError):
            inner_product(LOAD_A, other)

    def test_approx_equal(self):
        assert approx_equal(LOAD_A, LOAD_A)
        nudged = add(LOAD_A, trig(1e-12))
        assert approx_equal(LOAD_A, nudged)
        assert not approx_equal(LOAD_A, LOAD_B)


# ---------------------------------------------------------------------------
# axiom property suites
# ---------------------------------------------------------------------------

# integer amplitudes keep float arithmetic exact, so the vector-space and
# inner-product laws can be asserted with equality rather than tolerance
_int_amp = st.integers(min_value=-40, max_value=40).map(float)
_harmonic_set = st.dictionaries(
    st.integers(min_value=1, max_value=24), st.tuples(_int_amp, _int_amp), max_size=4
)


def _int_curve(mean: float, terms: dict) -> TrigCurve:
    return TrigCurve(UNIT, mean, tuple(Harmonic(n, c, s) for n, (c, s) in sorted(terms.items())))


int_curves = st.builds(_int_curve, _int_amp, _harmonic_set)


@settings(max_examples=100, deadline=None)
@given(int_curves, int_curves, int_curves)
def test_vector_space_axioms_exact(p, q, r):
    assert add(p, q) == add(q, p)
    assert add(add(p, q), r) == add(p, add(q, r))
    assert add(p, zero(UNIT)) == p
    assert add(p, scale(-1.0, p)) == zero(UNIT)
    assert scale(1.0, p) == p
    assert scale(2.0, scale(3.0, p)) == scale(6.0, p)
    assert scale(5.0, add(p, q)) == add(scale(5.0, p), scale(5.0, q))
    assert scale(2.0 + 3.0, p) == add(scale(2.0, p), scale(3.0, p))


@settings(max_examples=100, deadline=None)
@given(int_curves, int_curves, st.integers(min_value=-10, max_value=10).map(float))
def test_inner_product_axioms_exact(p, q, a):
    assert inner_product(p, q) == inner_product(q, p)
    assert inner_product(scale(a, p), q) == a * inner_product(p, q)
    assert inner_product(p, p) >= 0.0
    assert (inner_product(p, p) == 0.0) == (p == zero(UNIT))


@settings(max_examples=100, deadline=None)
@given(int_curves, int_curves, int_curves)
def test_inner_product_additivity_exact(p, q, r):
    assert inner_product(add(p, q), r) == inner_product(p, r) + inner_product(q, r)


@settings(max_examples=100, deadline=None)
@given(int_curves, int_curves, int_curves)
def test_distance_axioms(p, q, r):
    assert distance(p, q) == distance(q, p)
    assert distance(p, p) == 0.0
    # triangle inequality, with a whisper of float slack
    assert distance(p, r) <= distance(p, q) + distance(q, r) + 1e-9


@settings(max_examples=100, deadline=None)
@given(int_curves, int_curves)
def test_cauchy_schwarz(p, q):
    lhs = abs(inner_product(p, q))
    rhs = norm(p) * norm(q)
    assert lhs <= rhs * (1.0 + 1e-12) + 1e-12


_float_amp = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False, allow_infinity=False)
float_curves = st.builds(
    _int_curve,
    _float_amp,
    st.dictionaries(st.integers(min_value=1, max_value=24), st.tuples(_float_amp, _float_amp), max_size=4),
)


@settings(max_examples=100, deadline=None)
@given(float_curves, float_curves, float_curves)
def test_vector_space_axioms_float_tolerance(p, q, r):
    lhs = add(add(p, q), r)
    rhs = add(p, add(q, r))
    assert distance(lhs, rhs) <= 1e-12 * max(1.0, norm(lhs))
    lhs2 = scale(0.7, add(p, q))
    rhs2 = add(scale(0.7, p), scale(0.7, q))
    assert distance(lhs2, rhs2) <= 1e-12 * max(1.0, norm(lhs2))


def test_sampled_axioms_within_tolerance():
    rng = np.random.default_rng(7)
    for _ in range(25):
        p = to_sampled(random_trig(rng, max_harmonic=12), 257)
        q = to_sampled(random_trig(rng, max_harmonic=12), 257)
        r = to_sampled(random_trig(rng, max_harmonic=12), 257)
        assert distance(add(p, q), add(q, p)) <= 1e-12 * max(1.0, norm(p))
        lhs = add(add(p, q), r)
        rhs = add(p, add(q, r))
        assert distance(lhs, rhs) <= 1e-12 * max(1.0, norm(lhs))
        assert inner_product(p, q) == pytest.approx(inner_product(q, p), rel=1e-12, abs=1e-12)
        assert inner_product(p, p) >= 0.0
        assert distance(p, r) <= distance(p, q) + distance(q, r) + 1e-9


# ---------------------------------------------------------------------------
# meter files
# ---------------------------------------------------------------------------


class TestMeterCsv:
    def _write(self, path, rows, header="t,p"):
        lines = [header] + [f"{t},{p}" for t, p in rows]
        path.write_text("\n".join(lines) + "\n")

    def test_round_trip(self, tmp_path):
        path = tmp_path / "meter.csv"
        t = np.linspace(0.0, 1.0, 11)
        vals = np.asarray(evaluate(LOAD_A, t))
        self._write(path, zip(t, vals))
        s = read_meter_csv(path)
        assert s.interval == UNIT
        assert s.count == 11
        assert np.allclose(s.values, vals, rtol=0, atol=1e-12)

    def test_header_required(self, tmp_path):
        path = tmp_path / "meter.csv"
        self._write(path, [(0.0, 1.0), (1.0, 2.0)], header="time,power")
        with pytest.raises(ValueError, match="header"):
            read_meter_csv(path)

    def test_non_uniform_grid_rejected(self, tmp_path):
        path = tmp_path / "meter.csv"
        self._write(path, [(0.0, 1.0), (0.5, 2.0), (0.7, 3.0)])
        with pytest.raises(ValueError, match="uniform"):
            read_meter_csv(path)

    def test_decreasing_times_rejected(self, tmp_path):
        path = tmp_path / "meter.csv"
        self._write(path, [(0.0, 1.0), (1.0, 2.0), (0.5, 3.0)])
        with pytest.raises(ValueError, match="increasing"):
            read_meter_csv(path)

    def test_nan_reading_rejected(self, tmp_path):
        path = tmp_path / "meter.csv"
        self._write(path, [(0.0, 1.0), (0.5, float("nan")), (1.0, 2.0)])
        with pytest.raises(ValueError, match="finite"):
            read_meter_csv(path)

    def test_non_numeric_rejected(self, tmp_path):
        path = tmp_path / "meter.csv"
        path.write_text("t,p\n0.0,high\n1.0,2.0\n")
        with pytest.raises(ValueError, match="non-numeric"):
            read_meter_csv(path)

    def test_single_reading_rejected(self, tmp_path):
        path = tmp_path / "meter.csv"
        self._write(path, [(0.0, 1.0)])
        with pytest.raises(ValueError, match="at least 2"):
            read_meter_csv(path)


def test_grid_endpoints():
    g = grid(UNIT, 5)
    assert g[0] == 0.0 and g[-1] == 1.0
    with pytest.raises(ValueError):
        grid(UNIT, 1)

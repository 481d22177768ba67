import numpy as np
import pytest
from hypothesis import given, strategies as st

from synchrocal import (
    ErrorChannel,
    NoiseModel,
    TestSignalSpec,
    TimeTaggedPhasor,
    build_error_series,
    inject_errors,
    phase_error,
    positive_sequence,
    rme,
    true_phasor_series,
    tve,
)
from synchrocal.errors import TimestampMismatch, ZeroTruth
from synchrocal.estimator import NoiseKind
from synchrocal.signals import PhasorSeries


def _ph(mag, ang, n=0):
    return TimeTaggedPhasor(n=n, t=n / 30.0, magnitude=mag, angle_deg=ang)


class TestPositiveSequence:
    def test_balanced_set(self):
        p = positive_sequence(_ph(1, 0), _ph(1, -120), _ph(1, 120))
        assert p.magnitude == pytest.approx(1.0, abs=1e-12)
        assert p.angle_deg == pytest.approx(0.0, abs=1e-12)

    def test_zero_sequence_vanishes(self):
        p = positive_sequence(_ph(1, 0), _ph(1, 0), _ph(1, 0))
        assert p.magnitude == pytest.approx(0.0, abs=1e-15)

    def test_negative_sequence_vanishes(self):
        p = positive_sequence(_ph(1, 0), _ph(1, 120), _ph(1, -120))
        assert p.magnitude == pytest.approx(0.0, abs=1e-15)

    def test_balanced_equals_a_phase(self):
        a = _ph(0.83, 37.5)
        p = positive_sequence(a, _ph(0.83, 37.5 - 120), _ph(0.83, 37.5 + 120))
        assert p.magnitude == pytest.approx(a.magnitude, abs=1e-12)
        assert p.angle_deg == pytest.approx(a.angle_deg, abs=1e-12)

    def test_index_mismatch(self):
        with pytest.raises(TimestampMismatch):
            positive_sequence(_ph(1, 0, n=0), _ph(1, -120, n=1), _ph(1, 120, n=0))


class TestRme:
    def test_identity(self):
        assert rme(_ph(1.0, 0), _ph(1.0, 0)) == 0.0

    def test_five_percent(self):
        assert rme(_ph(2.0, 0), _ph(1.9, 0)) == pytest.approx(5.0, abs=1e-12)

    def test_zero_truth_guard(self):
        with pytest.raises(ZeroTruth):
            rme(_ph(1e-15, 0), _ph(1.0, 0))


class TestPhaseError:
    def test_identity(self):
        assert phase_error(_ph(1, 10.0), _ph(1, 10.0)) == 0.0

    def test_wrapping(self):
        assert phase_error(_ph(1, 179.0), _ph(1, -179.0)) == pytest.approx(-2.0)

    def test_small_difference(self):
        assert phase_error(_ph(1, -5.72958), _ph(1, -5.68)) == pytest.approx(
            -0.04958, abs=1e-9)

    @given(st.floats(-180, 180), st.floats(-180, 180))
    def test_range_and_period(self, a, b):
        pe = phase_error(_ph(1, a), _ph(1, b))
        assert -180.0 < pe <= 180.0
        assert phase_error(_ph(1, a + 360.0), _ph(1, b)) == pytest.approx(
            pe, abs=1e-9)


class TestTve:
    def test_identical(self):
        assert tve(_ph(1, 30.0), _ph(1, 30.0)) == 0.0

    def test_pure_angle_chord(self):
        # equal magnitudes, 1 degree apart -> chord length 2*sin(0.5 deg)
        got = tve(_ph(1, 0.0), _ph(1, 1.0))
        assert got == pytest.approx(100 * 2 * np.sin(np.radians(0.5)), abs=1e-9)
        assert got == pytest.approx(1.74531, abs=1e-4)

    def test_pure_magnitude(self):
        assert tve(_ph(1.0, 0), _ph(0.99, 0)) == pytest.approx(1.0, abs=1e-12)

    def test_zero_iff_both_errors_zero(self):
        assert tve(_ph(1, 5.0), _ph(1, 5.0)) == 0.0
        assert tve(_ph(1, 5.0), _ph(1.001, 5.0)) > 0
        assert tve(_ph(1, 5.0), _ph(1, 5.001)) > 0


class TestBuildErrorSeries:
    def test_ideal_chain_all_zero(self):
        spec = TestSignalSpec.pm(duration_s=2.0)
        truth = true_phasor_series(spec)
        for channel in ErrorChannel:
            series = build_error_series(truth, truth, channel)
            assert np.max(np.abs(series.values)) <= 1e-10

    def test_flagged_reports_excluded(self):
        spec = TestSignalSpec.steady(duration_s=2.0)
        truth = true_phasor_series(spec)
        meas = PhasorSeries(truth.n, truth.t, truth.magnitude, truth.angle_deg,
                            valid=np.ones(len(truth), dtype=bool))
        meas.valid[17] = False
        series = build_error_series(truth, meas, ErrorChannel.PE)
        assert len(series) == len(truth) - 1
        assert 17 not in series.n

    def test_bias_propagates_as_constant(self):
        spec = TestSignalSpec.steady(duration_s=2.0)
        truth = true_phasor_series(spec)
        model = NoiseModel(kind=NoiseKind.BIAS, bias_angle_deg=0.36)
        meas = inject_errors(truth, model, seed=0)
        series = build_error_series(truth, meas, ErrorChannel.PE)
        assert np.allclose(series.values, -0.36, atol=1e-12)

    def test_misaligned_indices(self):
        spec = TestSignalSpec.steady(duration_s=2.0)
        truth = true_phasor_series(spec)
        shifted = PhasorSeries(truth.n + 1, truth.t, truth.magnitude,
                               truth.angle_deg)
        with pytest.raises(TimestampMismatch):
            build_error_series(truth, shifted, ErrorChannel.PE)

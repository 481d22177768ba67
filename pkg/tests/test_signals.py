import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from synchrocal import (
    PhaseId,
    TestKind,
    TestSignalSpec,
    synthesize_waveform,
    true_phasor_at,
    true_phasor_series,
    wrap_degrees,
)
from synchrocal.errors import IndexOutOfRange, InvalidSpec
from synchrocal.signals import carrier_phase, envelope

SQRT2 = np.sqrt(2.0)


class TestSpecValidation:
    def test_defaults_valid(self):
        TestSignalSpec.steady(duration_s=1.0)

    def test_negative_amplitude(self):
        with pytest.raises(InvalidSpec):
            TestSignalSpec.steady(x_m=-1.0, duration_s=1.0)

    def test_sample_rate_too_low(self):
        with pytest.raises(InvalidSpec):
            TestSignalSpec.steady(sample_rate=240, duration_s=1.0)

    def test_report_rate_must_divide(self):
        with pytest.raises(InvalidSpec):
            TestSignalSpec.steady(report_rate=29, sample_rate=960, duration_s=1.0)

    def test_am_requires_kx(self):
        with pytest.raises(InvalidSpec):
            TestSignalSpec(test=TestKind.AM, k_x=0.0, f_mod=0.1, duration_s=1.0)

    def test_pm_forbids_kx(self):
        with pytest.raises(InvalidSpec):
            TestSignalSpec(test=TestKind.PM, k_x=0.1, k_a=0.1, f_mod=0.1,
                           duration_s=1.0)

    def test_fr_sign_convention(self):
        with pytest.raises(InvalidSpec):
            TestSignalSpec(test=TestKind.FR_UP, r_f=-0.03, duration_s=1.0)
        with pytest.raises(InvalidSpec):
            TestSignalSpec(test=TestKind.FR_DOWN, r_f=0.03, duration_s=1.0)

    def test_fractional_reports(self):
        with pytest.raises(InvalidSpec):
            TestSignalSpec.steady(duration_s=1.017)


class TestSynthesize:
    def test_steady_phase_a_t0(self):
        spec = TestSignalSpec.steady(duration_s=1.0)
        wave = synthesize_waveform(spec, PhaseId.A)
        assert wave.samples[0] == 1.0

    def test_steady_phase_b_t0(self):
        spec = TestSignalSpec.steady(duration_s=1.0)
        wave = synthesize_waveform(spec, PhaseId.B)
        assert wave.samples[0] == pytest.approx(-0.5, abs=1e-12)

    def test_steady_rms_one_cycle_quadrature(self):
        # independent oracle: numerical integration of the closed form over
        # exactly one carrier period
        spec = TestSignalSpec.steady(duration_s=1.0)
        period = 1.0 / spec.f0
        mean_sq, _ = quad(
            lambda t: (envelope(spec, t) * np.cos(carrier_phase(spec, t))) ** 2,
            0.0, period, limit=200,
        )
        assert np.sqrt(mean_sq / period) == pytest.approx(1.0 / SQRT2, abs=1e-9)

    def test_length_matches_duration(self):
        spec = TestSignalSpec.am(duration_s=2.0)
        wave = synthesize_waveform(spec)
        assert len(wave.samples) == 2 * 960

    def test_three_phase_sum_zero_steady(self):
        spec = TestSignalSpec.steady(duration_s=1.0)
        total = sum(synthesize_waveform(spec, p).samples for p in PhaseId)
        assert np.max(np.abs(total)) < 1e-12


class TestTruePhasor:
    def test_pm_n0(self):
        spec = TestSignalSpec.pm(k_a=0.1, duration_s=1.0)
        p = true_phasor_at(spec, 0)
        assert p.magnitude == pytest.approx(1.0 / SQRT2, abs=1e-12)
        assert p.angle_deg == pytest.approx(np.degrees(-0.1), abs=1e-9)
        assert p.angle_deg == pytest.approx(-5.72958, abs=1e-5)

    def test_am_n0(self):
        spec = TestSignalSpec.am(k_x=0.1, duration_s=1.0)
        p = true_phasor_at(spec, 0)
        assert p.magnitude == pytest.approx(1.1 / SQRT2, abs=1e-12)
        assert p.magnitude == pytest.approx(0.777817, abs=1e-6)
        assert p.angle_deg == 0.0

    def test_fr_one_second(self):
        spec = TestSignalSpec.fr_up(r_f=0.03, duration_s=2.0)
        p = true_phasor_at(spec, 30)
        assert p.t == pytest.approx(1.0)
        assert p.angle_deg == pytest.approx(np.degrees(np.pi * 0.03), abs=1e-9)
        assert p.angle_deg == pytest.approx(5.4, abs=1e-9)

    def test_index_out_of_range(self):
        spec = TestSignalSpec.steady(duration_s=1.0)
        with pytest.raises(IndexOutOfRange):
            true_phasor_at(spec, 30)
        with pytest.raises(IndexOutOfRange):
            true_phasor_at(spec, -1)


class TestTruePhasorSeries:
    def test_default_campaign_length(self):
        spec = TestSignalSpec.pm(duration_s=600.0)
        assert len(true_phasor_series(spec)) == 18_000

    def test_short_series_indexing(self):
        spec = TestSignalSpec.steady(duration_s=1.0)
        series = true_phasor_series(spec)
        assert len(series) == 30
        assert series[0].n == 0 and series[0].t == 0.0

    def test_steady_constant_magnitude(self):
        spec = TestSignalSpec.steady(duration_s=2.0)
        series = true_phasor_series(spec)
        assert np.all(series.magnitude == 1.0 / SQRT2)

    def test_matches_scalar_evaluation(self):
        spec = TestSignalSpec.am(duration_s=1.0)
        series = true_phasor_series(spec)
        for n in (0, 7, 29):
            p = true_phasor_at(spec, n)
            assert series[n].magnitude == pytest.approx(p.magnitude, abs=1e-15)
            assert series[n].angle_deg == pytest.approx(p.angle_deg, abs=1e-12)


class TestInvariants:
    def test_am_magnitude_bounds(self):
        spec = TestSignalSpec.am(k_x=0.1, duration_s=10.0)
        series = true_phasor_series(spec)
        lo = (1 - 0.1) / SQRT2 - 1e-12
        hi = (1 + 0.1) / SQRT2 + 1e-12
        assert np.all((series.magnitude >= lo) & (series.magnitude <= hi))

    def test_pm_angle_bounds(self):
        spec = TestSignalSpec.pm(k_a=0.1, duration_s=10.0)
        series = true_phasor_series(spec)
        assert np.all(np.abs(np.radians(series.angle_deg)) <= 0.1 + 1e-12)

    def test_fr_angle_matches_integrated_frequency(self):
        # 2*pi * integral of R_f*tau dtau, brute-force quadrature
        spec = TestSignalSpec.fr_up(r_f=0.03, duration_s=10.0)
        rng = np.random.default_rng(7)
        for n in rng.integers(0, spec.n_reports, size=20):
            t = n / spec.report_rate
            expected, _ = quad(lambda tau: 2 * np.pi * spec.r_f * tau, 0, t)
            got = np.radians(true_phasor_at(spec, int(n)).angle_deg)
            diff = (got - expected + np.pi) % (2 * np.pi) - np.pi
            assert abs(diff) < 1e-9

    def test_envelope_consistent_with_truth(self):
        # demodulated analytic envelope at t = nT reproduces the true
        # magnitude within 1e-12
        spec = TestSignalSpec.am(k_x=0.1, duration_s=2.0)
        series = true_phasor_series(spec)
        env = envelope(spec, series.t) / SQRT2
        assert np.max(np.abs(env - series.magnitude)) < 1e-12


class TestWrapDegrees:
    @given(st.floats(min_value=-1e6, max_value=1e6))
    def test_range(self, angle):
        w = wrap_degrees(angle)
        assert -180.0 < w <= 180.0

    @given(st.floats(min_value=-1e3, max_value=1e3))
    def test_period_360(self, angle):
        assert wrap_degrees(angle + 360.0) == pytest.approx(
            wrap_degrees(angle), abs=1e-9)

    def test_boundary(self):
        assert wrap_degrees(180.0) == 180.0
        assert wrap_degrees(-180.0) == 180.0
        assert wrap_degrees(540.0) == 180.0

"""Run the windowed-DFT reference estimator and inject device-style errors.

Estimates phasors from a synthesized three-phase PM signal with the
M-class profile (6-cycle Hann window), compares against the analytic
truth, then perturbs the measurement with a composite noise model (bias
plus Gaussian jitter) and shows how the error statistics respond.
"""

import numpy as np

from synchrocal import (
    ErrorChannel,
    EstimatorProfile,
    NoiseKind,
    NoiseModel,
    PhaseId,
    TestSignalSpec,
    build_error_series,
    inject_errors,
    run_estimator,
    true_phasor_series,
)
from synchrocal.metrics import positive_sequence_series
from synchrocal.signals import synthesize_three_phase


def main():
    spec = TestSignalSpec.pm(k_a=0.1, f_mod=0.1, duration_s=20.0)
    profile = EstimatorProfile("M")

    waves = synthesize_three_phase(spec)
    phases = run_estimator(waves, profile, spec.report_rate)
    measured = positive_sequence_series(
        phases[PhaseId.A], phases[PhaseId.B], phases[PhaseId.C])
    truth = true_phasor_series(spec)

    keep = measured.valid
    pe = build_error_series(truth[keep], measured[keep], ErrorChannel.PE)
    print(f"M-class estimator on PM signal, {int(keep.sum())} valid reports")
    print(f"  estimation-only |PE|: max {np.max(np.abs(pe.values)):.3e} deg")

    noise = NoiseModel(kind=NoiseKind.COMPOSITE, children=(
        NoiseModel(kind=NoiseKind.BIAS, bias_angle_deg=0.36),
        NoiseModel(kind=NoiseKind.GAUSSIAN, sigma_angle_deg=0.008),
    ))
    noisy = inject_errors(measured, noise, seed=1)
    pe = build_error_series(truth[keep], noisy[keep], ErrorChannel.PE)
    print("after injecting 0.36 deg bias + 0.008 deg jitter:")
    print(f"  PE mean = {np.mean(pe.values):+.5f} deg "
          f"(true minus measured, so the bias appears negated)")
    print(f"  PE std  = {np.std(pe.values, ddof=1):.5f} deg")


if __name__ == "__main__":
    main()

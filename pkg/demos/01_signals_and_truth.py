"""Synthesize the dynamic test signals and inspect their exact truth phasors.

Walks through the four standard test conditions (steady state, amplitude
modulation, phase modulation, frequency ramp), prints the closed-form
phasor at a few reporting instants, and verifies the angle of the ramp
test grows quadratically as pi * R_f * t^2.
"""

import numpy as np

from synchrocal import TestSignalSpec, true_phasor_series

SPECS = {
    "STEADY": TestSignalSpec.steady(duration_s=2.0),
    "AM": TestSignalSpec.am(k_x=0.1, f_mod=0.1, duration_s=2.0),
    "PM": TestSignalSpec.pm(k_a=0.1, f_mod=0.1, duration_s=2.0),
    "FR": TestSignalSpec.fr_up(r_f=0.03, duration_s=2.0),
}


def main():
    for label, spec in SPECS.items():
        truth = true_phasor_series(spec)
        print(f"\n{label}: {len(truth)} reports at {spec.report_rate} fps")
        for i in (0, len(truth) // 2, len(truth) - 1):
            p = truth[i]
            print(f"  n={p.n:3d} t={p.t:6.3f}s "
                  f"|X|={p.magnitude:.6f} pu  angle={p.angle_deg:+.6f} deg")

    # the FR angle is quadratic in time: pi * R_f * t^2 (radians)
    spec = SPECS["FR"]
    truth = true_phasor_series(spec)
    expected = np.degrees(np.pi * spec.r_f * truth.t**2)
    worst = np.max(np.abs(truth.angle_deg - expected))
    print(f"\nFR angle vs pi*R_f*t^2: max |diff| = {worst:.3e} deg")


if __name__ == "__main__":
    main()

"""Error measures between true and measured phasors.

Sign convention is true-minus-measured for both channels: relative magnitude
error (RME) is 100*(X_true - X_meas)/X_true in percent, and phase angle
error (PE) is (angle_true - angle_meas) wrapped to (-180, 180] in degrees.
Some tools use the opposite sign; this one does not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import TimestampMismatch, ZeroTruth
from .signals import PhasorSeries, TimeTaggedPhasor, wrap_degrees

ALPHA = np.exp(1j * 2.0 * np.pi / 3.0)  # 1 /_ 120 deg
ZERO_TRUTH_FLOOR = 1e-12


class ErrorChannel(str, Enum):
    RME = "RME"
    PE = "PE"


@dataclass
class ErrorSeries:
    """Per-report errors for one channel, with provenance metadata."""

    test_id: str
    channel: ErrorChannel
    n: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.channel = ErrorChannel(self.channel)
        self.n = np.asarray(self.n, dtype=int)
        self.values = np.asarray(self.values, dtype=float)
        if len(self.n) != len(self.values):
            raise TimestampMismatch("index and value lengths differ")
        if len(self.n) > 1 and not np.all(np.diff(self.n) > 0):
            raise TimestampMismatch("report indices must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("error series contains non-finite values")

    def __len__(self) -> int:
        return len(self.values)


def positive_sequence(a: TimeTaggedPhasor, b: TimeTaggedPhasor,
                      c: TimeTaggedPhasor) -> TimeTaggedPhasor:
    """Symmetrical-components positive sequence (Xa + a*Xb + a^2*Xc)/3."""
    if not (a.n == b.n == c.n):
        raise TimestampMismatch(f"report indices differ: {a.n}, {b.n}, {c.n}")
    x1 = (a.as_complex() + ALPHA * b.as_complex() + ALPHA**2 * c.as_complex()) / 3.0
    return TimeTaggedPhasor(
        n=a.n, t=a.t, magnitude=float(np.abs(x1)),
        angle_deg=wrap_degrees(float(np.degrees(np.angle(x1)))),
        valid=a.valid and b.valid and c.valid,
    )


def positive_sequence_series(a: PhasorSeries, b: PhasorSeries,
                             c: PhasorSeries) -> PhasorSeries:
    if not (np.array_equal(a.n, b.n) and np.array_equal(a.n, c.n)):
        raise TimestampMismatch("series report indices differ")
    x1 = (a.as_complex() + ALPHA * b.as_complex() + ALPHA**2 * c.as_complex()) / 3.0
    return PhasorSeries(
        n=a.n, t=a.t, magnitude=np.abs(x1),
        angle_deg=wrap_degrees(np.degrees(np.angle(x1))),
        valid=a.valid & b.valid & c.valid,
    )


def rme(true: TimeTaggedPhasor, meas: TimeTaggedPhasor) -> float:
    """Relative magnitude error in percent, true-minus-measured over true."""
    if true.magnitude <= ZERO_TRUTH_FLOOR:
        raise ZeroTruth(f"true magnitude {true.magnitude} below floor")
    return 100.0 * (true.magnitude - meas.magnitude) / true.magnitude


def phase_error(true: TimeTaggedPhasor, meas: TimeTaggedPhasor) -> float:
    """Phase angle error in degrees, wrapped to (-180, 180]."""
    return wrap_degrees(true.angle_deg - meas.angle_deg)


def tve(true: TimeTaggedPhasor, meas: TimeTaggedPhasor) -> float:
    """Total vector error in percent: normalized complex distance."""
    if true.magnitude <= ZERO_TRUTH_FLOOR:
        raise ZeroTruth(f"true magnitude {true.magnitude} below floor")
    return 100.0 * abs(meas.as_complex() - true.as_complex()) / true.magnitude


def build_error_series(true_seq: PhasorSeries, meas_seq: PhasorSeries,
                       channel: ErrorChannel, test_id: str = "",
                       meta: dict = None) -> ErrorSeries:
    """Elementwise RME or PE over the valid, index-aligned reports."""
    channel = ErrorChannel(channel)
    if not np.array_equal(true_seq.n, meas_seq.n):
        raise TimestampMismatch("true and measured series indices differ")
    keep = true_seq.valid & meas_seq.valid
    t_mag = true_seq.magnitude[keep]
    if channel == ErrorChannel.RME:
        if np.any(t_mag <= ZERO_TRUTH_FLOOR):
            raise ZeroTruth("true magnitude below floor in series")
        values = 100.0 * (t_mag - meas_seq.magnitude[keep]) / t_mag
    else:
        values = wrap_degrees(true_seq.angle_deg[keep] - meas_seq.angle_deg[keep])
    return ErrorSeries(test_id=test_id, channel=channel,
                       n=true_seq.n[keep], values=values, meta=meta or {})

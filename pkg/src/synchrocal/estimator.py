"""Simulated device-under-test: windowed phasor estimation and error injection.

The reference estimator is a single-bin discrete Fourier correlation at the
nominal frequency with class-specific window weights.  It stands in for the
proprietary filters of real devices: the P profile uses a short triangular
window (fast, less accurate), the M profile a long Hann window (slow, more
accurate), and IDEAL bypasses filtering entirely and returns the analytic
truth.

Noise models perturb the reported phasors directly: magnitude
multiplicatively via a relative-error draw, angle additively in degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidModel, RateMismatch, WindowSizeMismatch
from .signals import (
    PHASE_OFFSETS,
    SQRT2,
    TWO_PI,
    PhaseId,
    PhasorSeries,
    TestSignalSpec,
    TimeTaggedPhasor,
    Waveform,
    true_phasor_series,
    wrap_degrees,
)


class EstimatorClass(str, Enum):
    P = "P"
    M = "M"
    IDEAL = "IDEAL"


class WindowShape(str, Enum):
    RECTANGULAR = "RECTANGULAR"
    TRIANGULAR = "TRIANGULAR"
    HANN = "HANN"


_CLASS_DEFAULTS = {
    EstimatorClass.P: (2, WindowShape.TRIANGULAR),
    EstimatorClass.M: (6, WindowShape.HANN),
    EstimatorClass.IDEAL: (1, WindowShape.RECTANGULAR),
}


@dataclass(frozen=True)
class EstimatorProfile:
    """Window configuration of the reference estimator."""

    pmu_class: EstimatorClass
    window_cycles: float = None
    window_shape: WindowShape = None

    def __post_init__(self):
        cls = EstimatorClass(self.pmu_class)
        object.__setattr__(self, "pmu_class", cls)
        cycles, shape = _CLASS_DEFAULTS[cls]
        if self.window_cycles is None:
            object.__setattr__(self, "window_cycles", cycles)
        if self.window_shape is None:
            object.__setattr__(self, "window_shape", shape)
        else:
            object.__setattr__(self, "window_shape", WindowShape(self.window_shape))
        if self.window_cycles <= 0:
            raise InvalidModel("window_cycles must be positive")

    @property
    def ideal(self) -> bool:
        return self.pmu_class == EstimatorClass.IDEAL

    def window_length(self, sample_rate: float, f0: float) -> int:
        """Number of samples in the correlation window."""
        n = self.window_cycles * sample_rate / f0
        if abs(n - round(n)) > 1e-9:
            raise InvalidModel(
                f"window_cycles*(sample_rate/f0) = {n} is not an integer "
                "number of samples"
            )
        n = round(n)
        # Symmetric tapers get the extra center-aligned endpoint sample.
        if self.window_shape == WindowShape.RECTANGULAR:
            return n
        return n + 1

    def window_weights(self, sample_rate: float, f0: float) -> np.ndarray:
        m = self.window_length(sample_rate, f0)
        if self.window_shape == WindowShape.RECTANGULAR:
            return np.ones(m)
        if self.window_shape == WindowShape.TRIANGULAR:
            return np.bartlett(m)
        return np.hanning(m)

    def window_offsets(self, sample_rate: float, f0: float) -> np.ndarray:
        """Sample-index offsets of the window relative to the report sample."""
        n = round(self.window_cycles * sample_rate / f0)
        half = n // 2
        if self.window_shape == WindowShape.RECTANGULAR:
            return np.arange(n) - half
        return np.arange(n + 1) - half


def estimate_phasor(window: np.ndarray, profile: EstimatorProfile,
                    t_tag: float, sample_rate: float, f0: float,
                    n: int = 0) -> TimeTaggedPhasor:
    """Estimate one phasor from a window of samples centered on t_tag.

    The angle is referenced to cos(2*pi*f0*t) at absolute time, matching the
    truth convention.  An all-zero window returns the degenerate phasor
    (0, 0 deg).
    """
    window = np.asarray(window, dtype=float)
    expected = profile.window_length(sample_rate, f0)
    if len(window) != expected:
        raise WindowSizeMismatch(
            f"window has {len(window)} samples, profile expects {expected}"
        )
    weights = profile.window_weights(sample_rate, f0)
    offsets = profile.window_offsets(sample_rate, f0)
    times = t_tag + offsets / sample_rate
    corr = np.sum(weights * window * np.exp(-1j * TWO_PI * f0 * times))
    wsum = np.sum(weights)
    if abs(corr) == 0.0:
        return TimeTaggedPhasor(n=n, t=t_tag, magnitude=0.0, angle_deg=0.0,
                                degenerate=True)
    peak = 2.0 * corr / wsum
    return TimeTaggedPhasor(
        n=n, t=t_tag,
        magnitude=float(np.abs(peak)) / SQRT2,
        angle_deg=wrap_degrees(float(np.degrees(np.angle(peak)))),
    )


def _estimate_series(wave: Waveform, profile: EstimatorProfile,
                     report_rate: int) -> PhasorSeries:
    """Vectorized sliding-window estimation over all reporting instants."""
    spec = wave.spec
    fs = wave.sample_rate
    f0 = spec.f0
    stride = fs // report_rate
    weights = profile.window_weights(fs, f0)
    offsets = profile.window_offsets(fs, f0)
    m = len(weights)

    n = np.arange(spec.n_reports)
    centers = n * stride
    t = n / report_rate
    first = centers + offsets[0]
    last = centers + offsets[-1]
    valid = (first >= 0) & (last < len(wave.samples))

    mag = np.zeros(len(n))
    ang = np.zeros(len(n))
    if np.any(valid):
        starts = first[valid]
        windows = np.lib.stride_tricks.sliding_window_view(wave.samples, m)[starts]
        # exp(-j*w0*(t_center + tau)) factors into a per-window rotation and
        # a fixed per-offset vector, so the correlation is one matvec.
        kernel = weights * np.exp(-1j * TWO_PI * f0 * offsets / fs)
        corr = (windows @ kernel) * np.exp(-1j * TWO_PI * f0 * t[valid])
        peak = 2.0 * corr / np.sum(weights)
        mag[valid] = np.abs(peak) / SQRT2
        ang[valid] = wrap_degrees(np.degrees(np.angle(peak)))
    return PhasorSeries(n=n, t=t, magnitude=mag, angle_deg=ang, valid=valid)


def run_estimator(waveforms: dict, profile: EstimatorProfile,
                  report_rate: int) -> dict:
    """Per-phase phasor estimates at every reporting instant.

    Edge reports whose window would run past the signal are flagged invalid.
    IDEAL bypasses estimation and returns the analytic truth per phase (with
    the -120/+120 degree carrier offsets for phases B and C).
    """
    specs = {p: w.spec for p, w in waveforms.items()}
    rates = {w.sample_rate for w in waveforms.values()}
    if len(rates) != 1:
        raise RateMismatch(f"inconsistent sample rates: {sorted(rates)}")
    fs = rates.pop()
    if fs % report_rate != 0:
        raise RateMismatch(
            f"report_rate {report_rate} does not divide sample_rate {fs}"
        )

    out = {}
    for phase, wave in waveforms.items():
        phase = PhaseId(phase)
        if profile.ideal:
            truth = true_phasor_series(specs[phase])
            shift = np.degrees(PHASE_OFFSETS[phase])
            out[phase] = PhasorSeries(
                n=truth.n, t=truth.t, magnitude=truth.magnitude,
                angle_deg=wrap_degrees(truth.angle_deg + shift),
                valid=truth.valid,
            )
        else:
            out[phase] = _estimate_series(wave, profile, report_rate)
    return out


def ideal_series(spec: TestSignalSpec) -> dict:
    """IDEAL per-phase output without synthesizing any waveform."""
    truth = true_phasor_series(spec)
    out = {}
    for phase in PhaseId:
        shift = np.degrees(PHASE_OFFSETS[phase])
        out[phase] = PhasorSeries(
            n=truth.n, t=truth.t, magnitude=truth.magnitude,
            angle_deg=wrap_degrees(truth.angle_deg + shift), valid=truth.valid,
        )
    return out


# -- noise injection ----------------------------------------------------------

class NoiseKind(str, Enum):
    NONE = "NONE"
    BIAS = "BIAS"
    GAUSSIAN = "GAUSSIAN"
    GMM = "GMM"
    QUANTIZE = "QUANTIZE"
    COMPOSITE = "COMPOSITE"


@dataclass(frozen=True)
class NoiseModel:
    """Phasor-level error model emulating observed device behaviors.

    GMM components are (weight, mean, std) triples per channel; QUANTIZE
    rounds the accumulated would-be error to the nearest multiple of the
    quantum, reproducing discrete error binning.
    """

    kind: NoiseKind = NoiseKind.NONE
    bias_mag_rel: float = 0.0
    bias_angle_deg: float = 0.0
    sigma_mag_rel: float = 0.0
    sigma_angle_deg: float = 0.0
    gmm_mag_rel: tuple = None      # ((weight, mean, std), ...)
    gmm_angle_deg: tuple = None
    quantum_mag_rel: float = 0.0
    quantum_angle_deg: float = 0.0
    children: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.sigma_mag_rel < 0 or self.sigma_angle_deg < 0:
            raise InvalidModel("sigmas must be >= 0")
        for attr in ("gmm_mag_rel", "gmm_angle_deg"):
            comps = getattr(self, attr)
            if comps is not None:
                comps = tuple(tuple(c) for c in comps)
                object.__setattr__(self, attr, comps)
                weights = [c[0] for c in comps]
                if any(w <= 0 for w in weights):
                    raise InvalidModel("GMM weights must be positive")
                if abs(sum(weights) - 1.0) > 1e-12:
                    raise InvalidModel("GMM weights must sum to 1")
                if any(c[2] < 0 for c in comps):
                    raise InvalidModel("GMM stds must be >= 0")
        if self.kind == NoiseKind.GMM and self.gmm_mag_rel is None \
                and self.gmm_angle_deg is None:
            raise InvalidModel("GMM model needs components for at least one channel")
        if self.kind == NoiseKind.QUANTIZE and self.quantum_mag_rel <= 0 \
                and self.quantum_angle_deg <= 0:
            raise InvalidModel("QUANTIZE model needs a positive quantum")
        if self.kind == NoiseKind.COMPOSITE and not self.children:
            raise InvalidModel("COMPOSITE model needs children")
        object.__setattr__(self, "children", tuple(self.children))


def _gmm_draw(components, size, rng) -> np.ndarray:
    weights = np.array([c[0] for c in components])
    means = np.array([c[1] for c in components])
    stds = np.array([c[2] for c in components])
    which = rng.choice(len(components), size=size, p=weights)
    return means[which] + stds[which] * rng.standard_normal(size)


def _apply_model(model: NoiseModel, mag_err: np.ndarray, ang_err: np.ndarray,
                 rng: np.random.Generator):
    kind = model.kind
    if kind == NoiseKind.NONE:
        return mag_err, ang_err
    if kind == NoiseKind.BIAS:
        return mag_err + model.bias_mag_rel, ang_err + model.bias_angle_deg
    if kind == NoiseKind.GAUSSIAN:
        size = len(mag_err)
        return (mag_err + model.sigma_mag_rel * rng.standard_normal(size),
                ang_err + model.sigma_angle_deg * rng.standard_normal(size))
    if kind == NoiseKind.GMM:
        size = len(mag_err)
        if model.gmm_mag_rel is not None:
            mag_err = mag_err + _gmm_draw(model.gmm_mag_rel, size, rng)
        if model.gmm_angle_deg is not None:
            ang_err = ang_err + _gmm_draw(model.gmm_angle_deg, size, rng)
        return mag_err, ang_err
    if kind == NoiseKind.QUANTIZE:
        if model.quantum_mag_rel > 0:
            mag_err = np.round(mag_err / model.quantum_mag_rel) * model.quantum_mag_rel
        if model.quantum_angle_deg > 0:
            ang_err = np.round(ang_err / model.quantum_angle_deg) * model.quantum_angle_deg
        return mag_err, ang_err
    # COMPOSITE: children in order
    for child in model.children:
        mag_err, ang_err = _apply_model(child, mag_err, ang_err, rng)
    return mag_err, ang_err


def inject_errors(series: PhasorSeries, model: NoiseModel,
                  seed: int) -> PhasorSeries:
    """Perturb a phasor series per the noise model, deterministically in seed."""
    rng = np.random.default_rng(seed)
    mag_err = np.zeros(len(series))
    ang_err = np.zeros(len(series))
    mag_err, ang_err = _apply_model(model, mag_err, ang_err, rng)
    return PhasorSeries(
        n=series.n, t=series.t,
        magnitude=series.magnitude * (1.0 + mag_err),
        angle_deg=wrap_degrees(series.angle_deg + ang_err),
        valid=series.valid,
    )

"""Dynamic test waveforms and their exact ground-truth phasors.

Three-phase test signals for the standard dynamic compliance tests
(amplitude modulation, phase modulation, frequency ramp) together with the
closed-form phasor that an ideal measurement device would report at each
reporting instant.  Magnitudes are RMS per-unit; angles are degrees wrapped
to (-180, 180] at API boundaries and radians internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import IndexOutOfRange, InvalidSpec

TWO_PI = 2.0 * np.pi
SQRT2 = np.sqrt(2.0)


class PmuClass(str, Enum):
    P = "P"
    M = "M"


class TestKind(str, Enum):
    AM = "AM"
    PM = "PM"
    FR_UP = "FR_UP"
    FR_DOWN = "FR_DOWN"
    STEADY = "STEADY"


class PhaseId(str, Enum):
    A = "A"
    B = "B"
    C = "C"


# Carrier-argument offsets: B lags A and C leads A by 2*pi/3.
PHASE_OFFSETS = {
    PhaseId.A: 0.0,
    PhaseId.B: -TWO_PI / 3.0,
    PhaseId.C: +TWO_PI / 3.0,
}


def wrap_degrees(angle_deg):
    """Wrap angle(s) in degrees to the global convention (-180, 180].

    Values already in range pass through unchanged, so wrapping never
    costs precision (and never flips the sign of zero).
    """
    wrapped = np.mod(angle_deg, 360.0)
    wrapped = np.where(wrapped > 180.0, wrapped - 360.0, wrapped)
    in_range = (np.asarray(angle_deg) > -180.0) & (np.asarray(angle_deg) <= 180.0)
    wrapped = np.where(in_range, angle_deg, wrapped)
    if np.ndim(angle_deg) == 0:
        return float(wrapped)
    return wrapped


@dataclass(frozen=True)
class TestSignalSpec:
    """Full parameterization of one dynamic test."""

    test: TestKind
    pmu_class: PmuClass = PmuClass.M
    x_m: float = 1.0              # peak amplitude, per-unit
    f0: float = 60.0              # nominal frequency, Hz
    k_x: float = 0.0              # amplitude modulation factor
    k_a: float = 0.0              # phase modulation factor, radians
    f_mod: float = 0.0            # modulation frequency, Hz
    r_f: float = 0.0              # ramp rate, Hz/s, signed
    duration_s: float = 600.0
    report_rate: int = 30         # frames/s
    sample_rate: int = 960        # waveform samples/s
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "test", TestKind(self.test))
        object.__setattr__(self, "pmu_class", PmuClass(self.pmu_class))
        if self.x_m <= 0:
            raise InvalidSpec(f"x_m must be positive, got {self.x_m}")
        if self.f0 <= 0:
            raise InvalidSpec(f"f0 must be positive, got {self.f0}")
        if self.sample_rate < 8 * self.f0:
            raise InvalidSpec(
                f"sample_rate {self.sample_rate} below 8*f0 = {8 * self.f0}"
            )
        if self.report_rate <= 0 or self.sample_rate % self.report_rate != 0:
            raise InvalidSpec(
                f"report_rate {self.report_rate} must divide sample_rate "
                f"{self.sample_rate} evenly"
            )
        n_reports = self.duration_s * self.report_rate
        if abs(n_reports - round(n_reports)) > 1e-9 or n_reports < 1:
            raise InvalidSpec(
                f"duration_s*report_rate = {n_reports} is not a whole number "
                "of reporting instants"
            )
        self._check_test_params()

    def _check_test_params(self):
        t = self.test
        if t == TestKind.AM:
            if self.k_a != 0 or self.k_x <= 0:
                raise InvalidSpec("AM test requires k_a = 0 and k_x > 0")
            if self.f_mod <= 0:
                raise InvalidSpec("AM test requires f_mod > 0")
            if self.r_f != 0:
                raise InvalidSpec("AM test requires r_f = 0")
        elif t == TestKind.PM:
            if self.k_x != 0 or self.k_a <= 0:
                raise InvalidSpec("PM test requires k_x = 0 and k_a > 0")
            if self.f_mod <= 0:
                raise InvalidSpec("PM test requires f_mod > 0")
            if self.r_f != 0:
                raise InvalidSpec("PM test requires r_f = 0")
        elif t in (TestKind.FR_UP, TestKind.FR_DOWN):
            if self.k_x != 0 or self.k_a != 0 or self.f_mod != 0:
                raise InvalidSpec("FR tests require k_x = k_a = f_mod = 0")
            if t == TestKind.FR_UP and self.r_f <= 0:
                raise InvalidSpec("FR_UP requires r_f > 0")
            if t == TestKind.FR_DOWN and self.r_f >= 0:
                raise InvalidSpec("FR_DOWN requires r_f < 0")
        else:  # STEADY
            if self.k_x != 0 or self.k_a != 0 or self.f_mod != 0 or self.r_f != 0:
                raise InvalidSpec("STEADY test requires all modulation parameters zero")

    # -- convenience constructors with conventional defaults -----------------

    @classmethod
    def steady(cls, **kw) -> "TestSignalSpec":
        return cls(test=TestKind.STEADY, **kw)

    @classmethod
    def am(cls, k_x: float = 0.1, f_mod: float = 0.1, **kw) -> "TestSignalSpec":
        return cls(test=TestKind.AM, k_x=k_x, f_mod=f_mod, **kw)

    @classmethod
    def pm(cls, k_a: float = 0.1, f_mod: float = 0.1, **kw) -> "TestSignalSpec":
        return cls(test=TestKind.PM, k_a=k_a, f_mod=f_mod, **kw)

    @classmethod
    def fr_up(cls, r_f: float = 0.03, **kw) -> "TestSignalSpec":
        return cls(test=TestKind.FR_UP, r_f=r_f, **kw)

    @classmethod
    def fr_down(cls, r_f: float = -0.03, **kw) -> "TestSignalSpec":
        return cls(test=TestKind.FR_DOWN, r_f=r_f, **kw)

    # -- derived quantities ---------------------------------------------------

    @property
    def omega(self) -> float:
        """Modulation angular frequency, rad/s."""
        return TWO_PI * self.f_mod

    @property
    def report_interval(self) -> float:
        return 1.0 / self.report_rate

    @property
    def n_reports(self) -> int:
        return round(self.duration_s * self.report_rate)

    @property
    def n_samples(self) -> int:
        return round(self.duration_s * self.sample_rate)


@dataclass
class Waveform:
    """Sampled instantaneous values for one phase of a test signal."""

    samples: np.ndarray
    sample_rate: int
    phase_id: PhaseId
    spec: TestSignalSpec

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if len(self.samples) != self.spec.n_samples:
            raise InvalidSpec(
                f"waveform length {len(self.samples)} != duration*sample_rate "
                f"= {self.spec.n_samples}"
            )
        if not np.all(np.isfinite(self.samples)):
            raise InvalidSpec("waveform contains non-finite samples")


@dataclass
class TimeTaggedPhasor:
    """One reporting-instant phasor: RMS magnitude and wrapped angle."""

    n: int
    t: float
    magnitude: float
    angle_deg: float
    valid: bool = True
    degenerate: bool = False

    def as_complex(self) -> complex:
        return self.magnitude * np.exp(1j * np.radians(self.angle_deg))


@dataclass
class PhasorSeries:
    """Array-backed sequence of TimeTaggedPhasor, one per reporting instant."""

    n: np.ndarray
    t: np.ndarray
    magnitude: np.ndarray
    angle_deg: np.ndarray
    valid: np.ndarray = None

    def __post_init__(self):
        self.n = np.asarray(self.n, dtype=int)
        self.t = np.asarray(self.t, dtype=float)
        self.magnitude = np.asarray(self.magnitude, dtype=float)
        self.angle_deg = np.asarray(self.angle_deg, dtype=float)
        if self.valid is None:
            self.valid = np.ones(len(self.n), dtype=bool)
        else:
            self.valid = np.asarray(self.valid, dtype=bool)

    def __len__(self) -> int:
        return len(self.n)

    def __getitem__(self, i) -> TimeTaggedPhasor:
        if isinstance(i, slice) or isinstance(i, np.ndarray):
            return PhasorSeries(self.n[i], self.t[i], self.magnitude[i],
                                self.angle_deg[i], self.valid[i])
        return TimeTaggedPhasor(
            n=int(self.n[i]), t=float(self.t[i]),
            magnitude=float(self.magnitude[i]),
            angle_deg=float(self.angle_deg[i]), valid=bool(self.valid[i]),
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def only_valid(self) -> "PhasorSeries":
        return self[self.valid]

    def as_complex(self) -> np.ndarray:
        return self.magnitude * np.exp(1j * np.radians(self.angle_deg))


# -- waveform synthesis -------------------------------------------------------

def carrier_phase(spec: TestSignalSpec, t: np.ndarray) -> np.ndarray:
    """Total carrier argument (radians) at time t for phase A."""
    w0 = TWO_PI * spec.f0
    if spec.test in (TestKind.AM, TestKind.PM):
        return w0 * t + spec.k_a * np.cos(spec.omega * t - np.pi)
    if spec.test in (TestKind.FR_UP, TestKind.FR_DOWN):
        return w0 * t + np.pi * spec.r_f * t * t
    return w0 * t


def envelope(spec: TestSignalSpec, t: np.ndarray) -> np.ndarray:
    """Instantaneous amplitude envelope (peak, per-unit) at time t."""
    if spec.test == TestKind.AM:
        return spec.x_m * (1.0 + spec.k_x * np.cos(spec.omega * t))
    return spec.x_m * np.ones_like(np.asarray(t, dtype=float))


def synthesize_waveform(spec: TestSignalSpec, phase: PhaseId = PhaseId.A) -> Waveform:
    """Evaluate the closed-form test signal on the sample grid for one phase."""
    phase = PhaseId(phase)
    t = np.arange(spec.n_samples) / spec.sample_rate
    arg = carrier_phase(spec, t) + PHASE_OFFSETS[phase]
    samples = envelope(spec, t) * np.cos(arg)
    return Waveform(samples=samples, sample_rate=spec.sample_rate,
                    phase_id=phase, spec=spec)


def synthesize_three_phase(spec: TestSignalSpec) -> dict:
    """All three phases of the test signal, keyed by PhaseId."""
    return {p: synthesize_waveform(spec, p) for p in PhaseId}


# -- ground-truth phasors -----------------------------------------------------

def _true_mag_angle(spec: TestSignalSpec, t: np.ndarray):
    """RMS magnitude and angle (radians, unwrapped) of the true phasor at t."""
    rms = spec.x_m / SQRT2
    if spec.test in (TestKind.AM, TestKind.PM):
        mag = rms * (1.0 + spec.k_x * np.cos(spec.omega * t))
        ang = spec.k_a * np.cos(spec.omega * t - np.pi)
    elif spec.test in (TestKind.FR_UP, TestKind.FR_DOWN):
        mag = rms * np.ones_like(np.asarray(t, dtype=float))
        ang = np.pi * spec.r_f * t * t
    else:
        mag = rms * np.ones_like(np.asarray(t, dtype=float))
        ang = np.zeros_like(np.asarray(t, dtype=float))
    return mag, ang


def true_phasor_at(spec: TestSignalSpec, n: int) -> TimeTaggedPhasor:
    """Exact phasor an ideal device would report at instant n."""
    if n < 0 or n >= spec.n_reports:
        raise IndexOutOfRange(
            f"report index {n} outside [0, {spec.n_reports})"
        )
    t = n * spec.report_interval
    mag, ang = _true_mag_angle(spec, t)
    return TimeTaggedPhasor(n=n, t=t, magnitude=float(mag),
                            angle_deg=wrap_degrees(np.degrees(ang)))


def true_phasor_series(spec: TestSignalSpec) -> PhasorSeries:
    """Vectorized true phasors for every reporting instant."""
    n = np.arange(spec.n_reports)
    t = n * spec.report_interval
    mag, ang = _true_mag_angle(spec, t)
    return PhasorSeries(n=n, t=t, magnitude=mag,
                        angle_deg=wrap_degrees(np.degrees(ang)))

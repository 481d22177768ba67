"""Key-value (INI) configuration files for campaigns and frame streams.

Campaign file layout::

    [signal]
    test = PM              ; AM | PM | FR_UP | FR_DOWN | STEADY
    pmu_class = M
    x_m = 1.0
    f0 = 60
    k_x = 0.0
    k_a = 0.1
    f_mod = 0.1
    r_f = 0.0
    report_rate = 30
    sample_rate = 960

    [estimator]
    pmu_class = M          ; P | M | IDEAL
    window_cycles = 6      ; optional, class default otherwise
    window_shape = HANN    ; optional

    [noise]
    kind = COMPOSITE
    children = bias, jitter

    [noise.bias]
    kind = BIAS
    bias_angle_deg = 0.36

    [noise.jitter]
    kind = GAUSSIAN
    sigma_angle_deg = 0.008

    [campaign]
    repeats = 3
    target_samples = 18000
    alpha = 0.05
    gmm_k_max = 6
    seed = 0
    out_dir = out          ; optional

Frame-stream file layout::

    [frame]
    id_code = 7734
    num_phasors = 3
    phasor_format = POLAR_FLOAT32
    scale = 1.0, 1.0, 1.0
    nominal_freq = 60
    time_base = 1000000
"""

from __future__ import annotations

import configparser

from .campaign import CampaignConfig
from .errors import InvalidSpec
from .estimator import EstimatorProfile, NoiseKind, NoiseModel
from .ingest import FrameConfig
from .signals import TestSignalSpec


def _parser(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = cp.read(path)
    if not read:
        raise InvalidSpec(f"config file not found: {path}")
    return cp


def _signal_spec(sec) -> TestSignalSpec:
    kw = {"test": sec.get("test", "STEADY").strip().upper()}
    for name in ("pmu_class",):
        if name in sec:
            kw[name] = sec[name].strip().upper()
    for name in ("x_m", "f0", "k_x", "k_a", "f_mod", "r_f", "duration_s"):
        if name in sec:
            kw[name] = float(sec[name])
    for name in ("report_rate", "sample_rate", "seed"):
        if name in sec:
            kw[name] = int(sec[name])
    return TestSignalSpec(**kw)


def _profile(sec) -> EstimatorProfile:
    kw = {"pmu_class": sec.get("pmu_class", "M").strip().upper()}
    if "window_cycles" in sec:
        kw["window_cycles"] = float(sec["window_cycles"])
    if "window_shape" in sec:
        kw["window_shape"] = sec["window_shape"].strip().upper()
    return EstimatorProfile(**kw)


def _gmm_components(raw: str) -> tuple:
    """Parse 'w:mu:sd; w:mu:sd; ...' into component triples."""
    comps = []
    for part in raw.split(";"):
        part = part.strip()
        if not part:
            continue
        w, mu, sd = (float(v) for v in part.split(":"))
        comps.append((w, mu, sd))
    return tuple(comps)


def _noise_model(cp: configparser.ConfigParser, section: str) -> NoiseModel:
    if section not in cp:
        return NoiseModel()
    sec = cp[section]
    kind = NoiseKind(sec.get("kind", "NONE").strip().upper())
    kw = {"kind": kind}
    for name in ("bias_mag_rel", "bias_angle_deg", "sigma_mag_rel",
                 "sigma_angle_deg", "quantum_mag_rel", "quantum_angle_deg"):
        if name in sec:
            kw[name] = float(sec[name])
    for name in ("gmm_mag_rel", "gmm_angle_deg"):
        if name in sec:
            kw[name] = _gmm_components(sec[name])
    if kind == NoiseKind.COMPOSITE:
        names = [c.strip() for c in sec.get("children", "").split(",") if c.strip()]
        kw["children"] = tuple(
            _noise_model(cp, f"{section}.{name}") for name in names
        )
    return NoiseModel(**kw)


def load_campaign_config(path, overrides: dict = None) -> CampaignConfig:
    """Read a campaign config file; `overrides` may replace out_dir/seed."""
    cp = _parser(path)
    if "signal" not in cp:
        raise InvalidSpec("config file needs a [signal] section")
    spec = _signal_spec(cp["signal"])
    profile = _profile(cp["estimator"]) if "estimator" in cp else EstimatorProfile("M")
    noise = _noise_model(cp, "noise")

    kw = {"spec": spec, "profile": profile, "noise": noise}
    if "campaign" in cp:
        sec = cp["campaign"]
        for name in ("repeats", "target_samples", "gmm_k_max", "seed"):
            if name in sec:
                kw[name] = int(sec[name])
        if "alpha" in sec:
            kw["alpha"] = float(sec["alpha"])
        if "out_dir" in sec:
            kw["out_dir"] = sec["out_dir"].strip()
    for name, value in (overrides or {}).items():
        if value is not None:
            kw[name] = value
    return CampaignConfig(**kw)


def load_frame_config(path) -> FrameConfig:
    cp = _parser(path)
    if "frame" not in cp:
        raise InvalidSpec("frame config file needs a [frame] section")
    sec = cp["frame"]
    kw = {
        "id_code": int(sec["id_code"]),
        "num_phasors": int(sec["num_phasors"]),
        "phasor_format": sec["phasor_format"].strip().upper(),
    }
    if "scale" in sec:
        kw["scale"] = tuple(float(s) for s in sec["scale"].split(","))
    if "nominal_freq" in sec:
        kw["nominal_freq"] = float(sec["nominal_freq"])
    if "time_base" in sec:
        kw["time_base"] = int(sec["time_base"])
    return FrameConfig(**kw)

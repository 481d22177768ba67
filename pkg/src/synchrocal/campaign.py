"""Campaign orchestration: repeat runs, consistency gate, stats, reports.

A campaign runs `repeats` independent seeded passes of
synthesize -> estimate -> inject -> metrics, each contributing an equal
share of `target_samples` reports, checks the repeats for mutual
consistency, concatenates them, and pushes both error channels (RME, PE)
through the full statistical suite.  Ingested data (calibrator CSV or a
prepared error-series file) goes through the identical back end via
`characterize_series`.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidSpec, IoFailure, TooFewRuns
from .estimator import (
    EstimatorProfile,
    NoiseModel,
    inject_errors,
    run_estimator,
)
from .metrics import (
    ErrorChannel,
    ErrorSeries,
    build_error_series,
    positive_sequence_series,
)
from .signals import (
    PhaseId,
    TestKind,
    TestSignalSpec,
    synthesize_three_phase,
    true_phasor_series,
)
from .stats import (
    GmmModel,
    Histogram,
    MomentSummary,
    NormalityResult,
    histogram,
    ks_gaussian,
    ks_two_sample,
    moments,
    select_gmm_order,
    shapiro_wilk,
)
from .svg import histogram_svg

CONSISTENCY_MIN_P = 0.001
CONSISTENCY_MIN_OVERLAP = 0.80

# Display labels used in summary rows; both ramp directions report as FR.
_TEST_LABELS = {
    TestKind.AM: "AM",
    TestKind.PM: "PM",
    TestKind.FR_UP: "FR",
    TestKind.FR_DOWN: "FR",
    TestKind.STEADY: "STEADY",
}


@dataclass(frozen=True)
class CampaignConfig:
    spec: TestSignalSpec
    profile: EstimatorProfile
    noise: NoiseModel = NoiseModel()
    repeats: int = 3
    target_samples: int = 18_000
    alpha: float = 0.05
    gmm_k_max: int = 6
    out_dir: str = None
    seed: int = 0

    def __post_init__(self):
        if self.repeats < 1:
            raise InvalidSpec("repeats must be >= 1")
        if self.target_samples % self.repeats != 0:
            raise InvalidSpec(
                f"target_samples {self.target_samples} not divisible by "
                f"repeats {self.repeats}"
            )
        if not 0.0 < self.alpha < 1.0:
            raise InvalidSpec("alpha must lie in (0, 1)")
        if self.gmm_k_max < 1:
            raise InvalidSpec("gmm_k_max must be >= 1")


@dataclass
class ChannelReport:
    channel: ErrorChannel
    status: str = "ok"              # "ok" | "degenerate"
    moments: MomentSummary = None
    shapiro: NormalityResult = None
    ks: NormalityResult = None
    gmm: GmmModel = None
    histogram: Histogram = None


@dataclass
class ConsistencyResult:
    channel: ErrorChannel
    run_i: int
    run_j: int
    d: float
    p: float
    overlap: float
    passed: bool


@dataclass
class CampaignReport:
    test_label: str
    channels: dict                   # ErrorChannel -> ChannelReport
    consistency: list = field(default_factory=list)
    consistency_pass: bool = True
    provenance: dict = field(default_factory=dict)


# -- single repeat ----------------------------------------------------------------

def _repeat_spec(config: CampaignConfig) -> TestSignalSpec:
    """Per-repeat signal spec: enough duration to yield the repeat's share of
    reports after dropping window-edge reports."""
    base = config.spec
    per_repeat = config.target_samples // config.repeats
    if config.profile.ideal:
        pad = 0
    else:
        window_s = config.profile.window_cycles / base.f0
        pad = 2 * (math.ceil(window_s * base.report_rate) + 1)
    duration = (per_repeat + pad) / base.report_rate
    return dataclasses.replace(base, duration_s=duration)


def _run_repeat(config: CampaignConfig, noise_seed: int, test_id: str) -> dict:
    """One seeded pass; returns {ErrorChannel: ErrorSeries} of exactly
    target_samples/repeats reports."""
    spec = _repeat_spec(config)
    per_repeat = config.target_samples // config.repeats

    if config.profile.ideal:
        # Bypass: the IDEAL estimator reports the analytic truth, so the
        # positive-sequence recombination (which would only add float
        # roundoff) is skipped and the zero-error chain stays exactly zero.
        measured = true_phasor_series(spec)
    else:
        waves = synthesize_three_phase(spec)
        phases = run_estimator(waves, config.profile, spec.report_rate)
        measured = positive_sequence_series(
            phases[PhaseId.A], phases[PhaseId.B], phases[PhaseId.C])
    measured = inject_errors(measured, config.noise, noise_seed)
    truth = true_phasor_series(spec)

    valid_idx = np.flatnonzero(measured.valid)
    if len(valid_idx) < per_repeat:
        raise InvalidSpec(
            f"only {len(valid_idx)} valid reports, need {per_repeat}"
        )
    keep = valid_idx[:per_repeat]
    return {
        ch: build_error_series(truth[keep], measured[keep], ch, test_id=test_id)
        for ch in ErrorChannel
    }


# -- consistency gate ---------------------------------------------------------------

def _range_overlap(a: np.ndarray, b: np.ndarray) -> float:
    lo_a, hi_a = float(np.min(a)), float(np.max(a))
    lo_b, hi_b = float(np.min(b)), float(np.max(b))
    inter = min(hi_a, hi_b) - max(lo_a, lo_b)
    if inter < 0:
        return 0.0
    denom = min(hi_a - lo_a, hi_b - lo_b)
    if denom == 0:
        return 1.0  # a point range inside (or touching) the other range
    return min(inter / denom, 1.0)


def check_consistency(runs: list) -> list:
    """Pairwise two-sample KS plus range-overlap gate between repeat runs."""
    if len(runs) < 2:
        raise TooFewRuns("consistency check needs at least two runs")
    channel = runs[0].channel
    results = []
    for i in range(len(runs)):
        for j in range(i + 1, len(runs)):
            a, b = runs[i].values, runs[j].values
            d, p = ks_two_sample(a, b)
            overlap = _range_overlap(a, b)
            passed = p >= CONSISTENCY_MIN_P and overlap >= CONSISTENCY_MIN_OVERLAP
            results.append(ConsistencyResult(channel, i, j, d, p, overlap, passed))
    return results


# -- statistical back end -------------------------------------------------------------

def characterize_series(series: ErrorSeries, alpha: float = 0.05,
                        gmm_k_max: int = 6, seed: int = 0) -> ChannelReport:
    """Full statistical suite on one error series.

    A zero-variance series gets its moments only; normality tests and the
    mixture fit are skipped with status "degenerate".
    """
    summary = moments(series.values)
    hist = histogram(series.values)
    if summary.degenerate:
        return ChannelReport(channel=series.channel, status="degenerate",
                             moments=summary, histogram=hist)
    return ChannelReport(
        channel=series.channel,
        moments=summary,
        shapiro=shapiro_wilk(series.values, alpha=alpha, seed=seed),
        ks=ks_gaussian(series.values, alpha=alpha),
        gmm=select_gmm_order(series.values, gmm_k_max, seed=seed),
        histogram=hist,
    )


# -- campaign driver ------------------------------------------------------------------

def run_campaign_series(config: CampaignConfig) -> tuple:
    """Run all repeats; return (per-repeat runs, concatenated series) per channel.

    The concatenated series is reindexed 0..target_samples-1 so that report
    indices stay strictly increasing across repeats.
    """
    test_id = config.spec.test.value
    seeds = [int(s.generate_state(1)[0])
             for s in np.random.SeedSequence(config.seed).spawn(config.repeats)]
    runs = {ch: [] for ch in ErrorChannel}
    for r in range(config.repeats):
        out = _run_repeat(config, seeds[r], f"{test_id}/repeat{r}")
        for ch in ErrorChannel:
            runs[ch].append(out[ch])
    concatenated = {}
    for ch in ErrorChannel:
        values = np.concatenate([run.values for run in runs[ch]])
        concatenated[ch] = ErrorSeries(
            test_id=test_id, channel=ch,
            n=np.arange(len(values)), values=values,
            meta={"repeats": config.repeats, "seed": config.seed},
        )
    return runs, concatenated


def run_campaign(config: CampaignConfig, out_dir: str = None) -> CampaignReport:
    """Execute a full characterization campaign and (optionally) emit files."""
    runs, concatenated = run_campaign_series(config)

    consistency = []
    if config.repeats >= 2:
        for ch in ErrorChannel:
            consistency.extend(check_consistency(runs[ch]))
    consistency_pass = all(c.passed for c in consistency)

    channels = {
        ch: characterize_series(concatenated[ch], alpha=config.alpha,
                                gmm_k_max=config.gmm_k_max, seed=config.seed)
        for ch in ErrorChannel
    }
    report = CampaignReport(
        test_label=_TEST_LABELS[config.spec.test],
        channels=channels,
        consistency=consistency,
        consistency_pass=consistency_pass,
        provenance=config_provenance(config),
    )
    target = out_dir or config.out_dir
    if target is not None:
        emit_report(report, target)
    return report


def config_provenance(config: CampaignConfig) -> dict:
    prov = dataclasses.asdict(config)
    return _jsonable(prov)


# -- report emission -------------------------------------------------------------------

def _fnum(v: float) -> str:
    """Shortest round-trip decimal form, so fixture values survive verbatim."""
    return repr(float(v))


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(_jsonable(k)): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, float) and math.isnan(obj):
        return None
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str, bool)):
        return obj.value  # enums
    return obj


def summary_rows(report: CampaignReport) -> list:
    """Rows of summary.csv: per channel, Tables-style column order."""
    rows = []
    for ch in ErrorChannel:
        cr = report.channels.get(ch)
        if cr is None or cr.moments is None:
            continue
        m = cr.moments
        skew = "" if m.degenerate else _fnum(m.skewness)
        kurt = "" if m.degenerate else _fnum(m.excess_kurtosis)
        rows.append([report.test_label, ch.value, _fnum(m.mean), _fnum(m.median),
                     _fnum(m.std_dev), skew, kurt])
    return rows


def emit_report(report: CampaignReport, out_dir) -> list:
    """Write summary.csv, per-channel histogram CSV + SVG, and report.json.

    Output is deterministic: two emissions of the same report are
    byte-identical.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    written = []

    def _write(name: str, text: str):
        path = out / name
        try:
            path.write_text(text, encoding="utf-8", newline="\n")
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        written.append(path)

    header = "test,channel,mean,median,std_dev,skewness,excess_kurtosis\n"
    lines = [",".join(row) for row in summary_rows(report)]
    _write("summary.csv", header + "\n".join(lines) + ("\n" if lines else ""))

    omitted = []
    for ch in ErrorChannel:
        cr = report.channels.get(ch)
        if cr is None or cr.histogram is None or cr.histogram.n_total == 0:
            omitted.append(ch.value)
            continue
        hist = cr.histogram
        rows = ["bin_lo,bin_hi,count"]
        for i, count in enumerate(hist.counts):
            rows.append(f"{_fnum(hist.bin_edges[i])},"
                        f"{_fnum(hist.bin_edges[i + 1])},{int(count)}")
        _write(f"histogram_{ch.value}.csv", "\n".join(rows) + "\n")
        unit = "%" if ch == ErrorChannel.RME else "deg"
        _write(f"histogram_{ch.value}.svg",
               histogram_svg(hist, title=f"{report.test_label} {ch.value}",
                             x_label=f"{ch.value} ({unit})"))

    payload = {
        "test": report.test_label,
        "channels": {ch.value: _jsonable(cr) for ch, cr in report.channels.items()},
        "consistency": [_jsonable(c) for c in report.consistency],
        "consistency_pass": report.consistency_pass,
        "omitted_plots": omitted,
        "provenance": report.provenance,
    }
    _write("report.json", json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return written

"""Virtual PMU calibration bench and measurement-error characterization."""

from .campaign import (
    CampaignConfig,
    CampaignReport,
    ChannelReport,
    characterize_series,
    check_consistency,
    emit_report,
    run_campaign,
    run_campaign_series,
)
from .config import load_campaign_config, load_frame_config
from .estimator import (
    EstimatorClass,
    EstimatorProfile,
    NoiseKind,
    NoiseModel,
    WindowShape,
    estimate_phasor,
    inject_errors,
    run_estimator,
)
from .ingest import (
    CalibratorRecord,
    DataFrame,
    FrameConfig,
    PhasorFormat,
    crc16_ccitt,
    decode_data_frame,
    encode_data_frame,
    parse_calibrator_csv,
)
from .metrics import (
    ErrorChannel,
    ErrorSeries,
    build_error_series,
    phase_error,
    positive_sequence,
    rme,
    tve,
)
from .signals import (
    PhaseId,
    PhasorSeries,
    PmuClass,
    TestKind,
    TestSignalSpec,
    TimeTaggedPhasor,
    Waveform,
    synthesize_waveform,
    true_phasor_at,
    true_phasor_series,
    wrap_degrees,
)
from .stats import (
    GmmModel,
    Histogram,
    MomentSummary,
    NormalityResult,
    fit_gmm,
    histogram,
    ks_gaussian,
    ks_two_sample,
    moments,
    select_gmm_order,
    shapiro_wilk,
)

__version__ = "0.1.0"

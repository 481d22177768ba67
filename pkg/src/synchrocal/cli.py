"""Command-line entry points.

Subcommands:
  synchrocal run    --config campaign.cfg [--out DIR] [--seed N]
  synchrocal ingest --csv FILE [--map canonical=actual ...] [--out DIR]
  synchrocal ingest --frames FILE --frame-config CFG [--out DIR]
  synchrocal stats  --errors FILE [--out DIR] [--alpha A] [--gmm-k-max K]

Exit codes: 0 success, 2 consistency failure, 1 any other error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .campaign import (
    CampaignReport,
    characterize_series,
    emit_report,
    run_campaign,
)
from .config import load_campaign_config, load_frame_config
from .errors import SynchrocalError
from .ingest import (
    calibrator_error_series,
    iter_frames,
    parse_calibrator_csv,
    read_error_series_csv,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONSISTENT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synchrocal",
        description="Virtual PMU calibration bench and error characterization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a simulation campaign")
    run_p.add_argument("--config", required=True, help="campaign config file")
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument("--seed", type=int, default=None, help="override seed")

    ing_p = sub.add_parser("ingest", help="analyze external measurement data")
    src = ing_p.add_mutually_exclusive_group(required=True)
    src.add_argument("--csv", help="calibrator test-report CSV")
    src.add_argument("--frames", help="binary frame capture file")
    ing_p.add_argument("--frame-config", help="frame stream config (with --frames)")
    ing_p.add_argument("--map", action="append", default=[],
                       metavar="CANONICAL=ACTUAL",
                       help="CSV column mapping, repeatable")
    ing_p.add_argument("--out", default="synchrocal-out", help="output directory")
    ing_p.add_argument("--alpha", type=float, default=0.05)
    ing_p.add_argument("--gmm-k-max", type=int, default=6)
    ing_p.add_argument("--seed", type=int, default=0)

    st_p = sub.add_parser("stats", help="stats-only run on an error-series CSV")
    st_p.add_argument("--errors", required=True, help="error-series CSV (n,error)")
    st_p.add_argument("--out", default="synchrocal-out", help="output directory")
    st_p.add_argument("--alpha", type=float, default=0.05)
    st_p.add_argument("--gmm-k-max", type=int, default=6)
    st_p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_run(args) -> int:
    overrides = {"out_dir": args.out, "seed": args.seed}
    config = load_campaign_config(args.config, overrides=overrides)
    report = run_campaign(config)
    for line in _report_lines(report):
        print(line)
    if not report.consistency_pass:
        print("consistency: FAIL", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK


def _report_lines(report: CampaignReport) -> list:
    lines = []
    for ch, cr in report.channels.items():
        if cr.status == "degenerate":
            lines.append(f"{report.test_label} {ch.value}: degenerate "
                         f"(all errors {cr.moments.mean!r}); tests skipped")
            continue
        m = cr.moments
        lines.append(
            f"{report.test_label} {ch.value}: mean={m.mean:.6g} "
            f"median={m.median:.6g} std={m.std_dev:.6g} "
            f"skew={m.skewness:.6g} exkurt={m.excess_kurtosis:.6g} "
            f"SW(p)={cr.shapiro.p_value:.3g} KS(p)={cr.ks.p_value:.3g} "
            f"GMM(k)={cr.gmm.k}"
        )
    return lines


def _parse_map(pairs) -> dict:
    mapping = {}
    for pair in pairs:
        if "=" not in pair:
            raise SynchrocalError(f"bad --map entry '{pair}', expected canonical=actual")
        canonical, actual = pair.split("=", 1)
        mapping[canonical.strip()] = actual.strip()
    return mapping


def _cmd_ingest(args) -> int:
    if args.csv:
        records = parse_calibrator_csv(Path(args.csv).read_bytes(),
                                       column_map=_parse_map(args.map))
        series = calibrator_error_series(records, test_id=Path(args.csv).stem)
        channels = {
            ch: characterize_series(s, alpha=args.alpha,
                                    gmm_k_max=args.gmm_k_max, seed=args.seed)
            for ch, s in series.items()
        }
        report = CampaignReport(test_label=Path(args.csv).stem, channels=channels,
                                provenance={"source": args.csv, "kind": "calibrator-csv"})
        emit_report(report, args.out)
        for line in _report_lines(report):
            print(line)
        return EXIT_OK

    if not args.frame_config:
        raise SynchrocalError("--frames requires --frame-config")
    config = load_frame_config(args.frame_config)
    data = Path(args.frames).read_bytes()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = ["frame,soc,fraction,time_quality,stat,phasor,magnitude,angle_deg"]
    count = 0
    for idx, frame in enumerate(iter_frames(data, config)):
        for p_idx, (mag, ang) in enumerate(frame.phasors):
            rows.append(f"{idx},{frame.soc},{frame.fraction},{frame.time_quality},"
                        f"{frame.stat},{p_idx},{mag!r},{ang!r}")
        count += 1
    (out / "phasors.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"decoded {count} frames -> {out / 'phasors.csv'}")
    return EXIT_OK


def _cmd_stats(args) -> int:
    series = read_error_series_csv(Path(args.errors).read_bytes())
    channel_report = characterize_series(series, alpha=args.alpha,
                                         gmm_k_max=args.gmm_k_max, seed=args.seed)
    report = CampaignReport(
        test_label=series.test_id or Path(args.errors).stem,
        channels={series.channel: channel_report},
        provenance={"source": args.errors, "kind": "error-series-csv"},
    )
    emit_report(report, args.out)
    for line in _report_lines(report):
        print(line)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "ingest":
            return _cmd_ingest(args)
        return _cmd_stats(args)
    except (SynchrocalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

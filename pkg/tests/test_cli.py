import numpy as np

from synchrocal import (
    ErrorChannel,
    FrameConfig,
    PhasorFormat,
    encode_data_frame,
)
from synchrocal.cli import EXIT_ERROR, EXIT_INCONSISTENT, EXIT_OK, main
from synchrocal.ingest import write_error_series_csv
from synchrocal.metrics import ErrorSeries

CAMPAIGN_CFG = """\
[signal]
test = PM
k_a = 0.1
f_mod = 0.1

[estimator]
pmu_class = IDEAL

[noise]
kind = GAUSSIAN
sigma_angle_deg = 0.01

[campaign]
repeats = 2
target_samples = 1000
gmm_k_max = 2
"""


class TestRunCommand:
    def test_run_writes_reports(self, tmp_path, capsys):
        cfg = tmp_path / "campaign.cfg"
        cfg.write_text(CAMPAIGN_CFG)
        out = tmp_path / "out"
        code = main(["run", "--config", str(cfg), "--out", str(out)])
        assert code == EXIT_OK
        for name in ("summary.csv", "report.json",
                     "histogram_PE.csv", "histogram_PE.svg"):
            assert (out / name).exists()
        stdout = capsys.readouterr().out
        assert "PM PE:" in stdout

    def test_run_missing_config_is_error(self, tmp_path, capsys):
        code = main(["run", "--config", str(tmp_path / "nope.cfg")])
        assert code == EXIT_ERROR
        assert "error:" in capsys.readouterr().err

    def test_run_consistency_failure_exits_2(self, tmp_path, capsys,
                                             monkeypatch):
        import synchrocal.campaign as campaign_mod

        cfg = tmp_path / "campaign.cfg"
        cfg.write_text(CAMPAIGN_CFG)
        # force the gate to fail regardless of the (healthy) data
        monkeypatch.setattr(campaign_mod, "CONSISTENCY_MIN_P", 1.1)
        code = main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert code == EXIT_INCONSISTENT
        assert "consistency: FAIL" in capsys.readouterr().err

    def test_seed_override_changes_output(self, tmp_path):
        cfg = tmp_path / "campaign.cfg"
        cfg.write_text(CAMPAIGN_CFG)
        outs = []
        for seed in (1, 2):
            out = tmp_path / f"out{seed}"
            assert main(["run", "--config", str(cfg), "--out", str(out),
                         "--seed", str(seed)]) == EXIT_OK
            outs.append((out / "summary.csv").read_text())
        assert outs[0] != outs[1]


class TestIngestCommand:
    def _calibrator_csv(self, path):
        rng = np.random.default_rng(42)
        lines = ["n,true_mag,meas_mag,true_ang_deg,meas_ang_deg"]
        for i in range(200):
            ang_err = 0.36 + 0.01 * rng.standard_normal()
            mag = 1.0 * (1.0 + 0.001 * rng.standard_normal())
            lines.append(f"{i},1.0,{mag!r},0.0,{ang_err!r}")
        path.write_text("\n".join(lines) + "\n")

    def test_ingest_csv(self, tmp_path, capsys):
        csv = tmp_path / "cal.csv"
        self._calibrator_csv(csv)
        out = tmp_path / "out"
        code = main(["ingest", "--csv", str(csv), "--out", str(out),
                     "--gmm-k-max", "2"])
        assert code == EXIT_OK
        assert (out / "summary.csv").exists()
        assert "cal" in capsys.readouterr().out

    def test_ingest_csv_with_mapping(self, tmp_path):
        csv = tmp_path / "cal.csv"
        csv.write_text("idx,TM,MM,TA,MA\n" + "\n".join(
            f"{i},1.0,{1.0 + 0.001 * (i % 7 - 3)!r},0.0,{0.01 * (i % 5 - 2)!r}"
            for i in range(100)) + "\n")
        out = tmp_path / "out"
        code = main(["ingest", "--csv", str(csv), "--out", str(out),
                     "--gmm-k-max", "2",
                     "--map", "n=idx", "--map", "true_mag=TM",
                     "--map", "meas_mag=MM", "--map", "true_ang_deg=TA",
                     "--map", "meas_ang_deg=MA"])
        assert code == EXIT_OK

    def test_ingest_bad_map_entry(self, tmp_path, capsys):
        csv = tmp_path / "cal.csv"
        self._calibrator_csv(csv)
        code = main(["ingest", "--csv", str(csv), "--map", "nonsense"])
        assert code == EXIT_ERROR

    def test_ingest_frames(self, tmp_path, capsys):
        config = FrameConfig(id_code=7734, num_phasors=2,
                             phasor_format=PhasorFormat.POLAR_FLOAT32)
        stream = b"".join(
            encode_data_frame(1_600_000_000 + i, 0, 0, 0,
                              [(1.0, 30.0 * i), (0.5, 0.0)], config)
            for i in range(4)
        )
        frames = tmp_path / "capture.bin"
        frames.write_bytes(stream)
        fc = tmp_path / "frame.cfg"
        fc.write_text("[frame]\nid_code = 7734\nnum_phasors = 2\n"
                      "phasor_format = POLAR_FLOAT32\n")
        out = tmp_path / "out"
        code = main(["ingest", "--frames", str(frames),
                     "--frame-config", str(fc), "--out", str(out)])
        assert code == EXIT_OK
        lines = (out / "phasors.csv").read_text().splitlines()
        assert lines[0].startswith("frame,soc,")
        assert len(lines) == 1 + 4 * 2
        assert "decoded 4 frames" in capsys.readouterr().out

    def test_ingest_frames_requires_frame_config(self, tmp_path, capsys):
        frames = tmp_path / "capture.bin"
        frames.write_bytes(b"")
        code = main(["ingest", "--frames", str(frames)])
        assert code == EXIT_ERROR
        assert "frame-config" in capsys.readouterr().err

    def test_ingest_corrupt_stream_is_error(self, tmp_path, capsys):
        frames = tmp_path / "capture.bin"
        frames.write_bytes(b"\xaa\x01\x00")
        fc = tmp_path / "frame.cfg"
        fc.write_text("[frame]\nid_code = 1\nnum_phasors = 1\n"
                      "phasor_format = POLAR_FLOAT32\n")
        code = main(["ingest", "--frames", str(frames),
                     "--frame-config", str(fc), "--out", str(tmp_path / "o")])
        assert code == EXIT_ERROR


class TestStatsCommand:
    def test_stats_on_error_series(self, tmp_path, capsys):
        rng = np.random.default_rng(7)
        values = 0.36 + 0.01 * rng.standard_normal(500)
        series = ErrorSeries("PM", ErrorChannel.PE, np.arange(500), values)
        errors = tmp_path / "errors.csv"
        errors.write_text(write_error_series_csv(series))
        out = tmp_path / "out"
        code = main(["stats", "--errors", str(errors), "--out", str(out),
                     "--gmm-k-max", "2"])
        assert code == EXIT_OK
        summary = (out / "summary.csv").read_text().splitlines()
        assert summary[1].startswith("PM,PE,")
        assert "GMM(k)=1" in capsys.readouterr().out

    def test_stats_missing_file(self, tmp_path, capsys):
        code = main(["stats", "--errors", str(tmp_path / "missing.csv")])
        assert code == EXIT_ERROR

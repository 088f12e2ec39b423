import csv
import json
import re

import numpy as np
import pytest

from dickesim.cli import (
    FIG2_HEADER,
    FIG2_NORM_HEADER,
    POPULATIONS_HEADER,
    SCALING_HEADER,
    TRAJECTORY_HEADER,
    main,
)


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def col(rows, header, name):
    idx = header.index(name)
    return [row[idx] for row in rows]


def fcol(rows, header, name):
    return np.array([float(v) for v in col(rows, header, name)])


class TestSimulate:
    def test_header_contract(self, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", "--n", "2", "--t-end", "1", "--samples", "20",
                     "--out", str(out)]) == 0
        header, rows = read_csv(out / "trajectory.csv")
        assert header == TRAJECTORY_HEADER
        assert ",".join(TRAJECTORY_HEADER) == (
            "gamma_t,jz_mean,jz2_mean,p_total,p_ind,p_corr,"
            "wysi_sigma_z,wysi_jx,w_xx,w_zz,lqu,lqu_minimizer"
        )
        assert len(rows) == 20

    def test_deterministic_output(self, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            main(["simulate", "--n", "8", "--samples", "60", "--out", str(out)])
            outs.append((out / "trajectory.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_single_emitter_p_corr_zero(self, tmp_path):
        out = tmp_path / "n1"
        main(["simulate", "--n", "1", "--t-end", "5", "--samples", "40",
              "--out", str(out)])
        header, rows = read_csv(out / "trajectory.csv")
        assert np.abs(fcol(rows, header, "p_corr")).max() <= 1e-12

    def test_row_identity(self, tmp_path):
        out = tmp_path / "rows"
        main(["simulate", "--n", "20", "--samples", "80", "--out", str(out)])
        header, rows = read_csv(out / "trajectory.csv")
        resid = (fcol(rows, header, "p_total") - fcol(rows, header, "p_ind")
                 - fcol(rows, header, "p_corr"))
        assert np.abs(resid).max() <= 1e-12

    def test_minimizer_pattern_n50(self, tmp_path):
        out = tmp_path / "n50"
        main(["simulate", "--n", "50", "--samples", "400", "--out", str(out)])
        header, rows = read_csv(out / "trajectory.csv")
        labels = "".join(col(rows, header, "lqu_minimizer"))
        assert re.fullmatch(r"z+x+z+", labels)

    def test_populations_flag(self, tmp_path):
        out = tmp_path / "pops"
        main(["simulate", "--n", "3", "--t-end", "2", "--samples", "15",
              "--populations", "--out", str(out)])
        header, rows = read_csv(out / "populations.csv")
        assert header == POPULATIONS_HEADER
        assert len(rows) == 15 * 4
        sums = {}
        for row in rows:
            sums[row[0]] = sums.get(row[0], 0.0) + float(row[2])
        assert all(abs(s - 1.0) <= 1e-9 for s in sums.values())

    def test_raw_file_for_scaled_units(self, tmp_path):
        out = tmp_path / "units"
        main(["simulate", "--n", "2", "--gamma", "2.0", "--omega", "3.0",
              "--t-end", "1", "--samples", "10", "--out", str(out)])
        header, rows = read_csv(out / "trajectory.csv")
        header_raw, rows_raw = read_csv(out / "trajectory_raw.csv")
        assert header == header_raw == TRAJECTORY_HEADER
        dimless = fcol(rows, header, "p_total")
        raw = fcol(rows_raw, header_raw, "p_total")
        np.testing.assert_allclose(raw, 6.0 * dimless, rtol=1e-12)


class TestFig:
    def test_fig1_outputs(self, tmp_path):
        out = tmp_path / "fig1"
        assert main(["fig", "1", "--samples", "500", "--out", str(out)]) == 0
        assert (out / "trajectory.csv").exists()
        assert (out / "populations.csv").exists()
        payload = json.loads((out / "dsc.json").read_text())
        assert payload["minimizer_sequence"] == ["z", "x", "z"]
        assert payload["t_initial"] < payload["t_final"]
        assert payload["width"] > 0

    def test_fig2_normalized_columns_only_for_n50(self, tmp_path):
        out50 = tmp_path / "fig2_50"
        main(["fig", "2", "--samples", "400", "--out", str(out50)])
        header, rows = read_csv(out50 / "fig2.csv")
        assert header == FIG2_NORM_HEADER
        p_norm = fcol(rows, header, "p_total_norm")
        p_tot = fcol(rows, header, "p_total")
        np.testing.assert_allclose(p_norm, p_tot / 500.0, rtol=1e-12)
        payload = json.loads((out50 / "extrema.json").read_text())
        assert payload["gap"] >= 0

        out40 = tmp_path / "fig2_40"
        main(["fig", "2", "--n", "40", "--samples", "400", "--out", str(out40)])
        header40, _ = read_csv(out40 / "fig2.csv")
        assert header40 == FIG2_HEADER

    def test_fig3_requires_n_list(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            main(["fig", "3", "--out", str(tmp_path / "x")])
        assert excinfo.value.code == 2

    def test_fig3_scaling_rows(self, tmp_path):
        out = tmp_path / "fig3"
        assert main(["fig", "3", "--n-list", "16,24", "--samples", "600",
                     "--out", str(out)]) == 0
        header, rows = read_csv(out / "scaling.csv")
        assert header == SCALING_HEADER
        assert [row[0] for row in rows] == ["16", "24"]
        assert not (out / "scaling_fit.json").exists()


class TestSweep:
    def test_sweep_and_fit_sidecar(self, tmp_path):
        out = tmp_path / "sweep"
        assert main(["sweep", "--n-list", "16,24,32,48", "--samples", "800",
                     "--out", str(out)]) == 0
        header, rows = read_csv(out / "scaling.csv")
        assert header == SCALING_HEADER
        assert len(rows) == 4
        widths = fcol(rows, header, "width_dsc")
        assert np.all(widths > 0)
        payload = json.loads((out / "scaling_fit.json").read_text())
        assert set(payload) == {"slope_width_dsc", "slope_gap",
                                "residual_width", "n_list"}
        assert payload["n_list"] == [16, 24, 32, 48]
        assert -1.2 < payload["slope_width_dsc"] < -0.7

    def test_usage_errors(self, tmp_path):
        for argv in (
            ["sweep", "--n-list", "16,24,32", "--out", str(tmp_path)],
            ["sweep", "--n-list", "4,16,24,32", "--out", str(tmp_path)],
            ["sweep", "--n-list", "abc", "--out", str(tmp_path)],
        ):
            with pytest.raises(SystemExit) as excinfo:
                main(argv)
            assert excinfo.value.code == 2


class TestVerify:
    def test_passes(self, capsys):
        assert main(["verify", "--samples", "101", "--max-n", "2"]) == 0
        assert "verification PASSED" in capsys.readouterr().out

    def test_corrupted_rate_fails_with_named_quantity(self, capsys, monkeypatch):
        monkeypatch.setenv("DICKESIM_CORRUPT_RATE", "1.02")
        assert main(["verify", "--samples", "101", "--max-n", "2"]) == 1
        out = capsys.readouterr().out
        assert "FAILED: " in out
        assert "populations" in out

    def test_max_n_capped(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["verify", "--max-n", "6"])
        assert excinfo.value.code == 2


class TestUsage:
    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["frobnicate"])
        assert excinfo.value.code == 2

    def test_bad_t_end(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            main(["simulate", "--t-end", "soon", "--out", str(tmp_path)])
        assert excinfo.value.code == 2

    def test_bad_samples(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            main(["simulate", "--samples", "1", "--out", str(tmp_path)])
        assert excinfo.value.code == 2

    def test_detection_failure_exit_code(self, tmp_path):
        # window far too short for the double sudden change
        assert main(["fig", "1", "--t-end", "0.01", "--samples", "50",
                     "--out", str(tmp_path / "short")]) == 1

    def test_seed_flag_accepted(self, tmp_path):
        assert main(["simulate", "--n", "2", "--t-end", "1", "--samples", "10",
                     "--seed", "7", "--out", str(tmp_path / "s")]) == 0

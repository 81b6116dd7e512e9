"""Tests for configuration parsing, experiment commands, and the CLI."""

import json
import math

import numpy as np
import pytest

from frislink.cli import main
from frislink.config import (
    ConfigError,
    db_to_linear,
    linear_to_db,
    parse_config,
    preset_config,
    PRESET_NAMES,
)
from frislink.experiments import cmd_capacity, cmd_dist, cmd_outage, cmd_sweep_m
from frislink.montecarlo import AdaptiveFrisMode, RisBaselineMode, StaticMode

MINIMAL = {"geometry": {"m_x": 2, "m_z": 2, "w_x": 1.0, "w_z": 1.0}}


def tiny_doc(**overrides):
    doc = {
        "geometry": {
            "m_x": 4,
            "m_z": 4,
            "w_x": 1.5,
            "w_z": 1.5,
            "carrier_frequency_hz": 2.4e9,
        },
        "pathloss": {"rho": 1.0, "alpha": 2.0, "d_f": 1.0, "d_u": 1.0},
        "rate_target": 1.0,
        "snr_grid_db": [0.0, 10.0],
        "modes": [{"type": "static", "select_x": 2, "select_z": 2}],
        "trials": 3000,
        "seed": 9,
    }
    doc.update(overrides)
    return doc


def parse(doc):
    return parse_config(json.dumps(doc))


class TestParseConfig:
    def test_minimal_defaults(self):
        cfg = parse(MINIMAL)
        assert cfg.kernel == "spherical"
        assert cfg.trials == 100_000
        assert cfg.seed == 42
        assert cfg.rate_target == 0.1
        assert cfg.pathloss.rho == 10.0 and cfg.pathloss.alpha == 2.1
        assert cfg.snr_grid_db[0] == 0.0 and cfg.snr_grid_db[-1] == 40.0
        # default mode: full grid, zero phases
        assert len(cfg.modes) == 1
        mode = cfg.modes[0].mode
        assert isinstance(mode, StaticMode)
        assert np.array_equal(mode.selection, np.arange(4))
        assert np.all(mode.phases == 0.0)

    def test_wavelength_from_carrier(self):
        cfg = parse(MINIMAL)
        lam = cfg.geometry.wavelength
        assert lam == pytest.approx(2.99792458e8 / 2.4e9, rel=1e-15)
        assert lam == pytest.approx(0.125, rel=1e-3)  # nominal 2.4 GHz value

    def test_snr_grid_not_increasing(self):
        with pytest.raises(ConfigError, match="snr_grid_db"):
            parse(tiny_doc(snr_grid_db=[10, 10]))
        with pytest.raises(ConfigError, match="snr_grid_db"):
            parse(tiny_doc(snr_grid_db=[20, 10]))
        with pytest.raises(ConfigError, match="snr_grid_db"):
            parse(tiny_doc(snr_grid_db=[]))

    def test_unknown_keys_listed(self):
        with pytest.raises(ConfigError, match="bogus_key"):
            parse(tiny_doc(bogus_key=1))
        doc = tiny_doc()
        doc["geometry"]["tilt"] = 3
        with pytest.raises(ConfigError, match="tilt"):
            parse(doc)

    def test_parse_error_has_line(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config("{not json")

    def test_geometry_required(self):
        with pytest.raises(ConfigError, match="geometry"):
            parse_config("{}")

    def test_mode_validation(self):
        with pytest.raises(ConfigError, match="m_o"):
            parse(tiny_doc(modes=[{"type": "adaptive_fris", "m_o": 17}]))
        with pytest.raises(ConfigError, match="type"):
            parse(tiny_doc(modes=[{"type": "warp"}]))
        with pytest.raises(ConfigError, match="phases"):
            parse(
                tiny_doc(
                    modes=[
                        {
                            "type": "static",
                            "select_x": 2,
                            "select_z": 2,
                            "phases": [0.0, 1.0, 2.0, 7.0],
                        }
                    ]
                )
            )
        with pytest.raises(ConfigError, match="phases"):
            parse(
                tiny_doc(
                    modes=[
                        {
                            "type": "static",
                            "select_x": 2,
                            "select_z": 2,
                            "phases": [0.0, 1.0],
                        }
                    ]
                )
            )

    def test_seed_and_trials_validation(self):
        with pytest.raises(ConfigError, match="trials"):
            parse(tiny_doc(trials=0))
        with pytest.raises(ConfigError, match="seed"):
            parse(tiny_doc(seed=-1))

    def test_hash_stable_and_sensitive(self):
        a = parse(tiny_doc()).config_hash
        b = parse(tiny_doc()).config_hash
        c = parse(tiny_doc(seed=10)).config_hash
        assert a == b
        assert a != c

    def test_presets_all_valid(self):
        for name in PRESET_NAMES:
            cfg = parse(preset_config(name))
            assert cfg.geometry.m == 400
        fig2 = parse(preset_config("fig2"))
        mode = fig2.modes[0].mode
        assert isinstance(mode, StaticMode) and len(mode.selection) == 144
        fig3c = parse(preset_config("fig3c"))
        assert fig3c.m_grid == ((6, 6), (10, 10), (14, 14), (20, 20))
        with pytest.raises(ConfigError):
            preset_config("fig9")


class TestDbConversion:
    def test_round_trip(self):
        for db in (-10.0, 0.0, 3.0, 17.5, 40.0):
            assert linear_to_db(db_to_linear(db)) == pytest.approx(db, abs=1e-12)

    def test_known_points(self):
        assert db_to_linear(0.0) == 1.0
        assert db_to_linear(10.0) == pytest.approx(10.0, rel=1e-14)
        with pytest.raises(ValueError):
            linear_to_db(0.0)


class TestCmdDist:
    def test_single_element_matches_exponential(self, tmp_path):
        doc = tiny_doc(
            geometry={"m_x": 1, "m_z": 1, "w_x": 1.0, "w_z": 1.0},
            modes=[{"type": "static", "select_x": 1, "select_z": 1}],
            trials=2000,
        )
        out = tmp_path / "d.csv"
        cmd_dist(parse(doc), out)
        lines = out.read_text(encoding="utf-8").splitlines()
        header = [ln for ln in lines if ln.startswith("#")]
        assert any(ln.startswith("# k=") for ln in header)
        data = [ln for ln in lines if not ln.startswith("#")]
        assert data[0] == "g,analytical_pdf,analytical_cdf,empirical_cdf"
        rows = [ln.split(",") for ln in data[1:]]
        assert len(rows) == 200
        for g, _, cdf, _ in rows:
            assert float(cdf) == pytest.approx(1.0 - math.exp(-float(g)), abs=1e-12)

    def test_deterministic_bytes(self, tmp_path):
        cfg = parse(tiny_doc())
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        cmd_dist(cfg, a)
        cmd_dist(cfg, b)
        assert a.read_bytes() == b.read_bytes()

    def test_requires_single_static_mode(self, tmp_path):
        with pytest.raises(ConfigError, match="static"):
            cmd_dist(
                parse(tiny_doc(modes=[{"type": "adaptive_fris", "m_o": 4}])),
                tmp_path / "x.csv",
            )


class TestCmdOutage:
    def test_columns_and_monotonicity(self, tmp_path):
        doc = tiny_doc(
            snr_grid_db=[0.0, 10.0, 20.0, 30.0],
            modes=[
                {"type": "static", "select_x": 2, "select_z": 2},
                {"type": "adaptive_fris", "m_o": 4},
                {"type": "ris_baseline", "m_rx": 2, "m_rz": 2},
            ],
        )
        out = tmp_path / "o.csv"
        cmd_outage(parse(doc), out)
        lines = [
            ln for ln in out.read_text(encoding="utf-8").splitlines()
            if not ln.startswith("#")
        ]
        assert lines[0] == (
            "snr_db,mode,analytical_po,asymptotic_po,mc_outage,mc_stderr,hits,reliable"
        )
        by_mode = {}
        for ln in lines[1:]:
            cells = ln.split(",")
            by_mode.setdefault(cells[1], []).append(float(cells[2]))
        assert set(by_mode) == {"static(2x2)", "fris(Mo=4)", "ris(2x2)"}
        for values in by_mode.values():
            assert all(b <= a for a, b in zip(values, values[1:]))

    def test_reliability_flag_written(self, tmp_path):
        doc = tiny_doc(snr_grid_db=[0.0, 40.0], trials=500)
        out = tmp_path / "o.csv"
        cmd_outage(parse(doc), out)
        rows = [
            ln.split(",")
            for ln in out.read_text(encoding="utf-8").splitlines()
            if not ln.startswith("#") and "," in ln and not ln.startswith("snr_db")
        ]
        flags = {r[-1] for r in rows}
        assert flags <= {"true", "false"}


class TestCmdCapacity:
    def test_bound_dominates_static_mc(self, tmp_path):
        doc = tiny_doc(trials=4000)
        out = tmp_path / "c.csv"
        cmd_capacity(parse(doc), out)
        lines = [
            ln for ln in out.read_text(encoding="utf-8").splitlines()
            if not ln.startswith("#")
        ]
        assert lines[0] == (
            "snr_db,mode,jensen_bound,asymptotic_bound,mc_capacity,mc_stderr"
        )
        for ln in lines[1:]:
            cells = ln.split(",")
            bound, mc, se = float(cells[2]), float(cells[4]), float(cells[5])
            assert mc <= bound + 3.0 * se


class TestCmdSweepM:
    def test_structure_and_flat_baseline(self, tmp_path):
        doc = tiny_doc(
            snr_grid_db=[30.0],
            modes=[
                {"type": "adaptive_fris", "m_o": 4},
                {"type": "ris_baseline", "m_rx": 2, "m_rz": 2},
            ],
            m_grid=[[2, 2], [3, 3], [4, 4]],
            trials=3000,
        )
        out = tmp_path / "s.csv"
        cmd_sweep_m(parse(doc), out)
        lines = [
            ln for ln in out.read_text(encoding="utf-8").splitlines()
            if not ln.startswith("#")
        ]
        assert lines[0] == (
            "m_x,m_z,m,fris_capacity,fris_stderr,ris_capacity,ris_stderr"
        )
        rows = [ln.split(",") for ln in lines[1:]]
        assert len(rows) == 3
        fris = [float(r[3]) for r in rows]
        ris = {r[5] for r in rows}
        assert len(ris) == 1  # baseline column bit-identical across the sweep
        ses = [float(r[4]) for r in rows]
        assert fris[-1] >= fris[0] - 3.0 * (ses[0] + ses[-1])
        # densest grid with m_o = m degenerates to the all-on baseline of
        # the 2x2 grid: first row equals the ris column exactly
        assert rows[0][3] == rows[0][5]

    def test_requires_m_grid_and_single_snr(self, tmp_path):
        doc = tiny_doc(
            snr_grid_db=[30.0],
            modes=[{"type": "adaptive_fris", "m_o": 4}],
        )
        with pytest.raises(ConfigError, match="m_grid"):
            cmd_sweep_m(parse(doc), tmp_path / "x.csv")
        doc2 = tiny_doc(
            modes=[{"type": "adaptive_fris", "m_o": 4}],
            m_grid=[[2, 2]],
        )
        with pytest.raises(ConfigError, match="snr_grid_db"):
            cmd_sweep_m(parse(doc2), tmp_path / "y.csv")

    def test_rejects_too_small_grid(self, tmp_path):
        doc = tiny_doc(
            snr_grid_db=[30.0],
            modes=[{"type": "adaptive_fris", "m_o": 9}],
            m_grid=[[2, 2]],
        )
        with pytest.raises(ConfigError, match="fewer than"):
            cmd_sweep_m(parse(doc), tmp_path / "z.csv")


class TestCli:
    def test_validate_preset(self, capsys):
        assert main(["validate", "--preset", "fig2"]) == 0
        out = capsys.readouterr().out
        assert "config_hash:" in out
        assert "20x20 elements" in out

    def test_validate_config_file(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(tiny_doc()), encoding="utf-8")
        assert main(["validate", "--config", str(path)]) == 0

    def test_missing_source_is_config_error(self, capsys):
        assert main(["validate"]) == 2
        assert "config error" in capsys.readouterr().err

    def test_bad_config_file(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{", encoding="utf-8")
        assert main(["validate", "--config", str(path)]) == 2
        assert main(["validate", "--config", str(tmp_path / "absent.json")]) == 2

    def test_invalid_document(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(tiny_doc(snr_grid_db=[5, 5])), encoding="utf-8")
        assert main(["validate", "--config", str(path)]) == 2
        assert "snr_grid_db" in capsys.readouterr().err

    def test_dist_end_to_end_reproducible(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(tiny_doc(trials=2000)), encoding="utf-8")
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["dist", "--config", str(path), "--out", str(a)]) == 0
        assert main(["dist", "--config", str(path), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert str(a) in capsys.readouterr().out

    def test_overrides_apply(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(tiny_doc(trials=2000)), encoding="utf-8")
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["dist", "--config", str(path), "--out", str(a), "--seed", "1"]) == 0
        assert main(["dist", "--config", str(path), "--out", str(b), "--seed", "2"]) == 0
        assert a.read_bytes() != b.read_bytes()

    def test_preset_with_overrides_runs(self, tmp_path):
        out = tmp_path / "fig3c.csv"
        code = main(
            ["sweep-m", "--preset", "fig3c", "--trials", "2000", "--out", str(out)]
        )
        assert code == 0
        assert out.exists()

    def test_command_level_config_error(self, tmp_path, capsys):
        # outage preset lacks m_grid: sweep-m must exit 2, not crash
        assert main(["sweep-m", "--preset", "fig3a"]) == 2
        assert "m_grid" in capsys.readouterr().err

    def test_numerical_failure_exit_code(self, monkeypatch, tmp_path, capsys):
        import frislink.cli as cli_mod

        def boom(config, out_path, workers=1):
            raise np.linalg.LinAlgError("eigendecomposition failed")

        monkeypatch.setitem(cli_mod._COMMANDS, "dist", boom)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(tiny_doc(trials=100)), encoding="utf-8")
        assert main(["dist", "--config", str(path)]) == 3
        assert "numerical failure" in capsys.readouterr().err

    def test_argparse_usage_error_is_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["dist", "--config", "a", "--preset", "fig2"])
        assert exc.value.code == 2

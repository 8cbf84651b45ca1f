"""Command-line interface: exit codes, outputs, determinism, config echo."""

import json

import pytest

from nlwave.cli import main
from nlwave.config import load_run_setup, parse_run_setup


def base_config(**overrides):
    cfg = {
        "schema": 1,
        "seed": 42,
        "grid": {"L": 20.0, "N": 256},
        "kernel": {"atoms": [{"shift": 0.0, "weight": 0.6}, {"shift": 1.0, "weight": 0.4}]},
        "nonlinearity": {"coefficients": [1.0]},
        "initial": {"profile": "gaussian", "amp": 0.05, "width": 2.0, "v_choice": "zero"},
        "time": {"dt": None, "t_final": 0.5, "sample_every": 4},
        "s_norm": 4.0,
    }
    cfg.update(overrides)
    return cfg


def write_config(tmp_path, name="config.json", **overrides):
    path = tmp_path / name
    path.write_text(json.dumps(base_config(**overrides)))
    return path


class TestSimulate:
    def test_missing_config_exits_1(self, tmp_path, capsys):
        rc = main(["simulate", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)])
        assert rc == 1
        assert "nope.json" in capsys.readouterr().err

    def test_valid_run_writes_snapshots_and_manifest(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        n_steps = round(0.5 / manifest["config_echo"]["time"]["dt"])
        expected = n_steps // 4 + 1 + (1 if n_steps % 4 else 0)
        assert manifest["snapshots"] == expected
        snapshots = sorted(out.glob("snapshot_*.csv"))
        assert len(snapshots) == expected
        assert (out / "energy.csv").exists()
        assert (out / "trajectory.png").exists()
        assert manifest["monitors"]["status"] == "completed"

    def test_cfl_violation_exits_1_before_stepping(self, tmp_path):
        cfg = write_config(tmp_path, time={"dt": 1.0, "t_final": 0.5, "sample_every": 1})
        out = tmp_path / "out"
        rc = main(["simulate", "--config", str(cfg), "--out", str(out)])
        assert rc == 1
        assert not list(out.glob("snapshot_*.csv")) if out.exists() else True

    def test_monitor_abort_exits_2_without_snapshots(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            initial={"profile": "gaussian", "amp": -0.2, "width": 2.0, "v_choice": "zero"},
        )
        out = tmp_path / "out"
        rc = main(["simulate", "--config", str(cfg), "--out", str(out)])
        assert rc == 2
        assert not list(out.glob("snapshot_*.csv"))
        reason = json.loads(capsys.readouterr().err.strip())
        assert reason["code"] == "HyperbolicityLost"
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["monitors"]["status"] == "aborted"

    def test_schema_error_has_pointer(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        bad = base_config()
        bad["grid"]["N"] = 7
        path.write_text(json.dumps(bad))
        rc = main(["simulate", "--config", str(path), "--out", str(tmp_path / "o")])
        assert rc == 1
        assert "/grid" in capsys.readouterr().err

    def test_config_echo_closure(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        main(["simulate", "--config", str(cfg), "--out", str(out)])
        manifest = json.loads((out / "manifest.json").read_text())
        echoed = parse_run_setup(manifest["config_echo"])
        assert echoed.config.t_final == 0.5
        assert echoed.config.dt == manifest["config_echo"]["time"]["dt"]

    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path)
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        main(["simulate", "--config", str(cfg), "--out", str(out1)])
        main(["simulate", "--config", str(cfg), "--out", str(out2)])
        for name in [p.name for p in out1.glob("*.csv")]:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        m1 = json.loads((out1 / "manifest.json").read_text())
        m2 = json.loads((out2 / "manifest.json").read_text())
        m1.pop("wall_time"), m2.pop("wall_time")
        m1.pop("outputs"), m2.pop("outputs")  # paths differ by out dir only
        assert m1 == m2


class TestStudy:
    def test_study_outputs_and_determinism(self, tmp_path):
        cfg = write_config(tmp_path, kernel=None)
        # no kernel key -> type defaults; rewrite without the null
        data = json.loads(cfg.read_text())
        del data["kernel"]
        cfg.write_text(json.dumps(data))

        out1, out2 = tmp_path / "a", tmp_path / "b"
        args = ["study", "--config", str(cfg), "--type", "1", "--eps", "0.2,0.1,0.05,0.025"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2), "--threads", "2"]) == 0

        report = json.loads((out1 / "study_report.json").read_text())
        assert 0.85 <= report["fitted_order"] <= 1.15
        assert (out1 / "study_errors.csv").read_bytes() == (out2 / "study_errors.csv").read_bytes()
        assert (out1 / "study_report.json").read_bytes() == (out2 / "study_report.json").read_bytes()
        assert (out1 / "study_order.png").exists()
        assert (out1 / "study_envelope.png").exists()
        header = (out1 / "study_errors.csv").read_text().splitlines()[0]
        assert header == "eps,t,error"

    def test_type2_uses_config_kernel(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        rc = main(["study", "--config", str(cfg), "--type", "2",
                   "--eps", "0.2,0.1,0.05,0.025", "--out", str(out)])
        assert rc == 0
        report = json.loads((out / "study_report.json").read_text())
        assert report["sigma"] == 1.0  # s_norm - 3

    def test_type1_rejects_atom_kernel(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        rc = main(["study", "--config", str(cfg), "--type", "1",
                   "--eps", "0.2,0.1,0.05,0.025", "--out", str(tmp_path / "o")])
        assert rc == 1
        assert "/kernel" in capsys.readouterr().err


class TestPicardCommand:
    def test_emits_convergence_json(self, tmp_path, capsys):
        cfg = write_config(tmp_path, time={"dt": 0.01, "t_final": 0.25, "sample_every": 1})
        rc = main(["picard", "--config", str(cfg), "--iters", "8", "--tol", "1e-8"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["converged"] is True
        assert len(payload["contraction_factors"]) == len(payload["diff_norms"]) - 1


class TestKernelsCommand:
    def test_example_prints_mass_and_bounds(self, capsys):
        assert main(["kernels", "--example"]) == 0
        out = capsys.readouterr().out
        lines = out.splitlines()
        assert lines[0] == "mass: 1"
        assert lines[1] == "second_moment: 0.4"
        assert "c1=0.2" in lines[2]
        assert lines[3] == "xi,symbol,omega"

    def test_table_file_output(self, tmp_path):
        out = tmp_path / "k"
        assert main(["kernels", "--example", "--out", str(out)]) == 0
        table = (out / "kernel_table.csv").read_text().splitlines()
        assert table[0] == "xi,symbol,omega"
        assert (out / "kernel_symbol.png").exists()

    def test_requires_source(self, capsys):
        assert main(["kernels"]) == 1

    def test_kernel_from_config(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["kernels", "--config", str(cfg), "--xi-max", "5", "--samples", "50"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "mass: 1"


class TestDiagnosticsCommand:
    def test_single_suite_passes(self, capsys):
        rc = main(["diagnostics", "--suite", "delta_h", "--suite", "dispersion"])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert all(s["passed"] for s in report["suites"])
        assert {s["name"] for s in report["suites"]} == {"delta_h", "dispersion"}

    def test_seed_changes_fields_not_verdict(self, capsys):
        rc1 = main(["diagnostics", "--suite", "delta_h", "--seed", "1"])
        r1 = json.loads(capsys.readouterr().out)
        rc2 = main(["diagnostics", "--suite", "delta_h", "--seed", "2"])
        r2 = json.loads(capsys.readouterr().out)
        assert rc1 == rc2 == 0
        m1 = r1["suites"][0]["metrics"]["max_abs_error"]
        m2 = r2["suites"][0]["metrics"]["max_abs_error"]
        assert m1 != m2

    def test_unknown_suite_exits_1(self, capsys):
        rc = main(["diagnostics", "--suite", "bogus"])
        assert rc == 1
        assert "bogus" in capsys.readouterr().err


class TestConfigParsing:
    def test_load_round_trip(self, tmp_path):
        cfg = write_config(tmp_path)
        setup = load_run_setup(cfg)
        echoed = setup.echo()
        again = parse_run_setup(echoed)
        assert again.config.grid == setup.config.grid
        assert again.config.dt == setup.config.dt
        assert again.seed == setup.seed

    def test_pointer_paths(self, tmp_path):
        from nlwave.errors import ConfigError

        bad = base_config()
        bad["kernel"]["densities"] = [{"kind": "box", "param": 1.0, "weight": 1.0}]
        with pytest.raises(ConfigError) as err:
            parse_run_setup(bad)
        assert err.value.pointer.startswith("/kernel/densities/0")

    def test_missing_required_key(self):
        from nlwave.errors import ConfigError

        cfg = base_config()
        del cfg["grid"]
        with pytest.raises(ConfigError) as err:
            parse_run_setup(cfg)
        assert err.value.pointer == "/grid"

"""End-to-end command-line behavior: exit codes, files, determinism."""

import json
import math
import subprocess
import sys

import pytest

from rotor_scatter import specfun
from rotor_scatter.cli import main


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def two_slit_doc(engine="general", steps=151, k_list=(0.5, 1.0, 2.0)):
    return {
        "molecule": {"mass": 1.0, "alpha": 1.0},
        "beam": {"k": 3.0, "amplitudes": [{"l": 0, "re": 1.0, "im": 0.0}]},
        "potential": {"kind": "peaks", "peaks": [
            {"center": 2.0,
             "shape": {"variant": "gaussian", "v0": 1.0, "delta": 1.0}},
            {"center": -2.0,
             "shape": {"variant": "gaussian", "v0": 1.0, "delta": 1.0}}]},
        "engine": {"variant": engine},
        "scan": {"theta": {"min": -1.2, "max": 1.2, "steps": steps},
                 "k": list(k_list)},
    }


def fig4_doc(steps=1201):
    return {
        "molecule": {"mass": 1.0, "alpha": 2.5},
        "beam": {"k": 1.0, "amplitudes": [{"l": 0, "re": 1.0, "im": 0.0}]},
        "potential": {"kind": "peaks", "peaks": [
            {"center": 4.0,
             "shape": {"variant": "polynomial_gaussian", "v0": 1.0,
                       "delta": 1.5}},
            {"center": -4.0,
             "shape": {"variant": "gaussian", "v0": 1.0, "delta": 1.5}}]},
        "engine": {"variant": "closed_mixed"},
        "scan": {"theta": {"min": -math.pi / 2, "max": math.pi / 2,
                           "steps": steps}, "k": [1.0]},
    }


def run_dir_from(capsys):
    out = capsys.readouterr().out.strip().splitlines()
    return out[-1]


class TestProfile:
    def test_writes_csv_json_manifest(self, tmp_path, capsys):
        cfg = write_config(tmp_path, two_slit_doc())
        assert main(["profile", "--config", cfg, "--out", str(tmp_path)]) == 0
        run_dir = run_dir_from(capsys)
        csv = open(f"{run_dir}/profile.csv", encoding="utf-8").read()
        header = csv.split("\n")[0]
        assert header.startswith("theta,sigma")
        assert "sigma_0_0" in header and "sigma_0_-2" in header
        doc = json.load(open(f"{run_dir}/profile.json"))
        assert len(doc["theta"]) == 151
        assert doc["metadata"]["engine"] == "general"
        manifest = json.load(open(f"{run_dir}/manifest.json"))
        assert manifest["subcommand"] == "profile"

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        cfg = write_config(tmp_path, two_slit_doc(steps=61))
        assert main(["profile", "--config", cfg, "--out", str(tmp_path)]) == 0
        run_dir = run_dir_from(capsys)
        first = open(f"{run_dir}/profile.csv", "rb").read()
        assert main(["profile", "--config", cfg, "--out", str(tmp_path)]) == 0
        assert run_dir_from(capsys) == run_dir
        assert open(f"{run_dir}/profile.csv", "rb").read() == first

    def test_svg_when_requested(self, tmp_path, capsys):
        cfg = write_config(tmp_path, two_slit_doc(steps=61))
        assert main(["profile", "--config", cfg, "--out", str(tmp_path),
                     "--format", "csv,svg"]) == 0
        run_dir = run_dir_from(capsys)
        svg = open(f"{run_dir}/profile.svg", encoding="utf-8").read()
        assert svg.startswith("<svg") and "polyline" in svg

    def test_malformed_json_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"molecule": ', encoding="utf-8")
        assert main(["profile", "--config", str(bad),
                     "--out", str(tmp_path)]) == 1
        assert "not valid JSON" in capsys.readouterr().err

    def test_config_errors_listed_and_exit_1(self, tmp_path, capsys):
        doc = two_slit_doc()
        doc["molecule"]["alpha"] = -1.0
        doc["beam"]["k"] = 0.0
        cfg = write_config(tmp_path, doc)
        assert main(["profile", "--config", cfg, "--out", str(tmp_path)]) == 1
        err = capsys.readouterr().err
        assert "molecule.alpha" in err and "beam.k" in err

    def test_missing_config_file_exits_1(self, tmp_path, capsys):
        assert main(["profile", "--config", str(tmp_path / "none.json"),
                     "--out", str(tmp_path)]) == 1
        capsys.readouterr()


class TestSweep:
    def test_matrix_shape(self, tmp_path, capsys):
        cfg = write_config(tmp_path, two_slit_doc(steps=61))
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
        run_dir = run_dir_from(capsys)
        lines = open(f"{run_dir}/sweep.csv", encoding="utf-8").read().strip().split("\n")
        assert lines[0] == "theta,k=0.5,k=1,k=2"
        assert len(lines) == 62

    def test_threads_do_not_change_bytes(self, tmp_path, capsys):
        cfg = write_config(tmp_path, two_slit_doc(steps=61))
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "a"),
                     "--threads", "1"]) == 0
        dir_a = run_dir_from(capsys)
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "b"),
                     "--threads", "3"]) == 0
        dir_b = run_dir_from(capsys)
        bytes_a = open(f"{dir_a}/sweep.csv", "rb").read()
        bytes_b = open(f"{dir_b}/sweep.csv", "rb").read()
        assert bytes_a == bytes_b

    def test_empty_k_list_exits_1(self, tmp_path, capsys):
        cfg = write_config(tmp_path, two_slit_doc(k_list=()))
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 1
        assert "scan.k" in capsys.readouterr().err


class TestCompare:
    def test_fig4_suppression(self, tmp_path, capsys):
        cfg = write_config(tmp_path, fig4_doc())
        assert main(["compare", "--config", cfg, "--out", str(tmp_path)]) == 0
        run_dir = run_dir_from(capsys)
        doc = json.load(open(f"{run_dir}/compare.json"))
        rep = doc["reports"][0]
        assert rep["suppression_ratio"] < 1.0
        assert rep["visibility_without"] > 0.2
        assert rep["visibility_with"] < 0.5 * rep["visibility_without"]
        assert rep["window"][0] == pytest.approx(-rep["window"][1], rel=1e-12)
        with_csv = open(f"{run_dir}/compare_with.csv", encoding="utf-8").read()
        without_csv = open(f"{run_dir}/compare_without.csv", encoding="utf-8").read()
        assert with_csv.split("\n")[0] == "theta,k=1"
        assert with_csv != without_csv

    def test_general_engine_uses_doubled_counterpart(self, tmp_path, capsys):
        cfg = write_config(tmp_path, two_slit_doc(steps=75, k_list=(2.0,)))
        assert main(["compare", "--config", cfg, "--out", str(tmp_path)]) == 0
        run_dir = run_dir_from(capsys)
        doc = json.load(open(f"{run_dir}/compare.json"))
        assert doc["engine"] == "general"
        assert len(doc["reports"]) == 1

    def test_structureless_engine_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, two_slit_doc(engine="structureless"))
        assert main(["compare", "--config", cfg, "--out", str(tmp_path)]) == 1
        capsys.readouterr()


class TestClosedEngineConfigs:
    def test_template_mismatch_exits_1(self, tmp_path, capsys):
        doc = fig4_doc()
        doc["engine"]["variant"] = "closed_two_gaussian"
        cfg = write_config(tmp_path, doc)
        assert main(["profile", "--config", cfg, "--out", str(tmp_path)]) == 1
        assert "peak shapes" in capsys.readouterr().err

    def test_nonzero_beam_exits_1(self, tmp_path, capsys):
        doc = two_slit_doc(engine="closed_two_gaussian")
        doc["beam"]["amplitudes"] = [{"l": 2, "re": 1.0, "im": 0.0}]
        cfg = write_config(tmp_path, doc)
        assert main(["profile", "--config", cfg, "--out", str(tmp_path)]) == 1
        assert "l = 0" in capsys.readouterr().err

    def test_closed_grating_profile(self, tmp_path, capsys):
        doc = two_slit_doc(engine="closed_grating", steps=61)
        doc["potential"] = {"kind": "grating",
                            "grating": {"n": 2, "d": 1.3,
                                        "shape": {"variant": "gaussian",
                                                  "v0": 1.0, "delta": 1.0}}}
        doc["molecule"]["alpha"] = 0.61
        cfg = write_config(tmp_path, doc)
        assert main(["profile", "--config", cfg, "--out", str(tmp_path)]) == 0
        capsys.readouterr()


class TestValidate:
    def test_filtered_run_passes(self, tmp_path, capsys):
        assert main(["validate", "--out", str(tmp_path),
                     "--only", "bessel"]) == 0
        run_dir = run_dir_from(capsys)
        doc = json.load(open(f"{run_dir}/validate.json"))
        assert doc["all_passed"] is True
        assert len(doc["checks"]) == 4

    def test_broken_build_exits_2(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setattr(specfun, "bessel_j", lambda n, x: 0.25)
        assert main(["validate", "--out", str(tmp_path),
                     "--only", "bessel-first-zero"]) == 2
        capsys.readouterr()

    def test_unknown_prefix_exits_1(self, tmp_path, capsys):
        assert main(["validate", "--out", str(tmp_path),
                     "--only", "warpdrive"]) == 1
        capsys.readouterr()


class TestBesselTable:
    def test_values_match_scalar_evaluator(self, tmp_path, capsys):
        assert main(["bessel-table", "--n-max", "6", "--x", "3.25",
                     "--out", str(tmp_path)]) == 0
        run_dir = run_dir_from(capsys)
        lines = open(f"{run_dir}/bessel_table.csv", encoding="utf-8").read().strip().split("\n")
        assert lines[0] == "n,J_n"
        assert len(lines) == 8
        for n, line in enumerate(lines[1:]):
            got = float(line.split(",")[1])
            assert got == specfun.bessel_j(n, 3.25)

    def test_negative_x_exits_1(self, tmp_path, capsys):
        assert main(["bessel-table", "--n-max", "4", "--x", "-2.0",
                     "--out", str(tmp_path)]) == 1
        capsys.readouterr()


class TestUsage:
    def test_no_subcommand_exits_1(self, capsys):
        assert main([]) == 1
        capsys.readouterr()

    def test_unknown_flag_exits_1(self, tmp_path, capsys):
        assert main(["validate", "--out", str(tmp_path), "--frob"]) == 1
        capsys.readouterr()

    def test_bad_format_exits_1(self, tmp_path, capsys):
        cfg = write_config(tmp_path, two_slit_doc(steps=61))
        assert main(["profile", "--config", cfg, "--out", str(tmp_path),
                     "--format", "csv,pdf"]) == 1
        capsys.readouterr()

    def test_console_script_help(self):
        proc = subprocess.run([sys.executable, "-m", "rotor_scatter.cli",
                               "--help"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert "profile" in proc.stdout and "bessel-table" in proc.stdout

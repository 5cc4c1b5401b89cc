import json
import subprocess
import sys

import pytest

from toricimplicit.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out), err


def test_analyze_six_point(capsys, data_dir):
    code, out, _ = run_json(capsys, "analyze", data_dir / "interesting.txt")
    assert code == 0
    assert out["schema"] == 1
    b = out["bounds"]
    assert (b["polytope"]["lattice_points"], b["d"], b["nu0"]) == (6, 1, 2)


def test_analyze_reports_both_trapezoid_bounds(capsys, data_dir):
    code, out, _ = run_json(capsys, "analyze", data_dir / "trapezoid.txt")
    assert code == 0
    assert out["bounds"]["nu0"] == 2
    assert out["bounds"]["projective_compactification"]["nu0"] == 5


def test_analyze_toric_ideal(capsys, data_dir):
    code, out, _ = run_json(capsys, "analyze", data_dir / "interesting.txt", "--ideal")
    assert code == 0
    assert out["ring"]["variables"] == 6
    assert out["ring"]["toric_ideal_complete"] is True
    assert out["ring"]["toric_ideal"]


def test_matrix_json_schema(capsys, data_dir, tmp_path):
    target = tmp_path / "m.json"
    code, out, _ = run(capsys, "matrix", data_dir / "interesting.txt", "--nu", "2", "--out", target)
    assert code == 0
    data = json.loads(target.read_text())
    assert (data["rows"], data["cols"]) == (17, 34)
    assert {"rows", "cols", "row_labels", "col_labels", "entries", "target_vars", "setting", "nu", "schema"} <= set(data)
    assert len(data["entries"]) == 17 and len(data["entries"][0]) == 34 and len(data["entries"][0][0]) == 4


def test_matrix_multigraded(capsys, data_dir):
    code, out, _ = run_json(capsys, "matrix", data_dir / "bidegree_2_3.txt", "--nu", "3,2")
    assert code == 0
    assert (out["rows"], out["cols"], out["nu"]) == (12, 12, [3, 2])


def test_degree_too_low_needs_force(capsys, data_dir):
    code, _, err = run(capsys, "matrix", data_dir / "interesting.txt", "--nu", "0")
    assert code == 2
    assert "--force" in err
    code, _, _ = run(capsys, "matrix", data_dir / "kd06_ex10.txt", "--nu", "1", "--force", "--json")
    assert code == 0


def test_implicitize_is_byte_identical(capsys, data_dir, tmp_path):
    outputs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        code, _, _ = run(capsys, "implicitize", data_dir / "interesting.txt", "--seed", "5", "--out", path)
        assert code == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    result = json.loads(outputs[0])["result"]
    assert result["verified"] and result["degree"] == 6
    assert [f["status"] for f in result["factors"]] == ["implicit-equation-power"]


def test_seed_from_environment(capsys, data_dir, monkeypatch):
    monkeypatch.setenv("TORICIMPLICIT_SEED", "11")
    code, out, _ = run_json(capsys, "implicitize", data_dir / "kd06_ex10.txt", "--nu", "1", "--force")
    assert code == 0
    assert out["seed"] == 11


def test_extraneous_factor_is_reported(capsys, data_dir):
    code, out, _ = run_json(capsys, "implicitize", data_dir / "kd06_ex11.txt", "--nu", "1", "--force")
    assert code == 0
    kinds = sorted((f["status"], f["degree"]) for f in out["result"]["factors"])
    assert kinds == [("extraneous", 1), ("implicit-equation-power", 5)]


def test_check_only_success(capsys, data_dir):
    code, out, _ = run_json(capsys, "implicitize", data_dir / "kd06_ex10.txt", "--nu", "1", "--force",
                            "--check-only")
    assert code == 0 and out["check"]["ok"]


def test_check_only_failure_exits_1(capsys, data_dir):
    code, out, _ = run_json(capsys, "implicitize", data_dir / "indegfalse.txt", "--nu", "3", "--force",
                            "--check-only")
    assert code == 1
    assert out["check"]["ok"] is False
    assert out["suggestion"].startswith("try --nu 4")


def test_check_on_and_off(capsys, data_dir, tmp_path):
    target = tmp_path / "m.json"
    run(capsys, "matrix", data_dir / "interesting.txt", "--nu", "2", "--out", target)
    # the image of (s, t) = (1, 1) is (3, -2, 6, 3)
    code, out, _ = run_json(capsys, "check", target, "--point", "3,-2,6,3")
    assert code == 0 and out["on_hypersurface"] is True
    code, out, _ = run_json(capsys, "check", target, "--point", "1,2,3,5")
    assert code == 0 and out["verdict"] == "off"
    code, _, _ = run(capsys, "check", target, "--point", "1,2")
    assert code == 2


def test_region_listing(capsys):
    code, out, _ = run_json(capsys, "region", "--ranks", "1,3", "--gamma", "2,5")
    assert code == 0
    assert sorted(out["complement"]) == [[1, 17], [7, 12]]
    code, out, _ = run_json(capsys, "region", "--ranks", "1,1", "--gamma", "2,3", "--test", "3,2")
    assert sorted(out["complement"]) == [[1, 5], [3, 2]]
    assert out["test"]["valid"] is True
    code, out, _ = run_json(capsys, "region", "--ranks", "1,1", "--gamma", "0,0", "--test=-2,-2")
    assert out["complement"] is None and out["test"]["valid"] is False
    code, _, _ = run(capsys, "region", "--ranks", "1,1", "--gamma", "2")
    assert code == 2


def test_input_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("vars s, t;\nmap s t;\n")
    code, _, err = run(capsys, "analyze", bad)
    assert code == 2
    assert "line 2, column 7" in err
    code, _, _ = run(capsys, "analyze", tmp_path / "missing.txt")
    assert code == 2


def test_human_output(capsys, data_dir):
    code, out, _ = run(capsys, "analyze", data_dir / "interesting.txt")
    assert code == 0
    assert "nu0" in out and not out.lstrip().startswith("{")


def test_module_entry_point(data_dir):
    proc = subprocess.run([sys.executable, "-m", "toricimplicit", "region", "--ranks", "1,3", "--gamma", "2,5",
                           "--json"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["complement"]


def test_internal_errors_exit_3(capsys, data_dir, monkeypatch):
    import toricimplicit.cli as cli

    def broken(*args, **kwargs):
        raise AssertionError("facet is not supported by enough vertices")

    monkeypatch.setattr(cli, "prepare", broken)
    code, _, err = run(capsys, "analyze", data_dir / "interesting.txt")
    assert code == 3
    assert "internal error" in err


def test_fallback_backend_gives_identical_output(data_dir):
    import os

    outputs = {}
    for backend in ("cython", "python"):
        env = dict(os.environ, TORICIMPLICIT_BACKEND=backend)
        proc = subprocess.run([sys.executable, "-m", "toricimplicit", "implicitize", str(data_dir / "kd06_ex11.txt"),
                               "--nu", "1", "--force", "--json", "--route", "modular"],
                              capture_output=True, text=True, env=env, check=False)
        assert proc.returncode == 0, proc.stderr
        outputs[backend] = proc.stdout
    assert outputs["cython"] == outputs["python"]

import importlib.util
from pathlib import Path

import pytest

from toricimplicit.arith import SparsePoly
from toricimplicit.ingestion import load_problem, parse_problem
from toricimplicit.pipeline import common_denominator_sections, dehomogenize, prepare
from toricimplicit.regularity import nu0_projective


@pytest.mark.parametrize(
    "name, setting, bound",
    [
        ("interesting.txt", "projective", 2),
        ("interesting_Q.txt", "projective", 3),
        ("kd06_ex10.txt", "projective", 2),
        ("pedi06.txt", "projective", 7),
        ("indegfalse.txt", "projective", 6),
        ("trapezoid.txt", "multiproj", 2),
    ],
)
def test_bounds_follow_the_formula(data_dir, name, setting, bound):
    pr = prepare(load_problem(data_dir / name))
    assert pr.setting == setting
    assert pr.bound == bound
    if setting == "projective":
        info = pr.info
        assert bound == nu0_projective(info["n"], info["d"], info["gamma"])


def test_option_nu_overrides_the_bound(data_dir):
    pr = prepare(load_problem(data_dir / "pedi06.txt"))
    assert pr.default_nu == 4


def test_multigraded_default_is_the_smallest_corner():
    spec = parse_problem("vars s, u, t, v; target multigraded 1,1; map s*t, u*v, s*v, u*t;")
    pr = prepare(spec)
    corners = [o.shift for o in pr.bound.complement.orthants]
    assert pr.default_nu == min(corners, key=lambda c: (sum(c), c))
    assert pr.bound.valid(pr.default_nu)


def test_common_denominator():
    s = SparsePoly.variable(1, 0)
    one = SparsePoly.one(1)
    sections = common_denominator_sections([(s, one + s), (s * s, s)])
    L = (one + s) * s
    assert sections == [L, s * s, s * s * (one + s)]


def test_dehomogenize():
    p = SparsePoly(3, {(1, 0, 2): 3, (0, 1, 2): -1})
    assert dehomogenize(p) == SparsePoly(2, {(1, 0): 3, (0, 1): -1})


def test_benchmark_script_runs(capsys):
    path = Path(__file__).resolve().parent.parent / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    bench.main(["--sizes", "6", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "pencil_dets_mod" in out and "speedup" in out

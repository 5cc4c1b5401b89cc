import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricimplicit.arith import SparsePoly, bareiss_det
from toricimplicit.implicitize import (
    BasePointDetected,
    DegreeTooLow,
    EmptyMatrix,
    RankDeficient,
    RankDeficientB,
    RepMatrix,
    Setting,
    VerificationFailed,
    build_matrix,
    gale_dual_map,
    gcd_degree_on_lines,
    implicit_equation,
    is_on_hypersurface,
    minor_gcd_modular,
    minor_gcd_symbolic,
    minor_specs,
    moving_lines_curve,
    select_columns,
    substitution_identity,
)
from toricimplicit.ingestion import load_problem
from toricimplicit.pipeline import prepare, prepare_projective_pairs
from toricimplicit.regularity import nu0_multiproj_codomain
from toricimplicit.semigroup import build_ring

s, t = SparsePoly.variable(2, 0), SparsePoly.variable(2, 1)
one = SparsePoly.one(2)


def same_up_to_scalar(a: SparsePoly, b: SparsePoly) -> bool:
    return a.primitive() in (b.primitive(), -b.primitive())


@pytest.fixture(scope="module")
def kd06_matrices(data_dir):
    out = {}
    for name in ("kd06_ex10", "kd06_ex11"):
        pr = prepare(load_problem(data_dir / f"{name}.txt"))
        out[name] = build_matrix(pr.ring, pr.data, 1, force=True)
    return out


@pytest.mark.parametrize("name", ["kd06_ex10", "kd06_ex11"])
def test_symbolic_and_modular_gcd_agree(kd06_matrices, name):
    m = kd06_matrices[name]
    specs = minor_specs(m, 4, seed=0)
    assert same_up_to_scalar(minor_gcd_symbolic(m, specs), minor_gcd_modular(m, specs, seed=0))
    assert gcd_degree_on_lines(m) == {"kd06_ex10": 5, "kd06_ex11": 6}[name]


@settings(max_examples=8)
@given(st.integers(0, 2**20))
def test_routes_agree_on_random_bilinear_maps(seed):
    rng = random.Random(seed)
    monos = [one, s, t, s * t]
    polys = [sum((m * rng.randint(-4, 4) for m in monos), SparsePoly.zero(2)) for _ in range(4)]
    if any(not p for p in polys):
        return
    try:
        ring, h = build_ring(polys, polytope=[(0, 0), (1, 0), (0, 1), (1, 1)])
        m = build_matrix(ring, h, 1)
    except (EmptyMatrix, ValueError):
        return
    if m.generic_rank < m.rows:
        return
    symbolic = implicit_equation(m, route="symbolic", seed=seed)
    modular = implicit_equation(m, route="modular", seed=seed)
    assert same_up_to_scalar(symbolic.candidate, modular.candidate)
    assert symbolic.verified and modular.verified


def test_single_minor_is_a_multiple_of_the_gcd(kd06_matrices):
    m = kd06_matrices["kd06_ex10"]
    full = implicit_equation(m, route="symbolic")
    single = implicit_equation(m, strategy="single-minor", route="symbolic")
    assert single.degree == m.rows
    single.candidate.divexact(full.candidate)
    with pytest.raises(ValueError):
        implicit_equation(m, strategy="bogus")


def test_points_on_and_off_the_surface(kd06_matrices):
    m = kd06_matrices["kd06_ex10"]
    rng = random.Random(4)
    for _, img in m.param.samples(5, rng):
        assert is_on_hypersurface(m, img)
    assert not is_on_hypersurface(m, [Fraction(3), Fraction(-7), Fraction(11), Fraction(2)])


def test_select_columns_gives_independent_minors(kd06_matrices):
    m = kd06_matrices["kd06_ex11"]
    for cols in select_columns(m, 3):
        assert len(cols) == m.rows
        sub = [[m.linear_form(r, c) for c in cols] for r in range(m.rows)]
        assert bareiss_det(sub)


def test_matrix_roundtrip_through_json(kd06_matrices):
    m = kd06_matrices["kd06_ex10"]
    back = RepMatrix.from_dict(json.loads(json.dumps(m.to_dict())))
    assert back.entries == m.entries
    assert back.shape == m.shape and back.setting is Setting.PROJECTIVE


def test_degree_bound_is_enforced(data_dir):
    pr = prepare(load_problem(data_dir / "kd06_ex10.txt"))
    assert pr.bound == 2
    with pytest.raises(DegreeTooLow):
        build_matrix(pr.ring, pr.data, 1, bound=pr.bound)
    from toricimplicit.semigroup import hilbert

    assert build_matrix(pr.ring, pr.data, 2, bound=pr.bound).rows == hilbert(pr.ring, 2)


def test_more_rows_than_columns_rejected(kd06_matrices):
    import dataclasses

    m = kd06_matrices["kd06_ex10"]
    narrow = dataclasses.replace(m, entries=[row[:4] for row in m.entries], col_labels=m.col_labels[:4])
    with pytest.raises(RankDeficient):
        implicit_equation(narrow)


def test_wrong_candidate_fails_verification(kd06_matrices, monkeypatch):
    import toricimplicit.implicitize as imp

    m = kd06_matrices["kd06_ex10"]
    monkeypatch.setattr(imp, "minor_gcd_symbolic", lambda m, specs: SparsePoly.linear_form([1, 2, 3, 5]))
    with pytest.raises(VerificationFailed) as info:
        implicit_equation(m, route="symbolic")
    assert not info.value.result.verified


def test_substitution_identity(kd06_matrices):
    m = kd06_matrices["kd06_ex10"]
    eq = implicit_equation(m).equation
    assert substitution_identity(eq, m.param) is True
    assert substitution_identity(eq + SparsePoly.linear_form([1, 0, 0, 0]), m.param) is False


# ---------------------------------------------------------------------------
# products of lines as codomain


def test_trapezoid_with_three_pairs(data_dir):
    pr = prepare(load_problem(data_dir / "trapezoid.txt"))
    assert pr.bound == 2
    m = build_matrix(pr.ring, pr.data, pr.bound, bound=pr.bound)
    assert m.shape == (12, 15)
    assert m.target_vars == ["X1", "Y1", "X2", "Y2", "X3", "Y3"]
    r = implicit_equation(m)
    assert r.verified and r.equation is not None
    assert r.degree == 9


def test_denominators_example(data_dir):
    pr = prepare(load_problem(data_dir / "multiproj_denominators.txt"))
    assert pr.info["polytope"]["contraction_factor"] == 2
    m = build_matrix(pr.ring, pr.data, pr.bound, bound=pr.bound)
    assert m.shape == (15, 18)
    r = implicit_equation(m)
    X1, Y1, X2, Y2, X3, Y3 = (SparsePoly.variable(6, i) for i in range(6))
    F = X1 * X1 * X2 * X3 - X1 * X1 * X2 * Y3 - Y1 * Y1 * Y2 * X3
    assert same_up_to_scalar(r.equation, F)
    assert r.factors[0].multiplicity == 2


def test_gale_dual_of_the_quartic_matrix():
    B = [[1, 0, 0], [-2, 1, 0], [1, -2, 1], [0, 1, -2], [0, 0, 1]]
    u, v, w = (SparsePoly.variable(3, i) for i in range(3))
    l1, l2, l3, l4, l5 = u, -2 * u + v, u - 2 * v + w, v - 2 * w, w
    assert gale_dual_map(B) == [(l1 * l3, l2 ** 2), (l2 * l4, l3 ** 2), (l3 * l5, l4 ** 2)]
    ring, prs, g = prepare_projective_pairs(gale_dual_map(B))
    degs = [f.degree for f, _ in prs]
    assert (degs, g) == ([2, 2, 2], 2)
    nu = nu0_multiproj_codomain(degs, g)
    m = build_matrix(ring, prs, nu, bound=nu)
    assert m.shape == (15, 18)
    r = implicit_equation(m)
    kinds = sorted((f.status, f.poly.total_degree()) for f in r.factors)
    assert kinds == [("extraneous", 2), ("implicit-equation-power", 10)]
    X1, _, _, _, X3, _ = (SparsePoly.variable(6, i) for i in range(6))
    assert same_up_to_scalar(next(f.poly for f in r.factors if f.status == "extraneous"), X1 * X3)


def test_gale_rejects_bad_matrices():
    assert gale_dual_map([[1], [-1]])[0][0] == SparsePoly.variable(1, 0)
    with pytest.raises(RankDeficientB):
        gale_dual_map([[1, 2], [-1, -2]])
    with pytest.raises(ValueError):
        gale_dual_map([[1], [1]])


# ---------------------------------------------------------------------------
# plane curves by moving lines


@pytest.mark.parametrize(
    "param, expected",
    [
        ((2 * s * t, s * s - t * t, s * s + t * t), {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): -1}),
        ((s * s, s * t, t * t), {(1, 0, 1): 1, (0, 2, 0): -1}),
        ((s ** 3, s * t * t, t ** 3), {(1, 0, 2): 1, (0, 3, 0): -1}),
    ],
)
def test_moving_lines(param, expected):
    r = moving_lines_curve(*param)
    assert r.verified
    assert same_up_to_scalar(r.candidate, SparsePoly(3, expected))


def test_moving_lines_oracle_on_random_conics():
    # brute force: the implicit conic spans the kernel of the 6 quadratic monomials at 8 image points
    from toricimplicit.arith import kernel_basis, rank

    rng = random.Random(8)
    for _ in range(5):
        coeffs = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)]
        if rank(coeffs) < 3:
            continue
        polys = [c[0] * s * s + c[1] * s * t + c[2] * t * t for c in coeffs]
        try:
            r = moving_lines_curve(*polys)
        except (ValueError, BasePointDetected):
            continue
        mons = [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
        rows = []
        for _ in range(8):
            pt = (rng.randint(-9, 9), rng.randint(-9, 9))
            img = [p.evaluate(pt) for p in polys]
            rows.append([img[0] ** a * img[1] ** b * img[2] ** c for a, b, c in mons])
        (vec,) = kernel_basis(rows)
        oracle = SparsePoly(3, dict(zip(mons, vec)))
        eq = r.equation
        power = r.factors[0].multiplicity
        assert same_up_to_scalar(eq, oracle) or same_up_to_scalar(eq ** power, oracle)


def test_moving_lines_rejects_common_factor():
    with pytest.raises(ValueError):
        moving_lines_curve(s * s, s * t, s * s + s * t)


def test_matrix_sizes_follow_the_closed_forms(data_dir):
    from toricimplicit.semigroup import hilbert
    from toricimplicit.syzygies import strand_diagnostics

    pr = prepare(load_problem(data_dir / "interesting.txt"))
    m = build_matrix(pr.ring, pr.data, 2)
    d = strand_diagnostics(pr.ring, pr.data, 2)
    assert m.rows == hilbert(pr.ring, 2)
    assert m.cols == d.dims[1][1]
    # the determinant of the strand has the degree of the implicit equation
    assert d.expected_det_degree == 6
    pr = prepare(load_problem(data_dir / "trapezoid.txt"))
    m = build_matrix(pr.ring, pr.data, 2)
    assert m.rows == hilbert(pr.ring, 2)
    assert m.cols == sum(hilbert(pr.ring, 2 - f.degree) for f, _ in pr.data)

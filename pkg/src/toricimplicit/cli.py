"""Command line: analyze, matrix, implicitize, check, region.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import warnings
from fractions import Fraction

from toricimplicit.implicitize import (
    DegreeTooLow,
    EmptyMatrix,
    RankDeficient,
    RepMatrix,
    VerificationFailed,
    build_matrix,
    implicit_equation,
    is_on_hypersurface,
    representation_check,
)
from toricimplicit.ingestion import ArityError, ParseError, ZeroComponent, format_problem, load_problem, normalize_pairs
from toricimplicit.pipeline import prepare, projective_bound_for_pairs
from toricimplicit.regularity import region_RB
from toricimplicit.semigroup import NotHomogeneousOnPolytope, hilbert, toric_ideal
from toricimplicit.syzygies import strand_diagnostics

SCHEMA = 1
SEED_ENV = "TORICIMPLICIT_SEED"
ROW_LIMIT = 20000

log = logging.getLogger("toricimplicit")


class InputError(Exception):
    pass


class Failure(Exception):
    """Verification failed; the payload is still reported."""

    def __init__(self, message: str, payload: dict):
        super().__init__(message)
        self.payload = payload


def _int_tuple(text: str):
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    return vals[0] if len(vals) == 1 else vals


def _point(text: str) -> list:
    try:
        return [Fraction(x.strip()) for x in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad point {text!r}") from exc


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, list):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, Fraction):
        return str(x)
    return x


def _emit(payload: dict, args) -> None:
    payload = {"schema": SCHEMA, **_jsonable(payload)}
    text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.json:
        sys.stdout.write(text)
    else:
        _print_human(payload)


def _print_human(payload: dict, indent: int = 0) -> None:
    pad = "  " * indent
    for key, value in payload.items():
        if key in ("entries", "row_labels", "col_labels"):
            continue
        if isinstance(value, dict):
            print(f"{pad}{key}:")
            _print_human(value, indent + 1)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            print(f"{pad}{key}:")
            for item in value:
                _print_human(item, indent + 1)
                print()
        else:
            print(f"{pad}{key}: {value}")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get(SEED_ENV, "0"))


def _load(args):
    try:
        spec = load_problem(args.file)
    except OSError as exc:
        raise InputError(str(exc)) from exc
    if getattr(args, "setting", None):
        spec.setting = args.setting
    return spec


def _bounds(pr) -> dict:
    info = dict(pr.info)
    if pr.setting == "multiproj":
        try:
            info["projective_compactification"] = projective_bound_for_pairs(normalize_pairs(pr.spec))
        except (ValueError, ArithmeticError) as exc:
            info["projective_compactification"] = f"unavailable: {exc}"
    return info


def _nu(args, pr):
    nu = args.nu if args.nu is not None else pr.default_nu
    if isinstance(nu, list):
        nu = tuple(nu)
    return nu


def _matrix(args, pr, seed):
    nu = _nu(args, pr)
    rows = hilbert(pr.ring, nu)
    if rows > ROW_LIMIT and not args.force:
        raise InputError(f"nu={nu} gives {rows} rows (limit {ROW_LIMIT}); pass --force to build it anyway")
    try:
        m = build_matrix(pr.ring, pr.data, nu, bound=pr.bound, force=args.force, seed=seed)
    except DegreeTooLow as exc:
        raise InputError(f"{exc}; pass --force to use it anyway") from exc
    if args.force and not _at_or_above(pr, nu):
        log.warning("nu=%s is below the degree bound; results must be checked", nu)
    return m


def _at_or_above(pr, nu) -> bool:
    b = pr.bound
    if hasattr(b, "valid"):
        return b.valid(nu)
    return nu >= b


def cmd_analyze(args) -> dict:
    spec = _load(args)
    pr = prepare(spec)
    out = {"command": "analyze", "problem": format_problem(spec), "setting": pr.setting, "bounds": _bounds(pr)}
    if pr.setting == "multiproj":
        out["bounds"]["eta0_conventions"] = {
            "sum(d_i)-gamma": pr.info["nu0"],
            "sum(d_i)-gamma+1": pr.info["eta0"],
        }
    if pr.ring.base is not None:
        out["ring"] = {"variables": len(pr.ring.coords)}
        if args.ideal:
            ideal = toric_ideal(pr.ring, args.ideal_degree)
            names = [f"T{i}" for i in range(len(pr.ring.coords))]
            out["ring"]["toric_ideal"] = [g.to_string(names) for g in ideal]
            out["ring"]["toric_ideal_complete"] = ideal.complete
    return out


def cmd_matrix(args) -> dict:
    spec = _load(args)
    pr = prepare(spec)
    m = _matrix(args, pr, _seed(args))
    return {"command": "matrix", "generic_rank": m.generic_rank, **m.to_dict()}


def cmd_implicitize(args) -> dict:
    seed = _seed(args)
    spec = _load(args)
    pr = prepare(spec)
    m = _matrix(args, pr, seed)
    out = {
        "command": "implicitize",
        "problem": format_problem(spec),
        "setting": pr.setting,
        "seed": seed,
        "bounds": _bounds(pr),
        "matrix": {"rows": m.rows, "cols": m.cols, "nu": m.nu, "generic_rank": m.generic_rank,
                   "target_vars": m.target_vars},
    }
    started = time.perf_counter()
    if args.check_only:
        if pr.setting == "multiproj":
            raise InputError("--check-only needs the projective or multigraded setting")
        diag = strand_diagnostics(pr.ring, pr.data, m.nu)
        chk = representation_check(m, diag, seed=seed)
        out["check"] = {
            "strand_dims": list(diag.values()),
            "euler": diag.euler,
            "expected_degree": chk.expected_degree,
            "gcd_degree": chk.gcd_degree,
            "rank_drop_on_image": f"{chk.dropped_on}/{chk.on_points}",
            "full_rank_off_image": f"{chk.full_off}/{chk.off_points}",
            "ok": chk.ok,
        }
        if not chk.ok:
            raise Failure(f"M_nu at nu={m.nu} does not represent a hypersurface of the expected degree",
                          _with_suggestion(out, pr, m.nu))
        return out
    try:
        res = implicit_equation(m, strategy=args.strategy, samples=args.samples, seed=seed, route=args.route)
    except (VerificationFailed, RankDeficient) as exc:
        out["error"] = str(exc)
        raise Failure(str(exc), _with_suggestion(out, pr, m.nu)) from exc
    names = m.target_vars
    out["result"] = {
        "candidate": res.candidate.to_string(names),
        "degree": res.degree,
        "verified": res.verified,
        "samples": res.samples_checked,
        "route": res.route,
        "minors": res.selections,
        "factors": [
            {"poly": f.poly.to_string(names), "degree": f.poly.total_degree(), "status": f.status,
             "multiplicity": f.multiplicity}
            for f in res.factors
        ],
        "identity_certified": res.identity_certified,
        "deg_formula": None if res.deg_formula is None else {"area": res.deg_formula.area,
                                                              "note": res.deg_formula.note},
    }
    if args.timings:
        out["timings"] = {"implicit_equation_s": round(time.perf_counter() - started, 3)}
    return out


def _with_suggestion(out: dict, pr, nu) -> dict:
    base = pr.bound if isinstance(pr.bound, int) else None
    if base is not None and isinstance(nu, int) and nu < base + 3:
        out["suggestion"] = f"try --nu {nu + 1} (suggestions go up to nu0+3 = {base + 3})"
    return out


def cmd_check(args) -> dict:
    try:
        with open(args.matrix, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from exc
    if data.get("schema") != SCHEMA:
        raise InputError(f"unsupported schema {data.get('schema')!r}")
    m = RepMatrix.from_dict(data)
    if len(args.point) != len(m.target_vars):
        raise InputError(f"point needs {len(m.target_vars)} coordinates ({', '.join(m.target_vars)})")
    on = is_on_hypersurface(m, args.point)
    return {"command": "check", "point": [str(x) for x in args.point], "on_hypersurface": on,
            "verdict": "on" if on else "off"}


def cmd_region(args) -> dict:
    ranks = args.ranks if isinstance(args.ranks, tuple) else (args.ranks,)
    gam = args.gamma if isinstance(args.gamma, tuple) else (args.gamma,)
    if len(ranks) != len(gam):
        raise InputError("--ranks and --gamma need the same length")
    try:
        res = region_RB(ranks, gam, general=args.general)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = {"command": "region", "ranks": list(ranks), "gamma": list(gam), "region": res.region.describe()}
    if res.complement is None:
        out["complement"] = None
        out["note"] = "the valid set is not a finite union of positive orthants; use --test for membership"
    else:
        out["complement"] = [list(o.shift) for o in res.complement.orthants]
        out["complement_text"] = res.complement.describe()
    if args.test is not None:
        pt = args.test if isinstance(args.test, tuple) else (args.test,)
        out["test"] = {"point": list(pt), "valid": res.valid(pt)}
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toricimplicit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, matrix=True):
        p.add_argument("--json", action="store_true", help="print JSON instead of text")
        p.add_argument("--out", help="also write the JSON report here")
        if matrix:
            p.add_argument("--nu", type=_int_tuple, help="strand degree, e.g. 2 or 3,2")
            p.add_argument("--setting", choices=("projective", "multiproj", "multigraded"))
            p.add_argument("--force", action="store_true", help="allow nu below the bound and large matrices")
            p.add_argument("--seed", type=int, help=f"random seed (default ${SEED_ENV} or 0)")

    p = sub.add_parser("analyze", help="polytope, ring and degree bounds")
    p.add_argument("file")
    p.add_argument("--setting", choices=("projective", "multiproj", "multigraded"))
    p.add_argument("--ideal", action="store_true", help="also list toric ideal generators")
    p.add_argument("--ideal-degree", type=int, default=3)
    common(p, matrix=False)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("matrix", help="build the representation matrix")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("implicitize", help="implicit equation from the matrix")
    p.add_argument("file")
    p.add_argument("--strategy", choices=("multi-minor-gcd", "single-minor"), default="multi-minor-gcd")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--route", choices=("auto", "symbolic", "modular"), default="auto")
    p.add_argument("--check-only", action="store_true",
                   help="only test that the matrix represents a hypersurface of the expected degree")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identity)")
    common(p)
    p.set_defaults(func=cmd_implicitize)

    p = sub.add_parser("check", help="rank-drop test of a point against a saved matrix")
    p.add_argument("matrix")
    p.add_argument("--point", type=_point, required=True, help="comma-separated rationals")
    common(p, matrix=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("region", help="valid multidegrees for a product of projective spaces")
    p.add_argument("--ranks", type=_int_tuple, required=True)
    p.add_argument("--gamma", type=_int_tuple, required=True)
    p.add_argument("--general", action="store_true", help="evaluate the k-union definition directly")
    p.add_argument("--test", type=_int_tuple, help="also test one multidegree")
    common(p, matrix=False)
    p.set_defaults(func=cmd_region)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            logging.captureWarnings(True)
            payload = args.func(args)
    except (ParseError, ArityError, ZeroComponent, InputError, EmptyMatrix, NotHomogeneousOnPolytope, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Failure as exc:
        _emit(exc.payload, args)
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except (AssertionError, ArithmeticError, RuntimeError) as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    finally:
        logging.captureWarnings(False)
    _emit(payload, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())

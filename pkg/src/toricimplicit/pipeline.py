"""From a parsed problem to a ring, its sections and the degree bound."""

from __future__ import annotations

from dataclasses import dataclass, field

from toricimplicit.arith import SparsePoly, poly_gcd
from toricimplicit.polytope import LatticePolytope, contraction, gamma, lattice_points, newton_polytope, normalized_area
from toricimplicit.regularity import (
    eta0_multiproj_codomain,
    nu0_multiproj_codomain,
    nu0_projective,
    region_RB,
)
from toricimplicit.semigroup import ToricRing, build_cox_ring, build_pair_ring, build_ring
from toricimplicit.ingestion import ProblemSpec, normalize_pairs


@dataclass
class Prepared:
    spec: ProblemSpec
    setting: str
    ring: ToricRing
    data: list  # ring elements, or pairs of ring elements
    polytope: LatticePolytope | None
    bound: object  # int, or a RegionResult for the multigraded source
    info: dict = field(default_factory=dict)

    @property
    def default_nu(self):
        nu = self.spec.options.get("nu")
        if nu is not None:
            return nu
        if self.setting == "multigraded":
            comp = self.bound.complement
            if comp is None or not comp.orthants:
                raise ValueError("no closed-form valid region; pass nu explicitly")
            return min(comp.orthants, key=lambda o: (sum(o.shift), o.shift)).shift
        return self.bound


def _polytope_option(spec: ProblemSpec):
    pts = spec.options.get("polytope")
    return LatticePolytope(pts) if pts else None


def _polytope_summary(P: LatticePolytope) -> dict:
    c = contraction(P)
    out = {
        "vertices": [list(v) for v in P.vertices],
        "lattice_points": len(lattice_points(P)),
        "contraction_factor": c.factor,
        "contraction_vertices": [list(v) for v in c.base.vertices],
        "gamma": gamma(c.base),
    }
    if P.dim == 2:
        out["normalized_area"] = normalized_area(P)
    return out


def prepare(spec: ProblemSpec) -> Prepared:
    setting = spec.setting
    override = _polytope_option(spec)
    if setting == "multigraded":
        if spec.ranks is None:
            raise ValueError("the multigraded setting needs `target multigraded r1,...,rs`")
        ring, h = build_cox_ring(spec.projective_sections(), spec.ranks)
        rho = h[0].degree
        region = region_RB(spec.ranks, rho)
        info = {
            "ranks": list(spec.ranks),
            "degree": list(rho),
            "region_complement": region.complement.describe() if region.complement is not None else None,
        }
        return Prepared(spec, setting, ring, h, None, region, info)
    if setting == "multiproj":
        pairs = normalize_pairs(spec)
        ring, prs = build_pair_ring(pairs, polytope=override)
        used = override or newton_polytope([p for pair in pairs for p in pair])
        degs = [f.degree for f, _ in prs]
        g = gamma(ring.base)
        nu0 = nu0_multiproj_codomain(degs, g)
        info = {
            "pair_degrees": degs,
            "gamma": g,
            "nu0": nu0,
            "eta0": eta0_multiproj_codomain(degs, g),
            "polytope": _polytope_summary(used),
        }
        return Prepared(spec, setting, ring, prs, used, nu0, info)
    sections = spec.projective_sections()
    ring, h = build_ring(sections, polytope=override)
    used = override or newton_polytope(sections)
    g = gamma(ring.base)
    n = len(h) - 1
    info = {"n": n, "d": ring.factor, "gamma": g, "polytope": _polytope_summary(used)}
    if n >= 2:
        info["nu0"] = nu0_projective(n, ring.factor, g)
    bound = info.get("nu0", 1)
    return Prepared(spec, setting, ring, h, used, bound, info)


def dehomogenize(poly: SparsePoly) -> SparsePoly:
    """Set the last variable to 1."""
    out = SparsePoly.zero(poly.nvars - 1)
    for e, c in poly.terms.items():
        out = out + SparsePoly.monomial(e[:-1], c)
    return out


def prepare_projective_pairs(pairs: list) -> tuple:
    """Pairs of forms on P^k, seen on the chart where the last variable is 1.

    The polytope is the standard simplex, so a pair of degree d fits in d
    times it; returns (ring, ring-element pairs, gamma).
    """
    k = pairs[0][0].nvars - 1
    simplex = [tuple(0 for _ in range(k))] + [tuple(int(i == j) for j in range(k)) for i in range(k)]
    affine = [(dehomogenize(f), dehomogenize(g)) for f, g in pairs]
    ring, prs = build_pair_ring(affine, polytope=simplex)
    return ring, prs, gamma(ring.base)


def common_denominator_sections(pairs: list) -> list:
    """(L : f_1 L/g_1 : ... : f_n L/g_n) with L the lcm of the denominators."""
    L = pairs[0][1]
    for _, g in pairs[1:]:
        L = (L * g).divexact(poly_gcd(L, g))
    return [L] + [(f * L).divexact(g) for f, g in pairs]


def projective_bound_for_pairs(pairs: list) -> dict:
    """Size data for the P^n compactification obtained by clearing denominators."""
    sections = common_denominator_sections(pairs)
    ring, h = build_ring(sections)
    g = gamma(ring.base)
    return {"d": ring.factor, "gamma": g, "nu0": nu0_projective(len(h) - 1, ring.factor, g)}

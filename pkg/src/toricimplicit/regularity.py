"""Degree bounds: nu_0 for both codomains and the multigraded region for products of projective spaces."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence


# ---------------------------------------------------------------------------
# Z-graded bounds


def nu0_projective(n: int, d: int, gamma: int) -> int:
    """max{(n-2)d, (n-1)d - gamma} for a map to P^n given by forms of degree d."""
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    return max((n - 2) * d, (n - 1) * d - gamma)


def nu0_multiproj_codomain(d: Sequence[int], gamma: int) -> int:
    """sum(d_i) - gamma for the (P^1)^n codomain."""
    if not d:
        raise ValueError("need at least one pair")
    return sum(d) - gamma


def eta0_multiproj_codomain(d: Sequence[int], gamma: int) -> int:
    """The shifted convention sum(d_i) - gamma + 1 used in some worked examples."""
    return nu0_multiproj_codomain(d, gamma) + 1


@dataclass(frozen=True)
class TradeoffReport:
    delta: int
    threshold: int
    contraction_smaller: bool

    def describe(self) -> str:
        verdict = "fewer rows" if self.contraction_smaller else "no fewer rows"
        return f"delta={self.delta}, d-1={self.threshold}: the contracted polytope gives {verdict}"


def contraction_tradeoff(d: int, gamma: int, gamma_prime: int, n: int = 3) -> TradeoffReport:
    """Compare row counts at the bound for N = d N' against N'.

    delta = d(gamma+1) - (gamma'+1); the contracted embedding is strictly
    smaller iff delta > d - 1.
    """
    delta = d * (gamma + 1) - (gamma_prime + 1)
    return TradeoffReport(delta, d - 1, delta > d - 1)


# ---------------------------------------------------------------------------
# regions of Z^s


@dataclass(frozen=True)
class Orthant:
    shift: tuple
    signs: tuple  # +1 or -1 per coordinate

    def __contains__(self, x) -> bool:
        return all((xi >= s) if g > 0 else (xi <= s) for xi, s, g in zip(x, self.shift, self.signs))

    def translate(self, v: Sequence[int]) -> "Orthant":
        return Orthant(tuple(s + t for s, t in zip(self.shift, v)), self.signs)

    def describe(self) -> str:
        cone = "x".join("N" if g > 0 else "-N" for g in self.signs)
        return f"{cone}+{self.shift}"


@dataclass(frozen=True)
class Region:
    """Finite union of shifted orthants in Z^s."""

    s: int
    orthants: tuple = ()

    def __contains__(self, x) -> bool:
        if len(x) != self.s:
            raise ValueError(f"expected a point with {self.s} coordinates")
        return any(x in o for o in self.orthants)

    def __or__(self, other: "Region") -> "Region":
        return Region(self.s, tuple(dict.fromkeys(self.orthants + other.orthants)))

    def translate(self, v: Sequence[int]) -> "Region":
        return Region(self.s, tuple(o.translate(v) for o in self.orthants))

    def __bool__(self) -> bool:
        return bool(self.orthants)

    def describe(self) -> str:
        return " U ".join(o.describe() for o in self.orthants) or "empty"

    def complement(self) -> "Region | None":
        """Complement as a union of positive orthants, or None when it is not of that shape."""
        return _complement_positive(self)


def _complement_positive(region: Region) -> Region | None:
    s = region.s
    cuts = [set() for _ in range(s)]
    for o in region.orthants:
        for j, (sh, g) in enumerate(zip(o.shift, o.signs)):
            cuts[j].add(sh if g > 0 else sh + 1)
    cuts = [sorted(c) for c in cuts]
    # cell k of coordinate j starts at cuts[j][k-1] (k = 0 is unbounded below)
    reps = [[c[0] - 1] + c if c else [0] for c in cuts]
    outside = set()
    for cell in itertools.product(*[range(len(r)) for r in reps]):
        pt = tuple(reps[j][k] for j, k in enumerate(cell))
        if pt not in region:
            outside.add(cell)
    for cell in outside:
        if any(k == 0 and cuts[j] for j, k in enumerate(cell)):
            return None
        for j in range(s):
            if cell[j] + 1 < len(reps[j]):
                up = cell[:j] + (cell[j] + 1,) + cell[j + 1:]
                if up not in outside:
                    return None
    corners = {tuple(reps[j][k] for j, k in enumerate(cell)) for cell in outside}
    minimal = sorted(
        c for c in corners if not any(o != c and all(a <= b for a, b in zip(o, c)) for o in corners)
    )
    return Region(s, tuple(Orthant(c, (1,) * s) for c in minimal))


def _subsets(s: int):
    for size in range(1, s + 1):
        yield from itertools.combinations(range(s), size)


def cohomological_index(ranks: Sequence[int], alpha: Sequence[int]) -> int:
    """Index l of the local cohomology module carried by the orthant of `alpha`.

    With r_j the projective dimension of block j (so r_j + 1 variables),
    l = sum_{j in alpha} (r_j + 1) - (#alpha - 1).
    """
    return sum(ranks[j] + 1 for j in alpha) - (len(alpha) - 1)


def orthant_for(ranks: Sequence[int], alpha: Sequence[int]) -> Orthant:
    s = len(ranks)
    shift = tuple(-(ranks[j] + 1) if j in alpha else 0 for j in range(s))
    signs = tuple(-1 if j in alpha else 1 for j in range(s))
    return Orthant(shift, signs)


def multigraded_supports(ranks: Sequence[int]) -> dict:
    """Supports of H^l_B(R) for the Cox ring of P^{r_1} x ... x P^{r_s}, keyed by l."""
    if not ranks or any(r < 1 for r in ranks):
        raise ValueError("ranks must be positive")
    s = len(ranks)
    out: dict = {}
    for alpha in _subsets(s):
        ell = cohomological_index(ranks, alpha)
        region = out.get(ell, Region(s))
        out[ell] = region | Region(s, (orthant_for(ranks, alpha),))
    return dict(sorted(out.items()))


def sigma_region(ranks: Sequence[int], gamma: Sequence[int]) -> Region:
    """Union over l of Supp H^l_B(R) + l*gamma."""
    s = len(ranks)
    total = Region(s)
    for ell, region in multigraded_supports(ranks).items():
        total = total | region.translate([ell * g for g in gamma])
    return total


@dataclass(frozen=True)
class RegionResult:
    region: Region
    complement: Region | None

    def valid(self, nu: Sequence[int]) -> bool:
        return tuple(nu) not in self.region


def region_RB(ranks: Sequence[int], gamma: Sequence[int], general: bool = False, m: int | None = None) -> RegionResult:
    """The region to avoid when choosing the strand degree, with its complement.

    For gamma in N^s the sets Sigma - k*gamma decrease with k, so the union
    collapses to Sigma - gamma. ``general=True`` evaluates the k-union
    directly, with k < min(m, cohomological dimension).
    """
    gamma = tuple(int(g) for g in gamma)
    if len(gamma) != len(ranks):
        raise ValueError("gamma must have one entry per block")
    sigma = sigma_region(ranks, gamma)
    if general:
        cd = max(multigraded_supports(ranks))
        top = min(m if m is not None else cd, cd)
        region = Region(len(ranks))
        for k in range(1, top):
            region = region | sigma.translate([-k * g for g in gamma])
    else:
        if any(g < 0 for g in gamma):
            raise ValueError("the simplified region needs gamma >= 0")
        region = sigma.translate([-g for g in gamma])
    return RegionResult(region, region.complement())

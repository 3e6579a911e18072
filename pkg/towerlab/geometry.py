"""
Genus and ramification for the catalog towers

Curve levels here are exponents m: level m of an X0(l^n) tower is X0(l^m)
and of a Shimura tower XX0(p^m).  The curve of (m-1)-tuples of base points
models level m, so level 2 is the base curve itself.
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Dict, List, Optional, Tuple

import sympy
from sympy import Expr, Poly, Rational

from .config import DEFAULT_SURROGATES, MAX_DEPTH, MAX_GENUS_LEVEL, MAX_WORKERS, SURROGATE_DEGREE
from .errors import GenusUnavailableError, RamificationError
from .finitefield import FieldCtx, UniPoly, field_create, uni_roots
from .towercore import Correspondence, TowerSpec, binary_roots, check_admissible

logger = logging.getLogger(__name__)

t, xi = sympy.symbols("t xi")
x_sym, y_sym = sympy.symbols("x y")


@dataclass(frozen=True)
class RamificationProfile:
    """Ramification indices above each branch point of a degree-d cover."""

    degree: int
    branches: Dict[object, Tuple[int, ...]] = field(default_factory=dict, hash=False)

    def validate(self, characteristic: Optional[int] = None) -> None:
        for point, indices in self.branches.items():
            if any(e < 1 for e in indices) or sum(indices) != self.degree:
                raise RamificationError(
                    f"Indices {list(indices)} above {point} do not sum to the degree {self.degree}"
                )
        if characteristic and not self.is_tame(characteristic):
            raise RamificationError(f"Profile is wildly ramified in characteristic {characteristic}")

    def is_tame(self, characteristic: int) -> bool:
        return all(e % characteristic for indices in self.branches.values() for e in indices)

    def different_degree(self) -> int:
        return sum(e - 1 for indices in self.branches.values() for e in indices)


def rh_genus(degree: int, g_base: int, profile: RamificationProfile) -> int:
    """Genus of a tame cover from Riemann-Hurwitz: 2g - 2 = d(2g_base - 2) + sum(e - 1).

    Args:
        degree: Degree of the cover.
        g_base: Genus of the base curve.
        profile: Ramification above the branch points.

    Returns:
        The genus of the covering curve.
    """
    if profile.degree != degree:
        raise RamificationError(f"Profile degree {profile.degree} differs from cover degree {degree}")
    profile.validate()
    twice = degree * (2 * g_base - 2) + profile.different_degree() + 2
    if twice % 2 or twice < 0:
        raise RamificationError(f"Riemann-Hurwitz gives the non-genus value {Fraction(twice, 2)}")
    return twice // 2


def shimura_ram_index(e: int, e_prime: int) -> int:
    """Index of a point of order e' above an elliptic point of order e."""
    if e < 1 or e_prime < 1:
        raise RamificationError("Elliptic orders must be positive")
    return Fraction(e_prime, e).denominator


# ----------------------------------------------------------------------
# Triangle-group data for the p2 Shimura tower
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class TriangleData:
    """Orders at J = 1, 0, infinity and the elliptic points of the first cover."""

    orders: Tuple[int, int, int]
    base_points: Tuple[str, str, str]
    # J value -> [(point above, its elliptic order)]
    cover_points: Dict[str, Tuple[Tuple[str, int], ...]] = field(hash=False)
    j_map: Expr = field(hash=False)
    xi_map: Expr = field(hash=False)


P2_TRIANGLE = TriangleData(
    orders=(2, 4, 12),
    base_points=("1", "0", "inf"),
    cover_points={
        "inf": (("t=inf", 4),),
        "0": (("t=0", 4), ("t=3/4", 2)),
        "1": (("t=1", 2), ("t=1/4", 1)),
    },
    j_map=t * (4 * t - 3) ** 2,
    xi_map=(xi**2 + 3) / 4,
)

P3_TRIANGLE_ORDERS = (2, 3, 9)


def shimura_cover_profile(data: TriangleData = P2_TRIANGLE) -> RamificationProfile:
    """Profile of the first cover over X(1) from the elliptic-order rule."""
    orders = dict(zip(data.base_points, data.orders))
    branches = {
        j: tuple(shimura_ram_index(orders[j], e_prime) for _, e_prime in points)
        for j, points in data.cover_points.items()
    }
    degree = sum(branches["inf"])
    return RamificationProfile(degree, branches)


def map_profile(expr: Expr, var: sympy.Symbol, values: Tuple) -> RamificationProfile:
    """Ramification of the rational map var -> expr above the given values.

    ``values`` may contain sympy.oo.  Indices come from factoring over Q, one
    point per root of each irreducible factor.
    """
    num, den = sympy.fraction(sympy.together(expr))
    num_poly, den_poly = Poly(num, var), Poly(den, var)
    degree = max(num_poly.degree(), den_poly.degree())
    branches: Dict[object, Tuple[int, ...]] = {}
    for value in values:
        if value is sympy.oo:
            target = den_poly
        else:
            target = num_poly - Rational(value) * den_poly
        indices: List[int] = []
        if target.degree() < degree:
            indices.append(degree - max(target.degree(), 0))
        _, factors = sympy.factor_list(target.as_expr(), var)
        for factor, mult in factors:
            indices.extend([mult] * Poly(factor, var).degree())
        branches[str(value)] = tuple(sorted(indices))
    return RamificationProfile(degree, branches)


def xi_to_j_map(data: TriangleData = P2_TRIANGLE) -> Expr:
    """The degree-6 composite xi -> t -> J."""
    return sympy.factor(data.j_map.subs(t, data.xi_map))


def triangle_identities(data: TriangleData = P2_TRIANGLE) -> Dict[str, bool]:
    """Exact checks of the J-map factorizations and the involutions on t and xi."""
    j_map = data.j_map
    w1 = 3 / (4 * t)
    w2 = (xi + 3) / (xi - 1)
    root = sympy.sqrt(-3)
    return {
        "j_map": sympy.expand(j_map - t * (4 * t - 3) ** 2) == 0,
        "j_minus_one": sympy.expand(j_map - 1 - (t - 1) * (4 * t - 1) ** 2) == 0,
        "w1_involution": sympy.cancel(w1.subs(t, w1) - t) == 0,
        "w1_swaps_zero_infinity": sympy.limit(w1, t, sympy.oo) == 0,
        "w1_swaps_one_three_quarters": w1.subs(t, 1) == Rational(3, 4),
        "w2_fixes_minus_one": w2.subs(xi, -1) == -1,
        "w2_swaps_roots_of_minus_three": sympy.simplify(w2.subs(xi, root) + root) == 0,
    }


# ----------------------------------------------------------------------
# Classical genus of X0(N)
# ----------------------------------------------------------------------
def _kronecker(a: int, p: int) -> int:
    if p == 2:
        return 0 if a % 2 == 0 else (1 if a % 8 in (1, 7) else -1)
    return sympy.legendre_symbol(a % p, p) if a % p else 0


def x0_genus(N: int) -> int:
    """Genus of X0(N) from index, elliptic points and cusps."""
    if N < 1:
        raise GenusUnavailableError(f"Level must be positive, got {N}")
    primes = sympy.primefactors(N)
    index = Fraction(N)
    for p in primes:
        index *= Fraction(p + 1, p)
    nu2 = 0
    if N % 4:
        nu2 = 1
        for p in primes:
            nu2 *= 1 + _kronecker(-4, p)
    nu3 = 0
    if N % 9:
        nu3 = 1
        for p in primes:
            nu3 *= 1 + _kronecker(-3, p)
    cusps = sum(int(sympy.totient(gcd(d, N // d))) for d in sympy.divisors(N))
    genus = 1 + index / 12 - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    if genus.denominator != 1 or genus < 0:
        raise GenusUnavailableError(f"Genus formula produced {genus} for N={N}")
    return int(genus)


# ----------------------------------------------------------------------
# Ramification orbits over a surrogate field
# ----------------------------------------------------------------------
Point = Optional[int]


@dataclass(frozen=True)
class StepReport:
    level: int
    ramified: bool
    different: Optional[int]
    genus: int
    method: str


@dataclass(frozen=True)
class OrbitReport:
    tower: str
    surrogate: int
    depth: int
    steps: Tuple[StepReport, ...]
    stabilization_level: Optional[int]
    special_points: int

    def as_dict(self) -> Dict:
        return {
            "tower": self.tower,
            "surrogate": self.surrogate,
            "depth": self.depth,
            "special_points": self.special_points,
            "stabilization_level": self.stabilization_level,
            "levels": [
                {
                    "level": s.level,
                    "ramified": s.ramified,
                    "different": s.different,
                    "genus": s.genus,
                    "method": s.method,
                }
                for s in self.steps
            ],
        }


def _visible_roots(ctx: FieldCtx, expr: Expr, var: sympy.Symbol) -> List[Point]:
    poly = Poly(expr, var)
    f = UniPoly(ctx, tuple(ctx.embed(int(c)) for c in reversed(poly.all_coeffs())))
    if f.is_zero():
        raise RamificationError(f"{expr} vanishes modulo {ctx.p}")
    if f.degree < 1:
        return []
    roots = uni_roots(f)
    if sum(m for _, m in roots) != f.degree:
        raise RamificationError(f"Special values of degree {f.degree} do not split over GF({ctx.q})")
    return [r.value for r, _ in roots]


def _transpose(matrix: Tuple[Tuple[int, ...], ...]) -> Tuple[Tuple[int, ...], ...]:
    return tuple(zip(*matrix))


def _fiber(ctx: FieldCtx, matrix, l: int, c: Point, require_full: bool) -> List[Tuple[Point, int]]:
    """Rational fiber over c; the non-rational remainder must be squarefree."""
    form = Correspondence(l, matrix).fiber_form(ctx, c)
    roots = binary_roots(ctx, form)
    rational = sum(m for _, m in roots)
    if rational < l:
        if require_full:
            raise RamificationError(f"Fiber over {c} leaves GF({ctx.q}); choose a larger surrogate")
        rest = UniPoly(ctx, form)
        for r, m in roots:
            if r is None:
                continue
            for _ in range(m):
                rest, _ = rest.divide_linear(r)
        if rest.degree > 0 and rest.gcd(rest.derivative()).degree > 0:
            raise RamificationError(f"Repeated fiber points over {c} are not visible over GF({ctx.q})")
    return roots


def _local_branches(ctx: FieldCtx, matrix, l: int, c: Point, c2: Point) -> List[Tuple[int, int]]:
    """(a, b) for each branch of Phi at (c, c2): x - c ~ s^a and y - c2 ~ s^b."""
    chart = [[0] * (l + 1) for _ in range(l + 1)]
    for i in range(l + 1):
        for j in range(l + 1):
            coeff = matrix[i][j]
            if coeff:
                chart[l - i if c is None else i][l - j if c2 is None else j] = ctx.embed(coeff)
    cx = 0 if c is None else c
    cy = 0 if c2 is None else c2
    shifted = [[0] * (l + 1) for _ in range(l + 1)]
    for i in range(l + 1):
        for j in range(l + 1):
            if not chart[i][j]:
                continue
            for a in range(i + 1):
                wa = ctx.mul(ctx.embed(comb(i, a)), ctx.pow(cx, i - a))
                for b in range(j + 1):
                    wb = ctx.mul(ctx.embed(comb(j, b)), ctx.pow(cy, j - b))
                    shifted[a][b] = ctx.add(shifted[a][b], ctx.mul(chart[i][j], ctx.mul(wa, wb)))
    if shifted[0][0]:
        raise RamificationError(f"({c}, {c2}) is not on the correspondence")
    terms = [(i, j) for i in range(l + 1) for j in range(l + 1) if shifted[i][j]]
    mu = min(i + j for i, j in terms)
    if mu == 1:
        a = next((j for j in range(1, l + 1) if shifted[0][j]), None)
        b = next((i for i in range(1, l + 1) if shifted[i][0]), None)
        if a is None or b is None:
            raise RamificationError(f"A coordinate line is a component of Phi at ({c}, {c2})")
        return [(a, b)]
    cone = UniPoly(ctx, tuple(shifted[k][mu - k] for k in range(mu + 1)))
    if not shifted[0][mu] or not shifted[mu][0] or cone.gcd(cone.derivative()).degree > 0:
        raise RamificationError(f"Singular point ({c}, {c2}) of multiplicity {mu} is not ordinary")
    return [(1, 1)] * mu


def _special_points(spec: TowerSpec, ctx: FieldCtx) -> Dict[Tuple[Point, Point], List[Tuple[int, int]]]:
    corr = spec.correspondence
    l, matrix = corr.l, corr.matrix
    transposed = _transpose(matrix)
    phi = corr.affine_expr(x_sym, y_sym)
    x_values = set(_visible_roots(ctx, sympy.discriminant(phi, y_sym), x_sym))
    x_values |= set(_visible_roots(ctx, Poly(phi, y_sym).LC(), x_sym)) | {None}
    y_values = set(_visible_roots(ctx, sympy.discriminant(phi, x_sym), y_sym))
    y_values |= set(_visible_roots(ctx, Poly(phi, x_sym).LC(), y_sym)) | {None}

    points = set()
    for c in x_values:
        for c2, mult in _fiber(ctx, matrix, l, c, require_full=False):
            if mult > 1 or c2 in y_values:
                points.add((c, c2))
    for c2 in y_values:
        for c, mult in _fiber(ctx, transposed, l, c2, require_full=False):
            if mult > 1 or c in x_values:
                points.add((c, c2))
    special = {pt: _local_branches(ctx, matrix, l, *pt) for pt in points}
    logger.debug("%s over GF(%d): special points %s", spec.name, ctx.q, special)
    return special


def _stabilization(steps: List[StepReport], depth: int) -> Optional[int]:
    for m in range(2, depth):
        later = [s for s in steps if m < s.level <= depth]
        if later and not any(s.ramified for s in later):
            return m
    return None


def ramification_orbit(spec: TowerSpec, depth: int, field_surrogate: FieldCtx) -> OrbitReport:
    """Follow ramification through the tower up to curve level ``depth``.

    Each step C_n -> C_(n+1) has degree l; the index data M(c) of points
    over every tracked last-coordinate value c is pushed through the local
    branches of Phi, and Riemann-Hurwitz turns the ramification into genus.

    Args:
        spec: A line-based tower.
        depth: Highest curve level to reach, at most MAX_DEPTH.
        field_surrogate: Working field of large admissible characteristic.
    """
    if spec.base == "elliptic":
        raise RamificationError(f"Orbit analysis needs a rational base curve; {spec.name} is elliptic")
    if not 1 <= depth <= MAX_DEPTH:
        raise RamificationError(f"Depth must be in 1..{MAX_DEPTH}, got {depth}")
    check_admissible(spec, field_surrogate)
    ctx = field_surrogate
    corr = spec.correspondence
    l, matrix = spec.l, corr.matrix

    special = _special_points(spec, ctx)
    tracked_values = {c for pt in special for c in pt}
    tracked: Dict[Point, Counter] = {c: Counter({1: 1}) for c in tracked_values}
    steps = [StepReport(m, True, None, 0, "anchor") for m in range(1, min(depth, 2) + 1)]
    mass, genus = 1, 0

    for n in range(1, depth - 1):
        targets = set(tracked_values)
        for c, counts in tracked.items():
            if set(counts) != {1}:
                targets.update(c2 for c2, _ in _fiber(ctx, matrix, l, c, require_full=True))
        new: Dict[Point, Counter] = {}
        different = 0
        for c2 in targets:
            acc: Counter = Counter()
            for c, counts in tracked.items():
                if not corr.contains(ctx, c, c2):
                    continue
                for a, b in special.get((c, c2), [(1, 1)]):
                    for e, count in counts.items():
                        g = gcd(a, e)
                        acc[b * e // g] += count * g
                        if a // g > 1:
                            different += count * g * (a // g - 1)
            remainder = mass * l - sum(e * count for e, count in acc.items())
            if remainder < 0:
                raise RamificationError(f"Index mass over {c2} exceeds the degree at step {n}")
            if remainder:
                acc[1] += remainder
            new[c2] = acc
        tracked = new
        mass *= l
        twice = l * (2 * genus - 2) + different + 2
        if twice % 2 or twice < 0:
            raise RamificationError(f"Non-integral genus at step {n} of {spec.name}")
        genus = twice // 2
        steps.append(StepReport(n + 2, different > 0, different, genus, "riemann-hurwitz"))
        logger.info(
            "%s over GF(%d): level %d different %d genus %d (%d tracked values)",
            spec.name, ctx.q, n + 2, different, genus, len(tracked),
        )

    return OrbitReport(
        tower=spec.name,
        surrogate=ctx.q,
        depth=depth,
        steps=tuple(steps),
        stabilization_level=_stabilization(steps, depth),
        special_points=len(special),
    )


def ramification_consensus(
    spec: TowerSpec, depth: int, surrogates: Tuple[int, ...] = DEFAULT_SURROGATES
) -> Dict:
    """Run the orbit analysis over GF(p^2) for each surrogate prime and require agreement."""
    fields = [field_create(p, SURROGATE_DEGREE) for p in surrogates]
    reports: List[Optional[OrbitReport]] = [None] * len(fields)
    with ThreadPoolExecutor(max_workers=min(MAX_WORKERS, len(fields))) as executor:
        future_to_index = {
            executor.submit(ramification_orbit, spec, depth, ctx): index
            for index, ctx in enumerate(fields)
        }
        for future in as_completed(future_to_index):
            reports[future_to_index[future]] = future.result()
    signatures = {
        tuple((s.level, s.different, s.genus) for s in report.steps) + (report.stabilization_level,)
        for report in reports
    }
    if len(signatures) != 1:
        raise RamificationError(
            f"Surrogates {list(surrogates)} disagree on the ramification of {spec.name}"
        )
    first = reports[0].as_dict()
    return {
        "tower": spec.name,
        "depth": depth,
        "surrogates": list(surrogates),
        "stabilization_level": first["stabilization_level"],
        "levels": first["levels"],
        "special_points": [report.special_points for report in reports],
    }


# ----------------------------------------------------------------------
# Genus sequences
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class GenusRow:
    level: int
    genus: int
    method: str
    checked: Optional[bool] = None


# curve level m -> N of X0(N)
ORACLE_LEVELS = {
    "x0_2": lambda m: 2**m,
    "x0_3": lambda m: 3**m,
    "x0_4": lambda m: 4**m,
    "x0_5": lambda m: 5**m,
    "x0_6": lambda m: 6**m,
    "x0_3x2": lambda m: 3 * 2**m,
}

GENUS_ANCHORS = {
    ("x0_4", 2): 0,
    ("x0_6", 2): 1,
    ("shimura_p2", 1): 0,
    ("shimura_p2", 2): 0,
    ("shimura_p3", 1): 0,
    ("shimura_p3", 2): 0,
}


def _oracle_rows(spec: TowerSpec, nmax: int) -> List[GenusRow]:
    level_of = ORACLE_LEVELS[spec.name]
    rows = []
    for m in range(1, nmax + 1):
        genus = x0_genus(level_of(m))
        anchor = GENUS_ANCHORS.get((spec.name, m))
        if anchor is not None:
            if anchor != genus:
                logger.warning("%s level %d: formula genus %d differs from anchor %d", spec.name, m, genus, anchor)
            rows.append(GenusRow(m, anchor, "anchor"))
        else:
            rows.append(GenusRow(m, genus, "oracle-formula"))
    return rows


def _cross_check(spec: TowerSpec, rows: List[GenusRow], surrogate: int) -> List[GenusRow]:
    depth = min(len(rows), 4)
    if spec.base == "elliptic":
        logger.warning("Cross-check of %s skipped: no ramification orbit on an elliptic base", spec.name)
        return rows
    if depth < 3:
        return rows
    try:
        report = ramification_orbit(spec, depth, field_create(surrogate, SURROGATE_DEGREE))
    except RamificationError as e:
        logger.warning("Cross-check of %s skipped: %s", spec.name, e)
        return rows
    by_level = {s.level: s.genus for s in report.steps if s.level >= 3}
    out = []
    for row in rows:
        if row.level in by_level:
            agrees = by_level[row.level] == row.genus
            if not agrees:
                logger.warning(
                    "%s level %d: formula genus %d, ramification genus %d",
                    spec.name, row.level, row.genus, by_level[row.level],
                )
            row = GenusRow(row.level, row.genus, row.method, agrees)
        out.append(row)
    return out


def _shimura_rows(spec: TowerSpec, nmax: int, surrogates: Tuple[int, ...]) -> List[GenusRow]:
    depth = min(nmax, MAX_DEPTH)
    consensus = ramification_consensus(spec, depth, surrogates)
    rows = []
    for entry in consensus["levels"]:
        m = entry["level"]
        if (spec.name, m) in GENUS_ANCHORS:
            rows.append(GenusRow(m, GENUS_ANCHORS[(spec.name, m)], "anchor"))
        else:
            rows.append(GenusRow(m, entry["genus"], "riemann-hurwitz", True))
    if nmax > depth:
        if consensus["stabilization_level"] is None:
            raise GenusUnavailableError(
                f"{spec.name} is still ramified at level {depth}; genus past it is unavailable"
            )
        genus = rows[-1].genus
        for m in range(depth + 1, nmax + 1):
            genus = spec.l * (genus - 1) + 1
            rows.append(GenusRow(m, genus, "riemann-hurwitz"))
    return rows


def tower_genus_seq(
    spec: TowerSpec,
    nmax: int,
    cross_check: bool = True,
    surrogates: Tuple[int, ...] = DEFAULT_SURROGATES,
) -> List[GenusRow]:
    """Genus of the level-m curve for m = 1..nmax.

    Modular towers use the X0(N) formula (checked against the ramification
    orbit at levels 3 and 4 when ``cross_check`` is set); Shimura towers use
    the ramification orbit with the unramified recursion past its depth.
    """
    if not 1 <= nmax <= MAX_GENUS_LEVEL:
        raise GenusUnavailableError(f"Genus level must be in 1..{MAX_GENUS_LEVEL}, got {nmax}")
    if spec.name in ORACLE_LEVELS:
        rows = _oracle_rows(spec, nmax)
        if cross_check:
            rows = _cross_check(spec, rows, surrogates[0])
        return rows
    return _shimura_rows(spec, nmax, surrogates)


def genus_table(spec: TowerSpec, nmax: int, cross_check: bool = True) -> List[Dict]:
    """Rows for CSV output: tower, level, genus, method."""
    return [
        {"tower": spec.name, "level": row.level, "genus": row.genus, "method": row.method}
        for row in tower_genus_seq(spec, nmax, cross_check=cross_check)
    ]

"""
Recursive tower engine: catalog, fiber solving, chain counting and complete sets

A tower is given by a base curve C1 and a correspondence Phi of bidegree
(l, l) on C1 x C1.  Level n of the tower is modelled by n-tuples
(P1, ..., Pn) of base points with every consecutive pair on Phi.

Base points are encoded as
  - projective line: a field element (int) or None for the point (1:0);
  - elliptic curve gamma^2 = xi^3 + 1: a tuple (x, y) or None for O.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Tuple, Union

import sympy
from sympy import Expr, Poly

from .finitefield import FieldCtx, UniPoly, uni_roots
from .errors import ChainError, InadmissibleCharacteristicError, TowerLabError, UnknownTowerError
from .relations import Mobius, primitive_numerator, quintic, x, y

logger = logging.getLogger(__name__)

BasePoint = Union[None, int, Tuple[int, int]]

ELLIPTIC_ANCHOR = (2, 3)


def point_key(P: BasePoint) -> Tuple:
    """Sort key: finite points by value, the point at infinity last."""
    if P is None:
        return (1,)
    return (0, P)


@dataclass(frozen=True)
class Correspondence:
    """Phi as a coefficient matrix: matrix[i][j] multiplies X0^i X1^(l-i) Y0^j Y1^(l-j).

    On the affine chart x = X0/X1, y = Y0/Y1 this is sum matrix[i][j] x^i y^j.
    """

    l: int
    matrix: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        l = self.l
        if len(self.matrix) != l + 1 or any(len(row) != l + 1 for row in self.matrix):
            raise TowerLabError(f"Correspondence matrix must be {l + 1}x{l + 1}")
        if not any(self.matrix[l]) or not any(row[l] for row in self.matrix):
            raise TowerLabError(f"Correspondence does not have exact bidegree ({l}, {l})")

    @classmethod
    def from_poly(cls, poly: Poly, l: int) -> "Correspondence":
        matrix = [[0] * (l + 1) for _ in range(l + 1)]
        for (i, j), c in poly.as_dict().items():
            if i > l or j > l:
                raise TowerLabError(f"Term x^{i} y^{j} exceeds bidegree ({l}, {l})")
            matrix[i][j] = int(c)
        return cls(l, tuple(tuple(row) for row in matrix))

    def affine_expr(self, xs: Expr, ys: Expr) -> Expr:
        return sympy.expand(
            sum(
                c * xs**i * ys**j
                for i, row in enumerate(self.matrix)
                for j, c in enumerate(row)
                if c
            )
        )

    def fiber_form(self, ctx: FieldCtx, P: Optional[int]) -> Tuple[int, ...]:
        """Coefficients a_j of the binary form Phi(P; Y0, Y1) = sum a_j Y0^j Y1^(l-j)."""
        l = self.l
        if P is None:
            return tuple(ctx.embed(c) for c in self.matrix[l])
        powers = [1]
        for _ in range(l):
            powers.append(ctx.mul(powers[-1], P))
        out = []
        for j in range(l + 1):
            acc = 0
            for i in range(l + 1):
                c = self.matrix[i][j]
                if c:
                    acc = ctx.add(acc, ctx.mul(ctx.embed(c), powers[i]))
            out.append(acc)
        return tuple(out)

    def contains(self, ctx: FieldCtx, P: Optional[int], Q: Optional[int]) -> bool:
        form = self.fiber_form(ctx, P)
        if Q is None:
            return form[self.l] == 0
        return UniPoly(ctx, form)(Q) == 0


@dataclass(frozen=True)
class TowerSpec:
    """One recursive tower of the catalog."""

    name: str
    l: int
    base: str
    label: str
    relation: Callable[[Expr, Expr], Expr] = field(compare=False, repr=False)
    correspondence: Correspondence = field(compare=False, repr=False)
    excluded: FrozenSet[int] = frozenset()
    involution: Optional[Mobius] = None
    aux_involutions: Dict[str, Mobius] = field(default_factory=dict, compare=False, repr=False)

    def substituted_relation(self) -> Expr:
        """The defining relation with the next coordinate passed through w."""
        if self.base == "elliptic":
            return self.relation(x, y)
        return self.relation(x, self.involution(y))

    def admissible(self, p: int) -> bool:
        return p not in self.excluded


def _line_tower(name, l, label, relation, involution, excluded, aux=None) -> TowerSpec:
    mobius = Mobius(*involution)
    poly = primitive_numerator(relation(x, mobius(y)), x, y)
    return TowerSpec(
        name=name,
        l=l,
        base="line",
        label=label,
        relation=relation,
        correspondence=Correspondence.from_poly(poly, l),
        excluded=frozenset(excluded),
        involution=mobius,
        aux_involutions={key: Mobius(*coeffs) for key, coeffs in (aux or {}).items()},
    )


def _elliptic_tower() -> TowerSpec:
    def relation(u, v):
        return (u**3 - 8) * (v**3 - 8) - 72

    poly = primitive_numerator(relation(x, y), x, y)
    return TowerSpec(
        name="x0_6",
        l=6,
        base="elliptic",
        label="X0(6^n) over gamma^2 = xi^3 + 1",
        relation=relation,
        correspondence=Correspondence.from_poly(poly, 3),
        excluded=frozenset({2, 3}),
    )


@lru_cache(maxsize=1)
def catalog() -> Tuple[TowerSpec, ...]:
    """The eight towers, each Phi built by clearing denominators of its relation."""
    towers = (
        _line_tower(
            "x0_2", 2, "X0(2^n)",
            lambda u, v: (u**2 - 1) * (v**2 - 1) - 1, (1, 3, 1, -1), {2},
        ),
        _line_tower(
            "x0_3", 3, "X0(3^n)",
            lambda u, v: (u**3 - 1) * (v**3 - 1) - 1, (1, 2, 1, -1), {3},
        ),
        _line_tower(
            "x0_4", 4, "X0(4^n)",
            lambda u, v: (u**4 - 1) * (v**4 - 1) - 1, (1, 1, 1, -1), {2},
        ),
        _line_tower(
            "x0_5", 5, "X0(5^n)",
            lambda u, v: quintic(u) * quintic(v) - 125, (1, 4, 1, -1), {5},
        ),
        _elliptic_tower(),
        _line_tower(
            "x0_3x2", 2, "X0(3*2^n)",
            lambda u, v: (u**2 - 1) * (v**2 - 1) + 8, (-1, 3, 1, 1), {2, 3},
            aux={"w3": (0, -3, 1, 0)},
        ),
        _line_tower(
            "shimura_p2", 2, "XX0(p2^n), p2 over 2 in Q(sqrt 3)",
            lambda u, v: (u**2 + 3) * (v**2 + 3) - 12, (1, 3, 1, -1), {2, 3},
        ),
        _line_tower(
            "shimura_p3", 3, "XX0(p3^n), p3 over 3 in Q(cos 2pi/9)",
            lambda u, v: u**3 + v**3 - 1, (1, 2, 1, -1), {3},
        ),
    )
    logger.debug("Built catalog of %d towers", len(towers))
    return towers


def get_tower(name: str) -> TowerSpec:
    for tower in catalog():
        if tower.name == name:
            return tower
    raise UnknownTowerError(
        f"Unknown tower '{name}'; expected one of {', '.join(t.name for t in catalog())}"
    )


def check_admissible(spec: TowerSpec, ctx: FieldCtx) -> None:
    if not spec.admissible(ctx.p):
        raise InadmissibleCharacteristicError(
            f"Tower {spec.name} is not defined in characteristic {ctx.p} "
            f"(excluded: {sorted(spec.excluded)})"
        )


# ----------------------------------------------------------------------
# Base points
# ----------------------------------------------------------------------
def rational_points(spec: TowerSpec, ctx: FieldCtx) -> List[BasePoint]:
    """All rational points of the base curve in deterministic order."""
    if spec.base == "elliptic":
        points: List[BasePoint] = []
        for u in ctx.elements():
            rhs = ctx.add(ctx.pow(u, 3), 1)
            points.extend((u, v) for v in ctx.sqrt(rhs))
        points.append(None)
        return points
    return list(ctx.elements()) + [None]


def on_base_curve(spec: TowerSpec, ctx: FieldCtx, P: BasePoint) -> bool:
    if P is None:
        return True
    if spec.base == "elliptic":
        if not isinstance(P, tuple):
            return False
        u, v = P
        return ctx.mul(v, v) == ctx.add(ctx.pow(u, 3), 1)
    return isinstance(P, int) and 0 <= P < ctx.q


def ec_neg(ctx: FieldCtx, P: BasePoint) -> BasePoint:
    if P is None:
        return None
    return (P[0], ctx.neg(P[1]))


def ec_add(ctx: FieldCtx, P: BasePoint, Q: BasePoint) -> BasePoint:
    """Group law on gamma^2 = xi^3 + 1 (a1 = a2 = a3 = a4 = 0, a6 = 1)."""
    if P is None:
        return Q
    if Q is None:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2:
        if ctx.add(y1, y2) == 0:
            return None
        slope = ctx.div(ctx.mul(3 % ctx.p, ctx.mul(x1, x1)), ctx.mul(2 % ctx.p, y1))
    else:
        slope = ctx.div(ctx.sub(y2, y1), ctx.sub(x2, x1))
    x3 = ctx.sub(ctx.sub(ctx.mul(slope, slope), x1), x2)
    y3 = ctx.sub(ctx.mul(slope, ctx.sub(x1, x3)), y1)
    return (x3, y3)


def _apply_mobius(ctx: FieldCtx, mobius: Mobius, P: BasePoint) -> BasePoint:
    a, b, c, d = (ctx.embed(v) for v in mobius.coefficients)
    if P is None:
        return None if c == 0 else ctx.div(a, c)
    den = ctx.add(ctx.mul(c, P), d)
    num = ctx.add(ctx.mul(a, P), b)
    if den == 0:
        return None
    return ctx.div(num, den)


def apply_w(spec: TowerSpec, ctx: FieldCtx, P: BasePoint) -> BasePoint:
    """The level-2 Atkin-Lehner involution on a base point."""
    if spec.base == "elliptic":
        return ec_add(ctx, ELLIPTIC_ANCHOR, ec_neg(ctx, P))
    return _apply_mobius(ctx, spec.involution, P)


def apply_aux(spec: TowerSpec, ctx: FieldCtx, name: str, P: BasePoint) -> BasePoint:
    try:
        mobius = spec.aux_involutions[name]
    except KeyError:
        raise TowerLabError(f"Tower {spec.name} has no auxiliary involution '{name}'") from None
    return _apply_mobius(ctx, mobius, P)


# ----------------------------------------------------------------------
# Fibers
# ----------------------------------------------------------------------
def binary_roots(ctx: FieldCtx, form: Tuple[int, ...]) -> List[Tuple[BasePoint, int]]:
    """Rational roots of sum a_j Y0^j Y1^(l-j), with (1:0) reported as None."""
    l = len(form) - 1
    f = UniPoly(ctx, form)
    if f.is_zero():
        raise ChainError("Fiber form vanishes identically; the correspondence is degenerate here")
    roots: List[Tuple[BasePoint, int]] = []
    if f.degree >= 1:
        roots = [(r.value, m) for r, m in uni_roots(f)]
    if f.degree < l:
        roots.append((None, l - f.degree))
    return roots


@lru_cache(maxsize=None)
def _cube_roots(ctx: FieldCtx) -> Dict[int, List[int]]:
    table: Dict[int, List[int]] = {}
    for u in ctx.elements():
        table.setdefault(ctx.pow(u, 3), []).append(u)
    return table


def _elliptic_neighbors(ctx: FieldCtx, P: BasePoint) -> List[Tuple[BasePoint, int]]:
    if P is None:
        target = 8 % ctx.p
    else:
        cube_minus_8 = ctx.sub(ctx.pow(P[0], 3), 8 % ctx.p)
        if cube_minus_8 == 0:
            # z = infinity to order three, R = O
            return [(ELLIPTIC_ANCHOR, 6)]
        target = ctx.add(8 % ctx.p, ctx.div(72 % ctx.p, cube_minus_8))
    if target == 0:
        zs = [(0, 3)]
    else:
        zs = [(u, 1) for u in _cube_roots(ctx).get(target, [])]
    found: Counter = Counter()
    for u, mult in zs:
        ys = ctx.sqrt(ctx.add(ctx.pow(u, 3), 1))
        for v in ys:
            weight = mult * (2 if v == 0 else 1)
            Q = ec_add(ctx, ELLIPTIC_ANCHOR, ec_neg(ctx, (u, v)))
            found[Q] += weight
    return sorted(found.items(), key=lambda item: point_key(item[0]))


def fiber_form(spec: TowerSpec, ctx: FieldCtx, P: BasePoint) -> Tuple[int, ...]:
    """Binary form whose roots are the next coordinates over P (line towers)."""
    if spec.base == "elliptic":
        raise TowerLabError("Elliptic fibers are not given by a binary form")
    return spec.correspondence.fiber_form(ctx, P)


def neighbors(spec: TowerSpec, ctx: FieldCtx, P: BasePoint) -> List[Tuple[BasePoint, int]]:
    """Rational points Q with (P, Q) on Phi, each with its fiber multiplicity.

    Args:
        spec: Tower from the catalog.
        ctx: Working field; its characteristic must be admissible.
        P: Base point.

    Returns:
        (Q, multiplicity) pairs sorted by point order. Multiplicities over the
        algebraic closure total l (six on the elliptic base); only rational Q
        are listed.
    """
    check_admissible(spec, ctx)
    table = _neighbor_table(spec, ctx)
    if P not in table:
        raise ChainError(f"{P!r} is not a rational point of the {spec.name} base curve over GF({ctx.q})")
    return table[P]


@lru_cache(maxsize=64)
def _neighbor_table(spec: TowerSpec, ctx: FieldCtx) -> Dict[BasePoint, List[Tuple[BasePoint, int]]]:
    table: Dict[BasePoint, List[Tuple[BasePoint, int]]] = {}
    for P in rational_points(spec, ctx):
        if spec.base == "elliptic":
            table[P] = _elliptic_neighbors(ctx, P)
        else:
            table[P] = sorted(
                binary_roots(ctx, spec.correspondence.fiber_form(ctx, P)),
                key=lambda item: point_key(item[0]),
            )
    logger.debug("Neighbor table for %s over GF(%d): %d points", spec.name, ctx.q, len(table))
    return table


# ----------------------------------------------------------------------
# Chains
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Chain:
    """A tuple (P1, ..., Pm) of base points on the model of the level-m curve."""

    tower: TowerSpec
    ctx: FieldCtx
    points: Tuple[BasePoint, ...]

    def __len__(self) -> int:
        return len(self.points)


def is_valid_chain(chain: Chain) -> bool:
    spec, ctx = chain.tower, chain.ctx
    if not chain.points or not all(on_base_curve(spec, ctx, P) for P in chain.points):
        return False
    for P, Q in zip(chain.points, chain.points[1:]):
        if all(R != Q for R, _ in neighbors(spec, ctx, P)):
            return False
    return True


def _require_valid(chain: Chain) -> None:
    if not is_valid_chain(chain):
        raise ChainError(f"Invalid chain for {chain.tower.name}: {chain.points}")


def chain_reverse(spec: TowerSpec, chain: Chain) -> Chain:
    """Reverse the coordinates and apply w to each; valid in, valid out."""
    _require_valid(chain)
    points = tuple(apply_w(spec, chain.ctx, P) for P in reversed(chain.points))
    result = Chain(spec, chain.ctx, points)
    _require_valid(result)
    return result


def chain_project(chain: Chain, j: int, m: int) -> Chain:
    """The m-1 consecutive coordinates starting after offset j."""
    if j < 0 or m < 2 or j + m - 1 > len(chain.points):
        raise ChainError(f"Projection (j={j}, m={m}) out of range for a chain of length {len(chain)}")
    return Chain(chain.tower, chain.ctx, chain.points[j : j + m - 1])


def chain_count(spec: TowerSpec, ctx: FieldCtx, m: int, distinct_only: bool = True) -> int:
    """Number of rational chains of length m, by sparse dynamic programming.

    With ``distinct_only`` each pair (P, Q) counts once; otherwise it counts
    with its fiber multiplicity.
    """
    check_admissible(spec, ctx)
    if m < 1:
        raise ChainError(f"Chain length must be at least 1, got {m}")
    table = _neighbor_table(spec, ctx)
    counts: Dict[BasePoint, int] = {P: 1 for P in table}
    for level in range(2, m + 1):
        nxt: Dict[BasePoint, int] = {}
        for P, weight in counts.items():
            for Q, mult in table[P]:
                nxt[Q] = nxt.get(Q, 0) + weight * (1 if distinct_only else mult)
        counts = nxt
        logger.debug("%s over GF(%d): level %d has %d chains", spec.name, ctx.q, level, sum(counts.values()))
    total = sum(counts.values())
    logger.info("%s over GF(%d): %d chains of length %d", spec.name, ctx.q, total, m)
    return total


def iter_chains(
    spec: TowerSpec, ctx: FieldCtx, m: int, within: Optional[FrozenSet[BasePoint]] = None
) -> Iterator[Chain]:
    """Enumerate distinct rational chains of length m in lexicographic point order."""
    check_admissible(spec, ctx)
    if m < 1:
        raise ChainError(f"Chain length must be at least 1, got {m}")
    table = _neighbor_table(spec, ctx)

    def extend(prefix: Tuple[BasePoint, ...]) -> Iterator[Tuple[BasePoint, ...]]:
        if len(prefix) == m:
            yield prefix
            return
        for Q, _ in table[prefix[-1]]:
            if within is None or Q in within:
                yield from extend(prefix + (Q,))

    for P in table:
        if within is None or P in within:
            for points in extend((P,)):
                yield Chain(spec, ctx, points)


# ----------------------------------------------------------------------
# Complete sets
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class CompleteSet:
    tower: TowerSpec
    ctx: FieldCtx
    points: Tuple[BasePoint, ...]

    def __len__(self) -> int:
        return len(self.points)

    def chain_bound(self, m: int) -> int:
        return len(self.points) * self.tower.l ** (m - 1)


def complete_set(
    spec: TowerSpec, ctx: FieldCtx, start: Optional[FrozenSet[BasePoint]] = None
) -> CompleteSet:
    """Greatest set S whose points all have l distinct rational neighbors inside S.

    Args:
        spec: Tower from the catalog.
        ctx: Working field.
        start: Optional initial set; defaults to every rational base point.
    """
    check_admissible(spec, ctx)
    table = _neighbor_table(spec, ctx)
    need = spec.l
    alive = set(table if start is None else start)
    strays = [P for P in alive if P not in table]
    if strays:
        raise ChainError(f"Start set holds points off the {spec.name} base curve: {strays[:5]}")
    rounds = 0
    while True:
        doomed = [
            P
            for P in alive
            if sum(1 for Q, mult in table[P] if mult == 1 and Q in alive) < need
        ]
        if not doomed:
            break
        alive.difference_update(doomed)
        rounds += 1
        logger.debug("%s over GF(%d): pruning round %d removed %d points", spec.name, ctx.q, rounds, len(doomed))
    points = tuple(sorted(alive, key=point_key))
    logger.info("%s over GF(%d): complete set of size %d after %d rounds", spec.name, ctx.q, len(points), rounds)
    return CompleteSet(spec, ctx, points)


def is_complete(spec: TowerSpec, ctx: FieldCtx, S: FrozenSet[BasePoint]) -> bool:
    """Every P in S has exactly l distinct fiber points, all rational and inside S."""
    table = _neighbor_table(spec, ctx)
    return all(
        len(table[P]) == spec.l and all(mult == 1 and Q in S for Q, mult in table[P]) for P in S
    )


# ----------------------------------------------------------------------
# Reductions at bad primes
# ----------------------------------------------------------------------
y1, y2 = sympy.symbols("y1 y2")

# substitution name -> x as a function of the new coordinate
SUBSTITUTIONS: Dict[str, Callable[[Expr], Expr]] = {
    "inverse_minus_one": lambda u: 1 / (1 + u),
    "one_minus_inverse": lambda u: 1 / (1 - u),
}


@dataclass(frozen=True)
class ReducedRelation:
    tower: str
    p: int
    substitution: str
    poly: Poly

    def __str__(self) -> str:
        return f"{self.poly.as_expr()} = 0 (mod {self.p})"


def reduce_mod_p(spec: TowerSpec, p: int, sub: str = "inverse_minus_one") -> ReducedRelation:
    """Rewrite Phi in the coordinate y = 1/x - 1 (or y = 1 - 1/x) and reduce mod p.

    Returns the monic relation between consecutive new coordinates y1, y2.
    """
    if spec.base == "elliptic":
        raise TowerLabError(f"Tower {spec.name} has an elliptic base; no line reduction exists")
    if not sympy.isprime(p):
        raise TowerLabError(f"Reduction needs a prime, got {p}")
    try:
        inverse = SUBSTITUTIONS[sub]
    except KeyError:
        raise TowerLabError(
            f"Unknown substitution '{sub}'; expected one of {', '.join(SUBSTITUTIONS)}"
        ) from None
    phi = spec.correspondence.affine_expr(x, y)
    moved = phi.subs({x: inverse(y1), y: inverse(y2)}, simultaneous=True)
    numerator, _ = sympy.fraction(sympy.together(moved))
    poly = Poly(sympy.expand(numerator), y1, y2, modulus=p)
    if poly.is_zero or not {y1, y2} <= poly.free_symbols:
        raise TowerLabError(f"Relation of {spec.name} degenerates modulo {p} under '{sub}'")
    return ReducedRelation(spec.name, p, sub, poly.monic())


# ----------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------
def encode_point(P: BasePoint):
    """JSON form of a base point: the field integer, [x, y] on the elliptic base, "inf" at infinity."""
    if P is None:
        return "inf"
    if isinstance(P, tuple):
        return list(P)
    return P


def chain_record(chain: Chain) -> Dict:
    """JSON-ready record {tower, q, level, chain} for one chain."""
    return {
        "tower": chain.tower.name,
        "q": chain.ctx.q,
        "level": len(chain.points),
        "chain": [encode_point(P) for P in chain.points],
    }

"""
Rational functions shared by the identity suite and the tower catalog
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import sympy
from sympy import Expr, Poly, Rational, symbols

x, y, z, W = symbols("x y z W")


def quintic(v: Expr) -> Expr:
    """P(X) = X^5 + 5X^3 + 5X - 11, the level-5 polynomial."""
    return v**5 + 5 * v**3 + 5 * v - 11


@dataclass(frozen=True)
class Mobius:
    """The map v -> (a*v + b) / (c*v + d)."""

    a: int
    b: int
    c: int
    d: int

    def __call__(self, v):
        return (self.a * v + self.b) / (self.c * v + self.d)

    @property
    def coefficients(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def is_involution(self) -> bool:
        return self.a + self.d == 0 and (self.a * self.d - self.b * self.c) != 0


def primitive_numerator(expr: Expr, *gens: Expr) -> Poly:
    """Numerator of ``expr`` over Z, content removed, leading coefficient positive."""
    num, _ = sympy.fraction(sympy.cancel(sympy.together(expr)))
    poly = Poly(sympy.expand(num), *gens, domain="QQ")
    _, poly = poly.clear_denoms(convert=True)
    _, poly = poly.primitive()
    if poly.LC() < 0:
        poly = -poly
    return poly


def scalar_ratio(a: Expr, b: Expr) -> Optional[Rational]:
    """Return the constant c with a = c*b, or None when the ratio is not constant."""
    if sympy.expand(b) == 0:
        return None
    ratio = sympy.cancel(sympy.expand(a) / sympy.expand(b))
    if ratio.free_symbols or ratio == 0:
        return None
    return sympy.nsimplify(ratio)

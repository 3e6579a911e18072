"""
Exact arithmetic in small finite fields GF(p^k)

Elements are plain integers 0..q-1 whose base-p digits are the coefficients
of a polynomial in t modulo the field modulus (digit i multiplies t^i).  The
prime subfield is therefore 0..p-1 with the usual residue arithmetic.
Multiplication goes through discrete-log tables, addition through a Zech
logarithm table, so every operation is a couple of list lookups.
"""

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import sympy
from sympy import Poly, Symbol

from .config import MAX_EXTENSION_DEGREE, MAX_FIELD_SIZE, MAX_POLY_DEGREE
from .errors import FieldError

logger = logging.getLogger(__name__)

_T = Symbol("t")


class FieldCtx:
    """Context for GF(p^k): modulus, generator and lookup tables.

    Build instances with :func:`field_create`; the context is immutable after
    construction and may be shared between threads.
    """

    def __init__(self, p: int, k: int):
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = _least_irreducible(p, k)
        self._digit_weights = [p**i for i in range(k)]

        self.generator = self._find_generator()
        order = self.q - 1
        exp = [0] * (2 * order)
        log: List[Optional[int]] = [None] * self.q
        value = 1
        for n in range(order):
            exp[n] = value
            log[value] = n
            value = self._mul_raw(value, self.generator)
        for n in range(order, 2 * order):
            exp[n] = exp[n - order]
        self._exp = exp
        self._log = log

        # zech[n] = log(1 + g^n), None where 1 + g^n = 0
        zech: List[Optional[int]] = [None] * order
        for n in range(order):
            zech[n] = log[self._add_one(exp[n])]
        self._zech = zech
        self._half = order // 2
        logger.debug(
            "Built GF(%d^%d): modulus %s, generator %d", p, k, self.modulus, self.generator
        )

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, k={self.k})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldCtx) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self) -> int:
        return hash((self.p, self.k))

    # ------------------------------------------------------------------
    # Construction helpers
    # ------------------------------------------------------------------
    def digits(self, a: int) -> List[int]:
        """Coefficient vector of ``a`` (low degree first, length k)."""
        out = []
        for _ in range(self.k):
            a, d = divmod(a, self.p)
            out.append(d)
        return out

    def from_digits(self, digits: Sequence[int]) -> int:
        return sum((d % self.p) * w for d, w in zip(digits, self._digit_weights))

    def _add_one(self, a: int) -> int:
        d0 = a % self.p
        return a - d0 + (d0 + 1) % self.p

    def _mul_raw(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a * b) % self.p
        p, k = self.p, self.k
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(da):
            if ai:
                for j, bj in enumerate(db):
                    prod[i + j] += ai * bj
        # reduce by the monic modulus from the top
        for deg in range(2 * k - 2, k - 1, -1):
            c = prod[deg] % p
            if c:
                for i in range(k):
                    prod[deg - k + i] -= c * self.modulus[i]
            prod[deg] = 0
        return self.from_digits(prod[:k])

    def _pow_raw(self, a: int, n: int) -> int:
        result, base = 1, a
        while n:
            if n & 1:
                result = self._mul_raw(result, base)
            base = self._mul_raw(base, base)
            n >>= 1
        return result

    def _find_generator(self) -> int:
        if self.q == 2:
            return 1
        if self.k == 1:
            return int(sympy.primitive_root(self.p))
        order = self.q - 1
        primes = list(sympy.factorint(order))
        for g in range(2, self.q):
            if all(self._pow_raw(g, order // r) != 1 for r in primes):
                return g
        raise FieldError(f"No generator found for GF({self.p}^{self.k})")

    # ------------------------------------------------------------------
    # Element arithmetic on integer encodings
    # ------------------------------------------------------------------
    def elements(self) -> Iterator[int]:
        return iter(range(self.q))

    def embed(self, value) -> int:
        """Map an integer or rational number into the prime subfield."""
        frac = Fraction(value)
        den = frac.denominator % self.p
        if den == 0:
            raise FieldError(f"{value} has no image in characteristic {self.p}")
        return (frac.numerator * pow(den, -1, self.p)) % self.p

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self._log[a], self._log[b]
        z = self._zech[(lb - la) % (self.q - 1)]
        if z is None:
            return 0
        return self._exp[la + z]

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        if a == 0 or self.p == 2:
            return a
        return self._exp[self._log[a] + self._half]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.k == 1:
            return (a * b) % self.p
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("Zero has no multiplicative inverse")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n < 0:
                raise FieldError("Zero has no multiplicative inverse")
            return 1 if n == 0 else 0
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    @cached_property
    def _square_roots(self) -> Dict[int, List[int]]:
        table: Dict[int, List[int]] = {}
        for x in range(self.q):
            table.setdefault(self.mul(x, x), []).append(x)
        return table

    def sqrt(self, a: int) -> List[int]:
        """All square roots of ``a`` in ascending encoding order."""
        return list(self._square_roots.get(a, []))

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, value % self.q)


def _least_irreducible(p: int, k: int) -> Tuple[int, ...]:
    """Least monic irreducible of degree k, lower coefficients ordered by their base-p integer."""
    if k == 1:
        return (0, 1)
    for n in range(p**k):
        lower = []
        m = n
        for _ in range(k):
            m, d = divmod(m, p)
            lower.append(d)
        coeffs = lower + [1]
        if Poly(list(reversed(coeffs)), _T, modulus=p).is_irreducible:
            return tuple(coeffs)
    raise FieldError(f"No irreducible polynomial of degree {k} over GF({p})")


@lru_cache(maxsize=None)
def field_create(p: int, k: int = 1) -> FieldCtx:
    """Create (or fetch the cached) context for GF(p^k).

    Args:
        p: Characteristic, a prime.
        k: Extension degree, 1..MAX_EXTENSION_DEGREE.

    Returns:
        FieldCtx with the lexicographically least monic irreducible modulus.
    """
    if not isinstance(p, int) or not sympy.isprime(p):
        raise FieldError(f"Characteristic must be prime, got {p}")
    if not 1 <= k <= MAX_EXTENSION_DEGREE:
        raise FieldError(f"Extension degree must be in 1..{MAX_EXTENSION_DEGREE}, got {k}")
    if p**k > MAX_FIELD_SIZE:
        raise FieldError(f"Field GF({p}^{k}) exceeds the size limit {MAX_FIELD_SIZE}")
    logger.info("Creating GF(%d^%d)", p, k)
    return FieldCtx(p, k)


@dataclass(frozen=True)
class FieldElement:
    ctx: FieldCtx
    value: int

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise FieldError("Elements belong to different fields")
            return other.value
        return self.ctx.embed(other)

    def __add__(self, other):
        return FieldElement(self.ctx, self.ctx.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self._coerce(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.ctx, self.ctx.div(self.value, self._coerce(other)))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.value))

    def __pow__(self, n: int):
        return FieldElement(self.ctx, self.ctx.pow(self.value, n))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def __repr__(self) -> str:
        return f"GF({self.ctx.q})<{self.value}>"


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial over a FieldCtx, coefficients low degree first.

    Trailing zero coefficients are stripped, so ``coeffs == ()`` is the zero
    polynomial and the last coefficient is nonzero otherwise.
    """

    ctx: FieldCtx
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        coeffs = list(self.coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) - 1 > MAX_POLY_DEGREE:
            raise FieldError(f"Polynomial degree {len(coeffs) - 1} exceeds {MAX_POLY_DEGREE}")
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def from_ints(cls, ctx: FieldCtx, coeffs: Sequence) -> "UniPoly":
        """Build from integer or rational coefficients mapped into the prime subfield."""
        return cls(ctx, tuple(ctx.embed(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: int) -> int:
        ctx = self.ctx
        acc = 0
        for c in reversed(self.coeffs):
            acc = ctx.add(ctx.mul(acc, x), c)
        return acc

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UniPoly(self.ctx, tuple(self.ctx.add(x, y) for x, y in zip(a, b)))

    def __neg__(self) -> "UniPoly":
        return UniPoly(self.ctx, tuple(self.ctx.neg(c) for c in self.coeffs))

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        if self.is_zero() or other.is_zero():
            return UniPoly(self.ctx, ())
        ctx = self.ctx
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = ctx.add(out[i + j], ctx.mul(a, b))
        return UniPoly(ctx, tuple(out))

    def derivative(self) -> "UniPoly":
        ctx = self.ctx
        return UniPoly(
            ctx, tuple(ctx.mul(ctx.embed(i), c) for i, c in enumerate(self.coeffs) if i)
        )

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        lead_inv = self.ctx.inv(self.coeffs[-1])
        return UniPoly(self.ctx, tuple(self.ctx.mul(c, lead_inv) for c in self.coeffs))

    def divide_linear(self, r: int) -> Tuple["UniPoly", int]:
        """Synthetic division by (x - r); returns (quotient, remainder)."""
        ctx = self.ctx
        if self.is_zero():
            return self, 0
        acc = 0
        quotient = []
        for c in reversed(self.coeffs):
            acc = ctx.add(ctx.mul(acc, r), c)
            quotient.append(acc)
        remainder = quotient.pop()
        return UniPoly(ctx, tuple(reversed(quotient))), remainder

    def divmod(self, other: "UniPoly") -> Tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise FieldError("Division by the zero polynomial")
        ctx = self.ctx
        rem = list(self.coeffs)
        lead_inv = ctx.inv(other.coeffs[-1])
        shift = len(rem) - len(other.coeffs)
        quot = [0] * max(shift + 1, 0)
        while shift >= 0 and rem:
            factor = ctx.mul(rem[-1], lead_inv)
            quot[shift] = factor
            for i, c in enumerate(other.coeffs):
                rem[shift + i] = ctx.sub(rem[shift + i], ctx.mul(factor, c))
            while rem and rem[-1] == 0:
                rem.pop()
            shift = len(rem) - len(other.coeffs)
        return UniPoly(ctx, tuple(quot)), UniPoly(ctx, tuple(rem))

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()


def uni_roots(f: UniPoly, ctx: Optional[FieldCtx] = None) -> List[Tuple[FieldElement, int]]:
    """Find every root of ``f`` in its field with multiplicity.

    Args:
        f: Nonzero polynomial.
        ctx: Field to search; defaults to the polynomial's own context.

    Returns:
        (root, multiplicity) pairs in ascending encoding order.
    """
    ctx = ctx or f.ctx
    if ctx != f.ctx:
        raise FieldError("Polynomial and field context differ")
    if f.is_zero():
        raise FieldError("The zero polynomial has every element as a root")
    roots: List[Tuple[FieldElement, int]] = []
    remaining = f
    for x in ctx.elements():
        if remaining.degree < 1:
            break
        if remaining(x) != 0:
            continue
        mult = 0
        while remaining.degree >= 1:
            quotient, rem = remaining.divide_linear(x)
            if rem != 0:
                break
            remaining = quotient
            mult += 1
        roots.append((FieldElement(ctx, x), mult))
    return roots

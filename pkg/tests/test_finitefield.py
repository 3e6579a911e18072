import random

import pytest

from towerlab.errors import FieldError
from towerlab.finitefield import FieldElement, UniPoly, field_create, uni_roots


def exhaustive_elements(ctx):
    return list(ctx.elements())


@pytest.mark.parametrize("p,k,q", [(3, 2, 9), (2, 2, 4), (5, 1, 5), (5, 2, 25), (2, 3, 8), (7, 2, 49)])
def test_cardinality_and_enumeration(p, k, q):
    ctx = field_create(p, k)
    assert ctx.q == q
    elems = exhaustive_elements(ctx)
    assert len(elems) == q
    assert len(set(elems)) == q


def test_modulus_is_least_irreducible():
    assert field_create(3, 2).modulus == (1, 0, 1)
    assert field_create(2, 2).modulus == (1, 1, 1)
    assert field_create(5, 2).modulus == (2, 0, 1)
    assert field_create(5, 1).modulus == (0, 1)


def test_context_is_cached_and_hashable():
    assert field_create(3, 2) is field_create(3, 2)
    assert len({field_create(3, 2), field_create(3, 2), field_create(2, 2)}) == 2


@pytest.mark.parametrize("p,k", [(4, 1), (1, 1), (2, 0), (2, 13), (1009, 2)])
def test_invalid_parameters(p, k):
    with pytest.raises(FieldError):
        field_create(p, k)


@pytest.mark.parametrize("p,k", [(2, 2), (3, 2), (5, 2), (2, 3), (3, 1)])
def test_inverse_and_fermat(p, k):
    ctx = field_create(p, k)
    for a in exhaustive_elements(ctx):
        assert ctx.pow(a, ctx.q) == a
        if a:
            assert ctx.mul(a, ctx.inv(a)) == 1


@pytest.mark.parametrize("p,k", [(2, 2), (3, 2)])
def test_field_axioms_exhaustive(p, k):
    ctx = field_create(p, k)
    elems = exhaustive_elements(ctx)
    for a in elems:
        assert ctx.add(a, 0) == a
        assert ctx.mul(a, 1) == a
        assert ctx.add(a, ctx.neg(a)) == 0
        for b in elems:
            assert ctx.add(a, b) == ctx.add(b, a)
            assert ctx.mul(a, b) == ctx.mul(b, a)
            for c in elems:
                assert ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c))
                assert ctx.add(ctx.add(a, b), c) == ctx.add(a, ctx.add(b, c))


def test_addition_matches_digitwise_sum():
    ctx = field_create(7, 2)
    for a in exhaustive_elements(ctx):
        for b in (1, 8, 13, 48):
            expected = ctx.from_digits([x + y for x, y in zip(ctx.digits(a), ctx.digits(b))])
            assert ctx.add(a, b) == expected


@pytest.mark.parametrize("p,k", [(3, 2), (5, 2), (2, 4), (7, 2)])
def test_frobenius_is_additive(p, k):
    ctx = field_create(p, k)
    rng = random.Random(1234)
    for _ in range(1000):
        a, b = rng.randrange(ctx.q), rng.randrange(ctx.q)
        assert ctx.frobenius(ctx.add(a, b)) == ctx.add(ctx.frobenius(a), ctx.frobenius(b))


def test_zero_inverse_raises():
    with pytest.raises(FieldError):
        field_create(3, 2).inv(0)


def test_embed_rationals():
    ctx = field_create(7, 1)
    assert ctx.embed(-1) == 6
    assert ctx.embed("1/2") == 4
    with pytest.raises(FieldError):
        ctx.embed("1/7")


def test_field_element_operators():
    ctx = field_create(3, 2)
    a = ctx.element(4)
    b = ctx.element(7)
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a * a.inverse() == ctx.element(1)
    assert -a + a == FieldElement(ctx, 0)
    assert a**ctx.q == a


def test_sqrt_table():
    ctx = field_create(3, 2)
    roots = ctx.sqrt(ctx.neg(1))
    assert len(roots) == 2
    for r in roots:
        assert ctx.mul(r, r) == ctx.neg(1)


def test_roots_of_y_squared_minus_one_gf9():
    ctx = field_create(3, 2)
    roots = uni_roots(UniPoly.from_ints(ctx, [-1, 0, 1]))
    assert sorted((r.value, m) for r, m in roots) == [(1, 1), (2, 1)]


def test_double_root_at_zero_gf9():
    ctx = field_create(3, 2)
    roots = uni_roots(UniPoly.from_ints(ctx, [0, 0, 1]))
    assert [(r.value, m) for r, m in roots] == [(0, 2)]


def test_roots_of_y_squared_plus_one_gf9():
    ctx = field_create(3, 2)
    roots = uni_roots(UniPoly.from_ints(ctx, [1, 0, 1]))
    assert len(roots) == 2
    assert all(m == 1 for _, m in roots)
    for r, _ in roots:
        assert ctx.add(ctx.mul(r.value, r.value), 1) == 0


def test_roots_of_zero_polynomial_raise():
    ctx = field_create(5, 1)
    with pytest.raises(FieldError):
        uni_roots(UniPoly(ctx, (0, 0)))


def test_constant_polynomial_has_no_roots():
    ctx = field_create(5, 1)
    assert uni_roots(UniPoly.from_ints(ctx, [3])) == []


@pytest.mark.parametrize("p,k", [(3, 2), (5, 1), (2, 3)])
def test_roots_of_products_are_multiset_unions(p, k):
    ctx = field_create(p, k)
    rng = random.Random(99)

    def random_poly():
        deg = rng.randint(1, 2)
        coeffs = [rng.randrange(ctx.q) for _ in range(deg)] + [rng.randrange(1, ctx.q)]
        return UniPoly(ctx, tuple(coeffs))

    def as_counter(roots):
        out = {}
        for r, m in roots:
            out[r.value] = out.get(r.value, 0) + m
        return out

    for _ in range(100):
        f, g = random_poly(), random_poly()
        left = as_counter(uni_roots(f * g))
        right = as_counter(uni_roots(f))
        for key, m in as_counter(uni_roots(g)).items():
            right[key] = right.get(key, 0) + m
        assert left == right
        assert sum(left.values()) <= (f * g).degree


def test_polynomial_division_and_gcd():
    ctx = field_create(5, 1)
    f = UniPoly.from_ints(ctx, [-1, 0, 1])  # (x-1)(x+1)
    g = UniPoly.from_ints(ctx, [-1, 1])
    quot, rem = f.divmod(g)
    assert rem.is_zero()
    assert quot == UniPoly.from_ints(ctx, [1, 1])
    assert f.gcd(UniPoly.from_ints(ctx, [1, 1]) * UniPoly.from_ints(ctx, [2, 1])) == UniPoly.from_ints(ctx, [1, 1])
    assert f.derivative() == UniPoly.from_ints(ctx, [0, 2])

import random

import pytest
from sympy import Poly

from towerlab.errors import ChainError, InadmissibleCharacteristicError, TowerLabError, UnknownTowerError
from towerlab.finitefield import field_create
from towerlab.towercore import (
    ELLIPTIC_ANCHOR,
    Chain,
    apply_aux,
    apply_w,
    catalog,
    chain_count,
    chain_project,
    chain_record,
    chain_reverse,
    complete_set,
    ec_add,
    ec_neg,
    get_tower,
    is_complete,
    is_valid_chain,
    iter_chains,
    neighbors,
    on_base_curve,
    rational_points,
    reduce_mod_p,
    y1,
    y2,
)

ADMISSIBLE = [
    ("x0_2", 5),
    ("x0_3", 7),
    ("x0_4", 5),
    ("x0_5", 7),
    ("x0_6", 7),
    ("x0_3x2", 5),
    ("shimura_p2", 5),
    ("shimura_p3", 7),
]


def test_catalog_names_and_degrees():
    degrees = {t.name: t.l for t in catalog()}
    assert degrees == {
        "x0_2": 2,
        "x0_3": 3,
        "x0_4": 4,
        "x0_5": 5,
        "x0_6": 6,
        "x0_3x2": 2,
        "shimura_p2": 2,
        "shimura_p3": 3,
    }
    assert get_tower("x0_6").base == "elliptic"


def test_unknown_tower():
    with pytest.raises(UnknownTowerError):
        get_tower("x0_7")


@pytest.mark.parametrize("name,p", [("x0_2", 2), ("x0_3", 3), ("x0_6", 2), ("x0_6", 3), ("shimura_p2", 3)])
def test_excluded_characteristics_raise(name, p):
    with pytest.raises(InadmissibleCharacteristicError):
        chain_count(get_tower(name), field_create(p), 2)


def test_x0_2_fibers_over_gf5():
    spec, ctx = get_tower("x0_2"), field_create(5)
    assert neighbors(spec, ctx, 0) == [(2, 2)]
    assert neighbors(spec, ctx, 1) == [(1, 2)]
    assert neighbors(spec, ctx, 4) == [(1, 2)]
    assert neighbors(spec, ctx, 2) == []
    assert neighbors(spec, ctx, 3) == []
    assert neighbors(spec, ctx, None) == [(4, 1), (None, 1)]
    total = sum(m for P in rational_points(spec, ctx) for _, m in neighbors(spec, ctx, P))
    assert total == 8


def test_chain_counts_over_gf5():
    spec, ctx = get_tower("x0_2"), field_create(5)
    assert chain_count(spec, ctx, 1) == 6
    assert chain_count(spec, ctx, 2) == 5
    assert chain_count(spec, ctx, 2, distinct_only=False) == 8
    assert chain_count(spec, ctx, 3) == 5
    with pytest.raises(ChainError):
        chain_count(spec, ctx, 0)


def test_level_one_counts_base_points():
    assert chain_count(get_tower("x0_2"), field_create(5, 2), 1) == 26


def test_iter_chains_is_lexicographic_and_matches_count():
    spec, ctx = get_tower("x0_2"), field_create(5)
    chains = [c.points for c in iter_chains(spec, ctx, 2)]
    assert chains == [(0, 2), (1, 1), (4, 1), (None, 4), (None, None)]
    assert len(list(iter_chains(spec, ctx, 3))) == chain_count(spec, ctx, 3)


def test_w2_over_gf7():
    spec, ctx = get_tower("x0_2"), field_create(7)
    assert apply_w(spec, ctx, 6) == 6
    assert apply_w(spec, ctx, 2) == 5
    assert apply_w(spec, ctx, 5) == 2


@pytest.mark.parametrize("name,p", ADMISSIBLE)
def test_involution_squares_to_identity(name, p):
    spec, ctx = get_tower(name), field_create(p)
    for P in rational_points(spec, ctx):
        assert apply_w(spec, ctx, apply_w(spec, ctx, P)) == P


def test_elliptic_involution_sends_origin_to_anchor():
    spec, ctx = get_tower("x0_6"), field_create(7)
    assert on_base_curve(spec, ctx, ELLIPTIC_ANCHOR)
    assert apply_w(spec, ctx, None) == ELLIPTIC_ANCHOR
    assert all(on_base_curve(spec, ctx, P) for P in rational_points(spec, ctx))


def test_aux_involution_on_x0_3x2():
    spec, ctx = get_tower("x0_3x2"), field_create(7)
    assert apply_aux(spec, ctx, "w3", 0) is None
    assert apply_aux(spec, ctx, "w3", None) == 0
    with pytest.raises(TowerLabError):
        apply_aux(spec, ctx, "w5", 0)


@pytest.mark.parametrize("name,p", ADMISSIBLE)
def test_fiber_multiplicities_never_exceed_degree(name, p):
    spec, ctx = get_tower(name), field_create(p)
    for P in rational_points(spec, ctx):
        assert sum(m for _, m in neighbors(spec, ctx, P)) <= spec.l


@pytest.mark.parametrize("name,p", ADMISSIBLE)
def test_reversed_chains_stay_valid(name, p):
    spec, ctx = get_tower(name), field_create(p)
    for chain in iter_chains(spec, ctx, 2):
        reversed_chain = chain_reverse(spec, chain)
        assert is_valid_chain(reversed_chain)
        assert chain_reverse(spec, reversed_chain).points == chain.points


def test_invalid_chain_is_rejected():
    spec, ctx = get_tower("x0_2"), field_create(5)
    bad = Chain(spec, ctx, (2, 3))
    assert not is_valid_chain(bad)
    with pytest.raises(ChainError):
        chain_reverse(spec, bad)


def test_chain_project():
    spec, ctx = get_tower("x0_2"), field_create(5)
    chain = Chain(spec, ctx, (None, None, 4))
    assert chain_project(chain, 0, 3).points == (None, None)
    assert chain_project(chain, 1, 3).points == (None, 4)
    assert is_valid_chain(chain_project(chain, 1, 3))
    with pytest.raises(ChainError):
        chain_project(chain, 2, 3)


def test_complete_sets_empty_over_small_fields():
    assert len(complete_set(get_tower("x0_2"), field_create(5))) == 0
    assert len(complete_set(get_tower("x0_3"), field_create(2, 2))) == 0


def test_complete_set_over_gf25():
    spec, ctx = get_tower("x0_2"), field_create(5, 2)
    S = complete_set(spec, ctx)
    roots_of_two = ctx.sqrt(ctx.embed(2))
    assert len(roots_of_two) == 2
    assert set(roots_of_two) <= set(S.points)
    assert is_complete(spec, ctx, frozenset(S.points))
    chains = list(iter_chains(spec, ctx, 3, within=frozenset(S.points)))
    assert len(chains) == S.chain_bound(3)


def test_complete_set_is_greatest():
    spec, ctx = get_tower("x0_2"), field_create(5, 2)
    S = frozenset(complete_set(spec, ctx).points)
    everything = frozenset(rational_points(spec, ctx))
    assert frozenset(complete_set(spec, ctx, start=everything).points) == S
    assert not is_complete(spec, ctx, everything)


def test_reduction_of_x0_2_mod_3():
    reduced = reduce_mod_p(get_tower("x0_2"), 3)
    expected = Poly(y1**2 - y1 + y2**2, y1, y2, modulus=3)
    assert (reduced.poly - expected).is_zero
    assert "mod 3" in str(reduced)


def test_reduction_of_x0_3_mod_2():
    reduced = reduce_mod_p(get_tower("x0_3"), 2)
    expected = Poly(y1**3 + y1**2 + y1 + y2**3, y1, y2, modulus=2)
    assert (reduced.poly - expected).is_zero


@pytest.mark.parametrize("name,p,sub", [("x0_6", 5, "inverse_minus_one"), ("x0_2", 4, "inverse_minus_one"), ("x0_2", 3, "cube")])
def test_reduction_errors(name, p, sub):
    with pytest.raises(TowerLabError):
        reduce_mod_p(get_tower(name), p, sub)


def test_chain_record_encodes_infinity():
    spec, ctx = get_tower("x0_2"), field_create(5)
    record = chain_record(Chain(spec, ctx, (None, 4)))
    assert record == {"tower": "x0_2", "q": 5, "level": 2, "chain": ["inf", 4]}


def _on_phi(spec, ctx, P, Q):
    """Membership of (P, Q) in Phi checked straight from the relation."""
    if spec.base == "line":
        return spec.correspondence.contains(ctx, P, Q)
    eight, cube = ctx.embed(8), lambda u: ctx.pow(u, 3)
    R = ec_add(ctx, ELLIPTIC_ANCHOR, ec_neg(ctx, Q))
    if P is None and R is None:
        return False
    if P is None:
        return cube(R[0]) == eight
    if R is None:
        return cube(P[0]) == eight
    return ctx.mul(ctx.sub(cube(P[0]), eight), ctx.sub(cube(R[0]), eight)) == ctx.embed(72)


def _brute_force_count(spec, ctx, m):
    points = rational_points(spec, ctx)
    edges = {P: [Q for Q in points if _on_phi(spec, ctx, P, Q)] for P in points}
    if m == 1:
        return len(points)
    if m == 2:
        return sum(len(targets) for targets in edges.values())
    return sum(len(edges[Q]) for P in points for Q in edges[P])


FIELDS = [(2, 2), (5, 1), (7, 1), (3, 2), (5, 2)]
COUNT_CASES = [
    (tower.name, p, k)
    for tower in catalog()
    for p, k in FIELDS
    if tower.admissible(p)
]


@pytest.mark.parametrize("name,p,k", COUNT_CASES)
def test_chain_counts_match_brute_force(name, p, k):
    spec, ctx = get_tower(name), field_create(p, k)
    for m in (1, 2, 3):
        assert chain_count(spec, ctx, m) == _brute_force_count(spec, ctx, m), m


@pytest.mark.parametrize("name,p", ADMISSIBLE)
def test_random_chains_reverse_and_project(name, p):
    spec, ctx = get_tower(name), field_create(p, 2)
    pool = list(iter_chains(spec, ctx, 3))
    assert pool
    rng = random.Random(20240)
    for _ in range(1000):
        chain = rng.choice(pool)
        reversed_chain = chain_reverse(spec, chain)
        assert is_valid_chain(reversed_chain)
        assert chain_reverse(spec, reversed_chain).points == chain.points
        j = rng.randint(0, 1)
        m = rng.randint(2, 4 - j)
        assert is_valid_chain(chain_project(chain, j, m))


def test_w3_maps_x0_3x2_chains_to_chains():
    spec, ctx = get_tower("x0_3x2"), field_create(5, 2)
    chains = list(iter_chains(spec, ctx, 3))
    assert chains
    for chain in chains:
        moved = tuple(apply_aux(spec, ctx, "w3", P) for P in chain.points)
        assert is_valid_chain(Chain(spec, ctx, moved)), chain.points


def test_complete_set_is_closed_under_restart():
    spec, ctx = get_tower("x0_2"), field_create(5, 2)
    S = frozenset(complete_set(spec, ctx).points)
    assert frozenset(complete_set(spec, ctx, start=S).points) == S


def test_points_off_the_base_curve_are_rejected():
    spec, ctx = get_tower("x0_2"), field_create(5)
    with pytest.raises(ChainError):
        neighbors(spec, ctx, 7)
    with pytest.raises(ChainError):
        complete_set(spec, ctx, start=frozenset({0, 99}))
    with pytest.raises(ChainError):
        neighbors(get_tower("x0_6"), field_create(7), (1, 1))

from fractions import Fraction
from math import sqrt

import pytest

from towerlab.errors import InadmissibleCharacteristicError, TowerLabError
from towerlab.finitefield import field_create
from towerlab.optimality import dv_bound, run_batch, run_experiment
from towerlab.towercore import chain_count, complete_set, get_tower


def test_dv_bound():
    assert dv_bound(25) == 4
    assert dv_bound(4) == 1
    assert dv_bound(5) == pytest.approx(sqrt(5) - 1)
    with pytest.raises(TowerLabError):
        dv_bound(1)


def test_experiment_over_gf25():
    spec, ctx = get_tower("x0_2"), field_create(5, 2)
    rows = run_experiment(spec, ctx, 4)
    S = len(complete_set(spec, ctx))
    assert [row.level for row in rows] == [1, 2, 3, 4]
    assert [row.genus for row in rows] == [0, 0, 0, 1]
    assert rows[0].ratio is None
    assert rows[3].ratio == Fraction(S * 8, 1)
    for row in rows:
        assert row.S == S
        assert row.s_chain_bound == S * 2 ** (row.level - 1)
        assert row.model_count == chain_count(spec, ctx, row.level)
        assert row.s_chain_bound <= row.model_count
        assert row.model_count <= (ctx.q + 1) * 2 ** (row.level - 1)
        assert row.dv == 4
        assert row.genus_method == "oracle-formula"


def test_empty_complete_set_gives_zero_ratio():
    rows = run_experiment(get_tower("x0_2"), field_create(5), 4)
    assert rows[-1].S == 0
    assert rows[-1].ratio == 0
    assert rows[-1].as_dict()["ratio"] == Fraction(0)


def test_experiment_rejects_bad_input():
    with pytest.raises(InadmissibleCharacteristicError):
        run_experiment(get_tower("x0_2"), field_create(2), 2)
    with pytest.raises(TowerLabError):
        run_experiment(get_tower("x0_2"), field_create(5), 0)


def test_batch_keeps_task_order():
    results = run_batch([("x0_2", 5, 1, 2), ("x0_3", 2, 2, 2)], max_workers=2)
    assert [rows[0].tower for rows in results] == ["x0_2", "x0_3"]
    assert [rows[0].q for rows in results] == [5, 4]


def test_x0_2_over_gf25_to_level_ten():
    rows = run_experiment(get_tower("x0_2"), field_create(5, 2), 10)
    assert {row.S for row in rows} == {2}
    ratios = [row.ratio for row in rows if row.genus >= 1]
    assert ratios[0] == 16
    assert ratios[-1] == Fraction(1024, 225)
    assert rows[-1].genus == 225
    assert ratios == sorted(ratios, reverse=True)
    assert all(ratio > 4 for ratio in ratios)


@pytest.mark.parametrize("name,p,k", [("x0_3", 2, 2), ("shimura_p2", 5, 2)])
def test_pinned_fields_with_empty_complete_sets(name, p, k):
    rows = run_experiment(get_tower(name), field_create(p, k), 3)
    assert [row.S for row in rows] == [0, 0, 0]
    assert all(row.s_chain_bound == 0 for row in rows)


def test_shimura_p3_over_gf9_is_inadmissible():
    with pytest.raises(InadmissibleCharacteristicError):
        run_experiment(get_tower("shimura_p3"), field_create(3, 2), 3)

from fractions import Fraction

import pytest

from tilinglab.generators import uniform_blowup
from tilinglab.params import LabParams, alpha_for_delta, as_fraction
from tilinglab.partition import GridPartition


def test_as_fraction_exact_on_decimal_floats():
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction("3/7") == Fraction(3, 7)
    assert as_fraction(Fraction(2, 5)) == Fraction(2, 5)
    assert as_fraction(2) == 2


def test_alpha_for_delta_is_exact_and_monotone():
    a = alpha_for_delta(3, Fraction(1, 2))
    # (1/6) * (1/2 / (24*3*2*sqrt(6)))^4, the sqrt rationalizes exactly
    base = Fraction(1, 2) / (24 * 3 * 2)
    assert a == Fraction(1, 6) * base ** 4 / 6 ** 2
    assert alpha_for_delta(3, Fraction(1, 4)) < a
    assert alpha_for_delta(4, Fraction(1, 2)) < a
    with pytest.raises(ValueError):
        alpha_for_delta(3, 0)
    with pytest.raises(ValueError):
        alpha_for_delta(1, Fraction(1, 2))


def test_lab_params_validation():
    p = LabParams(k=3, n=9, alpha="0.1", delta="0.5", epsilon=0, t=3, seed=0)
    assert p.alpha == Fraction(1, 10)
    assert p.t == Fraction(3)
    assert p.delta == Fraction(1, 2)
    with pytest.raises(ValueError):
        LabParams(k=3, n=0, alpha="0.1", delta="0.5", epsilon=0, seed=0)
    with pytest.raises(ValueError):
        LabParams(k=3, n=9, alpha=2, delta="0.5", epsilon=0, seed=0)


def test_grid_partition_roundtrip_and_validation():
    g, grid = uniform_blowup(3, 3, 2)
    grid.validate(g)
    again = GridPartition.from_json(grid.to_json())
    assert again == grid
    # dropping a vertex must fail validation
    groups = dict(grid.groups)
    groups[(1, 1)] = groups[(1, 1)][:-1]
    broken = GridPartition(3, 3, groups)
    with pytest.raises(ValueError):
        broken.validate(g)

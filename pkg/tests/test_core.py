import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lepi.core import (BadPartition, ConcaveFunction, Inequality, NegativeCoefficient, NonConcave,
                       evaluate_membership_side, normalize_instance)

from conftest import KINDS, random_function


def test_canonical_sort_within_block():
    inst = normalize_instance([3, 1, 2], [[0, 1], [2]], ConcaveFunction.neg_square(), exact=True)
    assert inst.a == (1, 3, 2)
    assert inst.index_map == (1, 0, 2)
    assert inst.user_order() == (1, 0, 2)
    assert inst.to_user(inst.a) == (3, 1, 2)


def test_three_item_unchanged(three_item):
    assert three_item.a == (1, 2, 3)
    assert three_item.blocks == ((0, 2), (2, 3))
    assert three_item.f.offset == 0


def test_neg_exp_offset():
    f = ConcaveFunction.neg_exp()
    assert f.offset == -1
    assert f(0) == 0
    assert f(1.5) == pytest.approx(1 - math.exp(-1.5), abs=1e-15)
    assert f.raw(1.5) == pytest.approx(-math.exp(-1.5), abs=1e-15)


def test_errors():
    f = ConcaveFunction.neg_square()
    with pytest.raises(NegativeCoefficient):
        normalize_instance([1, -1], [[0, 1]], f)
    with pytest.raises(BadPartition):
        normalize_instance([1, 1], [[0, 1], [1]], f)
    with pytest.raises(BadPartition):
        normalize_instance([1, 1, 1], [[0, 1]], f)
    with pytest.raises(NonConcave):
        ConcaveFunction.piecewise_from_breakpoints([(0, 0), (1, 1), (2, 3)])
    with pytest.raises(NonConcave):
        ConcaveFunction.scaled_sqrt(0)


def test_membership_side(three_item, four_item_pw):
    assert evaluate_membership_side(three_item, (0, 1, 1)) == -25
    assert evaluate_membership_side(three_item, (0, 0, 0)) == 0
    assert evaluate_membership_side(four_item_pw, (1, 0, 1, 0)) == 8


def test_ties_keep_user_order():
    inst = normalize_instance([2, 2, 1], [[0, 1, 2]], ConcaveFunction.neg_square())
    assert inst.user_order() == (2, 0, 1)


@given(st.integers(0, 2**32 - 1))
def test_round_trip(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 8)
    a = [rng.randint(0, 9) for _ in range(n)]
    b = [rng.randint(-3, 3) for _ in range(n)]
    perm = list(range(n))
    rng.shuffle(perm)
    cut = sorted(rng.sample(range(1, n), rng.randint(0, n - 1))) if n > 1 else []
    groups = [perm[i:j] for i, j in zip([0] + cut, cut + [n])]
    inst = normalize_instance(a, groups, ConcaveFunction.neg_square(), b=b, exact=True)
    assert list(inst.to_user(inst.a)) == a
    assert list(inst.to_user(inst.b)) == b
    assert sorted(map(sorted, inst.user_groups())) == sorted(map(sorted, groups))
    for lo, hi in inst.blocks:
        assert list(inst.a[lo:hi]) == sorted(inst.a[lo:hi])


@pytest.mark.parametrize("kind", KINDS)
def test_concavity_spot_check(kind):
    rng = random.Random(7)
    f = random_function(rng, kind)
    assert abs(float(f(0))) <= 1e-12
    for _ in range(1000):
        z1 = rng.uniform(0, 10)
        z2 = z1 + rng.uniform(0, 10)
        d = rng.uniform(0, 5)
        assert float(f(z1 + d) - f(z1)) >= float(f(z2 + d) - f(z2)) - 1e-9


def test_vectorised_values_match_scalar():
    rng = random.Random(3)
    z = np.linspace(0, 7, 29)
    for kind in KINDS:
        f = random_function(rng, kind)
        assert np.allclose(f.values(z), [float(f(v)) for v in z], atol=1e-12)


def test_piecewise_spec_round_trip():
    f = ConcaveFunction.from_spec("piecewise-linear-min", {"pieces": [[2, 0], ["1/2", 5]]}, exact=True)
    assert f.pieces[1] == (Fraction(1, 2), 5)
    g = ConcaveFunction.from_spec(**f.to_spec(), exact=True)
    assert g == f


def test_inequality_modes():
    cut = Inequality((1, 2), pi0=0)
    assert cut.violation((1, 1), w=2) == 1
    fixed = cut.fix_rhs(3)
    assert fixed.violation((1, 1)) == 0
    assert cut.key() == Inequality((1, 2), kind="EPI", delta=(1, 0)).key()

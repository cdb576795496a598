import itertools
import random

import numpy as np
import pytest

from lepi.bnc import Model, Substructure
from lepi.core import EPIGRAPH, ConcaveFunction, normalize_instance
from lepi.oracle import (TooLarge, all_lepis, distinct_lepis, enumerate_feasible, exhaustive_solve, family_size,
                         membership_oracle, partial_ascending_permutations)


def test_family(three_item):
    fam = enumerate_feasible(three_item)
    assert len(fam) == family_size(three_item) == 6
    assert fam.sets[0] == ()


def test_partial_ascending_count(three_item, four_item_pw):
    assert len(list(partial_ascending_permutations(three_item))) == 3
    assert len(list(partial_ascending_permutations(four_item_pw))) == 6


def test_hull_facets(three_item):
    assert distinct_lepis(three_item) == {(-1, -4, -21), (-1, -10, -15), (-7, -16, -9)}


def test_membership(three_item):
    assert membership_oracle(three_item, (0, 1, 1), -25)
    assert not membership_oracle(three_item, (0, 1, 1), -26)
    assert not membership_oracle(three_item, (0.6, 0.6, 0), 0)


def test_membership_size_guard():
    inst = normalize_instance([1] * 9, [[i] for i in range(9)], ConcaveFunction.neg_square())
    with pytest.raises(TooLarge):
        membership_oracle(inst, [0] * 9, 0)


def test_exhaustive_min_w(three_item):
    model = Model(n_x=3, c_x=np.zeros(3), n_w=1, c_w=np.ones(1))
    model.gub = [(0, 1)]
    model.subs = [Substructure(three_item, (0, 1, 2), EPIGRAPH, w=0)]
    val, x = exhaustive_solve(model)
    assert val == pytest.approx(-25)
    assert list(x) == [0, 1, 1]

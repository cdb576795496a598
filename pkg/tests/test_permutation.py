import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lepi.core import ConcaveFunction, normalize_instance
from lepi.permutation import (ascending_from_scores, check_permutation, frontier_sets, is_partial_ascending,
                              make_partial_ascending)

from conftest import instances


def test_check_permutation_rejects():
    with pytest.raises(ValueError):
        check_permutation((0, 0, 1), 3)
    with pytest.raises(ValueError):
        check_permutation((0, 1), 3)


def test_partial_ascending(three_item):
    assert is_partial_ascending(three_item, (0, 2, 1))
    assert not is_partial_ascending(three_item, (1, 0, 2))


def test_algorithm_examples(three_item):
    assert make_partial_ascending(three_item, (2, 1, 0)) == (2, 0, 1)
    assert make_partial_ascending(three_item, (1, 0, 2)) == (0, 1, 2)


def test_frontier_sets_row(three_item):
    fs = frontier_sets(three_item, (2, 1, 0))
    assert fs.h == (0, 1, 1)
    assert [sorted(w) for w in fs.W] == [[2], [1, 2], [0, 2]]


def test_ascending_from_scores_relabels_within_block():
    inst = normalize_instance([1, 2, 3, 4], [[0, 1, 2], [3]], ConcaveFunction.neg_square())
    # scores are suffix sums inside a block, so they never increase along a block
    delta = ascending_from_scores(inst, (0.9, 0.6, 0.2, 0.7))
    assert delta == (0, 3, 1, 2)
    assert is_partial_ascending(inst, delta)


@given(instances(max_n=7), st.integers(0, 2**31))
def test_reordering_preserves_collection(inst, seed):
    rng = random.Random(seed)
    delta = list(range(inst.n))
    rng.shuffle(delta)
    out = make_partial_ascending(inst, delta)
    assert is_partial_ascending(inst, out)
    assert frontier_sets(inst, delta).collection() == frontier_sets(inst, out).collection()


@given(instances(max_n=5))
def test_frontier_sets_are_feasible(inst):
    for delta in itertools.permutations(range(inst.n)):
        fs = frontier_sets(inst, delta)
        for item, W in zip(fs.delta, fs.W):
            assert item in W
            assert len({inst.block_of[i] for i in W}) == len(W)

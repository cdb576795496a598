import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from lepi.core import (NEG_EXP, NEG_SQUARE, PIECEWISE_LINEAR_MIN, SCALED_SQRT, ConcaveFunction,
                       blocks_from_sizes, normalize_instance)

KINDS = (NEG_SQUARE, NEG_EXP, SCALED_SQRT, PIECEWISE_LINEAR_MIN)
EXACT_KINDS = (NEG_SQUARE, PIECEWISE_LINEAR_MIN)


def random_sizes(rng, n):
    sizes, left = [], n
    while left:
        k = rng.randint(1, min(3, left))
        sizes.append(k)
        left -= k
    return sizes


def random_function(rng, kind):
    if kind == NEG_SQUARE:
        return ConcaveFunction.neg_square(rng.choice([1, 2]))
    if kind == NEG_EXP:
        return ConcaveFunction.neg_exp()
    if kind == SCALED_SQRT:
        return ConcaveFunction.scaled_sqrt(rng.uniform(0.5, 3.0))
    pieces = [(rng.randint(-4, 6), rng.randint(0, 12)) for _ in range(rng.randint(1, 4))]
    return ConcaveFunction.piecewise_min(pieces, exact=True)


def random_instance(rng, n, kind, with_b=False, shuffle=True):
    """Random instance; exact (Fraction) data for the neg-square and piecewise kinds."""
    exact = kind in EXACT_KINDS
    if exact:
        a = [rng.randint(0, 6) for _ in range(n)]
    else:
        a = [round(rng.uniform(0.0, 2.0), 3) for _ in range(n)]
    groups = blocks_from_sizes(random_sizes(rng, n))
    if shuffle:
        perm = list(range(n))
        rng.shuffle(perm)
        groups = [[perm[i] for i in g] for g in groups]
    b = [rng.randint(-5, 5) for _ in range(n)] if with_b else None
    return normalize_instance(a, groups, random_function(rng, kind), b=b, exact=exact)


def random_gub_point(rng, inst, exact=False, denom=12):
    """Random point with x >= 0 and each block summing to at most 1."""
    x = [0] * inst.n
    for lo, hi in inst.blocks:
        if exact:
            budget = denom
            for i in range(lo, hi):
                k = rng.randint(0, budget)
                x[i] = Fraction(k, denom)
                budget -= k
        else:
            raw = [rng.random() for _ in range(hi - lo + 1)]
            s = sum(raw)
            for r, i in enumerate(range(lo, hi)):
                x[i] = raw[r] / s
    return x


@pytest.fixture
def three_item():
    return normalize_instance([1, 2, 3], [[0, 1], [2]], ConcaveFunction.neg_square(), exact=True)


@pytest.fixture
def four_item_pw():
    f = ConcaveFunction.piecewise_min([(2, 0), (1, 5)], exact=True)
    return normalize_instance([1, 2, 3, 4], [[0, 1], [2, 3]], f, exact=True)


@st.composite
def instances(draw, max_n=6, kinds=KINDS, with_b=None):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, max_n))
    kind = draw(st.sampled_from(kinds))
    wb = draw(st.booleans()) if with_b is None else with_b
    return random_instance(random.Random(seed), n, kind, with_b=wb)

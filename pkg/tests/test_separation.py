import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lepi.oracle import all_lepis, membership_oracle
from lepi.separation import (GubViolated, Inside, Violated, certificate_residuals, scores_y, separate,
                             separate_epi, separate_fixed)

from conftest import instances, random_gub_point


def test_violated_example(three_item):
    res = separate(three_item, (Fraction(1, 2), Fraction(1, 2), 0), -3)
    assert isinstance(res, Violated)
    assert res.violation == Fraction(1, 2)
    assert res.cut.pi == (-1, -4, -21)


def test_inside_example(three_item):
    res = separate(three_item, (Fraction(1, 2), Fraction(1, 2), 0), Fraction(-5, 2))
    assert isinstance(res, Inside)
    cert = res.certificate
    assert cert.weight_of({0}) == Fraction(1, 2)
    assert cert.weight_of({1}) == Fraction(1, 2)
    assert cert.weight_of(set()) == 0
    assert certificate_residuals(three_item, (Fraction(1, 2), Fraction(1, 2), 0), cert) == (0, 0, 0)


def test_bound_and_gub_rows_first(three_item):
    assert separate(three_item, (-0.5, 0, 0), 0).cut.kind == "BOUND"
    assert separate(three_item, (0.7, 0.7, 0), 0).cut.kind == "GUB"
    with pytest.raises(GubViolated):
        scores_y(three_item, (0.7, 0.7, 0))


def test_fixed_rhs_mode(three_item):
    res = separate_fixed(three_item, (0, 1, 1), -26)
    assert isinstance(res, Violated)
    assert res.cut.mode == "fixed-rhs"
    assert res.cut.violation((0, 1, 1)) > 0


def test_epi_greedy_weaker(three_item):
    # the EPI family cannot cut off this point but the hull can
    x = (Fraction(1, 2), Fraction(1, 2), 0)
    assert separate_epi(three_item, x, Fraction(-3)) is None
    assert isinstance(separate(three_item, x, Fraction(-3)), Violated)
    assert separate_epi(three_item, x, Fraction(-5)).violation == Fraction(1, 2)


@settings(max_examples=60, deadline=None)
@given(instances(max_n=5), st.integers(0, 2**31), st.floats(-2.0, 2.0))
def test_agrees_with_membership_oracle(inst, seed, shift):
    rng = random.Random(seed)
    exact = inst.is_exact
    x = random_gub_point(rng, inst, exact=exact)
    base = max(sum(c * xi for c, xi in zip(coef, x)) for coef in all_lepis(inst).values())
    if inst.b is not None:
        base += sum(bi * xi for bi, xi in zip(inst.b, x))
    w = base + (Fraction(shift).limit_denominator(8) if exact else shift)
    res = separate(inst, x, w, tol=0 if exact else 1e-12)
    tol = 0 if exact else 1e-9
    if isinstance(res, Inside):
        assert membership_oracle(inst, x, w, tol=tol)
        assert max(certificate_residuals(inst, x, res.certificate)) <= (0 if exact else 1e-9)
    else:
        assert not membership_oracle(inst, x, w, tol=0)
        assert res.cut.violation(x, w) == pytest.approx(res.violation, abs=1e-9)

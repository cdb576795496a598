"""Cut coefficients for EPIs and lifted EPIs (LEPIs).

All coefficient vectors are item-indexed (``coef[i]`` multiplies ``x_i``),
so cuts generated by different permutations compare directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import EPIGRAPH, GubInstance, Inequality
from .permutation import check_permutation, frontier_sets, is_partial_ascending

EPI = "EPI"
LEPI = "LEPI"
EPI_X = "EPI'"
LEPI_X = "LEPI'"


class NotPartialAscending(ValueError):
    pass


@dataclass(frozen=True)
class CutCoefficients:
    coef: tuple
    delta: tuple
    kind: str

    def inequality(self) -> Inequality:
        return Inequality(pi=self.coef, pi0=0, kind=self.kind, delta=self.delta, mode=EPIGRAPH)

    def dot(self, x: Sequence):
        return sum((c * xi for c, xi in zip(self.coef, x)), 0)


class _Memo:
    """f evaluations cached per argument for one coefficient computation."""

    def __init__(self, f):
        self.f = f
        self.cache = {}

    def __call__(self, z):
        try:
            return self.cache[z]
        except KeyError:
            v = self.cache[z] = self.f(z)
            return v


def epi_coefficients(inst: GubInstance, delta: Sequence[int]) -> CutCoefficients:
    """Edmonds' marginal gains: rho[delta_j] = f(a(delta(j))) - f(a(delta(j-1)))."""
    delta = check_permutation(delta, inst.n)
    coef = [0] * inst.n
    prefix = 0
    prev = inst.f(0)
    for i in delta:
        prefix = prefix + inst.a[i]
        cur = inst.f(prefix)
        coef[i] = cur - prev
        prev = cur
    return CutCoefficients(tuple(coef), delta, EPI)


def lepi_coefficients_general(inst: GubInstance, delta: Sequence[int]) -> CutCoefficients:
    """Sequential lifting for any order using the closed-form optimal sets W_j."""
    fs = frontier_sets(inst, delta)
    f = _Memo(inst.f)
    coef = [0] * inst.n
    for item, Wj in zip(fs.delta, fs.W):
        rest = sum((coef[i] for i in Wj if i != item), 0)
        coef[item] = f(inst.a_of(sorted(Wj))) - rest
    return CutCoefficients(tuple(coef), fs.delta, LEPI)


def lepi_coefficients_fast(inst: GubInstance, delta: Sequence[int]) -> CutCoefficients:
    """Linear-time LEPI for a partial ascending order.

    Tracks A = a(U_j): entering the first item of a block adds its weight,
    any later item replaces its predecessor in the block.
    """
    delta = check_permutation(delta, inst.n)
    if not is_partial_ascending(inst, delta):
        raise NotPartialAscending(f"{delta} is not partial ascending")
    a, f = inst.a, inst.f
    coef = [0] * inst.n
    A_prev, f_prev = 0, f(0)
    for i in delta:
        if i == inst.block_start(i):
            A = A_prev + a[i]
            f_cur = f(A)
            coef[i] = f_cur - f_prev
        else:
            A = A_prev + a[i] - a[i - 1]
            f_cur = f(A)
            coef[i] = f_cur - f_prev + coef[i - 1]
        A_prev, f_prev = A, f_cur
    return CutCoefficients(tuple(coef), delta, LEPI)


def lepi_coefficients(inst: GubInstance, delta: Sequence[int]) -> CutCoefficients:
    """Fast path when possible, general lifting otherwise."""
    if is_partial_ascending(inst, delta):
        return lepi_coefficients_fast(inst, delta)
    return lepi_coefficients_general(inst, delta)


def shift_for_X(coeffs: CutCoefficients, inst: GubInstance) -> CutCoefficients:
    """Add the linear part b to get EPI'/LEPI' for the set X."""
    if inst.b is None:
        raise ValueError("instance has no linear part b")
    kind = {EPI: EPI_X, LEPI: LEPI_X}.get(coeffs.kind, coeffs.kind)
    coef = tuple(c + bi for c, bi in zip(coeffs.coef, inst.b))
    return CutCoefficients(coef, coeffs.delta, kind)


def dominance_check(inst: GubInstance, delta: Sequence[int]) -> bool:
    """True iff eta >= rho componentwise (always expected to hold)."""
    eta = lepi_coefficients_general(inst, delta).coef
    rho = epi_coefficients(inst, delta).coef
    scale = max([abs(float(inst.f(inst.a_of(range(inst.n))))), 1.0] + [abs(float(v)) for v in rho])
    tol = 0 if inst.is_exact else 1e-9 * scale
    return all(e >= r - tol for e, r in zip(eta, rho))


def cut_to_json(cc: CutCoefficients, inst: GubInstance) -> dict:
    """User-space serialisation: 1-based delta and item-ordered pi."""
    order = inst.user_order()
    return {
        "kind": cc.kind,
        "delta": [order[i] + 1 for i in cc.delta],
        "pi0": 0,
        "pi": [_num(v) for v in inst.to_user(cc.coef)],
    }


def _num(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else float(v)
    return v

"""Exact separation over conv(X0) / conv(X).

Given a box- and GUB-feasible point, either a most violated LEPI (LEPI' for
X) is returned, or a convex combination of lattice points certifying that
the point lies in the hull.  Sorting dominates, so the cost is O(n log n).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .core import EPIGRAPH, FIXED_RHS, GubInstance, Inequality
from .lifting import epi_coefficients, lepi_coefficients_fast, shift_for_X
from .permutation import ascending_from_scores

DEFAULT_TOL = 1e-6


class GubViolated(ValueError):
    pass


@dataclass(frozen=True)
class MembershipCertificate:
    """Weights on the chain U_0 = {} , U_1, ..., U_n of the sorting order.

    Only sets with positive weight are stored.  ``value`` is sum(eta_i x_i),
    which equals sum_S weight_S f(a(S)).
    """

    supports: tuple  # frozensets of canonical items
    weights: tuple
    delta: tuple
    eta: tuple
    value: object

    def weight_of(self, items) -> object:
        s = frozenset(items)
        for S, lam in zip(self.supports, self.weights):
            if S == s:
                return lam
        return 0


@dataclass(frozen=True)
class Violated:
    cut: Inequality
    violation: object


@dataclass(frozen=True)
class Inside:
    certificate: MembershipCertificate


SeparationResult = Union[Violated, Inside]


def scores_y(inst: GubInstance, x: Sequence, tol: float = 1e-9) -> tuple:
    """Within-block suffix sums y_l = sum_{i >= l, i in block} x_i."""
    y = [0] * inst.n
    for k, (lo, hi) in enumerate(inst.blocks):
        acc = 0
        for i in range(hi - 1, lo - 1, -1):
            acc = acc + x[i]
            y[i] = acc
        if acc > 1 + tol:
            raise GubViolated(f"block {k} sums to {acc}")
    return tuple(y)


def trivial_cut(inst: GubInstance, x: Sequence, tol: float = DEFAULT_TOL) -> Optional[Violated]:
    """Most violated bound or GUB row, if any exceeds ``tol``."""
    best = None
    n = inst.n
    for i, xi in enumerate(x):
        if xi < -tol and (best is None or -xi > best.violation):
            pi = tuple(-1 if r == i else 0 for r in range(n))
            best = Violated(Inequality(pi, 0, "BOUND", None, FIXED_RHS, 0), -xi)
        if xi > 1 + tol and (best is None or xi - 1 > best.violation):
            pi = tuple(1 if r == i else 0 for r in range(n))
            best = Violated(Inequality(pi, 0, "BOUND", None, FIXED_RHS, 1), xi - 1)
    for lo, hi in inst.blocks:
        s = sum(x[lo:hi], 0)
        if s > 1 + tol and (best is None or s - 1 > best.violation):
            pi = tuple(1 if lo <= r < hi else 0 for r in range(n))
            best = Violated(Inequality(pi, 0, "GUB", None, FIXED_RHS, 1), s - 1)
    return best


def chain_certificate(inst: GubInstance, x: Sequence, y: Sequence, delta: Sequence[int],
                      eta: Sequence) -> MembershipCertificate:
    """Weights y[delta_j] - y[delta_{j+1}] on U_j, with y[delta_0] = 1 and y[delta_{n+1}] = 0."""
    ys = [1] + [y[i] for i in delta] + [0]
    slots = [-1] * inst.t
    supports, weights = [], []
    for j in range(inst.n + 1):
        if j > 0:
            item = delta[j - 1]
            slots[inst.block_of[item]] = item
        lam = ys[j] - ys[j + 1]
        if lam > 0:
            supports.append(frozenset(i for i in slots if i >= 0))
            weights.append(lam)
    value = sum((e * xi for e, xi in zip(eta, x)), 0)
    return MembershipCertificate(tuple(supports), tuple(weights), tuple(delta), tuple(eta), value)


def separate(inst: GubInstance, x: Sequence, w, tol: float = DEFAULT_TOL) -> SeparationResult:
    """Separate (w, x) from conv(X0), or from conv(X) when the instance has b.

    Bound and GUB rows are checked first and reported as cuts of kind
    BOUND / GUB.  ``tol`` is the minimum violation reported.
    """
    trivial = trivial_cut(inst, x, tol)
    if trivial is not None:
        return trivial
    w0 = w
    if inst.b is not None:
        w0 = w - sum((bi * xi for bi, xi in zip(inst.b, x)), 0)
    y = scores_y(inst, x, tol=tol)
    delta = ascending_from_scores(inst, y)
    cc = lepi_coefficients_fast(inst, delta)
    value = cc.dot(x)
    gap = value - w0
    if gap > tol:
        if inst.b is not None:
            cc = shift_for_X(cc, inst)
        return Violated(cc.inequality(), gap)
    return Inside(chain_certificate(inst, x, y, delta, cc.coef))


def separate_fixed(inst: GubInstance, x: Sequence, rhs, tol: float = DEFAULT_TOL) -> SeparationResult:
    """Separation with w pinned to ``rhs``; violated cuts come back as ``pi'x <= rhs``."""
    res = separate(inst, x, rhs, tol)
    if isinstance(res, Violated) and res.cut.mode == EPIGRAPH:
        return Violated(res.cut.fix_rhs(rhs), res.violation)
    return res


def separate_epi(inst: GubInstance, x: Sequence, w, tol: float = DEFAULT_TOL) -> Optional[Violated]:
    """Edmonds' greedy over the GUB-free relaxation; returns the EPI (EPI') or None."""
    trivial = trivial_cut(inst, x, tol)
    if trivial is not None:
        return trivial
    w0 = w
    if inst.b is not None:
        w0 = w - sum((bi * xi for bi, xi in zip(inst.b, x)), 0)
    delta = tuple(sorted(range(inst.n), key=lambda i: -x[i]))
    cc = epi_coefficients(inst, delta)
    gap = cc.dot(x) - w0
    if gap > tol:
        if inst.b is not None:
            cc = shift_for_X(cc, inst)
        return Violated(cc.inequality(), gap)
    return None


def certificate_residuals(inst: GubInstance, x: Sequence, cert: MembershipCertificate) -> tuple:
    """(|sum lambda - 1|, max_i |sum_{S ni i} lambda_S - x_i|, |sum lambda f(a(S)) - value|)."""
    total = sum(cert.weights, 0)
    cover = [0] * inst.n
    fval = 0
    for S, lam in zip(cert.supports, cert.weights):
        for i in S:
            cover[i] = cover[i] + lam
        fval = fval + lam * inst.value(S)
    return (
        abs(total - 1),
        max((abs(c - xi) for c, xi in zip(cover, x)), default=0),
        abs(fval - cert.value),
    )


"""Instances, points and inequalities for submodular sets with GUB rows.

An instance describes

    X0 = {(w, x) in R x {0,1}^n : w >= f(a'x), sum_{i in N_k} x_i <= 1}
    X  = {(w, x) in R x {0,1}^n : w >= f(a'x) + b'x, ...}

with ``f`` concave.  Internally items are kept in *canonical order*: blocks
are contiguous and ``a`` is ascending inside each block (stable on ties).
``index_map[user_item] == canonical_index``.  Everything here is 0-based;
1-based ids only appear in JSON and on the command line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

TOL = 1e-9

NEG_SQUARE = "neg-square"
NEG_EXP = "neg-exp"
SCALED_SQRT = "scaled-sqrt"
PIECEWISE_LINEAR_MIN = "piecewise-linear-min"
KINDS = (NEG_SQUARE, NEG_EXP, SCALED_SQRT, PIECEWISE_LINEAR_MIN)


class ModelError(ValueError):
    """Base class for rejected instance data."""


class NegativeCoefficient(ModelError):
    pass


class BadPartition(ModelError):
    pass


class NonConcave(ModelError):
    pass


def as_number(v, exact: bool = False):
    """Coerce ``v`` to Fraction (exact mode) or float.

    Strings such as ``"5/2"`` are accepted in exact mode.
    """
    if exact:
        if isinstance(v, Fraction):
            return v
        if isinstance(v, float):
            return Fraction(str(v))
        return Fraction(v)
    if isinstance(v, str):
        return float(Fraction(v))
    return float(v)


@dataclass(frozen=True)
class ConcaveFunction:
    """A concave f shifted so that f(0) = 0.

    ``offset`` is the raw value at zero; ``f(z) = raw(z) - offset``.
    ``pieces`` is only used by the piecewise-linear kind and holds
    ``(slope, intercept)`` pairs of ``min_p slope*z + intercept``.
    """

    kind: str
    scale: object = 1
    pieces: tuple = ()
    offset: object = 0

    @classmethod
    def neg_square(cls, scale=1) -> "ConcaveFunction":
        if scale < 0:
            raise NonConcave("neg-square needs a non-negative scale")
        return cls(NEG_SQUARE, scale=scale)

    @classmethod
    def neg_exp(cls) -> "ConcaveFunction":
        return cls(NEG_EXP, scale=1, offset=-1)

    @classmethod
    def scaled_sqrt(cls, omega) -> "ConcaveFunction":
        if not omega > 0:
            raise NonConcave(f"scaled-sqrt needs omega > 0, got {omega}")
        return cls(SCALED_SQRT, scale=omega)

    @classmethod
    def piecewise_min(cls, pieces, exact: bool = False) -> "ConcaveFunction":
        ps = tuple((as_number(s, exact), as_number(c, exact)) for s, c in pieces)
        if not ps:
            raise NonConcave("piecewise-linear-min needs at least one piece")
        for s, c in ps:
            if not (math.isfinite(s) and math.isfinite(c)):
                raise NonConcave("piece coefficients must be finite")
        return cls(PIECEWISE_LINEAR_MIN, pieces=ps, offset=min(c for _, c in ps))

    @classmethod
    def piecewise_from_breakpoints(cls, points, exact: bool = False) -> "ConcaveFunction":
        """Linear interpolation through ``(z, value)`` points, extended linearly.

        Raises NonConcave when slopes increase somewhere.
        """
        pts = sorted((as_number(z, exact), as_number(v, exact)) for z, v in points)
        if len(pts) < 2:
            raise NonConcave("need at least two breakpoints")
        pieces = []
        prev_slope = None
        for (z0, v0), (z1, v1) in zip(pts, pts[1:]):
            if z1 == z0:
                raise NonConcave(f"duplicate breakpoint at z={z0}")
            slope = (v1 - v0) / (z1 - z0)
            if prev_slope is not None and slope > prev_slope:
                raise NonConcave(f"slope increases at z={z0}")
            prev_slope = slope
            pieces.append((slope, v0 - slope * z0))
        return cls.piecewise_min(pieces, exact=exact)

    @classmethod
    def from_spec(cls, kind: str, params: Optional[dict] = None, exact: bool = False):
        params = params or {}
        if kind == NEG_SQUARE:
            return cls.neg_square(as_number(params.get("scale", 1), exact))
        if kind == NEG_EXP:
            return cls.neg_exp()
        if kind == SCALED_SQRT:
            return cls.scaled_sqrt(as_number(params["omega"], exact=False))
        if kind == PIECEWISE_LINEAR_MIN:
            if "breakpoints" in params:
                return cls.piecewise_from_breakpoints(params["breakpoints"], exact)
            return cls.piecewise_min(params["pieces"], exact)
        raise ModelError(f"unknown function kind {kind!r}")

    def to_spec(self) -> dict:
        if self.kind == NEG_SQUARE:
            params = {"scale": _jsonable(self.scale)}
        elif self.kind == NEG_EXP:
            params = {}
        elif self.kind == SCALED_SQRT:
            params = {"omega": _jsonable(self.scale)}
        else:
            params = {"pieces": [[_jsonable(s), _jsonable(c)] for s, c in self.pieces]}
        return {"kind": self.kind, "params": params}

    @property
    def is_exact(self) -> bool:
        """True when evaluation on Fractions stays in Fractions."""
        if self.kind == PIECEWISE_LINEAR_MIN:
            return all(isinstance(s, Fraction) and isinstance(c, Fraction) for s, c in self.pieces)
        return self.kind == NEG_SQUARE and not isinstance(self.scale, float)

    def raw(self, z):
        return self(z) + self.offset

    def __call__(self, z):
        kind = self.kind
        if kind == NEG_SQUARE:
            return -self.scale * z * z
        if kind == NEG_EXP:
            return -math.expm1(-z)
        if kind == SCALED_SQRT:
            return self.scale * math.sqrt(z) if z > 0 else 0.0
        return min(s * z + c for s, c in self.pieces) - self.offset

    def values(self, z: np.ndarray) -> np.ndarray:
        """Vectorised float evaluation."""
        z = np.asarray(z, dtype=float)
        kind = self.kind
        if kind == NEG_SQUARE:
            return -float(self.scale) * z * z
        if kind == NEG_EXP:
            return -np.expm1(-z)
        if kind == SCALED_SQRT:
            return float(self.scale) * np.sqrt(np.maximum(z, 0.0))
        out = np.full(z.shape, np.inf)
        for s, c in self.pieces:
            out = np.minimum(out, float(s) * z + float(c))
        return out - float(self.offset)


def _jsonable(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else str(v)
    return v


@dataclass(frozen=True)
class GubInstance:
    """Canonical instance; build it with :func:`normalize_instance`."""

    a: tuple
    blocks: tuple  # ((start, stop), ...) half-open, contiguous, covering range(n)
    f: ConcaveFunction
    b: Optional[tuple] = None
    index_map: tuple = ()
    block_of: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.a)
        if not self.index_map:
            object.__setattr__(self, "index_map", tuple(range(n)))
        owner = [0] * n
        for k, (lo, hi) in enumerate(self.blocks):
            for i in range(lo, hi):
                owner[i] = k
        object.__setattr__(self, "block_of", tuple(owner))

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def t(self) -> int:
        return len(self.blocks)

    @property
    def has_b(self) -> bool:
        return self.b is not None

    @property
    def is_exact(self) -> bool:
        nums = list(self.a) + list(self.b or ())
        return self.f.is_exact and all(isinstance(v, (int, Fraction)) for v in nums)

    def block_start(self, i: int) -> int:
        return self.blocks[self.block_of[i]][0]

    def a_of(self, items) -> object:
        return sum((self.a[i] for i in items), 0)

    def value(self, items) -> object:
        """f(a(S)) for a support set S."""
        return self.f(self.a_of(items))

    def user_order(self) -> tuple:
        """``user_order()[canonical] == user item``."""
        inv = [0] * self.n
        for user, canon in enumerate(self.index_map):
            inv[canon] = user
        return tuple(inv)

    def to_canonical(self, v_user: Sequence) -> tuple:
        out = [None] * self.n
        for user, canon in enumerate(self.index_map):
            out[canon] = v_user[user]
        return tuple(out)

    def to_user(self, v_canon: Sequence) -> tuple:
        return tuple(v_canon[canon] for canon in self.index_map)

    def without_b(self) -> "GubInstance":
        return GubInstance(self.a, self.blocks, self.f, None, self.index_map)

    def user_groups(self) -> list:
        order = self.user_order()
        return [[order[i] for i in range(lo, hi)] for lo, hi in self.blocks]


def normalize_instance(a, groups, f: ConcaveFunction, b=None, exact: bool = False) -> GubInstance:
    """Validate raw data and reorder it into canonical form.

    ``groups`` lists 0-based user items per GUB block; blocks keep their
    given order, items inside a block are stably sorted by ``a``.
    """
    a = [as_number(v, exact) for v in a]
    n = len(a)
    for i, v in enumerate(a):
        if v < 0:
            raise NegativeCoefficient(f"a[{i}] = {v} < 0")
    if b is not None:
        b = [as_number(v, exact) for v in b]
        if len(b) != n:
            raise ModelError(f"b has length {len(b)}, expected {n}")
    seen = {}
    for k, g in enumerate(groups):
        if len(g) == 0:
            raise BadPartition(f"group {k} is empty")
        for i in g:
            if not 0 <= i < n:
                raise BadPartition(f"item {i} out of range 0..{n - 1}")
            if i in seen:
                raise BadPartition(f"item {i} appears in groups {seen[i]} and {k}")
            seen[i] = k
    if len(seen) != n:
        missing = sorted(set(range(n)) - set(seen))
        raise BadPartition(f"items {missing} are not covered by any group")

    order = []
    blocks = []
    for g in groups:
        lo = len(order)
        order.extend(sorted(g, key=lambda i: a[i]))  # stable on ties
        blocks.append((lo, len(order)))
    index_map = [0] * n
    for canon, user in enumerate(order):
        index_map[user] = canon
    return GubInstance(
        a=tuple(a[u] for u in order),
        blocks=tuple(blocks),
        f=f,
        b=None if b is None else tuple(b[u] for u in order),
        index_map=tuple(index_map),
    )


def blocks_from_sizes(sizes: Sequence[int]) -> list:
    """Consecutive 0-based groups with the given sizes."""
    out, lo = [], 0
    for s in sizes:
        out.append(list(range(lo, lo + s)))
        lo += s
    return out


@dataclass(frozen=True)
class Point:
    """A point (w, x) in canonical order.  ``w`` is None in fixed-rhs use."""

    x: tuple
    w: object = None

    def gub_feasible(self, inst: GubInstance, tol: float = TOL) -> bool:
        return all(sum(self.x[lo:hi]) <= 1 + tol for lo, hi in inst.blocks)


def evaluate_membership_side(inst: GubInstance, x: Sequence) -> object:
    """f(a'x) + b'x; for binary x, (w, x) is feasible iff w is at least this."""
    z = sum((ai * xi for ai, xi in zip(inst.a, x)), 0)
    val = inst.f(z)
    if inst.b is not None:
        val = val + sum((bi * xi for bi, xi in zip(inst.b, x)), 0)
    return val


EPIGRAPH = "epigraph"
FIXED_RHS = "fixed-rhs"


@dataclass(frozen=True)
class Inequality:
    """``w >= pi0 + pi'x`` (epigraph) or ``pi'x <= rhs`` (fixed-rhs).

    ``kind`` is one of EPI, LEPI, EPI', LEPI', GUB, BOUND; ``delta`` is the
    generating permutation for the polymatroid families.
    """

    pi: tuple
    pi0: object = 0
    kind: str = "LEPI"
    delta: Optional[tuple] = None
    mode: str = EPIGRAPH
    rhs: object = None

    def lhs_gap(self, x: Sequence, w=None) -> object:
        """Amount by which the point violates the inequality (<= 0 if satisfied)."""
        px = sum((p * xi for p, xi in zip(self.pi, x)), 0)
        if self.mode == EPIGRAPH:
            return self.pi0 + px - w
        return px - self.rhs

    def violation(self, x: Sequence, w=None) -> object:
        return self.lhs_gap(x, w)

    def key(self, digits: int = 9) -> tuple:
        """Hashable identity that ignores the generating permutation."""
        r = lambda v: round(float(v), digits) + 0.0
        return (self.mode, r(self.pi0), r(self.rhs or 0), tuple(r(p) for p in self.pi))

    def fix_rhs(self, w_value) -> "Inequality":
        """Pin w to a constant: ``w_value >= pi0 + pi'x`` becomes ``pi'x <= w_value - pi0``."""
        return Inequality(self.pi, 0, self.kind, self.delta, FIXED_RHS, w_value - self.pi0)

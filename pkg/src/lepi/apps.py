"""Instance generators and model builders for the two test applications.

* MPCLP: place typed facilities so that the expected weight of covered
  customers is minimal, subject to a total capacity threshold and at most
  one type per location.  Each customer contributes an epigraph substructure
  with f(z) = -exp(-z).
* MPKPG: a multi-row chance-constrained knapsack with GUB blocks.  Each row
  becomes a fixed-rhs substructure with f(z) = PHI_INV_95 * sqrt(z).

All randomness comes from :class:`Lcg64`, so instances are bit-reproducible
from ``(sizes, seed)`` on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Optional

import numpy as np

from .bnc import Model, Substructure
from .core import EPIGRAPH, FIXED_RHS, ConcaveFunction, normalize_instance

PHI_INV_95 = 1.6448536269514722

MPCLP_TYPES = ((10, 5, 10), (20, 6, 14), (30, 7, 18), (40, 8, 22), (50, 9, 26), (60, 10, 30))
MPCLP_THRESHOLD = {2: 40, 3: 100, 4: 200, 5: 300, 6: 400}
FERMI_ALPHA = 0.5

DESK_MPCLP = ((20, 4, 2), (40, 8, 3))
DESK_MPKPG = ((10, 2), (30, 5))


class Lcg64:
    """Knuth's MMIX linear congruential generator; floats use the top 53 bits."""

    MUL = 6364136223846793005
    INC = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = (int(seed) * self.MUL + self.INC) & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state * self.MUL + self.INC) & self.MASK
        return self.state

    def uniform(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def randint(self, lo: int, hi: int) -> int:
        """Integer uniform on [lo, hi] inclusive."""
        return lo + int(self.uniform() * (hi - lo + 1))


def quantile(rho: float) -> float:
    if rho == 0.95:
        return PHI_INV_95
    return NormalDist().inv_cdf(rho)


# -- MPCLP ------------------------------------------------------------------

def fermi(d: float, dmin: float, dmax: float, alpha: float = FERMI_ALPHA) -> float:
    if d <= dmin:
        return 1.0
    if d > dmax:
        return 0.0
    e = (2.0 * (d - dmin) / (dmax - dmin) - 1.0) / alpha
    return 1.0 / (1.0 + 10.0 ** e)


@dataclass
class MpclpInstance:
    customers: list  # [(x, y)]
    weights: list
    facilities: list
    types: list  # [(capacity, dmin, dmax)]
    t: float
    alpha: float = FERMI_ALPHA
    seed: Optional[int] = None

    @property
    def n_customers(self) -> int:
        return len(self.customers)

    @property
    def n_facilities(self) -> int:
        return len(self.facilities)

    @property
    def n_types(self) -> int:
        return len(self.types)

    def distances(self) -> np.ndarray:
        C = np.asarray(self.customers, dtype=float).reshape(-1, 2)
        F = np.asarray(self.facilities, dtype=float).reshape(-1, 2)
        return np.sqrt(((C[:, None, :] - F[None, :, :]) ** 2).sum(axis=2))

    def probabilities(self) -> np.ndarray:
        """p[i, j, s]."""
        D = self.distances()
        P = np.zeros((self.n_customers, self.n_facilities, self.n_types))
        for s, (_, dmin, dmax) in enumerate(self.types):
            for i in range(self.n_customers):
                for j in range(self.n_facilities):
                    P[i, j, s] = fermi(D[i, j], dmin, dmax, self.alpha)
        return P

    def var(self, j: int, s: int) -> int:
        return j * self.n_types + s

    def to_dict(self) -> dict:
        return {
            "app": "mpclp",
            "seed": self.seed,
            "customers": [list(c) for c in self.customers],
            "weights": list(self.weights),
            "facilities": [list(f) for f in self.facilities],
            "types": [list(t) for t in self.types],
            "t": self.t,
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MpclpInstance":
        return cls([tuple(c) for c in d["customers"]], list(d["weights"]),
                   [tuple(f) for f in d["facilities"]], [tuple(t) for t in d["types"]],
                   d["t"], d.get("alpha", FERMI_ALPHA), d.get("seed"))


def generate_mpclp(n_customers: int, n_facilities: int, n_types: int, seed: int = 42,
                   t: Optional[float] = None) -> MpclpInstance:
    if not 1 <= n_types <= len(MPCLP_TYPES):
        raise ValueError(f"n_types must be in 1..{len(MPCLP_TYPES)}")
    rng = Lcg64(seed)
    customers = [(100.0 * rng.uniform(), 100.0 * rng.uniform()) for _ in range(n_customers)]
    weights = [rng.randint(1, 100) for _ in range(n_customers)]
    facilities = [(100.0 * rng.uniform(), 100.0 * rng.uniform()) for _ in range(n_facilities)]
    types = list(MPCLP_TYPES[:n_types])
    if t is None:
        t = MPCLP_THRESHOLD.get(n_types, 10 * n_types)
    return MpclpInstance(customers, weights, facilities, types, t, FERMI_ALPHA, seed)


def build_mpclp_model(inst: MpclpInstance) -> Model:
    """min sum_i v_i w_i, where w_i is the (offset-normalised) coverage probability."""
    P = inst.probabilities()
    J, S = inst.n_facilities, inst.n_types
    n_x = J * S
    owners = [i for i in range(inst.n_customers) if np.any(P[i] > 0)]
    w_of = {i: k for k, i in enumerate(owners)}
    model = Model(n_x=n_x, c_x=np.zeros(n_x), n_w=len(owners),
                  c_w=np.array([inst.weights[i] for i in owners], dtype=float), sense="min")
    model.gub = [tuple(inst.var(j, s) for s in range(S)) for j in range(J)]
    model.add_row({inst.var(j, s): inst.types[s][0] for j in range(J) for s in range(S)}, ">=", inst.t)
    f = ConcaveFunction.neg_exp()
    for i in owners:
        k = w_of[i]
        items, groups = [], []
        for j in range(J):
            g = []
            for s in range(S):
                p = P[i, j, s]
                if p >= 1.0:
                    model.add_row({inst.var(j, s): -1.0}, ">=", 0.0, coef_w={k: 1.0})  # w_i >= x_js
                elif p > 0.0:
                    g.append(len(items))
                    items.append((inst.var(j, s), -math.log1p(-p)))
            if g:
                groups.append(g)
        if not items:
            continue
        gi = normalize_instance([a for _, a in items], groups, f)
        order = gi.user_order()
        model.subs.append(Substructure(gi, tuple(items[u][0] for u in order), EPIGRAPH, w=k, name=f"customer{i + 1}"))
    return model


# -- MPKPG ------------------------------------------------------------------

@dataclass
class MpkpgInstance:
    c: list
    a: list  # a[i][m]
    sigma: list  # sigma[i][m]
    blocks: list  # lists of 0-based items
    b: list
    beta: float
    rho: float = 0.95
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.b)

    def row_value(self, x, m: int) -> float:
        """sum a_im x_i + PHI^-1(rho) sqrt(sum sigma_im^2 x_i^2)."""
        lin = sum(self.a[i][m] * x[i] for i in range(self.n))
        quad = sum((self.sigma[i][m] * x[i]) ** 2 for i in range(self.n))
        return lin + quantile(self.rho) * math.sqrt(quad)

    def to_dict(self) -> dict:
        return {
            "app": "mpkpg",
            "seed": self.seed,
            "n": self.n,
            "m": self.m,
            "beta": self.beta,
            "rho": self.rho,
            "c": list(self.c),
            "a": [list(r) for r in self.a],
            "sigma": [list(r) for r in self.sigma],
            "blocks": [[i + 1 for i in blk] for blk in self.blocks],
            "b": list(self.b),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MpkpgInstance":
        return cls(list(d["c"]), [list(r) for r in d["a"]], [list(r) for r in d["sigma"]],
                   [[i - 1 for i in blk] for blk in d["blocks"]], list(d["b"]), d["beta"],
                   d.get("rho", 0.95), d.get("seed"))


def block_sizes(n: int, rng: Lcg64) -> list:
    """Sizes drawn from [0.05n, 0.10n] (at least 1); the last block takes what is left."""
    lo = max(1, math.ceil(0.05 * n))
    hi = max(lo, math.floor(0.10 * n))
    sizes, used = [], 0
    while used < n:
        k = min(rng.randint(lo, hi), n - used)
        sizes.append(k)
        used += k
    return sizes


def generate_mpkpg(n: int, m: int, beta: float = 0.5, seed: int = 42, rho: float = 0.95) -> MpkpgInstance:
    rng = Lcg64(seed)
    c = [rng.randint(1, 1000) for _ in range(n)]
    a = [[rng.randint(1, 100) for _ in range(m)] for _ in range(n)]
    sigma = [[rng.randint(1, 2 * a[i][k]) for k in range(m)] for i in range(n)]
    blocks, start = [], 0
    for k in block_sizes(n, rng):
        blocks.append(list(range(start, start + k)))
        start += k
    q = quantile(rho)
    b = []
    for k in range(m):
        amax = sum(max(a[i][k] for i in blk) for blk in blocks)
        smax = sum(max(sigma[i][k] for i in blk) ** 2 for blk in blocks)
        b.append(beta * (amax + q * math.sqrt(smax)))
    return MpkpgInstance(c, a, sigma, blocks, b, beta, rho, seed)


def build_mpkpg_model(inst: MpkpgInstance) -> Model:
    """max c'x with one fixed-rhs substructure per chance-constrained row."""
    model = Model(n_x=inst.n, c_x=np.array(inst.c, dtype=float), sense="max")
    model.gub = [tuple(blk) for blk in inst.blocks]
    f = ConcaveFunction.scaled_sqrt(quantile(inst.rho))
    for k in range(inst.m):
        a_in = [inst.sigma[i][k] ** 2 for i in range(inst.n)]
        lin = [inst.a[i][k] for i in range(inst.n)]
        gi = normalize_instance(a_in, inst.blocks, f, b=lin)
        model.subs.append(Substructure(gi, gi.user_order(), FIXED_RHS, rhs=float(inst.b[k]), name=f"row{k + 1}"))
    return model


def instance_from_dict(d: dict):
    app = d.get("app")
    if app == "mpclp":
        return MpclpInstance.from_dict(d)
    if app == "mpkpg":
        return MpkpgInstance.from_dict(d)
    raise ValueError(f"unknown app {app!r}")


def build_model(inst) -> Model:
    if isinstance(inst, MpclpInstance):
        return build_mpclp_model(inst)
    return build_mpkpg_model(inst)

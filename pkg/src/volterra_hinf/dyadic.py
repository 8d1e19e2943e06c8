"""Dyadic and weight-generated block decompositions of power series.

Two families of index blocks are used:

* dyadic blocks ``[2^n, 2^{n+1})``, with the unit block polynomials
  ``Delta_n(z) = sum_{k in block} z^k`` and ``Delta_0 = 1``;
* weight blocks ``I_w(n) = [M_n, M_{n+1})`` built from the levels
  ``tail(r_n) = 2^{-n}`` of a weight of unit mass, ``M_n = floor(1/(1-r_n))``.

Splitting a function along the dyadic blocks keeps index 1 in the first
block (``Delta_0 f = f(0) + f^(1) z``) so that the blocks of ``f`` always
add back up to ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._numerics import LN2
from .classify import RatioSweep
from .spaces import CoefficientSeries, _apw_power, norm_hp
from .weightlib import RadialWeight, log_tail_t

__all__ = [
    "BlockPartition", "dyadic_block", "dyadic_blocks", "unit_block", "delta_norm_sweep",
    "omega_partition", "hadamard", "weight_block", "decomposition_norm_check",
]

ROOT_XTOL = 1e-14  # in y = -log2(1 - r); 1 - r then carries ~1e-14 relative error
SNAP_TOL = 1e-9


def dyadic_bounds(n: int) -> tuple[int, int]:
    """Index range [lo, hi) of the n-th dyadic block of a function."""
    if n < 0:
        raise ValueError("block index must be nonnegative")
    return (0, 2) if n == 0 else (2 ** n, 2 ** (n + 1))


def dyadic_block(f: CoefficientSeries, n: int) -> CoefficientSeries:
    """The coefficients of f with index in the n-th dyadic block, as a polynomial."""
    lo, hi = dyadic_bounds(n)
    c = np.zeros(min(hi, len(f)), dtype=complex)
    c[lo:] = f.c[lo:hi]
    return CoefficientSeries(c)


def dyadic_blocks(f: CoefficientSeries) -> list[CoefficientSeries]:
    """All nonzero-range dyadic blocks of f; their sum is f."""
    d = f.degree
    n_max = max(0, d.bit_length() - 1)
    return [dyadic_block(f, n) for n in range(n_max + 1)]


def unit_block(n: int) -> CoefficientSeries:
    """Delta_0 = 1 and Delta_n = sum_{2^n <= k < 2^{n+1}} z^k."""
    if n < 0:
        raise ValueError("block index must be nonnegative")
    if n == 0:
        return CoefficientSeries([1.0])
    c = np.zeros(2 ** (n + 1), dtype=complex)
    c[2 ** n:] = 1.0
    return CoefficientSeries(c)


def delta_norm_sweep(p: float, n_max: int) -> RatioSweep:
    """||Delta_n||_{H^p} against 2^{n/p'} for n = 0..n_max (p > 1)."""
    if not p > 1:
        raise ValueError("the block norm asymptotics need p > 1")
    pc = p / (p - 1)
    ns = list(range(n_max + 1))
    lhs = [norm_hp(unit_block(n), p).value for n in ns]
    rhs = [2.0 ** (n / pc) for n in ns]
    return RatioSweep(ns, lhs, rhs, label=f"dyadic block H^{p:g} norms")


def hadamard(f: CoefficientSeries, g: CoefficientSeries) -> CoefficientSeries:
    """Coefficientwise product (f * g)^(n) = f^(n) g^(n)."""
    return f.hadamard(g)


@dataclass
class BlockPartition:
    """Tail levels of a unit-mass weight and the index blocks they generate."""

    weight: str
    mass: float  # the weight is divided by this to have unit mass
    r: np.ndarray  # r_0 .. r_{n_max}
    y: np.ndarray  # -log2(1 - r_n)
    M: np.ndarray  # floor(1 / (1 - r_n)) as float64: exact integers to 2^53, inf past 2^1024
    residuals: np.ndarray  # |tail(r_n)/mass - 2^{-n}|
    warnings: list = field(default_factory=list)

    @property
    def n_max(self) -> int:
        return self.M.size - 1

    def block(self, n: int) -> tuple[int, int]:
        """I_w(n) as a half-open index range; I_w(0) starts at 0."""
        if not 0 <= n < self.n_max:
            raise IndexError("block index outside the partition")
        if not np.isfinite(self.M[n + 1]):
            raise OverflowError("block boundary beyond the double-precision range")
        lo = 0 if n == 0 else int(self.M[n])
        return lo, int(self.M[n + 1])

    def blocks(self) -> list[tuple[int, int]]:
        return [self.block(n) for n in range(self.n_max)]

    @property
    def covered(self) -> float:
        """Every index below this lies in exactly one block."""
        return float(self.M[-1])

    def to_dict(self) -> dict:
        return {"weight": self.weight, "mass": self.mass, "r": self.r.tolist(), "y": self.y.tolist(),
                "M": [int(m) if np.isfinite(m) else math.inf for m in self.M], "residuals": self.residuals.tolist(),
                "warnings": list(self.warnings)}


def _log_tail_y(w: RadialWeight, y: float) -> float:
    """log tail at 1 - r = 2^{-y}, using the log-coordinate closed form when there is one."""
    lam = y * LN2
    if w.closed_tail:
        with np.errstate(all="ignore"):
            return float(w.closed_log_tail_lam(np.array([lam]))[0])
    return float(log_tail_t(w, math.exp(-lam)))


def omega_partition(w: RadialWeight, n_max: int) -> BlockPartition:
    """Solve tail(r_n) = mass * 2^{-n} for n = 0..n_max.

    The root is found in y = -log2(1 - r), where the log tail is monotone and
    smooth; a root within 1e-9 of an integer is snapped to it when that does
    not increase the residual, so power-of-two levels come out exact.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    log_mass = _log_tail_y(w, 0.0)
    mass = math.exp(log_mass)
    ys = np.zeros(n_max + 1)
    warnings: list = []
    hi = 1.0
    for n in range(1, n_max + 1):
        target = log_mass - n * LN2

        def f(y):
            return _log_tail_y(w, y) - target

        lo = ys[n - 1]
        hi = max(hi, lo + 1.0)
        while f(hi) > 0:
            hi = lo + 2 * (hi - lo)
            if hi > 1e300:
                raise ValueError(f"tail level 2^-{n} not reached")
        y = brentq(f, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
        yr = round(y)
        if abs(y - yr) < SNAP_TOL and abs(f(yr)) <= abs(f(y)):
            y = float(yr)
        ys[n] = y
    with np.errstate(over="ignore", under="ignore"):
        r = 1.0 - 2.0 ** -ys
        M = np.floor(2.0 ** ys)
    res = np.array([abs(math.exp(_log_tail_y(w, y) - log_mass) - 2.0 ** -n) for n, y in enumerate(ys)])
    empty = [n for n in range(n_max) if M[n + 1] == M[n] and n > 0]
    if not np.all(np.isfinite(M)):
        warnings.append("tail levels beyond 1 - r = 2^-1024: M_n overflows and the blocks stop there")
    if np.any((r == 1.0) & np.isfinite(M)):
        warnings.append("r_n rounds to 1 in double precision; y = -log2(1 - r_n) carries the level")
    if empty:
        warnings.append(f"empty weight blocks at n = {empty[:8]}{' ...' if len(empty) > 8 else ''}: "
                        "tail levels closer than one index")
    return BlockPartition(w.spec(), mass, r, ys, M, res, warnings)


def weight_block(f: CoefficientSeries, part: BlockPartition, n: int) -> CoefficientSeries:
    """The coefficients of f with index in I_w(n)."""
    lo, hi = part.block(n)
    c = np.zeros(min(hi, len(f)), dtype=complex)
    if lo < c.size:
        c[lo:] = f.c[lo:hi]
    return CoefficientSeries(c)


def decomposition_norm_check(q: float, w: RadialWeight, f_list, n_max: int | None = None) -> RatioSweep:
    """Block-sum norm against the Dirichlet norm, both to the power q.

    lhs = sum_j 2^{-j} ||Delta^w_j f'||_{H^q}^q + |f(0)|^q and
    rhs = ||f||_{D^q_w}^q, for the weight scaled to unit mass.
    """
    if not q > 1:
        raise ValueError("q must exceed 1")
    if isinstance(f_list, CoefficientSeries):
        f_list = [f_list]
    deg = max(f.degree for f in f_list)
    if n_max is None:
        n_max = 8
        while True:
            part = omega_partition(w, n_max)
            if part.covered > deg or n_max >= 64:
                break
            n_max *= 2
    else:
        part = omega_partition(w, n_max)
    if part.covered <= deg:
        raise ValueError("partition does not reach the polynomial degree; raise n_max")
    lhs, rhs = [], []
    for f in f_list:
        d = f.derivative()
        s = abs(f.c[0]) ** q
        for j in range(part.n_max):
            if part.M[j] > d.degree and j > 0:
                break
            lo, hi = part.block(j)
            blk = weight_block(d, part, j)
            if np.any(blk.c):
                s += 2.0 ** -j * norm_hp(blk, q).value ** q
        lhs.append(s)
        val, _ = _apw_power(d, q, w) if np.any(d.c) else (0.0, 0.0)
        rhs.append(val / part.mass + abs(f.c[0]) ** q)
    return RatioSweep(list(range(len(f_list))), lhs, rhs, label=f"weight-block decomposition q={q:g}")

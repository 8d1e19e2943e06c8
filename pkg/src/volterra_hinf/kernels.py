"""Reproducing kernels of weighted D^2 spaces and the dual test functions G_{g,z}.

For a pairing weight nu the kernel of D^2_nu is

    K_zeta(w) = 1 + sum_{k>=1} conj(zeta)^k w^k / (2 k^2 nu_{2k-1}),

and for a symbol g the function w -> conj(G_{g,z}(w)) = int_0^z g'(s) conj(K_s(w)) ds
has coefficients (in conj(w)^k)

    b_0 = g(z) - g(0),
    b_k = c_k sum_n g^(n+1) (n+1) z^{n+k+1} / (n+k+1).

The sup over z of a suitable norm of G_{g,z} is comparable to the norm of
T_g into H^infinity; which norm depends on the regime of p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spaces import (
    CoefficientSeries,
    norm_bmoa_prime_inf,
    norm_dpw,
    norm_zygmund,
)
from .weightlib import RadialWeight, log_moments

__all__ = ["KernelSpec", "GFunction", "GSup", "kernel", "g_function", "sup_g_norm", "default_z_grid"]

DEFAULT_K = 2 ** 10
LADDER_CAP = 16


@dataclass
class KernelSpec:
    nu: RadialWeight
    K: int
    coeffs: np.ndarray  # c_0 .. c_K

    def at(self, zeta: complex) -> CoefficientSeries:
        """K_zeta as a polynomial in w (truncated at degree K)."""
        k = np.arange(self.K + 1)
        return CoefficientSeries(self.coeffs * np.conj(zeta) ** k)


def kernel(nu: RadialWeight, K: int = DEFAULT_K) -> KernelSpec:
    if K < 1:
        raise ValueError("kernel truncation must be at least 1")
    k = np.arange(1, K + 1, dtype=float)
    lc = -math.log(2) - 2 * np.log(k) - log_moments(nu, 2 * k - 1)
    return KernelSpec(nu, K, np.concatenate([[1.0], np.exp(lc)]))


@dataclass
class GFunction:
    g: CoefficientSeries
    z: complex
    K: int
    b: np.ndarray  # coefficients of conj(G) in powers of conj(w)
    tail_bound: float
    truncated: bool

    @property
    def series(self) -> CoefficientSeries:
        """G itself: its Maclaurin coefficients are conj(b_k)."""
        return CoefficientSeries(np.conj(self.b))


def g_function(g: CoefficientSeries, z: complex, nu: RadialWeight | None = None, K: int = DEFAULT_K,
               spec: KernelSpec | None = None) -> GFunction:
    if abs(z) >= 1:
        raise ValueError("evaluation point must lie in the open unit disc")
    spec = spec or kernel(nu, K)
    K = spec.K
    gd = g.c[1: g.degree + 1]  # g^(n+1), n = 0..deg-1
    b = np.zeros(K + 1, dtype=complex)
    if gd.size == 0 or z == 0:
        return GFunction(g, z, K, b, 0.0, False)
    n = np.arange(gd.size, dtype=float)
    k = np.arange(1, K + 1, dtype=float)
    b[0] = g(z) - g.c[0]
    # sum_n g^(n+1)(n+1) z^{n+k+1}/(n+k+1), as a (K x deg) contraction
    expo = n[None, :] + k[:, None] + 1
    with np.errstate(under="ignore"):
        zp = np.power(complex(z), expo)
    b[1:] = spec.coeffs[1:] * ((zp / expo) @ (gd * (n + 1)))
    tail = _tail_estimate(b)
    total = float(np.sum(np.abs(b)))
    return GFunction(g, z, K, b, tail, tail > 0.01 * total if total > 0 else False)


def _tail_estimate(b: np.ndarray) -> float:
    """Estimate of sum_{k>K} |b_k| from the last coefficients.

    |b_k| is fitted as A k^{-s} rho^k over the last 16 indices; the remainder
    is then at most |b_K| times the smaller of the geometric factor
    rho/(1-rho) and the power-law factor K/(s-1).
    """
    n = min(16, b.size - 1)
    k = np.arange(b.size - n, b.size, dtype=float)
    a = np.abs(b[-n:])
    if a[-1] == 0:
        return 0.0
    if np.any(a == 0) or n < 3:
        return math.inf
    X = np.column_stack([np.ones(n), -np.log(k), k])
    (_, s, log_rho), *_ = np.linalg.lstsq(X, np.log(a), rcond=None)
    factors = []
    if log_rho < 0:
        rho = math.exp(log_rho)
        factors.append(rho / (1 - rho))
    if s > 1:
        factors.append(k[-1] / (s - 1))
    return float(a[-1] * min(factors)) if factors else math.inf


@dataclass
class GSup:
    value: float
    argmax: complex
    samples: list = field(default_factory=list)  # (z, norm)
    warnings: list = field(default_factory=list)
    full_grid_value: float | None = None

    def __float__(self) -> float:
        return self.value


def default_z_grid(depth: int = LADDER_CAP, angles: int = 16, real_only: bool = False) -> list[complex]:
    """Radial ladder 1 - 2^{-j}, j = 1..depth (capped at 16), times angles."""
    depth = min(depth, LADDER_CAP)
    rs = 1 - 2.0 ** -np.arange(1, depth + 1)
    if real_only:
        return [complex(r) for r in rs]
    th = 2 * np.pi * np.arange(angles) / angles
    return [complex(r * np.exp(1j * t)) for r in rs for t in th]


def _norm_of(G: CoefficientSeries, norm_kind: str, norm_weight: RadialWeight | None,
             exponent: float | None) -> float:
    kind = norm_kind.lower()
    if kind == "zygmund":
        return norm_zygmund(G).value
    if kind in ("bmoaprimeinf", "bmoa_prime_inf"):
        return norm_bmoa_prime_inf(G, norm_weight, depth=10, q=1, a_depth=6, angles=8).value
    if kind in ("dpw", "dpomega"):
        return norm_dpw(G, exponent, norm_weight).value
    raise ValueError(f"unknown norm kind {norm_kind!r}")


def sup_g_norm(g: CoefficientSeries, nu: RadialWeight, norm_kind: str, z_grid=None, K: int = DEFAULT_K,
               norm_weight: RadialWeight | None = None, exponent: float | None = None,
               verify_full: bool = False, depth: int = LADDER_CAP) -> GSup:
    """sup over the z-grid of the chosen norm of the truncated G_{g,z}.

    norm_kind: "zygmund" (p < 1, nu = W_{p,w}), "bmoaprimeinf" (p = 1,
    nu = w * tail, norm_weight = w) or "dpw" (p > 1, nu = w, exponent = p',
    norm_weight = w). For nonnegative symbols the real axis is scanned first;
    verify_full additionally scans the angular grid and records its sup.
    """
    if g.degree == 0:
        return GSup(0.0, 0j)
    spec = kernel(nu, K)
    norm_weight = norm_weight or nu
    nonneg = g.nonnegative
    grid = z_grid if z_grid is not None else default_z_grid(depth, real_only=nonneg)
    best, arg = -1.0, 0j
    samples, warnings = [], []
    for z in grid:
        G = g_function(g, z, spec=spec)
        v = _norm_of(G.series.trimmed(), norm_kind, norm_weight, exponent)
        samples.append((complex(z), v))
        if G.truncated and not any("truncation" in w for w in warnings):
            warnings.append(f"truncation tail above 1% from |z| = {abs(z):.6g}; raise K")
        if v > best:
            best, arg = v, complex(z)
    out = GSup(best, arg, samples, warnings)
    if verify_full and z_grid is None and nonneg:
        full = sup_g_norm(g, nu, norm_kind, default_z_grid(depth), K, norm_weight, exponent, depth=depth)
        out.full_grid_value = full.value
    return out

"""Quadrature and summation kernels shared by the weight, norm and criteria code.

Everything here is vectorized over the integration nodes: integrands receive
numpy arrays and must return arrays of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

ArrayFn = Callable[[np.ndarray], np.ndarray]

LN2 = math.log(2.0)

# Gauss-Kronrod 7/15 rule on [-1, 1].
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss weights placed on the 15-node layout (odd positions carry Gauss nodes).
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[[13, 11, 9]] = _WG[:3]
_GW[7] = _WG[3]


class QuadratureError(RuntimeError):
    """Raised when an integral cannot be brought under the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error bound {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class QuadSettings:
    epsabs: float = 1e-10
    epsrel: float = 1e-8
    # internal working precision; the public tolerances above are the acceptance limits
    work_rel: float = 1e-12
    max_intervals: int = 20000


DEFAULT_QUAD = QuadSettings()


def _gk_panels(f: ArrayFn, a: np.ndarray, b: np.ndarray):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    k = (fx @ _KW) * h
    g = (fx @ _GW) * h
    mean = k / np.where(h == 0, 1.0, 2 * h)
    resasc = (np.abs(fx - mean[:, None]) @ _KW) * h
    diff = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200 * diff / resasc) ** 1.5), diff)
    err = np.maximum(scaled, 2 * np.finfo(float).eps * np.abs(k))
    return k, err


def gk_integrate(f: ArrayFn, a: float, b: float, breakpoints=(), epsabs: float = 0.0,
                 epsrel: float = 1e-12, max_intervals: int = 20000,
                 raise_on_budget: bool = True) -> tuple[float, float]:
    """Globally adaptive Gauss-Kronrod integration of a vectorized integrand.

    Intervals whose error exceeds an equal share of the remaining budget are
    bisected, all at once, until the total error meets the tolerance. With
    ``raise_on_budget=False`` an exhausted interval budget returns the current
    estimate and its error bound, leaving the acceptance decision to the caller.
    """
    pts = np.unique(np.concatenate([[a, b], [p for p in breakpoints if a < p < b]]))
    lo, hi = pts[:-1].astype(float), pts[1:].astype(float)
    vals, errs = _gk_panels(f, lo, hi)
    while True:
        total = float(vals.sum())
        err = float(errs.sum())
        # never ask for less than rounding accumulated over the panels
        tol = max(epsabs, epsrel * abs(total), 4 * lo.size * np.finfo(float).eps * abs(total))
        if err <= tol or not np.isfinite(total):
            return total, err
        if lo.size >= max_intervals:
            if not raise_on_budget:
                return total, err
            raise QuadratureError("adaptive quadrature hit its interval budget", err)
        split = errs > tol / lo.size
        if not split.any():
            split = errs >= errs.max()
        mid = 0.5 * (lo[split] + hi[split])
        if np.any((mid <= lo[split]) | (mid >= hi[split])):
            # intervals at machine resolution: accept what we have
            return total, err
        nlo = np.concatenate([lo[split], mid])
        nhi = np.concatenate([mid, hi[split]])
        nv, ne = _gk_panels(f, nlo, nhi)
        keep = ~split
        lo = np.concatenate([lo[keep], nlo])
        hi = np.concatenate([hi[keep], nhi])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])


def _log_integral_stage(g_log: ArrayFn, y_hi_cap: float, epsrel: float,
                        y_min_span: float) -> tuple[float, float, float, float, float]:
    """One pass of int_0^inf exp(g_log(y)) dy truncated where the integrand dies.

    Returns (log value, abs error relative to peak, y_end, log g at y_end, decay rate).
    """
    coarse = np.linspace(0.0, y_hi_cap, 2049)
    lg = g_log(coarse)
    finite = np.isfinite(lg)
    if not finite.any():
        return -math.inf, 0.0, 0.0, -math.inf, math.inf
    peak = float(lg[finite].max())
    ipeak = int(np.argmax(np.where(finite, lg, -np.inf)))
    # the integrand is negligible once it has dropped by e^-60 past the peak
    below = np.nonzero(finite[ipeak:] & (lg[ipeak:] < peak - 60.0))[0]
    y_end = coarse[ipeak + below[0]] if below.size else coarse[-1]
    y_end = max(y_end, min(y_min_span, coarse[-1]))
    # log values of size |peak| carry absolute rounding ~ eps |peak|, which
    # becomes relative noise in the rescaled integrand
    epsrel = max(epsrel, 16 * np.finfo(float).eps * (1.0 + abs(peak)))

    def g(y):
        v = g_log(y) - peak
        return np.exp(np.where(np.isfinite(v), v, -np.inf))

    nbreak = int(y_end / LN2)
    # ladder breakpoints, plus a dyadic cluster at y = 0 so that a peak of
    # width ~ 1e-15 at the anchor (rapidly decreasing weights) is resolved
    bps = np.concatenate([LN2 * 2.0 ** -np.arange(1, 50), LN2 * np.arange(1, nbreak + 1)])
    val, err = gk_integrate(g, 0.0, y_end, breakpoints=bps, epsrel=epsrel, raise_on_budget=False)
    l1, l0 = g_log(np.array([y_end, y_end - 1.0]))
    kappa = float(l0 - l1) if np.isfinite(l0) and np.isfinite(l1) else math.inf
    if val <= 0:
        return -math.inf, 0.0, y_end, float(l1), kappa
    return math.log(val) + peak, err / val, y_end, float(l1), kappa


def integrate_log_geometric(log_g: ArrayFn, epsrel: float = 1e-12,
                            y_min_span: float = 44.0) -> tuple[float, float]:
    """log of int_0^inf exp(log_g(y)) dy for a log-integrand living on a half line.

    Callers pass the integrand in the logarithmic boundary coordinate: for
    int_0^s f(u) du with u = s e^{-y} the log-integrand is
    log f(s e^{-y}) + log s - y. Panels of width ln 2 in y are then exactly the
    geometric ladder u = s 2^{-j}, algebraic endpoint singularities become
    exponential decay, and magnitudes are handled through the peak shift.

    Integrands that still decay slowly at y ~ 700 (logarithmic weights) get a
    second geometric pass y = Y e^{z}; the final remainder is extrapolated
    from the local decay rate and folded into the error estimate.

    Returns (log value, relative error estimate).
    """
    lv1, rel1, y_end, l_end, kappa = _log_integral_stage(log_g, 740.0, epsrel, y_min_span)
    if not np.isfinite(lv1):
        return lv1, 0.0
    pieces, errs = [lv1], [rel1 * math.exp(0.0)]
    if np.isfinite(l_end) and l_end - lv1 > math.log(epsrel) - 5:
        # second pass on [y_end, inf) with y = y_end e^z
        Y = y_end

        def g2(z):
            z = np.asarray(z, dtype=float)
            return log_g(Y * np.exp(z)) + math.log(Y) + z

        lv2, rel2, _, l_end, kappa = _log_integral_stage(g2, 700.0, epsrel, y_min_span)
        pieces.append(lv2)
        errs.append(rel2 * math.exp(lv2 - lv1) if np.isfinite(lv2) else 0.0)
    if np.isfinite(l_end) and kappa <= 0:
        raise QuadratureError("integrand does not decay at the endpoint", math.inf)
    rem_log = l_end - math.log(kappa) if np.isfinite(l_end) else -math.inf
    total = logsumexp(pieces + [rem_log])
    rel = (sum(e * math.exp(lv1 - total) for e in errs)
           + (0.01 * math.exp(rem_log - total) if np.isfinite(rem_log) else 0.0))
    return total, rel


# Gauss-Legendre nodes for block sums of smooth terms
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def block_log_sums(log_term: ArrayFn, j_max: int, exact_upto: int = 14) -> np.ndarray:
    """Log of the block sums B_0 = term(0), B_j = sum_{2^{j-1} <= k < 2^j} term(k).

    Blocks with j <= exact_upto are summed term by term. Larger blocks use
    the midpoint Euler-Maclaurin form sum_{k=a}^{b-1} f(k) ~ int_{a-1/2}^{b-1/2} f
    evaluated by 16-point Gauss-Legendre in log k, which is exact to rounding
    for power-law terms and accurate to O(a^-2) otherwise.
    """
    out = np.full(j_max + 1, -np.inf)
    n_exact = min(j_max, exact_upto)
    k = np.arange(0, 2 ** n_exact, dtype=float)
    lt = np.asarray(log_term(k), dtype=float)
    out[0] = lt[0]
    for j in range(1, n_exact + 1):
        seg = lt[2 ** (j - 1): 2 ** j]
        out[j] = _logsumexp(seg)
    for j in range(n_exact + 1, j_max + 1):
        ua, ub = math.log(2.0 ** (j - 1) - 0.5), math.log(2.0 ** j - 0.5)
        u = 0.5 * (ua + ub) + 0.5 * (ub - ua) * _GL_X
        vals = np.asarray(log_term(np.exp(u)), dtype=float) + u + np.log(0.5 * (ub - ua) * _GL_W)
        out[j] = _logsumexp(vals)
    return out


def _logsumexp(v: np.ndarray) -> float:
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return -math.inf
    m = float(np.max(v))
    if not np.isfinite(m):
        return m
    return m + math.log(float(np.sum(np.exp(v - m))))


def logsumexp(v) -> float:
    return _logsumexp(np.asarray(v, dtype=float))

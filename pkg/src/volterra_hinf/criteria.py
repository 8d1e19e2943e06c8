"""Triviality, boundedness and compactness criteria for T_g into H^infinity.

Each criterion comes down to one of three questions about a positive
quantity sampled along the boundary ladder t = 1 - r = 2^{-j}:

* is an improper integral or a series finite,
* is a supremum finite,
* does a limsup vanish.

No finite computation settles these, so every answer is read off the
partial values at depths J_0, 2 J_0, ..., 32 J_0 (depth doubling):

``divergent``
    the increment between consecutive depths at least doubles (up to 1%)
    at each of the last three refinements. A logarithmic divergence doubles
    exactly, any power-type divergence much faster.
``finite``
    the last increment is below 1e-8 of the partial value, or the
    increments contract by a factor <= 0.65 at each of the last three
    refinements (a convergent geometric remainder, extrapolated).
``undecided``
    anything in between; it maps to the ``Inconclusive`` verdict.

All sums and integrals are carried in log space. Integrals use the
coordinate y = -log t, where the ladder cells are the intervals
[j log 2, (j+1) log 2]; series are grouped in the dyadic blocks
2^{j-1} <= k < 2^j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._numerics import LN2, block_log_sums, logsumexp
from .classify import NON_MEMBER, INCONCLUSIVE as CLASS_INCONCLUSIVE, check_dhat
from .classify import RatioSweep
from .spaces import CoefficientSeries
from .weightlib import (
    Derived,
    HConvolve,
    RadialWeight,
    TailProduct,
    log_moments,
    log_tail_t,
)

__all__ = [
    "CriterionReport", "Trend", "TRIVIAL_ONLY", "NONTRIVIAL", "BOUNDED", "UNBOUNDED", "COMPACT",
    "NOT_COMPACT", "INCONCLUSIVE", "UNSUPPORTED", "triviality_p_le_1", "series_form_p_le_1",
    "triviality_p_gt_1", "bergman_triviality", "bounded_tg", "bounded_tg_xspaces",
    "embedding_integrals", "counterexample_sweep", "triviality_log_terms", "bounded_tg_log_terms",
    "inner_sums", "integral_trend", "series_trend", "sup_trend", "conjugate",
]

TRIVIAL_ONLY = "TrivialOnly"
NONTRIVIAL = "Nontrivial"
BOUNDED = "Bounded"
UNBOUNDED = "Unbounded"
COMPACT = "Compact"
NOT_COMPACT = "NotCompact"
INCONCLUSIVE = "Inconclusive"
UNSUPPORTED = "Unsupported"

FINITE, DIVERGENT, UNDECIDED = "finite", "divergent", "undecided"
POSITIVE, VANISHING = "positive", "vanishing"

GROWTH_FACTOR = 2 * (1 - 1e-2)
FINITE_REL = 1e-8
CONTRACT_RHO = 0.65
# limsup read-off: tail-third maxima halving (or faster) per refinement -> 0,
# holding within 1% -> positive
VANISH_RATIO = 0.55
HOLD_RATIO = 0.99
LEVELS = 6
# log of "exactly zero" increments; keeps ratios finite
_LOG_ZERO = -2000.0

DEPTH_CLOSED = 992  # 31 * 2^5: t down to 2^-992, y up to ~687.6
DEPTH_TABLE = 256
DEPTH_QUAD_MOMENTS = 256


@dataclass
class CriterionReport:
    """Outcome of one criterion: samples, summary numbers and a verdict."""

    criterion: str
    params: dict
    samples: list = field(default_factory=list)  # (grid point, value)
    summary: dict = field(default_factory=dict)
    verdict: str = INCONCLUSIVE
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"criterion": self.criterion, "params": dict(self.params),
                "samples": [list(s) for s in self.samples], "summary": dict(self.summary),
                "verdict": self.verdict, "warnings": list(self.warnings)}


@dataclass
class Trend:
    """Partial values of a ladder quantity at the doubling depths, with the verdict."""

    verdict: str
    depths: list
    log_values: list
    log_gains: list
    ratios: list
    slope: float
    log_limit: float  # best estimate of log of the full value (finite) or of the last partial value
    note: str = ""

    @property
    def value(self) -> float:
        return _exp(self.log_limit)

    def samples(self) -> list:
        return [(int(d), _exp(v)) for d, v in zip(self.depths, self.log_values)]


def _exp(v: float) -> float:
    return math.exp(v) if v < 709 else math.inf


def conjugate(p: float) -> float:
    if not p > 1:
        raise ValueError("conjugate exponent needs p > 1")
    return p / (p - 1)


MIN_DEPTH = 2 ** (LEVELS - 1)


def _depth_levels(j_max: int) -> list[int]:
    if j_max < MIN_DEPTH:
        raise ValueError(f"ladder depth {j_max} is too short: need at least {MIN_DEPTH} for {LEVELS} doublings")
    j0 = j_max // 2 ** (LEVELS - 1)
    return [j0 * 2 ** m for m in range(LEVELS)]


def _decide(log_gains: np.ndarray, log_total: float) -> tuple[str, list, float, float, str]:
    lg = np.maximum(np.asarray(log_gains, dtype=float), _LOG_ZERO)
    lr = np.diff(lg)
    ratios = [float(np.exp(min(x, 700.0))) for x in lr]
    slope = float(lr[-1] / LN2)
    last = lr[-3:]
    if np.all(last >= math.log(GROWTH_FACTOR)):
        return DIVERGENT, ratios, slope, log_total, "increments at least double under depth doubling"
    rel_log = lg[-1] - log_total
    if rel_log < math.log(FINITE_REL):
        return FINITE, ratios, slope, log_total, ""
    if np.all(last <= math.log(CONTRACT_RHO)):
        rho = ratios[-1]
        rem = lg[-1] + math.log(rho / (1 - rho))
        return FINITE, ratios, slope, float(np.logaddexp(log_total, rem)), \
            f"increments contract (last ratio {rho:.3g}); remainder extrapolated"
    return UNDECIDED, ratios, slope, log_total, "increments neither contract nor double"


def _trend_from_blocks(log_blocks: np.ndarray, j_max: int, offset: int) -> Trend:
    """Partial sums over blocks[: J + offset] at the doubling depths J."""
    depths = _depth_levels(j_max)
    vals = [logsumexp(log_blocks[: d + offset]) for d in depths]
    gains = [logsumexp(log_blocks[a + offset: b + offset]) for a, b in zip(depths[:-1], depths[1:])]
    verdict, ratios, slope, lim, note = _decide(np.array(gains), vals[-1])
    return Trend(verdict, depths, vals, gains, ratios, slope, lim, note)


SUP_NOISE = 1e-11  # log-increment of a running max treated as rounding
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_SUB = 4  # subpanels per ladder cell


def _cell_nodes(j_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes in y for every ladder cell, shape (j_max, 64), and log weights."""
    h = LN2 / _SUB
    left = (np.arange(j_max * _SUB) * h).reshape(j_max, _SUB)
    y = left[:, :, None] + 0.5 * h * (1 + _GL_X)[None, None, :]
    lw = np.log(0.5 * h * _GL_W)
    return y.reshape(j_max, -1), np.tile(lw, _SUB)


def integral_trend(log_f_y, j_max: int) -> Trend:
    """int_0^inf exp(log_f_y(y)) dy over the ladder cells, with the divergence verdict.

    For int_0^1 F(r) dr pass log_f_y(y) = log F(1 - e^{-y}) - y.
    """
    y, lw = _cell_nodes(j_max)
    with np.errstate(all="ignore"):
        lv = np.asarray(log_f_y(y.ravel()), dtype=float).reshape(y.shape) + lw[None, :]
    lv = np.where(np.isnan(lv), -np.inf, lv)
    m = np.max(lv, axis=1)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        blocks = safe + np.log(np.sum(np.exp(lv - safe[:, None]), axis=1))
    blocks = np.where(np.isfinite(m), blocks, m)
    return _trend_from_blocks(blocks, j_max, offset=0)


def series_trend(log_term, j_max: int, exact_upto: int = 14) -> Trend:
    """sum_{k>=0} exp(log_term(k)) in dyadic blocks, with the divergence verdict."""
    blocks = block_log_sums(log_term, j_max, exact_upto=exact_upto)
    return _trend_from_blocks(blocks, j_max, offset=1)


def sup_trend(log_vals: np.ndarray) -> Trend:
    """Running maximum of a ladder sequence v_j, j = 0..J, at the doubling depths."""
    log_vals = np.asarray(log_vals, dtype=float)
    j_max = log_vals.size - 1
    depths = _depth_levels(j_max)
    run = np.maximum.accumulate(log_vals)
    vals = [float(run[d]) for d in depths]
    gains = []
    for a, b in zip(vals[:-1], vals[1:]):
        # increments at rounding level are not growth: a constant sequence stays constant
        gains.append(b + math.log(-math.expm1(a - b)) if b - a > SUP_NOISE else -math.inf)
    verdict, ratios, slope, lim, note = _decide(np.array(gains), vals[-1])
    if verdict == FINITE:
        lim = max(lim, vals[-1])
    return Trend(verdict, depths, vals, gains, ratios, slope, lim, note)


def limsup_trend(log_vals: np.ndarray) -> tuple[str, float, list]:
    """limsup read off as the max over the tail third of the ladder at each depth.

    Returns (positive | vanishing | undecided, estimate, per-depth maxima).
    """
    log_vals = np.asarray(log_vals, dtype=float)
    depths = _depth_levels(log_vals.size - 1)
    tops = [float(np.max(log_vals[(2 * d) // 3: d + 1])) for d in depths]
    lr = np.diff(tops)[-3:]
    if np.all(lr <= math.log(VANISH_RATIO)):
        verdict = VANISHING
    elif np.all(lr >= math.log(HOLD_RATIO)):
        verdict = POSITIVE
    else:
        verdict = UNDECIDED
    return verdict, _exp(tops[-1]), [(int(d), _exp(v)) for d, v in zip(depths, tops)]


# ---------------------------------------------------------------------------
# tails and moments along the ladder


def _tail_depth(w: RadialWeight) -> int:
    return DEPTH_CLOSED if w.closed_tail else DEPTH_TABLE


def _moment_depth(w: RadialWeight) -> int:
    return DEPTH_CLOSED if w.closed_moment else DEPTH_QUAD_MOMENTS


def _log_tw_fn(w: RadialWeight, lam_max: float):
    """Vectorized log(t w) in lam.

    A derived weight over a base without a closed tail would otherwise run
    one tail quadrature per node; the base's tail table is used instead.
    """
    if isinstance(w, Derived) and not isinstance(w.kind, HConvolve) and not w.base.closed_tail:
        base_tail = log_tail_lam(w.base, lam_max)
        return lambda lam: w.log_tw_from_tail(lam, base_tail(lam))
    return w.log_tw_lam


_TAIL_CACHE: dict = {}


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    m = np.max(a, axis=1)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        s = safe + np.log(np.sum(np.exp(a - safe[:, None]), axis=1))
    return np.where(np.isfinite(m), s, -np.inf)


def log_tail_lam(w: RadialWeight, lam_max: float, per_octave: int = 8):
    """Vectorized log tail as a function of lam = -log(1 - r) on [0, lam_max].

    Closed forms are used directly. Otherwise the tail is accumulated from
    Gauss-Legendre cell integrals of t w on a grid of spacing log(2)/per_octave,
    closed off past the deepest node by the local power-law remainder, and
    completed between nodes by one more Gauss-Legendre integral, so values
    off the grid carry quadrature accuracy rather than interpolation error.
    """
    if w.closed_tail:
        def f(lam):
            with np.errstate(all="ignore"):
                return w.closed_log_tail_lam(lam)
        return f
    key = (w, float(lam_max), per_octave)
    if key in _TAIL_CACHE:
        return _TAIL_CACHE[key]
    if isinstance(w, Derived) and isinstance(w.kind, HConvolve):
        per_octave = 2
    ltw = _log_tw_fn(w, lam_max + 30.0)
    h = LN2 / per_octave
    n = int(math.ceil(lam_max / h)) + 1
    lam = np.arange(n + 1) * h
    x = lam[:-1, None] + 0.5 * h * (1 + _GL_X)[None, :]
    with np.errstate(all="ignore"):
        lv = np.asarray(ltw(x.ravel()), dtype=float).reshape(x.shape) + np.log(0.5 * h * _GL_W)
    cells = _logsumexp_rows(lv)
    out = np.empty(n + 1)
    # remainder past the last node: t w decays like a power of t there; the
    # slope is averaged over a wide window so oscillating factors cancel
    l_end, l_back = np.asarray(ltw(np.array([lam[-1], lam[-1] - 20.0])), dtype=float)
    slope = (l_end - l_back) / 20.0
    if slope < 0:
        out[-1] = float(l_end - math.log(-slope))
    else:
        out[-1] = float(log_tail_t(w, math.exp(-lam[-1])))
    for i in range(n - 1, -1, -1):
        out[i] = np.logaddexp(cells[i], out[i + 1])
    log_gl_w = np.log(_GL_W)

    def g(v):
        v = np.asarray(v, dtype=float)
        flat = np.clip(v.ravel(), 0.0, lam[-1])
        i = np.minimum((flat / h).astype(int), n - 1)
        half = 0.5 * (lam[i + 1] - flat)
        nodes = flat[:, None] + half[:, None] * (1 + _GL_X)[None, :]
        with np.errstate(all="ignore"):
            part = np.asarray(ltw(nodes.ravel()), dtype=float).reshape(nodes.shape) \
                + log_gl_w[None, :] + np.log(half)[:, None]
        return np.logaddexp(out[i + 1], _logsumexp_rows(part)).reshape(v.shape)
    _TAIL_CACHE[key] = g
    return g


_MOMENT_PANELS = 176
_MOMENT_CHUNK = 256


def _fixed_log_moments(w: RadialWeight, xs: np.ndarray, ltail) -> np.ndarray:
    """log w_x for many x at once, by a fixed rule in lam = -log t.

    The integrand (1 - e^{-lam})^x t w(t) is negligible (below e^{-e^4}) for
    lam < log x - 4, and equal to t w(t) up to a factor 1 - O(e^{-40}) for
    lam > log x + 40, where it integrates to the tail. The window in between
    gets 176 Gauss-Legendre panels of 16 nodes.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    out = np.empty(xs.size)
    ltw = _log_tw_fn(w, 730.0)
    u = np.linspace(0.0, 1.0, _MOMENT_PANELS + 1)
    for a in range(0, xs.size, _MOMENT_CHUNK):
        x = xs[a: a + _MOMENT_CHUNK]
        lx = np.log(np.maximum(x, 1.0))
        lo = np.maximum(0.0, lx - 4.0)
        hi = np.minimum(lx + 40.0, 700.0)
        edges = lo[:, None] + (hi - lo)[:, None] * u[None, :]
        width = np.diff(edges, axis=1)
        lam = edges[:, :-1, None] + 0.5 * width[:, :, None] * (1 + _GL_X)[None, None, :]
        with np.errstate(all="ignore"):
            body = np.where(x[:, None, None] > 0, x[:, None, None] * np.log1p(-np.exp(-lam)), 0.0)
            lv = body + np.asarray(ltw(lam.ravel())).reshape(lam.shape) \
                + np.log(0.5 * width[:, :, None] * _GL_W[None, None, :])
        lv = lv.reshape(x.size, -1)
        m = np.max(lv, axis=1)
        inner = m + np.log(np.sum(np.exp(lv - m[:, None]), axis=1))
        out[a: a + x.size] = np.logaddexp(inner, ltail(hi))
    return out


@lru_cache(maxsize=64)
def moment_function(w: RadialWeight):
    """Vectorized log-moment evaluator used by every series criterion.

    Closed forms are used when available; otherwise the fixed-window rule
    above, memoized per order so repeated ladder sums reuse earlier values.
    """
    if w.closed_moment:
        return lambda k: log_moments(w, k)
    ltail = log_tail_lam(w, 700.0)
    memo: dict[float, float] = {}

    def f(k):
        k = np.asarray(k, dtype=float)
        flat = k.ravel()
        missing = np.array(sorted({float(v) for v in flat} - memo.keys()))
        if missing.size:
            memo.update(zip(missing.tolist(), _fixed_log_moments(w, missing, ltail).tolist()))
        return np.array([memo[float(v)] for v in flat]).reshape(k.shape)
    return f


def _check_support(w: RadialWeight, check_class: bool, warnings: list) -> bool:
    """False when the weight is outside the upper doubling class."""
    if not check_class:
        return True
    m = check_dhat(w)
    if m.verdict == NON_MEMBER:
        return False
    if m.verdict == CLASS_INCONCLUSIVE:
        warnings.append("upper doubling membership inconclusive; criteria assume it")
    return True


def _unsupported(name: str, params: dict, warnings: list) -> CriterionReport:
    warnings.append("weight is not in the upper doubling class: the characterizations do not apply")
    return CriterionReport(name, params, [], {}, UNSUPPORTED, warnings)


def _trend_summary(t: Trend, prefix: str = "") -> dict:
    return {f"{prefix}verdict": t.verdict, f"{prefix}value": t.value, f"{prefix}slope": t.slope,
            f"{prefix}gain_ratios": list(t.ratios), f"{prefix}depths": list(t.depths)}


def _sym_spec(g: CoefficientSeries) -> str:
    return "poly:" + ",".join(repr(float(v.real)) for v in g.c[: g.degree + 1])


# ---------------------------------------------------------------------------
# 0 < p <= 1: the sup form


def triviality_p_le_1(p: float, w: RadialWeight, depth: int | None = None,
                      check_class: bool = True) -> CriterionReport:
    """S(r) = (1-r)^{2-1/p} / tail(r)^{1/p} on the ladder.

    The verdict concerns bounded operators (sup of S infinite -> TrivialOnly).
    ``summary['compact_verdict']`` concerns compact ones (limsup of S
    positive -> TrivialOnly).
    """
    if not 0 < p <= 1:
        raise ValueError("this criterion needs 0 < p <= 1")
    params = {"p": p, "weight": w.spec()}
    warnings: list = []
    if not _check_support(w, check_class, warnings):
        return _unsupported("triviality_p_le_1", params, warnings)
    J = depth or _tail_depth(w)
    lam = np.arange(J + 1) * LN2
    lt = log_tail_lam(w, lam[-1])(lam)
    log_s = -(2 - 1 / p) * lam - lt / p
    st = sup_trend(log_s)
    lim_verdict, lim_est, lim_levels = limsup_trend(log_s)
    verdict = {DIVERGENT: TRIVIAL_ONLY, FINITE: NONTRIVIAL}.get(st.verdict, INCONCLUSIVE)
    compact = {POSITIVE: TRIVIAL_ONLY, VANISHING: NONTRIVIAL}.get(lim_verdict, INCONCLUSIVE)
    if verdict == TRIVIAL_ONLY:
        compact = TRIVIAL_ONLY  # an infinite sup has a positive limsup
    summary = {"sup": st.value, "limsup": lim_est, "slope": st.slope, "sup_trend": st.verdict,
               "limsup_trend": lim_verdict, "compact_verdict": compact, "limsup_levels": lim_levels,
               "depth": J}
    alpha = 2 * p - 2
    if getattr(w, "alpha", None) == alpha and not getattr(w, "normalized", True) and p > 0.5:
        summary["closed_constant"] = (2 * p - 1) ** (1 / p)
        summary["stated_constant"] = (2 * p - 1) ** (-1 / p)
        warnings.append("S is constant equal to (2p-1)^(1/p); the stated value (2p-1)^(-1/p) "
                        "does not match and only positivity is used")
    if st.note:
        warnings.append(st.note)
    return CriterionReport("triviality_p_le_1", params, st.samples(), summary, verdict, warnings)


def series_form_p_le_1(p: float, w: RadialWeight, r_grid) -> RatioSweep:
    """sum_{k>=1} r^{2(k-1)} / (tail(1-1/k)^{1/p} k^{2-1/p}) against (1-r)^{1-1/p} / tail(r)^{1/p}.

    The series is summed in chunks until a term falls below 1e-14 of the
    partial sum past the peak of the terms (with the geometric remainder
    bound also below that level).
    """
    if not 0 < p <= 1:
        raise ValueError("this comparison needs 0 < p <= 1")
    rs = np.asarray(r_grid, dtype=float)
    if np.any((rs < 0) | (rs >= 1)):
        raise ValueError("radii must lie in [0, 1)")
    lam_top = max(2.0, float(np.log(1e7 / max(1e-300, float(np.min(1 - rs))))))
    ltail = log_tail_lam(w, lam_top + 40.0)
    lhs, rhs = [], []
    chunk = 1 << 15
    for r in rs:
        two_log_r = 2 * math.log(r) if r > 0 else -math.inf
        parts, k0 = [], 1
        while True:
            k = np.arange(k0, k0 + chunk, dtype=float)
            with np.errstate(all="ignore"):
                lk = np.log(k)
                lt = (k - 1) * two_log_r if r > 0 else np.where(k == 1, 0.0, -np.inf)
                terms = lt - ltail(lk) / p - (2 - 1 / p) * lk
            parts.append(logsumexp(terms))
            total = logsumexp(parts)
            last = terms[-1]
            past_peak = terms[-1] < terms[-2]
            geo = last - math.log1p(-r * r) if r > 0 else last
            if past_peak and last < total + math.log(1e-14) and geo < total + math.log(1e-14):
                break
            k0 += chunk
            if k0 > 1 << 32:
                raise RuntimeError("series did not reach its truncation threshold")
        lhs.append(math.exp(total))
        t = 1 - r
        rhs.append(math.exp((1 - 1 / p) * math.log(t) - float(log_tail_t(w, t)) / p))
    return RatioSweep(list(rs), lhs, rhs, label=f"series/closed p={p} {w.spec()}")


# ---------------------------------------------------------------------------
# p > 1: triviality


def triviality_log_terms(p: float, w: RadialWeight, k) -> np.ndarray:
    """log of 1 / ((k+1)^{2+p'} w_k^{p'-1})."""
    q = conjugate(p)
    k = np.asarray(k, dtype=float)
    return -(2 + q) * np.log1p(k) - (q - 1) * moment_function(w)(k)


def triviality_p_gt_1(p: float, w: RadialWeight, depth: int | None = None,
                      check_class: bool = True) -> CriterionReport:
    """int_0^1 (1-r)^{p'} / tail^{p'-1} dr and sum 1/((k+1)^{2+p'} w_k^{p'-1}).

    Both forms must reach the same verdict; disagreement is Inconclusive.
    """
    if not p > 1:
        raise ValueError("this criterion needs p > 1")
    q = conjugate(p)
    params = {"p": p, "weight": w.spec()}
    warnings: list = []
    if not _check_support(w, check_class, warnings):
        return _unsupported("triviality_p_gt_1", params, warnings)
    Ji = depth or _tail_depth(w)
    ltail = log_tail_lam(w, Ji * LN2 + 1)
    it = integral_trend(lambda y: -q * y - (q - 1) * ltail(y) - y, Ji)
    Js = depth or _moment_depth(w)
    st = series_trend(lambda k: triviality_log_terms(p, w, k), Js,
                      exact_upto=14 if w.closed_moment else 10)
    summary = {**_trend_summary(it, "integral_"), **_trend_summary(st, "series_")}
    if it.verdict == st.verdict == DIVERGENT:
        verdict = TRIVIAL_ONLY
    elif it.verdict == st.verdict == FINITE:
        verdict = NONTRIVIAL
    else:
        verdict = INCONCLUSIVE
        warnings.append(f"integral {it.verdict}, series {st.verdict}")
    for t in (it, st):
        if t.note:
            warnings.append(t.note)
    samples = [("integral", d, v) for d, v in it.samples()] + [("series", d, v) for d, v in st.samples()]
    return CriterionReport("triviality_p_gt_1", params, samples, summary, verdict, warnings)


def bergman_triviality(p: float, w: RadialWeight, depth: int | None = None,
                       check_class: bool = True) -> CriterionReport:
    """int_0^1 dr / tail(r)^{p'-1}: infinite means only constants act boundedly on A^p_w."""
    if not p > 1:
        raise ValueError("this criterion needs p > 1")
    q = conjugate(p)
    params = {"p": p, "weight": w.spec()}
    warnings: list = []
    if not _check_support(w, check_class, warnings):
        return _unsupported("bergman_triviality", params, warnings)
    J = depth or _tail_depth(w)
    ltail = log_tail_lam(w, J * LN2 + 1)
    it = integral_trend(lambda y: -(q - 1) * ltail(y) - y, J)
    verdict = {DIVERGENT: TRIVIAL_ONLY, FINITE: NONTRIVIAL}.get(it.verdict, INCONCLUSIVE)
    if it.note:
        warnings.append(it.note)
    return CriterionReport("bergman_triviality", params, it.samples(), _trend_summary(it), verdict, warnings)


# ---------------------------------------------------------------------------
# nonnegative symbols


def inner_sums(g: CoefficientSeries, k) -> np.ndarray:
    """sum_n g^(n+1) (n+1) / (n+k+1) for each (real) k >= 0."""
    k = np.asarray(k, dtype=float)
    gd = np.real(g.c[1: g.degree + 1])
    n = np.arange(gd.size, dtype=float)
    num = gd * (n + 1)
    return (num[None, :] / (n[None, :] + k.ravel()[:, None] + 1)).sum(axis=1).reshape(k.shape)


def _check_symbol(g: CoefficientSeries) -> None:
    if not g.nonnegative:
        raise ValueError("the symbol must have nonnegative real Maclaurin coefficients")


def bounded_tg_log_terms(p: float, w: RadialWeight, g: CoefficientSeries, k,
                         xspaces: bool = False) -> np.ndarray:
    """log of (k+1)^{e} w_k^{1-p'} (inner_k)^{p'} with e = -2, or p'-2 for the X-spaces form."""
    q = conjugate(p)
    k = np.asarray(k, dtype=float)
    # the triviality terms times ((k+1) inner_k)^{p'}: for g = z the factor is 1 to rounding,
    # so the two series agree term by term
    base = triviality_log_terms(p, w, k)
    if xspaces:
        base = base + q * np.log1p(k)
    with np.errstate(divide="ignore"):
        return base + q * np.log(inner_sums(g, k) * (k + 1))


def _zero_symbol_report(name: str, params: dict) -> CriterionReport:
    summary = {"bounded": BOUNDED, "compact": COMPACT, "value": 0.0, "sup": 0.0, "limsup": 0.0}
    return CriterionReport(name, params, [], summary, COMPACT, [])


def _series_symbol(name: str, p: float, w: RadialWeight, g: CoefficientSeries, depth, xspaces,
                   check_class) -> CriterionReport:
    _check_symbol(g)
    params = {"p": p, "weight": w.spec(), "symbol": _sym_spec(g)}
    if g.degree == 0:
        return _zero_symbol_report(name, params)
    warnings: list = []
    if not _check_support(w, check_class, warnings):
        return _unsupported(name, params, warnings)
    J = depth or _moment_depth(w)
    params["depth"] = J
    st = series_trend(lambda k: bounded_tg_log_terms(p, w, g, k, xspaces), J,
                      exact_upto=14 if w.closed_moment else 10)
    summary = _trend_summary(st)
    summary["bounded"] = {FINITE: BOUNDED, DIVERGENT: UNBOUNDED}.get(st.verdict, INCONCLUSIVE)
    summary["compact"] = {FINITE: COMPACT, DIVERGENT: NOT_COMPACT}.get(st.verdict, INCONCLUSIVE)
    verdict = {FINITE: COMPACT, DIVERGENT: UNBOUNDED}.get(st.verdict, INCONCLUSIVE)
    if st.note:
        warnings.append(st.note)
    return CriterionReport(name, params, st.samples(), summary, verdict, warnings)


def _a_p_log_values(p: float, w: RadialWeight, g: CoefficientSeries, J: int, exact_upto: int) -> np.ndarray:
    """log of (1-r) sum_k (k+1)^{1/p-1} r^k w_k^{-1/p} inner_k at r = 1 - 2^{-j}."""
    out = np.empty(J + 1)
    mom = moment_function(w)
    for j in range(J + 1):
        t = 2.0 ** -j
        log_r = math.log1p(-t) if j > 0 else -math.inf

        def term(k, log_r=log_r):
            k = np.asarray(k, dtype=float)
            with np.errstate(all="ignore"):
                pow_r = np.where(k == 0, 0.0, k * log_r)
                return ((1 / p - 1) * np.log1p(k) + pow_r - mom(k) / p
                        + np.log(inner_sums(g, k)))

        if j == 0:
            # r = 0: only k = 0 survives
            out[j] = float(term(np.array([0.0]))[0])
            continue
        blocks = block_log_sums(term, j + 9, exact_upto=min(exact_upto, j + 9))
        out[j] = -j * LN2 + logsumexp(blocks)
    return out


def _p1_values(w: RadialWeight, g: CoefficientSeries, js, M: int, compact_form: bool,
               s_shift: int = 0) -> np.ndarray:
    """A_w(r, s) on the ladder r = 1 - 2^{-j}, s = 1 - 2^{-(j + s_shift)}, truncated at m < M."""
    tp = Derived(w, TailProduct())
    k = np.arange(M, dtype=float)
    lmom = moment_function(tp)(k + 1)
    inner = inner_sums(g, k)
    gd = np.real(g.c[1: g.degree + 1])
    n = np.arange(gd.size, dtype=float)
    m = np.arange(M, dtype=float)
    out = []
    for j in js:
        r, s = 1 - 2.0 ** -j, 1 - 2.0 ** -(j + s_shift)
        lr, ls = math.log(r), math.log(s)
        if compact_form:
            # sum_{k<=m} r^{k+2} s^{m-k} / mom_{k+1} * inner_k = s^m sum_{k<=m} (r/s)^k r^2 inner_k / mom
            ck = np.exp((k + 2) * lr - k * ls - lmom) * inner
            inner_m = np.cumsum(ck) * np.exp(m * ls)
        else:
            sn = (gd * (n + 1))[None, :] * np.exp(n * ls)[None, :] / (n[None, :] + k[:, None] + 1)
            ck = np.exp((k + 2) * lr - lmom) * sn.sum(axis=1)
            inner_m = np.cumsum(ck) * np.exp((m + 3) * ls)
        lt = float(log_tail_t(w, 2.0 ** -j))
        val = math.exp(2 * lt) * float(np.sum((1 - s) / (m + 1) ** 2 * inner_m ** 2))
        out.append(val)
    return np.array(out)


def bounded_tg(p: float, w: RadialWeight, g: CoefficientSeries, depth: int | None = None,
               K: int = 512, M: int = 512, check_class: bool = True) -> CriterionReport:
    """Boundedness and compactness of T_g: D^p_w -> H^infinity for a nonnegative symbol.

    p < 1: the sup and limsup over r of the A_{p,w} quantity on the ladder.
    p = 1: the two-parameter quantity on the diagonal r = s, truncated at
    K = M terms (a 2M run estimates the truncation tail), with off-diagonal
    spot checks s = 1 - 2^{-(j +- 1)}.
    p > 1: the moment series; boundedness and compactness coincide.
    """
    if p > 1:
        return _series_symbol("bounded_tg", p, w, g, depth, False, check_class)
    if not p > 0:
        raise ValueError("p must be positive")
    _check_symbol(g)
    params = {"p": p, "weight": w.spec(), "symbol": _sym_spec(g)}
    if g.degree == 0:
        return _zero_symbol_report("bounded_tg", params)
    warnings: list = []
    if not _check_support(w, check_class, warnings):
        return _unsupported("bounded_tg", params, warnings)
    if p < 1:
        J = depth or 64
        params["depth"] = J
        lv = _a_p_log_values(p, w, g, J, 14 if w.closed_moment else 10)
        st = sup_trend(lv)
        lim_verdict, lim_est, lim_levels = limsup_trend(lv)
        bounded = {FINITE: BOUNDED, DIVERGENT: UNBOUNDED}.get(st.verdict, INCONCLUSIVE)
        compact = {VANISHING: COMPACT, POSITIVE: NOT_COMPACT}.get(lim_verdict, INCONCLUSIVE)
        summary = {"sup": st.value, "limsup": lim_est, "slope": st.slope, "bounded": bounded,
                   "compact": compact, "limsup_levels": lim_levels, "gain_ratios": st.ratios}
        if st.note:
            warnings.append(st.note)
        samples = st.samples()
    else:
        K = M = max(K, M)
        params.update({"K": K, "M": M, "N": g.degree})
        js = list(range(1, max(2, int(math.log2(M)) - 1)))
        diag = _p1_values(w, g, js, M, False)
        diag2 = _p1_values(w, g, js, 2 * M, False)
        tail_rel = np.abs(diag2 - diag) / np.maximum(diag2, 1e-300)
        if tail_rel[-1] > 0.01:
            warnings.append(f"truncation tail {tail_rel[-1]:.2g} of the value at the deepest radius; raise M")
        off = np.concatenate([_p1_values(w, g, js, 2 * M, False, 1), _p1_values(w, g, js[1:], 2 * M, False, -1)])
        comp = _p1_values(w, g, js, 2 * M, True)
        grow = diag2[1:] / diag2[:-1]
        if np.all(grow[-3:] <= 1.01):
            bounded = BOUNDED
        elif np.all(grow[-3:] >= 1.25):
            bounded = UNBOUNDED
        else:
            bounded = INCONCLUSIVE
        shrink = comp[1:] / comp[:-1]
        if np.all(shrink[-3:] <= 0.75):
            compact = COMPACT
        elif np.all(shrink[-3:] >= 0.95):
            compact = NOT_COMPACT
        else:
            compact = INCONCLUSIVE
        tail_third = comp[(2 * len(comp)) // 3:]
        summary = {"sup": float(max(diag2.max(), off.max())), "limsup": float(tail_third.max()),
                   "diagonal": diag2.tolist(), "off_diagonal_max": float(off.max()),
                   "truncation_rel": tail_rel.tolist(), "bounded": bounded, "compact": compact,
                   "reading": "joint approach r = s, off-diagonal spot checks"}
        samples = [(int(j), float(v)) for j, v in zip(js, diag2)]
    if compact == COMPACT and bounded == BOUNDED:
        verdict = COMPACT
    elif bounded == BOUNDED:
        verdict = NOT_COMPACT if compact == NOT_COMPACT else BOUNDED
    elif bounded == UNBOUNDED:
        verdict = UNBOUNDED
    else:
        verdict = INCONCLUSIVE
    return CriterionReport("bounded_tg", params, samples, summary, verdict, warnings)


def bounded_tg_xspaces(p: float, w: RadialWeight, g: CoefficientSeries, depth: int | None = None,
                       check_class: bool = True) -> CriterionReport:
    """The (k+1)^{p'-2} series; one verdict for HL^w_p, A^p_w and D^p of the [p]-shifted tail weight."""
    if not p > 1:
        raise ValueError("this criterion needs p > 1")
    rep = _series_symbol("bounded_tg_xspaces", p, w, g, depth, True, check_class)
    rep.params["spaces"] = ["HL", "Apw", "Dp[p]"]
    return rep


# ---------------------------------------------------------------------------
# the embedding counterexample


def embedding_integrals(p: float, w: RadialWeight, depth: int | None = None, q_nodes: int = 8,
                        check_class: bool = True) -> CriterionReport:
    """Three integrals in the log coordinate:

    * ``theorem``: int (1-r)^{p'} tail^{1-p'} dr (the triviality integral),
    * ``lower``:   int (1-r)^{p'} tail^{1-p'} w / tail dr,
    * ``double``:  int (int_0^r (r-s) / ((1-s) tail(s)) ds)^{p'} w(r) dr,
      inner integral by cumulative quadrature, outer as a ladder sum.
    """
    if not p > 1:
        raise ValueError("this comparison needs p > 1")
    qc = conjugate(p)
    params = {"p": p, "weight": w.spec()}
    warnings: list = []
    if not _check_support(w, check_class, warnings):
        return _unsupported("embedding_integrals", params, warnings)
    J = depth or _tail_depth(w)
    ltail = log_tail_lam(w, J * LN2 + 1)
    thm = integral_trend(lambda y: -qc * y - (qc - 1) * ltail(y) - y, J)
    low = integral_trend(lambda y: -qc * y - qc * ltail(y) + w.log_w_lam(y) - y, J)

    # inner: I(t) = A - t B, A = int_0^y e^{-u} / tail du, B = int_0^y du / tail
    h = LN2 / q_nodes
    y = np.arange(J * q_nodes + 1) * h
    x = y[:-1, None] + 0.5 * h * (1 + _GL_X)[None, :]
    lt = ltail(x.ravel()).reshape(x.shape)
    lwts = np.log(0.5 * h * _GL_W)
    ca = np.array([logsumexp(row) for row in (-x - lt + lwts)])
    cb = np.array([logsumexp(row) for row in (-lt + lwts)])
    la = np.concatenate([[-np.inf], np.logaddexp.accumulate(ca)])
    lb = np.concatenate([[-np.inf], np.logaddexp.accumulate(cb)])
    with np.errstate(all="ignore"):
        li = la + np.log(-np.expm1(np.minimum(-y + lb - la, 0.0)))
        lo = qc * li + w.log_w_lam(y) - y + math.log(h)
    lo = np.where(np.isnan(lo), -np.inf, lo)
    # trapezoid end weights are irrelevant for the trend; group q_nodes per ladder cell
    blocks = np.array([logsumexp(lo[i * q_nodes: (i + 1) * q_nodes]) for i in range(J)])
    dbl = _trend_from_blocks(blocks, J, offset=0)
    summary = {**_trend_summary(thm, "theorem_"), **_trend_summary(low, "lower_"),
               **_trend_summary(dbl, "double_")}
    verdict = {DIVERGENT: TRIVIAL_ONLY, FINITE: NONTRIVIAL}.get(thm.verdict, INCONCLUSIVE)
    if low.verdict != dbl.verdict:
        warnings.append(f"embedding lower bound {low.verdict}, double integral {dbl.verdict}")
    samples = [("lower", d, v) for d, v in low.samples()]
    return CriterionReport("embedding_integrals", params, samples, summary, verdict, warnings)


def counterexample_sweep(p: float = 2.0, alphas=(0.5, 1.0, 1.5, 2.5)) -> list[CriterionReport]:
    """embedding_integrals over standard weights (1-r)^alpha."""
    from .weightlib import Standard

    return [embedding_integrals(p, Standard(float(a))) for a in alphas]

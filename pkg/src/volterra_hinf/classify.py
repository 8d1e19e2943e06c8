"""Numerical membership tests for the doubling classes and Lemma-A style exponents.

No finite grid proves an inequality for every r, so verdicts come from a
trend analysis over three nested refinement levels (depths J/4, J/2, J of
the geometric ladder r_j = 1 - 2^{-j/q}):

* the extremal ratio has stabilized at the finest level -> ``member``
* it keeps moving the wrong way at both refinements     -> ``non-member``
* anything else                                          -> ``Inconclusive``
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .weightlib import RadialWeight, Tabulated, WeightError, log_moments, log_tail_t

MEMBER = "member"
NON_MEMBER = "non-member"
INCONCLUSIVE = "Inconclusive"

# relative change of the extremal ratio regarded as "stabilized"
STABLE_TOL = 1e-3
# relative decrease of (C - 1) per refinement regarded as "drifting to 1"
DRIFT_TOL = 0.1
# ratio of successive log-increments of the running sup under depth doubling:
# <= CONVERGENT_RHO reads as a bounded limit, >= DIVERGENT_RHO as growth
CONVERGENT_RHO = 0.65
DIVERGENT_RHO = 0.9


@dataclass(frozen=True)
class GridSpec:
    """Radial ladder r_j = 1 - 2^{-j/q}, j = 0..depth, plus an angular node count."""

    depth: int = 40
    q: int = 1
    angles: int = 16

    def __post_init__(self):
        if self.depth < 4 or self.q < 1:
            raise ValueError("grid needs depth >= 4 and q >= 1")

    def t_nodes(self) -> np.ndarray:
        return 2.0 ** (-np.arange(self.depth * self.q + 1) / self.q)

    def nodes(self) -> np.ndarray:
        return 1.0 - self.t_nodes()

    def levels(self) -> tuple[int, int, int]:
        """Node counts of the three refinement levels (depths J/4, J/2, J)."""
        n = self.depth * self.q
        return (n // 4, n // 2, n)

    @classmethod
    def for_weight(cls, w: RadialWeight, depth: int | None = None, q: int = 1) -> "GridSpec":
        """Default depth 40 for closed-form tails, capped at 20 when tails need quadrature."""
        if depth is None:
            depth = 40 if w.closed_tail else 20
        return cls(depth=depth, q=q)


@dataclass
class Membership:
    verdict: str
    C: float
    K: float | None = None
    levels: list = field(default_factory=list)  # [(depth, extremal ratio)]
    slope: float = 0.0  # log2 growth of the extremal ratio per refinement
    note: str = ""

    def to_dict(self):
        return asdict(self)


@dataclass
class RatioSweep:
    xs: list
    lhs: list
    rhs: list
    label: str = ""

    @property
    def ratios(self) -> np.ndarray:
        return np.asarray(self.lhs, dtype=float) / np.asarray(self.rhs, dtype=float)

    @property
    def min(self) -> float:
        return float(np.min(self.ratios))

    @property
    def max(self) -> float:
        return float(np.max(self.ratios))

    @property
    def band(self) -> float:
        return self.max / self.min

    def to_dict(self):
        return {"label": self.label, "xs": list(map(float, self.xs)), "lhs": list(map(float, self.lhs)),
                "rhs": list(map(float, self.rhs)), "min": self.min, "max": self.max}


@dataclass
class ClassReport:
    dhat: Membership
    dcheck: Membership
    d: str
    beta: float | None
    eta: float | None
    grid: GridSpec
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"dhat": self.dhat.to_dict(), "dcheck": self.dcheck.to_dict(), "d": self.d,
                "beta": self.beta, "eta": self.eta, "grid": asdict(self.grid), "notes": list(self.notes)}


def _exp(c: float) -> float:
    return math.exp(c) if c < 709 else math.inf


def _level_extrema(log_ratio: np.ndarray, grid: GridSpec, fn) -> list[tuple[float, float]]:
    out = []
    for n in grid.levels():
        out.append((n / grid.q, float(fn(log_ratio[: n + 1]))))
    return out


def check_dhat(w: RadialWeight, grid: GridSpec | None = None) -> Membership:
    """Upper doubling: sup of tail(r) / tail((1+r)/2) over the ladder."""
    grid = grid or GridSpec.for_weight(w)
    t = grid.t_nodes()
    lr = log_tail_t(w, t) - log_tail_t(w, t / 2)
    if not np.all(np.isfinite(lr)):
        return Membership(INCONCLUSIVE, math.inf, note="tail not resolvable on the grid")
    lv = _level_extrema(lr, grid, np.max)
    (_, c1), (_, c2), (_, c3) = lv
    levels = [(d, _exp(c)) for d, c in lv]
    slope = (c3 - c2) / math.log(2)
    # growth: the finest nodes themselves keep increasing, and so does the running max
    tail_nodes = lr[grid.levels()[1]:]
    rising = bool(np.all(np.diff(tail_nodes[-4:]) > 0))
    d1, d2 = c2 - c1, c3 - c2
    if d2 <= math.log1p(STABLE_TOL):
        return Membership(MEMBER, _exp(c3), levels=levels, slope=slope)
    # increments that shrink geometrically under depth doubling (e.g. a 1/J
    # approach to the limit) sum to a finite bound; log or power growth does not
    rho = d2 / d1 if d1 > 0 else math.inf
    if rho <= CONVERGENT_RHO:
        limit = c3 + d2 * rho / (1 - rho)
        return Membership(MEMBER, _exp(c3), levels=levels, slope=slope,
                          note=f"ratio still rising; extrapolated bound {_exp(limit):.6g}")
    if d1 > math.log1p(STABLE_TOL) and rho >= DIVERGENT_RHO and rising:
        return Membership(NON_MEMBER, _exp(c3), levels=levels, slope=slope,
                          note="extremal ratio grows across refinements")
    return Membership(INCONCLUSIVE, _exp(c3), levels=levels, slope=slope)


def _check_dcheck_k(w: RadialWeight, K: float, grid: GridSpec) -> Membership:
    t = grid.t_nodes()
    lr = log_tail_t(w, t) - log_tail_t(w, t / K)
    if not np.all(np.isfinite(lr)):
        return Membership(INCONCLUSIVE, math.nan, K=K, note="tail not resolvable on the grid")
    lv = _level_extrema(lr, grid, np.min)
    levels = [(d, _exp(c)) for d, c in lv]
    e = [math.expm1(c) for _, c in lv]
    slope = (math.log(e[2]) - math.log(e[1])) / math.log(2) if min(e) > 0 else -math.inf
    if e[2] <= 0:
        return Membership(NON_MEMBER, _exp(lv[2][1]), K=K, levels=levels, slope=slope,
                          note="ratio reaches 1")
    if e[2] >= e[1] * (1 - STABLE_TOL):
        return Membership(MEMBER, _exp(lv[2][1]), K=K, levels=levels, slope=slope)
    d1, d2 = e[0] - e[1], e[1] - e[2]
    rho = d2 / d1 if d1 > 0 else math.inf
    if rho <= CONVERGENT_RHO and e[2] - d2 * rho / (1 - rho) > 0.5 * e[2]:
        return Membership(MEMBER, _exp(lv[2][1]), K=K, levels=levels, slope=slope,
                          note="minimum still falling; extrapolated limit stays above 1")
    if e[2] < e[1] * (1 - DRIFT_TOL) and e[1] < e[0] * (1 - DRIFT_TOL):
        return Membership(NON_MEMBER, _exp(lv[2][1]), K=K, levels=levels, slope=slope,
                          note="ratio drifts to 1 across refinements")
    return Membership(INCONCLUSIVE, _exp(lv[2][1]), K=K, levels=levels, slope=slope,
                      note="minimum approaches 1 without stabilizing")


def check_dcheck(w: RadialWeight, K: float | None = None, grid: GridSpec | None = None) -> Membership:
    """Lower doubling: inf of tail(r) / tail(1 - (1-r)/K) over the ladder.

    With K unset, K = 2, 4, 8 are tried and membership for any one suffices.
    """
    grid = grid or GridSpec.for_weight(w)
    if K is not None:
        if not K > 1:
            raise ValueError("K must exceed 1")
        return _check_dcheck_k(w, K, grid)
    results = [_check_dcheck_k(w, k, grid) for k in (2.0, 4.0, 8.0)]
    for m in results:
        if m.verdict == MEMBER:
            return m
    if all(m.verdict == NON_MEMBER for m in results):
        return results[-1]
    return next(m for m in results if m.verdict == INCONCLUSIVE)


def _combine(a: str, b: str) -> str:
    if a == MEMBER and b == MEMBER:
        return MEMBER
    if NON_MEMBER in (a, b):
        return NON_MEMBER
    return INCONCLUSIVE


def estimate_exponents(w: RadialWeight, grid: GridSpec | None = None) -> tuple[float, float, dict]:
    """Fit beta (tail decay) and eta (moment decay) over the finest decade.

    beta: slope of log tail against log(1-r); eta: minus the slope of log w_x
    against log x. The returned dict carries the multiplicative constants
    exp(max |residual|) of each fit.
    """
    grid = grid or GridSpec.for_weight(w)
    m = check_dhat(w, grid)
    if m.verdict == NON_MEMBER:
        raise WeightError("exponent estimates need a weight in the upper doubling class")
    t_min = float(grid.t_nodes()[-1])
    lt = np.linspace(math.log(t_min), math.log(10 * t_min), 21)
    ly = log_tail_t(w, np.exp(lt))
    beta, b0 = np.polyfit(lt, ly, 1)
    cb = float(np.exp(np.max(np.abs(ly - (beta * lt + b0)))))
    lx = np.linspace(math.log(0.1 / t_min), math.log(1 / t_min), 21)
    lm = log_moments(w, np.exp(lx))
    s, m0 = np.polyfit(lx, lm, 1)
    ce = float(np.exp(np.max(np.abs(lm - (s * lx + m0)))))
    return float(beta), float(-s), {"C_beta": cb, "C_eta": ce, "decade_t": [t_min, 10 * t_min]}


def verify_moment_tail(w: RadialWeight, xs) -> RatioSweep:
    """Ratios w_x / tail(1 - 1/x) for x >= 1."""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 1):
        raise ValueError("moment-tail comparison needs x >= 1")
    lm = log_moments(w, xs)
    lt = log_tail_t(w, 1 / xs)
    return RatioSweep(list(xs), list(np.exp(lm)), list(np.exp(lt)), label="moment/tail")


def classify(w: RadialWeight, grid: GridSpec | None = None) -> ClassReport:
    grid = grid or GridSpec.for_weight(w)
    dh = check_dhat(w, grid)
    dc = check_dcheck(w, grid=grid)
    notes = []
    beta = eta = None
    if dh.verdict != NON_MEMBER:
        try:
            beta, eta, _ = estimate_exponents(w, grid)
        except Exception as exc:  # quadrature trouble deep in the ladder
            notes.append(f"exponent fit failed: {exc}")
    if isinstance(w, Tabulated):
        notes.append("tabulated weight: membership is a trend verdict, not a certificate")
    return ClassReport(dh, dc, _combine(dh.verdict, dc.verdict), beta, eta, grid, notes)

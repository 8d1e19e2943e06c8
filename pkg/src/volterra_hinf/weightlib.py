"""Radial weights on the unit disc: pointwise values, tails and moments.

A weight is stored as an immutable description. Internally everything is
evaluated in the boundary distance ``t = 1 - r`` so that quantities near the
unit circle keep full relative precision, and in log form so that tails and
moments of order 1e300 or 1e-300 never under- or overflow.

    tail(w, r)    = int_r^1 w(s) ds
    moment(w, x)  = int_0^1 s^x w(s) ds
"""

from __future__ import annotations

import csv
import json
import math
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import special

from ._numerics import (
    DEFAULT_QUAD,
    QuadratureError,
    QuadSettings,
    gk_integrate,
    integrate_log_geometric,
    logsumexp,
)

__all__ = [
    "RadialWeight", "Standard", "Exponential", "LogPower", "Oscillating", "Tabulated",
    "Derived", "TailQuotientShift", "PowerShift", "DualW", "TailProduct", "HConvolve",
    "MomentTable", "WeightError", "InterpolationRangeError", "QuadratureError",
    "eval_weight", "tail", "moment", "log_tail", "log_moment", "moments", "log_moments",
    "parse_weight", "const", "mass", "registry",
]


class WeightError(ValueError):
    """Invalid weight parameters."""


class InterpolationRangeError(WeightError):
    """Tabulated weight queried outside its node hull."""


class MomentTable:
    """Per-weight cache of log moments and log tails with error estimates.

    Readers never lock; insertion goes through a lock so concurrent writers
    cannot interleave.
    """

    def __init__(self) -> None:
        self.moments: dict[float, tuple[float, float]] = {}
        self.tails: dict[float, tuple[float, float]] = {}
        self._lock = threading.Lock()

    def put_moment(self, x: float, log_val: float, rel_err: float) -> None:
        with self._lock:
            self.moments[x] = (log_val, rel_err)

    def put_tail(self, t: float, log_val: float, rel_err: float) -> None:
        with self._lock:
            self.tails[t] = (log_val, rel_err)

    def __len__(self) -> int:
        return len(self.moments) + len(self.tails)

    def to_json(self) -> str:
        """Sorted, repr-exact serialization (keys are the float arguments)."""
        def dump(d):
            return {repr(k): [repr(v[0]), repr(v[1])] for k, v in sorted(d.items())}
        return json.dumps({"moments": dump(self.moments), "tails": dump(self.tails)}, sort_keys=True)

    def load_json(self, text: str) -> None:
        data = json.loads(text)
        with self._lock:
            for name, target in (("moments", self.moments), ("tails", self.tails)):
                for k, (v, e) in data.get(name, {}).items():
                    target.setdefault(float(k), (float(v), float(e)))


def _log_beta(x, b):
    """log B(x, b) for x > 0 large and moderate b > 0.

    The Pochhammer ratio keeps full precision for x up to ~1e8, where the
    gammaln difference inside betaln loses about ten digits; betaln takes over
    once the ratio overflows.
    """
    x = np.asarray(x, dtype=float)
    with _ignore():
        v = special.gammaln(b) - np.log(special.poch(x, b))
    return np.where(np.isfinite(v) & (x > 50), v, special.betaln(x, b))


def _ignore(*_):
    return np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore")


@dataclass(frozen=True)
class RadialWeight:
    """Base class. Subclasses implement ``log_w_t`` and optionally closed forms."""

    table: MomentTable = field(default_factory=MomentTable, compare=False, hash=False,
                               repr=False, init=False)
    quad: QuadSettings = field(default=DEFAULT_QUAD, compare=False, hash=False, repr=False,
                               kw_only=True)

    # -- pointwise ---------------------------------------------------------
    def log_w_t(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def w_t(self, t: np.ndarray) -> np.ndarray:
        with _ignore():
            return np.exp(self.log_w_t(np.asarray(t, dtype=float)))

    def log_w_lam(self, lam: np.ndarray) -> np.ndarray:
        """log w at t = e^{-lam}; kinds with an exact log form override this so
        that distances below the double-precision range stay reachable."""
        with _ignore():
            return self.log_w_t(np.exp(-np.asarray(lam, dtype=float)))

    def log_tw_lam(self, lam: np.ndarray) -> np.ndarray:
        """log(t w(t)) at t = e^{-lam}: the integrand of a tail in the log coordinate.

        Kept separate so kinds can cancel the -lam analytically instead of
        subtracting two numbers of size lam."""
        lam = np.asarray(lam, dtype=float)
        return self.log_w_lam(lam) - lam

    # -- closed forms (None when unavailable) -------------------------------
    def closed_log_tail_t(self, t: np.ndarray):
        return None

    def closed_log_moment(self, x: np.ndarray):
        return None

    def closed_log_tail_lam(self, lam: np.ndarray):
        """Closed log tail at t = e^{-lam}; kinds override it to stay exact past lam ~ 745."""
        with _ignore():
            return self.closed_log_tail_t(np.exp(-np.asarray(lam, dtype=float)))

    @property
    def closed_tail(self) -> bool:
        return self.closed_log_tail_t(np.array([0.5])) is not None

    @property
    def closed_moment(self) -> bool:
        return self.closed_log_moment(np.array([1.0])) is not None

    def breakpoints_t(self) -> Sequence[float]:
        """Kinks of the weight in t (used as quadrature breakpoints)."""
        return ()

    def spec(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.spec()


# ---------------------------------------------------------------------------
# concrete kinds


@dataclass(frozen=True)
class Standard(RadialWeight):
    """(1-r)^alpha, or (alpha+1)(1-r^2)^alpha when normalized."""

    alpha: float = 0.0
    normalized: bool = False

    def __post_init__(self):
        if not self.alpha > -1:
            raise WeightError(f"standard weight needs alpha > -1, got {self.alpha}")

    def log_w_t(self, t):
        t = np.asarray(t, dtype=float)
        with _ignore():
            if self.normalized:
                return math.log(self.alpha + 1) + self.alpha * np.log(t * (2 - t))
            if self.alpha == 0:
                return np.zeros_like(t)
            return self.alpha * np.log(t)

    def log_w_lam(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.normalized:
            with _ignore():
                return math.log(self.alpha + 1) + self.alpha * (-lam + np.log1p(-0.5 * np.exp(-lam)) + math.log(2))
        return -self.alpha * lam

    def log_tw_lam(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.normalized:
            return super().log_tw_lam(lam)
        return -(self.alpha + 1) * lam

    def closed_log_tail_t(self, t):
        t = np.asarray(t, dtype=float)
        a = self.alpha + 1
        with _ignore():
            if not self.normalized:
                return a * np.log(t) - math.log(a)
            # int_{r^2}^1 (a)(1-u)^alpha u^{-1/2} du / 2 = a/2 * B(a, 1/2) * I_{1-r^2}(a, 1/2)
            x = t * (2 - t)
            lead = math.log(a / 2) + special.betaln(a, 0.5)
            small = x < 1e-8
            li = np.where(small, 0.0, np.log(np.where(small, 0.5, special.betainc(a, 0.5, x))))
            # series I_x(a,b) = x^a/(a B(a,b)) (1 + a(1-b)x/(a+1) + ...) for tiny x
            ser = a * np.log(x) - math.log(a) - special.betaln(a, 0.5) + np.log1p(a * 0.5 * x / (a + 1))
            return lead + np.where(small, ser, li)

    def closed_log_tail_lam(self, lam):
        if self.normalized:
            return super().closed_log_tail_lam(lam)
        a = self.alpha + 1
        return -a * np.asarray(lam, dtype=float) - math.log(a)

    def closed_log_moment(self, x):
        x = np.asarray(x, dtype=float)
        a = self.alpha + 1
        if self.normalized:
            return math.log(a / 2) + _log_beta((x + 1) / 2, a)
        if self.alpha == 0:
            return -np.log1p(x)
        return _log_beta(x + 1, a)

    def spec(self):
        return f"std:alpha={_fmt(self.alpha)}" + (",norm" if self.normalized else "")


def const() -> Standard:
    return Standard(0.0)


@dataclass(frozen=True)
class Exponential(RadialWeight):
    """exp(-c / (1-r)^gamma); rapidly decreasing, outside the doubling classes."""

    c: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and self.gamma > 0):
            raise WeightError("exponential weight needs c > 0 and gamma > 0")

    def log_w_t(self, t):
        t = np.asarray(t, dtype=float)
        with _ignore():
            return -self.c * t ** (-self.gamma)

    def log_w_lam(self, lam):
        with _ignore():
            return -self.c * np.exp(self.gamma * np.asarray(lam, dtype=float))

    def spec(self):
        return f"exp:c={_fmt(self.c)},gamma={_fmt(self.gamma)}"


@dataclass(frozen=True)
class LogPower(RadialWeight):
    """(1-r)^a * log(e/(1-r))^b.

    a > -1 is integrable for every b; a = -1 needs b < -1 and then the tail is
    log(e/(1-r))^(b+1) / (-b-1) in closed form.
    """

    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.a < -1 or (self.a == -1 and not self.b < -1):
            raise WeightError("logpow weight needs a > -1, or a = -1 with b < -1")

    def log_w_t(self, t):
        t = np.asarray(t, dtype=float)
        with _ignore():
            lt = np.log(t)
            return self.a * lt + self.b * np.log1p(-lt)

    def log_w_lam(self, lam):
        lam = np.asarray(lam, dtype=float)
        with _ignore():
            return -self.a * lam + self.b * np.log1p(lam)

    def log_tw_lam(self, lam):
        lam = np.asarray(lam, dtype=float)
        with _ignore():
            return -(self.a + 1) * lam + self.b * np.log1p(lam)

    def closed_log_tail_t(self, t):
        t = np.asarray(t, dtype=float)
        a1, b = self.a + 1, self.b
        with _ignore():
            L = 1 - np.log(t)
            if self.a == -1:
                return (b + 1) * np.log(L) - math.log(-b - 1)
            if b <= -1:
                return None
            # u = log(e/s): tail = e^{a+1} (a+1)^{-b-1} Gamma(b+1, (a+1) L)
            X = a1 * L
            q = special.gammaincc(b + 1, X)
            direct = np.log(q) + special.gammaln(b + 1)
            asym = b * np.log(X) - X + np.log1p(b / X + b * (b - 1) / X ** 2)
            lg = np.where((q > 1e-280) & (X < 600), direct, asym)
            return a1 - (b + 1) * math.log(a1) + lg

    def closed_log_tail_lam(self, lam):
        if self.a == -1:
            b = self.b
            with _ignore():
                return (b + 1) * np.log1p(np.asarray(lam, dtype=float)) - math.log(-b - 1)
        return super().closed_log_tail_lam(lam)

    def spec(self):
        return f"logpow:a={_fmt(self.a)},b={_fmt(self.b)}"


@dataclass(frozen=True)
class Oscillating(RadialWeight):
    """base(r) * (1 + amp * sin(2 pi log2(1/(1-r)) / period)), amp in [0, 1]."""

    base: RadialWeight = field(default_factory=const)
    amp: float = 0.5
    period: float = 1.0

    def __post_init__(self):
        if not 0 <= self.amp <= 1:
            raise WeightError("oscillation amplitude must lie in [0, 1] to keep the weight nonnegative")
        if not self.period > 0:
            raise WeightError("oscillation period must be positive")
        # the tail is nonincreasing, so positivity on a 2^14-point grid reduces to the last node
        if not np.isfinite(log_tail(self, 1 - 2.0 ** -14)):
            raise WeightError("oscillating weight has a vanishing tail")

    def log_w_t(self, t):
        t = np.asarray(t, dtype=float)
        with _ignore():
            osc = 1 + self.amp * np.sin(2 * np.pi * (-np.log2(t)) / self.period)
            return self.base.log_w_t(t) + np.log(osc)

    def spec(self):
        return f"osc:base={self.base.spec()},amp={_fmt(self.amp)},period={_fmt(self.period)}"


@dataclass(frozen=True)
class Tabulated(RadialWeight):
    """Node/value table, interpolated log-linearly in (1-r).

    Pointwise queries outside [nodes[0], nodes[-1]] raise. Tails and moments
    need the weight up to r = 1, so beyond the last node the final segment's
    power law is continued (it must be integrable).
    """

    nodes: tuple = ()
    values: tuple = ()
    source: str = ""

    def __post_init__(self):
        n = np.asarray(self.nodes, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if n.size < 2 or n.size != v.size:
            raise WeightError("table needs at least two (r, value) rows")
        if np.any(np.diff(n) <= 0) or n[0] < 0 or n[-1] >= 1:
            raise WeightError("table nodes must increase strictly inside [0, 1)")
        if np.any(v < 0):
            raise WeightError("table values must be nonnegative")
        if self._tail_exponent() <= -1:
            raise WeightError("the last table segment does not extend to an integrable power law")

    def _logs(self):
        n = np.asarray(self.nodes, dtype=float)
        v = np.asarray(self.values, dtype=float)
        with _ignore():
            return np.log1p(-n), np.log(v)

    def _tail_exponent(self) -> float:
        lt, lv = self._logs()
        if not np.isfinite(lv[-1]) or not np.isfinite(lv[-2]):
            return 0.0
        return float((lv[-1] - lv[-2]) / (lt[-1] - lt[-2]))

    def _interp(self, t, extrapolate: bool):
        t = np.asarray(t, dtype=float)
        lt_nodes, lv = self._logs()
        # np.interp wants increasing abscissae: log t decreases along the nodes
        xs, ys = lt_nodes[::-1], lv[::-1]
        with _ignore():
            lt = np.log(t)
        inside = (lt >= xs[0] - 1e-15) & (lt <= xs[-1] + 1e-15)
        if not extrapolate and not np.all(inside):
            raise InterpolationRangeError("r outside the tabulated node hull")
        out = np.interp(lt, xs, ys)
        s = self._tail_exponent()
        beyond = lt < xs[0]
        out = np.where(beyond, ys[0] + s * (lt - xs[0]), out)
        out = np.where(lt > xs[-1], ys[-1], out)
        return out

    def log_w_t(self, t):
        return self._interp(t, extrapolate=True)

    def checked_log_w_t(self, t):
        return self._interp(t, extrapolate=False)

    def breakpoints_t(self):
        return tuple(1 - np.asarray(self.nodes, dtype=float))

    def spec(self):
        return f"table:{self.source}" if self.source else f"table:<{len(self.nodes)} nodes>"

    @classmethod
    def from_csv(cls, path: str | Path) -> "Tabulated":
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError:
                    if rows:
                        raise WeightError(f"bad table row {row!r}")
                    continue  # header
        nodes, values = zip(*rows) if rows else ((), ())
        return cls(nodes=tuple(nodes), values=tuple(values), source=str(path))


# ---------------------------------------------------------------------------
# derived weights


@dataclass(frozen=True)
class TailQuotientShift:
    """tail(r) * (1-r)^(beta-1); beta = 0 is the tail quotient, beta = p gives the [p] shift."""

    beta: float

    def spec(self):
        return f"tailshift:beta={_fmt(self.beta)}"


@dataclass(frozen=True)
class PowerShift:
    """w(r) * (1-r)^beta."""

    beta: float

    def spec(self):
        return f"powershift:beta={_fmt(self.beta)}"


@dataclass(frozen=True)
class DualW:
    """The weight W_{p,w} whose tail is tail^(1/p) (1-r)^(1/p-1), 0 < p < 1."""

    p: float

    def spec(self):
        return f"dualw:p={_fmt(self.p)}"


@dataclass(frozen=True)
class TailProduct:
    """w(r) * tail(r)."""

    def spec(self):
        return "tailproduct:"


@dataclass(frozen=True)
class HConvolve:
    """h(r) = int_r^1 (t-r)^(p-1) w(t) dt."""

    p: float

    def spec(self):
        return f"hconv:p={_fmt(self.p)}"


DerivedKind = TailQuotientShift | PowerShift | DualW | TailProduct | HConvolve


@dataclass(frozen=True)
class Derived(RadialWeight):
    base: RadialWeight = field(default_factory=const)
    kind: DerivedKind = field(default_factory=TailProduct)

    def __post_init__(self):
        k = self.kind
        if isinstance(k, DualW) and not 0 < k.p < 1:
            raise WeightError("DualW needs 0 < p < 1")
        if isinstance(k, HConvolve) and not k.p > 0:
            raise WeightError("HConvolve needs p > 0")
        if isinstance(k, PowerShift) and isinstance(self.base, Standard) and not self.base.normalized:
            if self.base.alpha + k.beta <= -1:
                raise WeightError("power shift makes the weight non-integrable")

    def log_w_t(self, t):
        t = np.asarray(t, dtype=float)
        k, b = self.kind, self.base
        with _ignore():
            lt = np.log(t)
            if isinstance(k, TailQuotientShift):
                return log_tail_t(b, t) + (k.beta - 1) * lt
            if isinstance(k, PowerShift):
                return b.log_w_t(t) + k.beta * lt
            if isinstance(k, TailProduct):
                return b.log_w_t(t) + log_tail_t(b, t)
            if isinstance(k, DualW):
                p = k.p
                lT = log_tail_t(b, t)
                a1 = math.log(1 / p - 1) + lT / p + (1 / p - 2) * lt
                a2 = b.log_w_t(t) - math.log(p) + (1 / p - 1) * lT + (1 / p - 1) * lt
                return np.logaddexp(a1, a2)
            if isinstance(k, HConvolve):
                return np.array([_log_hconv(b, k.p, float(tt)) for tt in np.atleast_1d(t)]).reshape(t.shape)
        raise WeightError(f"unknown derived kind {k!r}")

    def log_w_lam(self, lam):
        if isinstance(self.kind, HConvolve) or not self.base.closed_tail:
            return super().log_w_lam(lam)
        return self.log_tw_lam(lam) + np.asarray(lam, dtype=float)

    def log_tw_lam(self, lam):
        """Built from the base's log(t w) so that no term of size lam cancels."""
        if isinstance(self.kind, HConvolve) or not self.base.closed_tail:
            return super().log_tw_lam(lam)
        lam = np.asarray(lam, dtype=float)
        with _ignore():
            return self.log_tw_from_tail(lam, self.base.closed_log_tail_lam(lam))

    def log_tw_from_tail(self, lam, base_log_tail):
        """log(t w) in lam given the base's log tail at the same points (not for HConvolve)."""
        k, b = self.kind, self.base
        lam = np.asarray(lam, dtype=float)
        lT = np.asarray(base_log_tail, dtype=float)
        with _ignore():
            if isinstance(k, TailQuotientShift):
                return lT - k.beta * lam
            if isinstance(k, PowerShift):
                return b.log_tw_lam(lam) - k.beta * lam
            if isinstance(k, TailProduct):
                return b.log_tw_lam(lam) + lT
            if isinstance(k, DualW):
                p = k.p
                a1 = math.log(1 / p - 1) + lT / p
                a2 = b.log_tw_lam(lam) - math.log(p) + (1 / p - 1) * lT
                return np.logaddexp(a1, a2) - (1 / p - 1) * lam
        raise WeightError(f"no tail form for derived kind {k!r}")

    def closed_log_tail_lam(self, lam):
        k, b = self.kind, self.base
        lam = np.asarray(lam, dtype=float)
        if isinstance(k, DualW) and b.closed_tail:
            return b.closed_log_tail_lam(lam) / k.p - (1 / k.p - 1) * lam
        if isinstance(k, TailProduct) and b.closed_tail:
            return 2 * b.closed_log_tail_lam(lam) - math.log(2)
        return super().closed_log_tail_lam(lam)

    def closed_log_tail_t(self, t):
        k, b = self.kind, self.base
        if isinstance(k, DualW) and b.closed_tail:
            t = np.asarray(t, dtype=float)
            with _ignore():
                return log_tail_t(b, t) / k.p + (1 / k.p - 1) * np.log(t)
        if isinstance(k, TailProduct) and b.closed_tail:
            t = np.asarray(t, dtype=float)
            return 2 * log_tail_t(b, t) - math.log(2)
        if isinstance(k, PowerShift) and isinstance(b, Standard) and not b.normalized:
            return Standard(b.alpha + k.beta).closed_log_tail_t(t)
        return None

    def closed_log_moment(self, x):
        k, b = self.kind, self.base
        if isinstance(k, PowerShift) and isinstance(b, Standard) and not b.normalized:
            return Standard(b.alpha + k.beta).closed_log_moment(x)
        return None

    def breakpoints_t(self):
        return self.base.breakpoints_t()

    def spec(self):
        return f"derived:{self.kind.spec()}:base={self.base.spec()}"


def _log_hconv(base: RadialWeight, p: float, t: float) -> float:
    """log of int_0^t (t-u)^(p-1) w_t(u) du, split at t/2 so each half has one endpoint singularity."""
    if t <= 0:
        return -math.inf
    lh = math.log(0.5 * t)

    def near_zero(y):  # u = (t/2) e^{-y}
        with _ignore():
            return (p - 1) * np.log(t - 0.5 * t * np.exp(-y)) + base.log_tw_lam(y - lh)

    def near_t(y):  # t - u = (t/2) e^{-y}
        with _ignore():
            return (p - 1) * (lh - y) + base.log_w_t(t - 0.5 * t * np.exp(-y)) + lh - y

    la, _ = integrate_log_geometric(near_zero)
    lb, _ = integrate_log_geometric(near_t)
    return float(np.logaddexp(la, lb))


# ---------------------------------------------------------------------------
# public evaluation API


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r >= 1)):
        raise WeightError("radius must lie in [0, 1)")
    return r


def eval_weight(w: RadialWeight, r):
    """Value of w at r in [0, 1)."""
    r = _check_r(r)
    t = 1 - r
    with _ignore():
        if isinstance(w, Tabulated):
            out = np.exp(w.checked_log_w_t(t))
        else:
            out = w.w_t(t)
    return float(out) if out.ndim == 0 else out


def log_tail_t(w: RadialWeight, t, method: str = "auto"):
    """log tail as a function of the boundary distance t = 1 - r (vectorized)."""
    t = np.asarray(t, dtype=float)
    if method == "auto":
        closed = w.closed_log_tail_t(t)
        if closed is not None:
            return closed
    elif method != "quad":
        raise ValueError(f"unknown tail method {method!r}")
    flat = np.atleast_1d(t).ravel()
    out = np.empty(flat.shape)
    for i, tt in enumerate(flat):
        key = float(tt)
        hit = w.table.tails.get(key) if method == "auto" else None
        if hit is None:
            hit = _quad_log_tail(w, key)
            if method == "auto":
                w.table.put_tail(key, *hit)
        out[i] = hit[0]
    return out.reshape(t.shape) if t.ndim else float(out[0])


def _quad_log_tail(w: RadialWeight, t: float) -> tuple[float, float]:
    if t <= 0:
        return -math.inf, 0.0
    bps = [b for b in w.breakpoints_t() if 0 < b < t]
    anchor = min(bps) if bps else t
    la0 = -math.log(anchor)
    with _ignore():
        lv, rel = integrate_log_geometric(lambda y: w.log_tw_lam(la0 + y), epsrel=w.quad.work_rel)
    if bps:
        # table kinks between the anchor and t: plain adaptive pass, rescaled by lv
        grid = sorted(set(bps + [t]))
        with _ignore():
            f = lambda u: np.exp(w.log_w_t(u) - lv)  # noqa: E731
            v, e = gk_integrate(f, anchor, t, breakpoints=grid, epsrel=w.quad.work_rel)
        lv, rel = lv + math.log1p(v), (rel + e) / (1 + v)
    _check_tol(lv, rel, w.quad, "tail")
    return lv, rel


def _check_tol(log_val: float, rel: float, q: QuadSettings, what: str) -> None:
    val = math.exp(log_val) if log_val < 700 else math.inf
    if rel * val > max(q.epsabs, q.epsrel * val) and rel > q.epsrel:
        raise QuadratureError(f"{what} quadrature did not converge", rel * val)


def log_tail(w: RadialWeight, r, method: str = "auto"):
    r = _check_r(r)
    return log_tail_t(w, 1 - r, method=method)


def tail(w: RadialWeight, r, method: str = "auto"):
    """int_r^1 w; closed form when the kind has one, adaptive quadrature otherwise."""
    with _ignore():
        out = np.exp(log_tail(w, r, method=method))
    return float(out) if np.ndim(out) == 0 else out


def mass(w: RadialWeight) -> float:
    return float(np.exp(log_tail_t(w, 1.0)))


def log_moments(w: RadialWeight, xs, method: str = "auto") -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0):
        raise WeightError("moment order must be nonnegative")
    if method == "auto":
        closed = w.closed_log_moment(xs)
        if closed is not None:
            return np.asarray(closed, dtype=float)
    flat = np.atleast_1d(xs).ravel()
    out = np.empty(flat.shape)
    for i, x in enumerate(flat):
        key = float(x)
        hit = w.table.moments.get(key) if method == "auto" else None
        if hit is None:
            hit = _quad_log_moment(w, key)
            if method == "auto":
                w.table.put_moment(key, *hit)
        out[i] = hit[0]
    return out.reshape(xs.shape)


def _quad_log_moment(w: RadialWeight, x: float) -> tuple[float, float]:
    """log of int_0^1 (1-t)^x w_t(t) dt.

    [0, 1/2] in t uses the logarithmic boundary coordinate t = e^{-lam},
    which for large x also resolves the concentration at t ~ 1/x (the role
    of the rescaling r = 1 - u/x); [1/2, 1] is a plain adaptive pass.
    """
    def lf(t):
        with _ignore():
            return x * np.log1p(-t) + w.log_w_t(t) if x > 0 else w.log_w_t(t)

    bps = [b for b in w.breakpoints_t() if 0 < b < 1]
    anchor = min([0.5] + bps)
    la0 = -math.log(anchor)

    def lg(y):
        lam = la0 + y
        with _ignore():
            body = x * np.log1p(-np.exp(-lam)) if x > 0 else 0.0
            return body + w.log_tw_lam(lam)

    la, rel_a = integrate_log_geometric(lg, epsrel=w.quad.work_rel)
    probe = np.linspace(anchor, 1.0, 257)[:-1]
    lp = lf(probe)
    fin = np.isfinite(lp)
    lb, rel_b = -math.inf, 0.0
    if fin.any():
        shift = float(lp[fin].max())

        def f(t):
            v = lf(t) - shift
            return np.exp(np.where(np.isfinite(v), v, -np.inf))

        vb, eb = gk_integrate(f, anchor, 1.0, breakpoints=[b for b in bps if anchor < b < 1],
                              epsrel=w.quad.work_rel)
        if vb > 0:
            lb, rel_b = shift + math.log(vb), eb / vb
    lv = float(np.logaddexp(la, lb))
    rel = max(rel_a, rel_b)
    _check_tol(lv, rel, w.quad, "moment")
    return lv, rel


def log_moment(w: RadialWeight, x: float, method: str = "auto") -> float:
    return float(log_moments(w, np.asarray(float(x)), method=method))


def moment(w: RadialWeight, x: float, method: str = "auto") -> float:
    """w_x = int_0^1 r^x w(r) dr."""
    return math.exp(log_moment(w, x, method=method))


def moments(w: RadialWeight, xs, method: str = "auto") -> np.ndarray:
    with _ignore():
        return np.exp(log_moments(w, xs, method=method))


# ---------------------------------------------------------------------------
# weight DSL

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def _fmt(v: float) -> str:
    return repr(float(v)).rstrip("0").rstrip(".") if "e" not in repr(float(v)) else repr(float(v))


def _num(v: str, where: str, key: str, resolve: Callable[[str], float] | None) -> float:
    try:
        return float(v)
    except ValueError:
        if resolve is None:
            raise WeightError(f"{where}: {key} is not a number: {v!r}") from None
        return float(resolve(v.strip()))


def _kv(body: str, keys: Sequence[str], where: str,
        resolve: Callable[[str], float] | None = None) -> dict[str, float]:
    out: dict[str, float] = {}
    for part in filter(None, body.split(",")):
        if "=" not in part:
            raise WeightError(f"{where}: expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        k = k.strip()
        if k not in keys:
            raise WeightError(f"{where}: unknown key {k!r}")
        out[k] = _num(v, where, k, resolve)
    missing = [k for k in keys if k not in out]
    if missing:
        raise WeightError(f"{where}: missing {', '.join(missing)}")
    return out


def parse_weight(spec: str, resolve: Callable[[str], float] | None = None) -> RadialWeight:
    """Parse a weight spec string.

    std:alpha=1[,norm] | const | exp:c=1,gamma=1 | logpow:a=0,b=1 |
    osc:base=<spec>,amp=0.5,period=1 | table:path.csv |
    derived:<kind>:<params>:base=<spec>

    A value that is not a number is handed to ``resolve`` when given (the
    CLI uses this for parameter expressions such as ``alpha=2p-2``).
    """
    rv = resolve
    s = spec.strip()
    head, _, body = s.partition(":")
    head = head.lower()
    if head == "const":
        return const()
    if head == "std":
        parts = body.split(",")
        norm = any(p.strip() == "norm" for p in parts)
        kv = _kv(",".join(p for p in parts if p.strip() != "norm"), ["alpha"], "std", rv)
        return Standard(kv["alpha"], normalized=norm)
    if head == "exp":
        kv = _kv(body, ["c", "gamma"], "exp", rv)
        return Exponential(kv["c"], kv["gamma"])
    if head == "logpow":
        kv = _kv(body, ["a", "b"], "logpow", rv)
        return LogPower(kv["a"], kv["b"])
    if head == "osc":
        m = re.fullmatch(r"base=(.+),amp=([^,]+),period=([^,]+)", body)
        if not m:
            raise WeightError(f"osc: expected base=<spec>,amp=<a>,period=<T> in {spec!r}")
        amp, period = (_num(v, "osc", k, rv) for k, v in zip(("amp", "period"), m.group(2, 3)))
        return Oscillating(parse_weight(m.group(1), rv), amp, period)
    if head == "table":
        if not body:
            raise WeightError("table: missing path")
        return Tabulated.from_csv(body)
    if head == "derived":
        m = re.fullmatch(r"([a-z]+):([^:]*):base=(.+)", body)
        if not m:
            raise WeightError(f"derived: expected <kind>:<params>:base=<spec> in {spec!r}")
        kind, params, base = m.group(1), m.group(2), parse_weight(m.group(3), rv)
        if kind == "tailshift":
            return Derived(base, TailQuotientShift(_kv(params, ["beta"], kind, rv)["beta"]))
        if kind == "powershift":
            return Derived(base, PowerShift(_kv(params, ["beta"], kind, rv)["beta"]))
        if kind == "dualw":
            return Derived(base, DualW(_kv(params, ["p"], kind, rv)["p"]))
        if kind == "tailproduct":
            return Derived(base, TailProduct())
        if kind == "hconv":
            return Derived(base, HConvolve(_kv(params, ["p"], kind, rv)["p"]))
        raise WeightError(f"derived: unknown kind {kind!r}")
    raise WeightError(f"unknown weight kind {head!r} in {spec!r}")


def registry() -> dict[str, RadialWeight]:
    """Named upper-doubling weights used as the default test matrix.

    They cover power laws (both normalizations), pure logarithmic tails,
    a log-corrected power, an oscillating perturbation and a dual weight.
    """
    return {
        "const": const(),
        "std1": Standard(1.0),
        "std-0.5": Standard(-0.5),
        "std3n": Standard(3.0, normalized=True),
        "loglog": LogPower(-1.0, -2.0),
        "logpow": LogPower(0.0, 1.0),
        "osc": Oscillating(const(), 0.5, 1.0),
        "dualw": Derived(const(), DualW(0.75)),
    }

"""Norms and pairings of the function spaces, evaluated exactly on polynomials.

Conventions: dA is normalized area measure (dx dy / pi), so for a radial
weight

    ||f||_{A^p_w}^p = int_0^1 M_p(r, f)^p 2 r w(r) dr,
    ||f||_{D^p_w}^p = ||f'||_{A^p_w}^p + |f(0)|^p,
    ||f||_{HL^w_p}^p = sum |f^(n)|^p (n+1)^(p-2) w_{np+1}.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from ._numerics import gk_integrate
from .weightlib import Derived, RadialWeight, TailQuotientShift, log_moments, log_tail_t

__all__ = [
    "CoefficientSeries", "NormValue", "norm_hp", "norm_apw", "norm_dpw", "norm_hlpw",
    "norm_zygmund", "norm_bloch", "norm_bmoa", "bmoa_seminorm", "norm_bmoa_inf",
    "norm_bmoa_prime_inf", "pairing", "growth_means", "pommerenke_sides", "random_polynomials",
    "circle_values", "node_count", "radial_integral", "structured_corpus", "ChainConstants",
    "chain_constants", "chain_corpus",
]

MAX_NODES = 2 ** 18
HP_RTOL = 1e-13


class CoefficientSeries:
    """Finite Maclaurin coefficient sequence c_0, c_1, ..., c_d (complex)."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable[complex] | np.ndarray):
        c = np.array(coeffs, dtype=complex).ravel()
        self.c = c if c.size else np.zeros(1, dtype=complex)

    # construction helpers
    @classmethod
    def monomial(cls, n: int, coef: complex = 1.0) -> "CoefficientSeries":
        c = np.zeros(n + 1, dtype=complex)
        c[n] = coef
        return cls(c)

    @classmethod
    def zero(cls) -> "CoefficientSeries":
        return cls([0.0])

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.c)[0]
        return int(nz[-1]) if nz.size else 0

    def trimmed(self) -> "CoefficientSeries":
        return CoefficientSeries(self.c[: self.degree + 1])

    def __len__(self) -> int:
        return self.c.size

    def __getitem__(self, n: int) -> complex:
        return self.c[n] if 0 <= n < self.c.size else 0j

    def _pad(self, other: "CoefficientSeries"):
        m = max(self.c.size, other.c.size)
        a = np.zeros(m, dtype=complex)
        b = np.zeros(m, dtype=complex)
        a[: self.c.size] = self.c
        b[: other.c.size] = other.c
        return a, b

    def __add__(self, other: "CoefficientSeries") -> "CoefficientSeries":
        a, b = self._pad(other)
        return CoefficientSeries(a + b)

    def __sub__(self, other: "CoefficientSeries") -> "CoefficientSeries":
        a, b = self._pad(other)
        return CoefficientSeries(a - b)

    def __neg__(self) -> "CoefficientSeries":
        return CoefficientSeries(-self.c)

    def __mul__(self, s: complex) -> "CoefficientSeries":
        if isinstance(s, CoefficientSeries):
            return CoefficientSeries(np.convolve(self.c, s.c))
        return CoefficientSeries(self.c * s)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoefficientSeries):
            return NotImplemented
        a, b = self._pad(other)
        return bool(np.array_equal(a, b))

    def __repr__(self) -> str:
        return f"CoefficientSeries({self.c[: self.degree + 1].tolist()})"

    def scale(self, s: complex) -> "CoefficientSeries":
        return self * s

    def derivative(self) -> "CoefficientSeries":
        if self.c.size == 1:
            return CoefficientSeries.zero()
        return CoefficientSeries(self.c[1:] * np.arange(1, self.c.size))

    def primitive(self) -> "CoefficientSeries":
        """Antiderivative vanishing at 0."""
        return CoefficientSeries(np.concatenate([[0], self.c / np.arange(1, self.c.size + 1)]))

    def hadamard(self, other: "CoefficientSeries") -> "CoefficientSeries":
        m = min(self.c.size, other.c.size)
        return CoefficientSeries(self.c[:m] * other.c[:m])

    def dilate(self, r: float) -> "CoefficientSeries":
        """f_r(z) = f(rz)."""
        return CoefficientSeries(self.c * r ** np.arange(self.c.size))

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.c)

    @property
    def nonnegative(self) -> bool:
        return bool(np.all(self.c.imag == 0) and np.all(self.c.real >= 0))

    # I/O
    def to_json(self) -> str:
        items = [float(v.real) if v.imag == 0 else [float(v.real), float(v.imag)]
                 for v in self.c[: self.degree + 1]]
        return json.dumps(items)

    @classmethod
    def from_json(cls, text: str) -> "CoefficientSeries":
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("polynomial JSON must be an array")
        out = []
        for item in data:
            if isinstance(item, (int, float)):
                out.append(complex(item))
            elif isinstance(item, list) and len(item) == 2:
                out.append(complex(item[0], item[1]))
            else:
                raise ValueError(f"bad coefficient entry {item!r}")
        return cls(out)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "re", "im"])
        for n, v in enumerate(self.c[: self.degree + 1]):
            w.writerow([n, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CoefficientSeries":
        entries: dict[int, complex] = {}
        for row in csv.reader(io.StringIO(text)):
            if not row or row[0].strip() in ("", "index"):
                continue
            n = int(row[0])
            im = float(row[2]) if len(row) > 2 and row[2].strip() else 0.0
            entries[n] = complex(float(row[1]), im)
        if not entries:
            return cls.zero()
        c = np.zeros(max(entries) + 1, dtype=complex)
        for n, v in entries.items():
            c[n] = v
        return cls(c)

    @classmethod
    def load(cls, path: str | Path) -> "CoefficientSeries":
        text = Path(path).read_text()
        return cls.from_json(text) if text.lstrip().startswith("[") else cls.from_csv(text)


@dataclass
class NormValue:
    kind: str
    value: float
    error: float = 0.0
    params: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def __float__(self) -> float:
        return self.value

    def to_dict(self):
        return {"kind": self.kind, "value": self.value, "error": self.error,
                "params": dict(self.params), "warnings": list(self.warnings)}


def node_count(degree: int, factor: int = 8) -> int:
    """Next power of two >= factor * (degree + 1)."""
    n = factor * (degree + 1)
    return 1 << (n - 1).bit_length()


def circle_values(f: CoefficientSeries, r, n_nodes: int | None = None) -> np.ndarray:
    """f(r e^{i theta_j}) on theta_j = 2 pi j / N; r may be an array (rows)."""
    c = f.c[: f.degree + 1]
    N = n_nodes or node_count(f.degree)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    powers = r[:, None] ** np.arange(c.size)[None, :]
    buf = np.zeros((r.size, N), dtype=complex)
    m = min(c.size, N)
    buf[:, :m] = powers[:, :m] * c[None, :m]
    if c.size > N:  # alias the excess coefficients (only for undersized N)
        for k in range(N, c.size):
            buf[:, k % N] += powers[:, k] * c[k]
    return np.fft.ifft(buf, axis=1) * N


def _means_p(f: CoefficientSeries, r, p: float, n_nodes: int | None = None) -> np.ndarray:
    """M_p(r, f)^p for an array of radii (Parseval for p = 2)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    c = f.c[: f.degree + 1]
    if p == 2:
        return ((np.abs(c) ** 2)[None, :] @ (r[None, :] ** (2 * np.arange(c.size))[:, None])).ravel()
    N = n_nodes or node_count(f.degree)
    rows = max(1, (1 << 21) // N)  # bound the FFT buffer to a few tens of MB
    out = np.empty(r.size)
    for i in range(0, r.size, rows):
        v = circle_values(f, r[i:i + rows], N)
        out[i:i + rows] = np.mean(np.abs(v) ** p, axis=1)
    return out


def norm_hp(f: CoefficientSeries, p: float, r: float = 1.0) -> NormValue:
    """(mean over the circle of radius r of |f|^p)^(1/p)."""
    if not p > 0:
        raise ValueError("p must be positive")
    N = node_count(f.degree)
    if N > MAX_NODES:
        raise ValueError("angular node budget exceeded")
    v1 = float(_means_p(f, [r], p, N)[0]) ** (1 / p)
    if p == 2:
        return NormValue("Hp", v1, 0.0, {"p": p, "r": r})
    # |f|^p is smooth unless f vanishes on the circle; then the rule converges
    # only algebraically, so keep doubling until two levels agree
    while True:
        v2 = float(_means_p(f, [r], p, 2 * N)[0]) ** (1 / p)
        err = abs(v2 - v1)
        N *= 2
        if err <= HP_RTOL * v2 or 2 * N > MAX_NODES:
            break
        v1 = v2
    warn = [] if err <= HP_RTOL * v2 else [f"angular rule not converged: change {err:.2g} at {N} nodes"]
    return NormValue("Hp", v2, err, {"p": p, "r": r}, warn)


def radial_integral(F, w: RadialWeight, F_at_one: float | None = None,
                    epsrel: float = 1e-12) -> tuple[float, float]:
    """int_0^1 F(r) w(r) dr for a vectorized, smooth F on [0, 1].

    [0, 1/2] in t = 1 - r runs in the log coordinate t = e^{-lam} so weight
    singularities at the boundary are resolved on the geometric ladder; the
    piece t < 2^-60 is F(1) times the weight's tail there.
    """
    lam0 = math.log(2.0)
    span = 60 * math.log(2.0)

    def near(y):
        lam = lam0 + y
        with np.errstate(all="ignore"):
            return np.real(F(1 - np.exp(-lam))) * np.exp(w.log_tw_lam(lam))

    bps = math.log(2.0) * np.arange(1, 60)
    v1, e1 = gk_integrate(near, 0.0, span, breakpoints=bps, epsrel=epsrel)

    def far(t):
        with np.errstate(all="ignore"):
            return np.real(F(1 - t)) * w.w_t(t)

    v2, e2 = gk_integrate(far, 0.5, 1.0, epsrel=epsrel)
    f1 = float(np.real(F(np.array([1.0]))[0])) if F_at_one is None else F_at_one
    rem = f1 * float(np.exp(log_tail_t(w, math.exp(-(lam0 + span)))))
    return v1 + v2 + rem, e1 + e2


def _apw_power(f: CoefficientSeries, p: float, w: RadialWeight) -> tuple[float, float]:
    if f.degree == 0:
        return abs(f.c[0]) ** p * 2 * math.exp(float(log_moments(w, 1.0))), 0.0
    N = node_count(f.degree)

    def F(r):
        r = np.asarray(r, dtype=float)
        return 2 * r * _means_p(f, r, p, N).ravel()

    return radial_integral(F, w)


def norm_apw(f: CoefficientSeries, p: float, w: RadialWeight) -> NormValue:
    """Weighted Bergman norm by radial quadrature of the integral means."""
    if not p > 0:
        raise ValueError("p must be positive")
    val, err = _apw_power(f, p, w)
    v = val ** (1 / p)
    return NormValue("Apw", v, v * err / (p * val) if val > 0 else 0.0, {"p": p, "weight": w.spec()})


def norm_dpw(f: CoefficientSeries, p: float, w: RadialWeight) -> NormValue:
    val, err = _apw_power(f.derivative(), p, w)
    total = val + abs(f.c[0]) ** p
    v = total ** (1 / p)
    return NormValue("Dpw", v, v * err / (p * total) if total > 0 else 0.0, {"p": p, "weight": w.spec()})


def norm_hlpw(f: CoefficientSeries, p: float, w: RadialWeight) -> NormValue:
    c = f.c[: f.degree + 1]
    n = np.arange(c.size, dtype=float)
    mask = c != 0
    if not mask.any():
        return NormValue("HLpw", 0.0, 0.0, {"p": p, "weight": w.spec()})
    lm = log_moments(w, n[mask] * p + 1)
    s = float(np.sum(np.abs(c[mask]) ** p * (n[mask] + 1) ** (p - 2) * np.exp(lm)))
    return NormValue("HLpw", s ** (1 / p), 0.0, {"p": p, "weight": w.spec()})


# ---------------------------------------------------------------------------
# sup-type norms


def _max_on_circle(f: CoefficientSeries, r: float, N: int | None = None) -> tuple[float, float]:
    """max over theta of |f(r e^{i theta})| with local refinement; returns (max, argmax)."""
    N = N or node_count(f.degree)
    v = np.abs(circle_values(f, [r], N)[0])
    j = int(np.argmax(v))
    h = 2 * np.pi / N
    th0 = 2 * np.pi * j / N
    if f.degree == 0 or r == 0:
        return float(v[j]), th0
    res = minimize_scalar(lambda th: -abs(f(r * np.exp(1j * th))), bounds=(th0 - h, th0 + h),
                          method="bounded", options={"xatol": 1e-13})
    best = max(float(v[j]), -float(res.fun))
    return best, float(res.x) if -res.fun >= v[j] else th0


def _sup_weighted(F: CoefficientSeries, n_r: int = 512) -> float:
    """sup over the disc of |F(z)| (1 - |z|^2)."""
    if not np.any(F.c):
        return 0.0
    N = node_count(F.degree)
    # radial grid denser near the boundary in proportion to the degree
    rs = np.unique(np.concatenate([np.linspace(0, 1, n_r + 1)[:-1],
                                   1 - np.geomspace(1e-6, 1, n_r)[::-1][:-1] / max(1, F.degree)]))
    rs = rs[(rs >= 0) & (rs < 1)]
    prof = np.max(np.abs(circle_values(F, rs, N)), axis=1) * (1 - rs ** 2)
    i = int(np.argmax(prof))
    lo = rs[max(i - 1, 0)]
    hi = rs[min(i + 1, rs.size - 1)]
    best = float(prof[i])
    if hi > lo:
        res = minimize_scalar(lambda r: -_max_on_circle(F, r, N)[0] * (1 - r * r), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-13})
        best = max(best, -float(res.fun))
    return best


def norm_zygmund(f: CoefficientSeries) -> NormValue:
    """sup |f''| (1-|z|^2) + |f'(0)| + |f(0)|."""
    d1 = f.derivative()
    s = _sup_weighted(d1.derivative())
    return NormValue("Zygmund", s + abs(d1.c[0]) + abs(f.c[0]))


def norm_bloch(f: CoefficientSeries) -> NormValue:
    """sup |f'| (1-|z|^2) + |f(0)|."""
    return NormValue("Bloch", _sup_weighted(f.derivative()) + abs(f.c[0]))


def _garsia_h2(f: CoefficientSeries, a: complex, cap: int = MAX_NODES) -> tuple[float, bool]:
    """||f o phi_a - f(a)||_{H^2} with phi_a(z) = (a - z)/(1 - conj(a) z).

    The composition is analytic on |w| < 1/|a|, so the trapezoidal rule on
    the circle converges like |a|^N; N is sized from the degree and 1-|a|.
    """
    ra = abs(a)
    need = 8 * (f.degree + 1) * max(1.0, 2.0 / max(1 - ra, 1e-300))
    N = 1 << (int(math.ceil(need)) - 1).bit_length()
    clipped = N > cap
    N = min(N, cap)
    w = np.exp(2j * np.pi * np.arange(N) / N)
    z = (a - w) / (1 - np.conj(a) * w)
    v = f(z) - f(a)
    return float(np.sqrt(np.mean(np.abs(v) ** 2))), clipped


def bmoa_seminorm(f: CoefficientSeries, depth: int = 10, angles: int = 16) -> tuple[float, list]:
    """sup over the a-grid (ladder x angles, plus a = 0) of the Garsia H^2 quantity."""
    if f.degree == 0:
        return 0.0, []
    warnings = []
    best, _ = _garsia_h2(f, 0j)
    for j in range(1, depth + 1):
        ra = 1 - 2.0 ** -j
        for k in range(angles):
            val, clipped = _garsia_h2(f, ra * np.exp(2j * np.pi * k / angles))
            if clipped and not warnings:
                warnings.append("a-grid close to the boundary: node budget capped")
            best = max(best, val)
    return best, warnings


def norm_bmoa(f: CoefficientSeries, depth: int = 10, angles: int = 16) -> NormValue:
    """Garsia-type BMOA seminorm plus |f(0)|."""
    s, warn = bmoa_seminorm(f, depth, angles)
    return NormValue("BMOA", s + abs(f.c[0]), params={"seminorm": s}, warnings=warn)


def norm_bmoa_inf(f: CoefficientSeries, w: RadialWeight, depth: int = 16, q: int = 2,
                  a_depth: int = 8, angles: int = 16) -> NormValue:
    """sup_r tail(r) * ||f_r||_BMOA over the r-ladder, refined around the best node."""
    def val(r):
        return math.exp(float(log_tail_t(w, 1 - r))) * norm_bmoa(f.dilate(r), a_depth, angles).value

    rs = np.concatenate([[0.0], 1 - 2.0 ** (-np.arange(1, depth * q + 1) / q)])
    vals = np.array([val(r) for r in rs])
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo, hi = rs[max(i - 1, 0)], rs[min(i + 1, rs.size - 1)]
    if hi > lo:
        res = minimize_scalar(lambda r: -val(r), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10})
        best = max(best, -float(res.fun))
    return NormValue("BMOAinf", best, params={"weight": w.spec(), "argmax_r": float(rs[i])})


def norm_bmoa_prime_inf(f: CoefficientSeries, w: RadialWeight, **kw) -> NormValue:
    """BMOA(inf, w) norm of f' plus |f(0)|."""
    inner = norm_bmoa_inf(f.derivative(), w, **kw)
    return NormValue("BMOAprimeInf", inner.value + abs(f.c[0]), params={"weight": w.spec()})


# ---------------------------------------------------------------------------
# pairings and means


def pairing(f: CoefficientSeries, g: CoefficientSeries, kind: str, nu: RadialWeight) -> complex:
    """<f, g> in the A2(nu), D2(nu) or HL(nu) sense (finite sums)."""
    kind = kind.upper()
    if kind == "D2":
        return pairing(f.derivative(), g.derivative(), "A2", nu) + f.c[0] * np.conj(g.c[0])
    m = min(f.degree, g.degree) + 1
    prod = f.c[:m] * np.conj(g.c[:m])
    mask = prod != 0
    if not mask.any():
        return 0j
    n = np.arange(m, dtype=float)[mask]
    mom = np.exp(log_moments(nu, 2 * n + 1))
    s = complex(np.sum(prod[mask] * mom))
    if kind == "A2":
        return 2 * s
    if kind == "HL":
        return s
    raise ValueError(f"unknown pairing kind {kind!r}")


def growth_means(f: CoefficientSeries, r: float, p: float = 2.0) -> tuple[float, float, float]:
    """(M_1, M_p, M_inf) at radius r."""
    N = node_count(f.degree)
    v = np.abs(circle_values(f, [r], N)[0])
    m1 = float(np.mean(v))
    mp = float(np.mean(v ** p)) ** (1 / p)
    minf = _max_on_circle(f, r, N)[0]
    return m1, mp, minf


_GL8 = np.polynomial.legendre.leggauss(8)


def pommerenke_sides(f: CoefficientSeries, r: float, panels: int = 16) -> tuple[float, float]:
    """(int_0^r M_inf(t, f) dt, pi r M_1(r, f)); composite 8-point Gauss-Legendre on the left."""
    N = node_count(f.degree)
    x, wts = _GL8
    edges = np.linspace(0, r, panels + 1)
    lhs = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        ts = 0.5 * (a + b) + 0.5 * (b - a) * x
        lhs += 0.5 * (b - a) * float(np.dot(wts, [_max_on_circle(f, t, N)[0] for t in ts]))
    m1 = float(np.mean(np.abs(circle_values(f, [r], N)[0])))
    return lhs, math.pi * r * m1


def random_polynomials(count: int, max_degree: int, seed: int, nonnegative: bool = False,
                       min_degree: int = 0) -> list[CoefficientSeries]:
    """Seeded corpus: degrees uniform in [min_degree, max_degree], Gaussian coefficients."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = int(rng.integers(min_degree, max_degree + 1))
        if nonnegative:
            c = rng.exponential(size=d + 1).astype(complex)
        else:
            c = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
        out.append(CoefficientSeries(c))
    return out


# ---------------------------------------------------------------------------
# inclusion chains between HL^w_p, A^p_w and D^p of the tail-shifted weight

_SECTION_GAMMAS = (0.5, 1.0, 2.0)
_SECTION_RADII = (0.5, 0.8, 0.9, 0.95, 0.99)


def structured_corpus(degree: int) -> list[CoefficientSeries]:
    """Polynomials that extremize the chain ratios in practice.

    Monomials z^0..z^degree, the sums 1 + z + ... + z^{n-1} for n = 2..degree,
    and degree-``degree`` sections of (1 - a z)^{-gamma}.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    out = [CoefficientSeries.monomial(n) for n in range(degree + 1)]
    out += [CoefficientSeries(np.ones(n)) for n in range(2, degree + 1)]
    k = np.arange(degree + 1)
    for g in _SECTION_GAMMAS:
        binom = np.exp(gammaln(k + g) - gammaln(g) - gammaln(k + 1))
        out += [CoefficientSeries(binom * a ** k) for a in _SECTION_RADII]
    return out


@dataclass
class ChainConstants:
    """Corpus maxima of the two ratios in an inclusion chain X1 <= C1 X2 <= C2 X3."""

    p: float
    weight: str
    reverse: bool
    size: int
    c1: float
    c2: float

    def to_dict(self) -> dict:
        return {"p": self.p, "weight": self.weight, "reverse": self.reverse, "size": self.size,
                "c1": self.c1, "c2": self.c2}


def chain_constants(p: float, w: RadialWeight, corpus: Iterable[CoefficientSeries],
                    reverse: bool = False) -> ChainConstants:
    """max HL/A and max A/D (reverse: max D/A and max A/HL), D taken for the [p]-shifted tail weight."""
    wt = Derived(w, TailQuotientShift(p))
    corpus = list(corpus)
    hl = np.array([norm_hlpw(f, p, w).value for f in corpus])
    a = np.array([norm_apw(f, p, w).value for f in corpus])
    d = np.array([norm_dpw(f, p, wt).value for f in corpus])
    if reverse:
        c1, c2 = float(np.max(d / a)), float(np.max(a / hl))
    else:
        c1, c2 = float(np.max(hl / a)), float(np.max(a / d))
    return ChainConstants(p, w.spec(), reverse, len(corpus), c1, c2)


def chain_corpus(degree: int, n_random: int, seed: int) -> list[CoefficientSeries]:
    """structured_corpus(degree) followed by n_random seeded polynomials of degree <= 32."""
    return structured_corpus(degree) + random_polynomials(n_random, 32, seed)

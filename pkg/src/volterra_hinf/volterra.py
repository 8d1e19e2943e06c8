"""The Volterra operator T_g f(z) = int_0^z f(s) g'(s) ds on polynomials.

T_g f is again a polynomial, so the primary backend works on coefficients.
A Gauss-Legendre path integral along [0, z] serves as an independent
cross-check. Operator norms into H^infinity are only ever estimated from
below here (a maximum over a finite family of test functions); whether the
operator is bounded at all is the business of the criteria module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .criteria import BOUNDED, COMPACT, NOT_COMPACT, bounded_tg, conjugate
from .kernels import kernel, sup_g_norm
from .spaces import CoefficientSeries, _max_on_circle, node_count, norm_apw, norm_dpw, norm_hlpw
from .spaces import random_polynomials
from .weightlib import DualW, Derived, RadialWeight, TailProduct, log_moments

__all__ = [
    "tg_series", "apply_tg", "hinf_norm", "OperatorEstimate", "default_family", "empirical_opnorm",
    "consistency_report", "LOWER_BOUND",
]

LOWER_BOUND = "LOWER BOUND"
SANITY_FACTOR = 10.0


def tg_series(f: CoefficientSeries, g: CoefficientSeries) -> CoefficientSeries:
    """Coefficients of T_g f: the primitive (vanishing at 0) of f g'."""
    return (f * g.derivative()).primitive()


def apply_tg(f: CoefficientSeries, g: CoefficientSeries, z, backend: str = "coefficients"):
    """T_g f evaluated at z (|z| <= 1); backend "coefficients" or "quadrature"."""
    z_arr = np.asarray(z, dtype=complex)
    if np.any(np.abs(z_arr) > 1 + 1e-15):
        raise ValueError("evaluation point outside the closed unit disc")
    if backend == "coefficients":
        return tg_series(f, g)(z_arr)
    if backend == "quadrature":
        # the integrand f(tz) g'(tz) z is a polynomial in t of degree deg f + deg g - 1,
        # integrated exactly by this many Gauss-Legendre nodes
        dg = g.derivative()
        n = (f.degree + dg.degree) // 2 + 2
        x, wts = np.polynomial.legendre.leggauss(n)
        t = 0.5 * (x + 1)
        s = z_arr[..., None] * t
        vals = f(s) * dg(s) * z_arr[..., None]
        return 0.5 * np.sum(vals * wts, axis=-1)
    raise ValueError(f"unknown backend {backend!r}")


def hinf_norm(f: CoefficientSeries, factor: int = 8) -> float:
    """max |f| on the unit circle: FFT grid of at least factor*(deg+1) nodes, refined at the argmax."""
    return _max_on_circle(f, 1.0, node_count(f.degree, factor))[0]


@dataclass
class OperatorEstimate:
    """Empirical lower bound for the norm of T_g: X -> H^infinity."""

    family: str
    size: int
    lower_bound: float
    argmax: str
    criterion_value: float | None = None
    ratio: float | None = None
    label: str = LOWER_BOUND
    members: list = field(default_factory=list)  # (id, ratio)

    def to_dict(self) -> dict:
        return {"label": self.label, "family": self.family, "size": self.size,
                "lower_bound": self.lower_bound, "argmax": self.argmax,
                "criterion_value": self.criterion_value, "ratio": self.ratio}


def _source_norm(f: CoefficientSeries, p: float, w: RadialWeight, source: str) -> float:
    if source == "dpw":
        return norm_dpw(f, p, w).value
    if source == "apw":
        return norm_apw(f, p, w).value
    if source == "hlpw":
        return norm_hlpw(f, p, w).value
    raise ValueError(f"unknown source space {source!r}")


def _monomial_norms(ns: np.ndarray, p: float, w: RadialWeight, source: str) -> np.ndarray:
    """Closed forms: ||z^n||_{D^p_w}^p = 2 n^p w_{(n-1)p+1} (n >= 1), ||z^n||_{A^p_w}^p = 2 w_{np+1}."""
    ns = np.asarray(ns, dtype=float)
    if source == "dpw":
        out = np.ones(ns.size)
        pos = ns >= 1
        lm = log_moments(w, (ns[pos] - 1) * p + 1)
        out[pos] = np.exp((math.log(2) + p * np.log(ns[pos]) + lm) / p)
        return out
    if source == "apw":
        return np.exp((math.log(2) + log_moments(w, ns * p + 1)) / p)
    if source == "hlpw":
        return np.exp(((p - 2) * np.log(ns + 1) + log_moments(w, ns * p + 1)) / p)
    raise ValueError(f"unknown source space {source!r}")


def default_family(seed: int = 0, n_monomials: int = 256, n_random: int = 50, random_degree: int = 64,
                   kernel_weight: RadialWeight | None = None, kernel_degree: int = 256,
                   kernel_radii: int = 8) -> list[tuple[str, CoefficientSeries]]:
    """Monomials z^0..z^N, seeded random polynomials and kernel sections K_zeta truncated at a degree.

    Kernel sections use the D^2 kernel of ``kernel_weight`` at zeta = 1 - 2^{-j}.
    """
    fam = [(f"monomial:{n}", CoefficientSeries.monomial(n)) for n in range(n_monomials + 1)]
    polys = random_polynomials(n_random, random_degree, seed)
    fam += [(f"random:{i}", f) for i, f in enumerate(polys)]
    if kernel_weight is not None and kernel_radii > 0:
        spec = kernel(kernel_weight, kernel_degree)
        fam += [(f"kernel:1-2^-{j}", spec.at(1 - 2.0 ** -j)) for j in range(1, kernel_radii + 1)]
    return fam


def empirical_opnorm(p: float, w: RadialWeight, g: CoefficientSeries, family=None, source: str = "dpw",
                     seed: int = 0) -> OperatorEstimate:
    """max over the family of ||T_g f||_inf / ||f||_X, X = D^p_w (or A^p_w, HL^w_p).

    The default family is ``default_family(seed, kernel_weight=w)``. Monomial
    source norms use their closed forms; other members use the spaces module.
    """
    desc = f"{source}: monomials, random polynomials, kernel sections" if family is None else f"{source}: custom"
    if family is None:
        family = default_family(seed, kernel_weight=w)
    if not family:
        raise ValueError("empty test family")
    members = []
    mono = [(i, int(name.split(":")[1])) for i, (name, _) in enumerate(family) if name.startswith("monomial:")]
    mono_norm = {}
    if mono:
        vals = _monomial_norms(np.array([n for _, n in mono]), p, w, source)
        mono_norm = {i: v for (i, _), v in zip(mono, vals)}
    best, arg = 0.0, family[0][0]
    for i, (name, f) in enumerate(family):
        nf = mono_norm[i] if i in mono_norm else _source_norm(f, p, w, source)
        if not nf > 0:
            raise ValueError(f"family member {name} has zero norm")
        if g.degree == 0:
            val = 0.0
        else:
            val = float(hinf_norm(tg_series(f, g)) / nf)
        members.append((name, val))
        if val > best:
            best, arg = val, name
    return OperatorEstimate(desc, len(family), best, arg, members=members)


def _criterion_scale(p: float, w: RadialWeight, g: CoefficientSeries) -> tuple[float, str, str]:
    """The criterion quantity on the scale of the operator norm, its verdict and its form."""
    rep = bounded_tg(p, w, g)
    s = rep.summary
    if p > 1:
        val = s.get("value", math.nan)
        return val ** (1 / conjugate(p)), rep.verdict, "series^(1/p')"
    return s.get("sup", math.nan), rep.verdict, "sup"


def consistency_report(p: float, w: RadialWeight, g: CoefficientSeries, seed: int = 0,
                       family=None, with_kernel: bool = True, K: int = 256) -> dict:
    """Empirical lower bound next to the criterion scale and the kernel surrogate.

    The recorded constant C = lower bound / criterion scale is what a bound
    ||T_g|| <= C * scale would need on this family; it is logged against a
    sanity factor of 10 and never read as a tightness claim.
    """
    est = empirical_opnorm(p, w, g, family, seed=seed)
    scale, verdict, form = _criterion_scale(p, w, g)
    est.criterion_value = scale
    est.ratio = float(est.lower_bound / scale) if scale > 0 else (0.0 if est.lower_bound == 0 else math.inf)
    out = {"p": p, "weight": w.spec(), "symbol": g.to_json(), "estimate": est.to_dict(),
           "criterion_verdict": verdict, "criterion_scale": scale, "criterion_form": form,
           "constant": est.ratio, "sanity_factor": SANITY_FACTOR, "warnings": []}
    bounded = verdict in (BOUNDED, COMPACT, NOT_COMPACT)
    out["within_sanity_band"] = bool(est.ratio <= SANITY_FACTOR) if bounded else None
    if not bounded:
        out["warnings"].append("criterion does not report boundedness; the lower bound is not compared")
    if with_kernel and g.degree > 0:
        if p > 1:
            gs = sup_g_norm(g, w, "dpw", norm_weight=w, exponent=conjugate(p), K=K)
        elif p < 1:
            gs = sup_g_norm(g, Derived(w, DualW(p)), "zygmund", K=K)
        else:
            gs = sup_g_norm(g, Derived(w, TailProduct()), "bmoaprimeinf", norm_weight=w, K=K)
        out["kernel_surrogate"] = float(gs.value)
        out["warnings"] += gs.warnings
    return out

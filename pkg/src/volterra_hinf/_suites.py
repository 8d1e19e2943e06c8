"""Invariant suites run by ``volterra-hinf verify``.

Each check returns a plain record: name, pass flag and the numbers it was
decided on. Everything is seeded, so a suite run is a pure function of
(suite, seed).
"""

from __future__ import annotations

import numpy as np

from . import classify as cl
from . import criteria as cr
from . import dyadic as dy
from . import kernels as kn
from . import spaces as sp
from . import volterra as vo
from . import weightlib as wl


def _rec(name: str, passed: bool, **values) -> dict:
    return {"check": name, "passed": bool(passed), **values}


def suite_weights(seed: int) -> list[dict]:
    out = []
    r = np.linspace(0, 0.999, 41)
    worst = 0.0
    for p in (0.3, 0.5, 0.8):
        d = wl.Derived(wl.Standard(1.0), wl.DualW(p))
        lhs = wl.log_tail(d, r, method="quad")
        rhs = wl.log_tail(wl.Standard(1.0), r) / p + (1 / p - 1) * np.log1p(-r)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    out.append(_rec("dual weight tail identity", worst < 1e-8, max_log_error=worst))
    out.append(_rec("Beta(2,3) moment", abs(wl.moment(wl.Standard(2.0), 1.0) - 1 / 12) < 1e-14,
                    value=wl.moment(wl.Standard(2.0), 1.0)))
    mono = True
    for w in wl.registry().values():
        m = wl.moments(w, np.array([0.0, 1.0, 10.0, 100.0, 1e4]))
        t = wl.tail(w, np.array([0.0, 0.5, 0.9, 0.99]))
        mono &= bool(np.all(np.diff(m) < 0) and np.all(np.diff(t) < 0))
    out.append(_rec("moments and tails decrease (registry)", mono))
    return out


def suite_classify(seed: int) -> list[dict]:
    c = cl.check_dhat(wl.const())
    s3 = cl.check_dhat(wl.Standard(3.0))
    d1 = cl.check_dcheck(wl.Standard(1.0), K=2)
    agree = True
    for w in wl.registry().values():
        rep = cl.classify(w)
        both = rep.dhat.verdict == cl.MEMBER and rep.dcheck.verdict == cl.MEMBER
        agree &= (rep.d == cl.MEMBER) == both
    xs = [1.0, 10.0, 100.0, 1000.0]
    sw = cl.verify_moment_tail(wl.const(), xs)
    err = float(np.max(np.abs(sw.ratios - np.array(xs) / (np.array(xs) + 1))))
    return [
        _rec("const upper-doubling constant", c.verdict == cl.MEMBER and abs(c.C - 2) < 1e-12, C=c.C),
        _rec("std alpha=3 upper-doubling constant", abs(s3.C - 16) < 1e-9, C=s3.C),
        _rec("std alpha=1 lower-doubling constant K=2", abs(d1.C - 4) < 1e-9, C=d1.C),
        _rec("two-sided class is the intersection (registry)", agree),
        _rec("moment/tail ratio for const", err < 1e-10, max_error=err),
    ]


def suite_spaces(seed: int) -> list[dict]:
    polys = sp.random_polynomials(50, 24, seed)
    w = wl.Standard(1.0)
    worst = 0.0
    for f in polys:
        a = sp.norm_apw(f, 2, w).value ** 2
        h = sp.norm_hlpw(f, 2, w).value ** 2
        worst = max(worst, abs(a - 2 * h) / a)
    hom = 0.0
    f = polys[0]
    for fn in (lambda g: sp.norm_hp(g, 3), lambda g: sp.norm_apw(g, 1.5, w), lambda g: sp.norm_hlpw(g, 1, w)):
        hom = max(hom, abs(fn(f * (2 - 3j)).value - abs(2 - 3j) * fn(f).value) / fn(f).value)
    pom = all(lhs <= rhs for f in polys[:20] for lhs, rhs in [sp.pommerenke_sides(f, 0.9)])
    return [
        _rec("p = 2 Bergman/Hardy-Littlewood collapse", worst < 1e-8, max_rel_error=worst),
        _rec("norm homogeneity", hom < 1e-10, max_rel_error=hom),
        _rec("Pommerenke inequality at r = 0.9", pom),
    ]


def suite_kernels(seed: int) -> list[dict]:
    polys = sp.random_polynomials(100, 32, seed)
    zetas = [rr * np.exp(2j * np.pi * k / 8) for rr in (0.1, 0.3, 0.5, 0.7, 0.9) for k in range(8)]
    nus = [wl.const(), wl.Derived(wl.const(), wl.DualW(0.75)), wl.Derived(wl.const(), wl.TailProduct())]
    worst = 0.0
    for nu in nus:
        spec = kn.kernel(nu, 40)
        for f in polys:
            for z in zetas:
                val = sp.pairing(f, spec.at(z), "D2", nu)
                worst = max(worst, abs(val - f(z)) / (1 + abs(f(z))))
    g = sp.CoefficientSeries([0, 1, 0.5])
    a = kn.sup_g_norm(g, wl.const(), "dpw", norm_weight=wl.const(), exponent=2.0, K=128, depth=6).value
    b = kn.sup_g_norm(g * 2, wl.const(), "dpw", norm_weight=wl.const(), exponent=2.0, K=128, depth=6).value
    return [
        _rec("kernel reproduction", worst <= 1e-9, max_scaled_error=worst),
        _rec("sup norm of G is linear in g", abs(b - 2 * a) <= 1e-10 * b, single=a, doubled=b),
    ]


def suite_criteria(seed: int) -> list[dict]:
    out = []
    verdicts = {a: cr.triviality_p_gt_1(2.0, wl.Standard(a)).verdict for a in (1.5, 1.9, 2.0, 2.5)}
    ok = all((v == cr.TRIVIAL_ONLY) == (a >= 2) for a, v in verdicts.items())
    out.append(_rec("p = 2 triviality threshold at alpha = 2", ok, verdicts={str(k): v for k, v in verdicts.items()}))
    bg = {a: cr.bergman_triviality(2.0, wl.Standard(a)).verdict for a in (-0.5, 0.0, 0.5)}
    ok = all((v == cr.TRIVIAL_ONLY) == (a >= 0) for a, v in bg.items())
    out.append(_rec("Bergman threshold at alpha = 0", ok, verdicts={str(k): v for k, v in bg.items()}))
    low = {n: cr.triviality_p_le_1(0.5, w).verdict for n, w in wl.registry().items()}
    out.append(_rec("p <= 1/2 gives trivial-only", all(v == cr.TRIVIAL_ONLY for v in low.values()), verdicts=low))
    z = sp.CoefficientSeries([0, 1])
    k = np.arange(4096)
    d = float(np.max(np.abs(cr.bounded_tg_log_terms(2.0, wl.const(), z, k) - cr.triviality_log_terms(2.0, wl.const(), k))))
    out.append(_rec("g = z reduces to the triviality series", d <= 1e-14, max_log_diff=d))
    return out


def suite_dyadic(seed: int) -> list[dict]:
    sw = dy.delta_norm_sweep(2.0, 10)
    part = dy.omega_partition(wl.const(), 30)
    exact = bool(np.all(part.M == 2.0 ** np.arange(31)) and np.all(part.r == 1 - 2.0 ** -np.arange(31)))
    c = dy.decomposition_norm_check(2.0, wl.const(), [sp.CoefficientSeries([3.0])])
    polys = sp.random_polynomials(20, 40, seed)
    recon = all(sum(dy.dyadic_blocks(f), sp.CoefficientSeries.zero()) == f for f in polys)
    return [
        _rec("H^2 block norms are 2^{n/2}", float(np.max(np.abs(sw.ratios - 1))) < 1e-12,
             max_error=float(np.max(np.abs(sw.ratios - 1)))),
        _rec("const partition is dyadic", exact),
        _rec("constant function decomposition ratio", c.ratios[0] == 1.0, ratio=float(c.ratios[0])),
        _rec("dyadic blocks add up to f", recon),
    ]


def suite_volterra(seed: int) -> list[dict]:
    fs = sp.random_polynomials(20, 24, seed)
    gs = sp.random_polynomials(20, 24, seed + 1)
    zs = np.exp(1j * np.linspace(0, 6, 9)) * np.linspace(0.05, 1, 9)
    dual = max(float(np.max(np.abs(vo.apply_tg(f, g, zs) - vo.apply_tg(f, g, zs, "quadrature"))))
               for f, g in zip(fs, gs))
    lin = max(float(np.max(np.abs(vo.tg_series(f, g + h).c[: 60] - (vo.tg_series(f, g) + vo.tg_series(f, h)).c[: 60])))
              for f, g, h in zip(fs, gs, gs[1:]))
    zero = max(abs(vo.apply_tg(f, g, 0.0)) for f, g in zip(fs, gs))
    small = vo.empirical_opnorm(2.0, wl.const(), sp.CoefficientSeries([0, 1]),
                                family=vo.default_family(seed, 32, 5, 16, wl.const(), 64, 4)).lower_bound
    big = vo.empirical_opnorm(2.0, wl.const(), sp.CoefficientSeries([0, 1]),
                              family=vo.default_family(seed, 64, 10, 16, wl.const(), 64, 4)).lower_bound
    return [
        _rec("coefficient and quadrature backends agree", dual < 1e-12, max_abs_diff=dual),
        _rec("T_g is linear in g", lin < 1e-12, max_abs_diff=lin),
        _rec("T_g f vanishes at 0", zero == 0, value=float(zero)),
        _rec("lower bound grows with the family", big >= small, small=small, large=big),
    ]


SUITES = {
    "weights": suite_weights, "classify": suite_classify, "spaces": suite_spaces, "kernels": suite_kernels,
    "criteria": suite_criteria, "dyadic": suite_dyadic, "volterra": suite_volterra,
}


def run(suite: str, seed: int) -> dict:
    names = list(SUITES) if suite == "all" else [suite]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite {unknown[0]!r}; choose from {', '.join(['all', *SUITES])}")
    checks = []
    for n in names:
        checks += [{"suite": n, **c} for c in SUITES[n](seed)]
    return {"suite": suite, "seed": seed, "passed": sum(c["passed"] for c in checks), "total": len(checks),
            "checks": checks}

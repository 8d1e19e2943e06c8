"""Command-line front end: ``volterra-hinf <command> [options]``.

Commands: classify, norm, criterion, sweep, verify. Reports are JSON
(``schema: 1``) or CSV; every float is printed with 17 significant digits and
non-finite values as the strings "inf", "-inf", "nan", so a fixed
configuration always produces the same bytes.

Exit codes: 0 success, 2 usage or input error, 3 an Inconclusive verdict
under ``--strict``, 4 a failed check in ``verify``.
"""

from __future__ import annotations

import argparse
import ast
import csv
import hashlib
import io
import json
import math
import operator
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import _suites
from . import classify as cl
from . import criteria as cr
from . import spaces as sp
from .weightlib import RadialWeight, Tabulated, WeightError, parse_weight, registry

SCHEMA = 1
CACHE_ENV = "VOLTERRA_CACHE_DIR"

CRITERIA = {
    "trivial-le1": "triviality for p <= 1 (sup form)",
    "series-le1": "series form of the p <= 1 quantity",
    "trivial-dirichlet": "triviality for p > 1 (integral and series)",
    "trivial-bergman": "triviality on the weighted Bergman space, p > 1",
    "bounded": "boundedness/compactness of T_g for a nonnegative symbol",
    "bounded-xspaces": "the p > 1 series for HL, Bergman and shifted Dirichlet spaces",
    "embedding": "theorem, lower-bound and double integrals, p > 1",
}


class CliError(Exception):
    """Input or regime error reported on stderr with exit code 2."""


# ---------------------------------------------------------------------------
# serialization


def _fmt_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    s = format(v, ".17g")
    return s if any(c in s for c in ".en") else s + ".0"


def _plain(obj):
    """numpy scalars/arrays and complex numbers to JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    return obj


def dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, 17 significant digits, non-finite floats as strings."""
    obj = _plain(obj)
    pad = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(obj[k], indent + 2)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 2) for v in obj) + "\n" + " " * indent + "]"
    if isinstance(obj, float):
        return _fmt_float(obj)
    return json.dumps(obj)


def _csv_cell(v) -> str:
    v = _plain(v)
    if isinstance(v, float):
        return _fmt_float(v).strip('"')
    if isinstance(v, (dict, list)):
        return dumps(v).replace("\n", " ")
    return "" if v is None else str(v)


def to_csv(header: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow([_csv_cell(row.get(h)) for h in header])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# parsing helpers

_BIN = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv,
        ast.Pow: operator.pow}


def eval_expression(expr: str, env: dict[str, float]) -> float:
    """Arithmetic in the sweep variables, with implicit products such as ``2p-2``."""
    src = re.sub(r"(\d|\))\s*([A-Za-z(])", r"\1*\2", expr)
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise CliError(f"cannot parse expression {expr!r} at column {exc.offset}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise CliError(f"unknown variable {node.id!r} in {expr!r}; available: {', '.join(sorted(env))}")
            return float(env[node.id])
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BIN:
            return _BIN[type(node.op)](ev(node.left), ev(node.right))
        raise CliError(f"unsupported construct in expression {expr!r}")

    return ev(tree)


def parse_range(text: str) -> list[float]:
    """``a:b:step`` (inclusive of b up to rounding) or a comma list or one number."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise CliError(f"range {text!r}: expected start:stop:step")
        a, b, h = (float(x) for x in parts)
        if h <= 0 or b < a:
            raise CliError(f"range {text!r}: need step > 0 and stop >= start")
        n = int(math.floor((b - a) / h + 1e-9)) + 1
        return [round(a + i * h, 12) for i in range(n)]
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise CliError(f"cannot read numbers from {text!r}") from None


def parse_symbol(text: str | None) -> sp.CoefficientSeries:
    """``poly:1,0,2``, a bare coefficient list, a JSON array, or a path to a CSV/JSON file."""
    if text is None:
        return sp.CoefficientSeries([0.0, 1.0])
    body = text[5:] if text.startswith("poly:") else text
    if Path(body).is_file():
        return sp.CoefficientSeries.load(body)
    if body.lstrip().startswith("["):
        return sp.CoefficientSeries.from_json(body)
    coeffs = []
    for i, item in enumerate(body.split(",")):
        try:
            coeffs.append(complex(item.strip().replace("i", "j")))
        except ValueError:
            raise CliError(f"symbol coefficient {i} is not a number: {item!r}") from None
    return sp.CoefficientSeries(coeffs)


def parse_weight_arg(text: str, env: dict[str, float] | None = None) -> RadialWeight:
    reg = registry()
    if text in reg:
        return reg[text]
    try:
        return parse_weight(text, (lambda e: eval_expression(e, env)) if env is not None else None)
    except WeightError as exc:
        raise CliError(f"weight {text!r}: {exc}") from None


# ---------------------------------------------------------------------------
# moment-table cache


def _cache_path(w: RadialWeight) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    h = hashlib.sha256(w.spec().encode())
    if isinstance(w, Tabulated):
        h.update(np.asarray(w.nodes).tobytes() + np.asarray(w.values).tobytes())
    return Path(root) / f"moments-{h.hexdigest()[:24]}.json"


def load_cache(w: RadialWeight) -> None:
    path = _cache_path(w)
    if path is not None and path.is_file():
        try:
            w.table.load_json(path.read_text())
        except (ValueError, KeyError, TypeError):
            pass  # a damaged cache is ignored and rewritten


def save_cache(w: RadialWeight) -> None:
    path = _cache_path(w)
    if path is not None and len(w.table):
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(w.table.to_json())
        tmp.replace(path)


# ---------------------------------------------------------------------------
# commands


def _single_p(args) -> float:
    if args.p is None:
        raise CliError("--p is required for this command")
    ps = parse_range(args.p)
    if len(ps) != 1:
        raise CliError("--p must be a single value here (use sweep for ranges)")
    return ps[0]


def cmd_classify(args) -> tuple[dict, list[str]]:
    w = parse_weight_arg(args.weight)
    load_cache(w)
    try:
        grid = cl.GridSpec.for_weight(w, args.grid_depth)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    rep = cl.classify(w, grid)
    save_cache(w)
    return {"weight": w.spec(), "report": rep.to_dict()}, []


NORM_KINDS = ("hp", "apw", "dpw", "hlpw", "zygmund", "bloch", "bmoa", "bmoainf", "bmoaprimeinf")


def cmd_norm(args) -> tuple[dict, list[str]]:
    f = parse_symbol(args.symbol)
    kind = args.kind.lower()
    needs_w = kind in ("apw", "dpw", "hlpw", "bmoainf", "bmoaprimeinf")
    needs_p = kind in ("hp", "apw", "dpw", "hlpw")
    p = _single_p(args) if needs_p else None
    w = parse_weight_arg(args.weight) if needs_w else None
    if w is not None:
        load_cache(w)
    if kind == "hp":
        nv = sp.norm_hp(f, p)
    elif kind == "apw":
        nv = sp.norm_apw(f, p, w)
    elif kind == "dpw":
        nv = sp.norm_dpw(f, p, w)
    elif kind == "hlpw":
        nv = sp.norm_hlpw(f, p, w)
    elif kind == "zygmund":
        nv = sp.norm_zygmund(f)
    elif kind == "bloch":
        nv = sp.norm_bloch(f)
    elif kind == "bmoa":
        nv = sp.norm_bmoa(f)
    elif kind == "bmoainf":
        nv = sp.norm_bmoa_inf(f, w)
    else:
        nv = sp.norm_bmoa_prime_inf(f, w)
    if w is not None:
        save_cache(w)
    return {"symbol": f.to_json(), "norm": nv.to_dict()}, []


def _regime_error(which: str, p: float) -> None:
    if which in ("trivial-le1", "series-le1") and not 0 < p <= 1:
        raise CliError(f"{which} needs 0 < p <= 1 (got p = {p:g}); use trivial-dirichlet for p > 1")
    if which in ("trivial-dirichlet", "trivial-bergman", "bounded-xspaces", "embedding") and not p > 1:
        raise CliError(f"{which} needs p > 1 (got p = {p:g}); use trivial-le1 for p <= 1")


def run_criterion(which: str, p: float, w: RadialWeight, g: sp.CoefficientSeries, depth, trunc) -> dict:
    _regime_error(which, p)
    try:
        if which == "trivial-le1":
            rep = cr.triviality_p_le_1(p, w, depth)
        elif which == "series-le1":
            rs = 1 - np.geomspace(0.1, 1e-4, 13)
            sw = cr.series_form_p_le_1(p, w, rs)
            return {"criterion": "series_form_p_le_1", "params": {"p": p, "weight": w.spec()},
                    "sweep": sw.to_dict(), "band": sw.band, "verdict": None, "warnings": []}
        elif which == "trivial-dirichlet":
            rep = cr.triviality_p_gt_1(p, w, depth)
        elif which == "trivial-bergman":
            rep = cr.bergman_triviality(p, w, depth)
        elif which == "bounded":
            if not g.nonnegative:
                raise CliError("bounded needs a symbol with nonnegative coefficients")
            kw = {"K": trunc, "M": trunc} if trunc else {}
            rep = cr.bounded_tg(p, w, g, depth, **kw)
        elif which == "bounded-xspaces":
            if not g.nonnegative:
                raise CliError("bounded-xspaces needs a symbol with nonnegative coefficients")
            rep = cr.bounded_tg_xspaces(p, w, g, depth)
        elif which == "embedding":
            rep = cr.embedding_integrals(p, w, depth)
        else:
            raise CliError(f"unknown criterion {which!r}; choose from {', '.join(CRITERIA)}")
    except (WeightError, ValueError) as exc:
        raise CliError(str(exc)) from None
    return rep.to_dict()


def cmd_criterion(args) -> tuple[dict, list[str]]:
    p = _single_p(args)
    w = parse_weight_arg(args.weight)
    load_cache(w)
    g = parse_symbol(args.symbol)
    which = args.which or ("trivial-le1" if p <= 1 else "trivial-dirichlet")
    rep = run_criterion(which, p, w, g, args.grid_depth, args.trunc)
    save_cache(w)
    return rep, [rep.get("verdict")]


def _sweep_value(rep: dict) -> tuple[float | None, float | None]:
    s = rep.get("summary", {})
    for key in ("sup", "integral_value", "value", "theorem_value"):
        if key in s:
            return s[key], s.get("limsup")
    return None, s.get("limsup")


def cmd_sweep(args) -> tuple[dict, list[str]]:
    ps = parse_range(args.p) if args.p else [None]
    alphas = parse_range(args.alpha) if args.alpha else [None]
    g = parse_symbol(args.symbol)
    rows, verdicts = [], []
    for p in ps:
        for a in alphas:
            env = {k: v for k, v in (("p", p), ("alpha", a)) if v is not None}
            try:
                w = parse_weight_arg(args.weight, env)
            except CliError as exc:
                rows.append({"p": p, "alpha": a, "weight": args.weight, "verdict": "Error", "note": str(exc)})
                continue
            which = args.which or ("trivial-le1" if p is not None and p <= 1 else "trivial-dirichlet")
            rep = run_criterion(which, p, w, g, args.grid_depth, args.trunc)
            value, limsup = _sweep_value(rep)
            row = {"p": p, "alpha": a, "weight": w.spec(), "criterion": rep.get("criterion"),
                   "verdict": rep.get("verdict"), "value": value, "limsup": limsup,
                   "note": "; ".join(rep.get("warnings", []))}
            if "closed_constant" in rep.get("summary", {}):
                row["closed_constant"] = rep["summary"]["closed_constant"]
            rows.append(row)
            verdicts.append(rep.get("verdict"))
    return {"rows": rows}, verdicts


SWEEP_HEADER = ["p", "alpha", "weight", "criterion", "verdict", "value", "limsup", "closed_constant", "note"]


def cmd_verify(args) -> tuple[dict, list[str]]:
    try:
        res = _suites.run(args.suite, args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    return res, []


COMMANDS = {"classify": cmd_classify, "norm": cmd_norm, "criterion": cmd_criterion, "sweep": cmd_sweep,
            "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=7, help="seed for random corpora (default 7)")
    common.add_argument("--strict", action="store_true", help="exit 3 when a verdict is Inconclusive")
    common.add_argument("--grid-depth", type=int, default=None, help="ladder depth override")
    common.add_argument("--trunc", type=int, default=None, help="series/kernel truncation override")

    ap = argparse.ArgumentParser(prog="volterra-hinf", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="doubling-class membership of a weight")
    p.add_argument("--weight", required=True)

    p = sub.add_parser("norm", parents=[common], help="a norm of a polynomial")
    p.add_argument("--kind", required=True, choices=NORM_KINDS)
    p.add_argument("--symbol", required=True, help="poly:c0,c1,..., a JSON array or a CSV/JSON file")
    p.add_argument("--p")
    p.add_argument("--weight", default="const")

    p = sub.add_parser("criterion", parents=[common], help="one criterion report")
    p.add_argument("--which", choices=list(CRITERIA), help="default: triviality for the regime of p")
    p.add_argument("--p", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--symbol", help="nonnegative polynomial symbol (default z)")

    p = sub.add_parser("sweep", parents=[common], help="criterion over a (p, alpha) grid")
    p.add_argument("--which", choices=list(CRITERIA))
    p.add_argument("--p", required=True, help="start:stop:step or a comma list")
    p.add_argument("--alpha", help="start:stop:step or a comma list")
    p.add_argument("--weight", required=True, help="weight spec; numbers may be expressions in p and alpha")
    p.add_argument("--symbol")

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--suite", default="all", help=f"one of: all, {', '.join(_suites.SUITES)}")
    return ap


def render(command: str, args, result: dict) -> str:
    if args.format == "json":
        config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format")}
        return dumps({"schema": SCHEMA, "command": command, "config": config, "result": result}) + "\n"
    if command == "sweep":
        return to_csv(SWEEP_HEADER, result["rows"])
    if command == "verify":
        return to_csv(["suite", "check", "passed"], result["checks"])
    flat = {"command": command}
    for k, v in result.items():
        if isinstance(v, dict):
            flat.update({f"{k}.{kk}": vv for kk, vv in v.items() if not isinstance(vv, (list, dict))})
        elif not isinstance(v, list):
            flat[k] = v
    return to_csv(list(flat), [flat])


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        result, verdicts = COMMANDS[args.command](args)
    except (CliError, WeightError, ValueError) as exc:
        # library ValueErrors are input errors here (bad p, depth, degree, ...)
        print(f"volterra-hinf: error: {exc}", file=sys.stderr)
        return 2
    text = render(args.command, args, result)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and result["passed"] < result["total"]:
        return 4
    if args.strict and any(v == cr.INCONCLUSIVE for v in verdicts):
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

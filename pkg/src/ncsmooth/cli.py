"""Command-line front end.

Every subcommand prints a report on stdout. Failures print one JSON object
``{"error": code, "message": ..., ...}`` and exit with status 2; reports whose
verdict is negative (a failed domination check, a gluing mismatch) exit with 1.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import calculus
from .errors import NCSmoothError, NotSolvable, NotTriangular, ParseError
from .grid import CompactBox
from .lie_core import LieAlgebra, triangular_flag
from .ncfunc import (NCFunctionElement, format_nc, from_uea, nc_multiply, nc_seminorm, nc_to_dict)
from .pbw import element_to_dict, format_element, parse_element, poly_ring, uea_multiply
from .reps import build_adapted_system, catalog, tilde_pi
from .scalars import format_scalar
from .seminorm_lab import verify_domination
from .sheaf import LocalSection, Mismatch, OpenRegion, glue

FORMATS = ("text", "json", "csv")
MAX_NODES_CAP = 4096
MAX_N_TRUNC = 64
MAX_ORDER = 4


class UsageError(NCSmoothError):
    code = "usage"


@dataclass
class RunConfig:
    subcommand: str
    args: list = field(default_factory=list)
    input: str | None = None
    format: str = "text"
    seed: int = 0
    n_trunc: int | None = None
    box: str | None = None
    order: int = 0
    s_max: float = 1e5
    nodes: int = calculus.MAX_NODES
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}", allowed=list(FORMATS))
        if not 32 <= self.nodes <= MAX_NODES_CAP:
            raise UsageError("--nodes must lie in [32, %d]" % MAX_NODES_CAP, nodes=self.nodes)
        if self.n_trunc is not None and not 0 <= self.n_trunc <= MAX_N_TRUNC:
            raise UsageError("--n-trunc must lie in [0, %d]" % MAX_N_TRUNC, n_trunc=self.n_trunc)
        if not 0 <= self.order <= MAX_ORDER:
            raise UsageError("--order must lie in [0, %d]" % MAX_ORDER, order=self.order)
        if not 1.0 <= self.s_max <= 1e8:
            raise UsageError("--s-max must lie in [1, 1e8]", s_max=self.s_max)


# -- output helpers ----------------------------------------------------------------
def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str)


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(x) for x in r])
    return buf.getvalue().rstrip("\n")


def _num(x):
    if isinstance(x, float):
        return repr(x)
    return x


def _g(x: float) -> str:
    return f"{x:.10g}"


def _complex_json(M: np.ndarray):
    M = np.asarray(M)
    if np.iscomplexobj(M):
        return [[[float(z.real), float(z.imag)] for z in row] for row in M]
    return [[float(x) for x in row] for row in M]


# -- inputs -------------------------------------------------------------------------
def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", path=path) from exc


def _load_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}", path=path) from exc


def resolve_algebra(ref: str | None, cfg: RunConfig):
    """(algebra, adapted system or None). ``ref`` is a catalog name or a JSON file."""
    path = cfg.input if ref is None else ref
    if path is None:
        raise UsageError("no algebra given (catalog name, JSON path or --input)")
    if os.path.exists(path):
        L = LieAlgebra.from_json(_read(path))
        return L, None
    entry = catalog(path)
    return entry.algebra, entry.system


def _system(L, system):
    return system if system is not None else build_adapted_system(L)


def _beta(text: str | None, size: int) -> tuple:
    if text is None:
        return (0,) * size
    try:
        beta = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ParseError(f"bad multi-index {text!r}") from exc
    if len(beta) != size or min(beta, default=0) < 0:
        raise ParseError("multi-index has wrong length or a negative entry", beta=text, expected=size)
    return beta


def _box(text: str | None, k: int) -> CompactBox:
    if text is None:
        return CompactBox((0,) * k, (1,) * k)
    try:
        box = CompactBox.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad box {text!r}: {exc}") from exc
    if box.k != k:
        raise ParseError("box dimension differs from the number of complement variables", box=text, k=k)
    return box


def _matrix(data) -> np.ndarray:
    try:
        rows = [[complex(parse_scalar_any(x)) for x in row] for row in data]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad matrix: {exc}") from exc
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ParseError("matrix must be square and nonempty")
    M = np.array(rows)
    return M.real if not M.imag.any() else M


def parse_scalar_any(x):
    if isinstance(x, (int, float)):
        return x
    if isinstance(x, list) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    return float(Fraction(str(x).strip()))


def _matrices(cfg: RunConfig, key: str = "matrix"):
    inline = cfg.extra.get("matrix")
    if inline:
        try:
            data = [json.loads(t) for t in inline]
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad --matrix JSON: {exc}") from exc
        return [_matrix(d) for d in data], {}
    if cfg.input is None:
        raise UsageError("give --matrix or --input")
    doc = _load_json(cfg.input)
    if isinstance(doc, list):
        return [_matrix(doc)], {}
    if not isinstance(doc, dict):
        raise ParseError("input must be a matrix or an object")
    if "matrices" in doc:
        return [_matrix(d) for d in doc["matrices"]], doc
    if key in doc:
        return [_matrix(doc[key])], doc
    raise ParseError("input has no 'matrix' or 'matrices' field")


# -- subcommands -------------------------------------------------------------------
def cmd_check(cfg: RunConfig):
    L, _ = resolve_algebra(cfg.args[0] if cfg.args else None, cfg)
    report = {"dim": L.m, "mode": L.mode, "jacobi": True, "solvable": bool(L.is_solvable),
              "nilpotent": bool(L.is_nilpotent), "triangular": False, "witness": None}
    try:
        cert = triangular_flag(L)
        report["triangular"] = True
        report["flag_eigenvalues"] = [[format_scalar(c, L.K) for c in f] for f in cert.functionals]
        report["split"] = L.split
    except NotTriangular as exc:
        w = exc.payload.get("witness")
        report["witness"] = L.labels[w] if isinstance(w, int) else w
    except NotSolvable:
        pass
    if cfg.format == "json":
        return _dump(report), 0
    yn = lambda b: "yes" if b else "no"
    head = f"solvable: {yn(report['solvable'])}, triangular: {yn(report['triangular'])}"
    if report["witness"] is not None:
        head += f", witness {report['witness']}"
    lines = [head, f"nilpotent: {yn(report['nilpotent'])}", "jacobi: ok", f"dimension: {L.m}"]
    if report["triangular"]:
        lines.append(f"complement size: {report['split']}")
    if cfg.format == "csv":
        return _csv(["key", "value"], [(k, report[k]) for k in ("dim", "solvable", "nilpotent",
                                                                  "triangular", "witness")]), 0
    return "\n".join(lines), 0


def cmd_mul(cfg: RunConfig):
    if len(cfg.args) < 2:
        raise UsageError("mul needs an algebra and at least one expression")
    L, _ = resolve_algebra(cfg.args[0], cfg)
    factors = [parse_element(t, L) for t in cfg.args[1:]]
    if cfg.n_trunc is None:
        out = factors[0]
        for f in factors[1:]:
            out = uea_multiply(out, f)
        if cfg.format == "json":
            return _dump(element_to_dict(out)), 0
        if cfg.format == "csv":
            return _csv(["exponent", "coefficient"],
                        [(" ".join(map(str, a)), format_scalar(c, L.K)) for a, c in sorted(out.terms.items())]), 0
        return format_element(out), 0
    k = L.split if L.split is not None else L.m
    els = [from_uea(f, k, cfg.n_trunc) for f in factors]
    out = els[0]
    for e in els[1:]:
        out = nc_multiply(out, e)
    if cfg.format == "json":
        return _dump(nc_to_dict(out)), 0
    return format_nc(out), 0


def cmd_adapt(cfg: RunConfig):
    L, system = resolve_algebra(cfg.args[0] if cfg.args else None, cfg)
    S = _system(L, system)
    if cfg.format == "json":
        return _dump(S.to_dict()), 0
    K = S.algebra.K
    lines = [f"complement size k = {S.k}"]
    for lab, row in zip(S.algebra.labels, S.rows):
        coords = ", ".join(format_scalar(c, K) for c in row)
        lines.append(f"{lab} = ({coords})")
    for r, pi in sorted(S.reps.items()):
        mu = ", ".join(format_scalar(c, K) for c in S.mu.get(r, ()))
        lines.append(f"pi_{r + 1}: dim {pi.d}, mu = ({mu})")
    return "\n".join(lines), 0


def _matrix_text(M, K) -> list[str]:
    rows = M.to_Matrix().tolist() if hasattr(M, "to_Matrix") else M
    return ["  [" + ", ".join(format_scalar(K.convert(x), K) for x in row) + "]" for row in rows]


def cmd_rep(cfg: RunConfig):
    L, system = resolve_algebra(cfg.args[0] if cfg.args else None, cfg)
    S = _system(L, system)
    beta = _beta(cfg.extra.get("beta"), S.m - S.k)
    pi = S.rep_for(beta)
    A = S.algebra
    if len(cfg.args) < 2:
        if cfg.format == "json":
            return _dump(pi.to_dict()), 0
        lines = [f"representation for beta={list(beta)}: dim {pi.d}"]
        for lab, M in zip(A.labels, pi.mats):
            lines.append(f"{lab}:")
            lines.extend(_matrix_text(M, A.K))
        return "\n".join(lines), 0
    a = parse_element(cfg.args[1], A, S.k)
    F = tilde_pi(pi, a, S.k)
    entries = {f"{i + 1},{j + 1}": str(f.as_expr()) if hasattr(f, "as_expr") else str(f)
               for (i, j), f in sorted(F.entries.items())}
    if cfg.format == "json":
        return _dump({"beta": list(beta), "dim": pi.d, "entries": entries}), 0
    if cfg.format == "csv":
        return _csv(["entry", "symbol"], sorted(entries.items())), 0
    return "\n".join([f"symbol of {cfg.args[1]} at beta={list(beta)} (dim {pi.d})"]
                     + [f"({ij}): {v}" for ij, v in entries.items()]), 0


def _element(text: str, S, N) -> NCFunctionElement:
    a = parse_element(text, S.algebra, S.k)
    return from_uea(a, S.k, N)


def cmd_seminorm(cfg: RunConfig):
    if len(cfg.args) < 2:
        raise UsageError("seminorm needs an algebra and an expression")
    L, system = resolve_algebra(cfg.args[0], cfg)
    k = L.split if L.split is not None else L.m
    a = from_uea(parse_element(cfg.args[1], L, k), k, cfg.n_trunc)
    box = _box(cfg.box, k)
    betas = [_beta(cfg.extra["beta"], L.m - k)] if cfg.extra.get("beta") else sorted(a.terms)
    rows = [(list(b), nc_seminorm(a, b, box, cfg.order)) for b in betas]
    if cfg.format == "json":
        return _dump({"box": str(box), "order": cfg.order,
                      "values": [{"beta": b, "value": v} for b, v in rows]}), 0
    if cfg.format == "csv":
        return _csv(["beta", "value"], [(" ".join(map(str, b)), v) for b, v in rows]), 0
    return "\n".join(f"beta={b}: {_g(v)}" for b, v in rows), 0


def random_element(S, rng: random.Random, beta_degree: int = 2, poly_degree: int = 2,
                   terms: int = 3) -> NCFunctionElement:
    """Random polynomial element with small rational coefficients (used by ``dominate``)."""
    k, n = S.k, S.m - S.k
    R = poly_ring(S.algebra.K, k)
    betas = [b for b in _indices(n, beta_degree)]
    out = {}
    for _ in range(terms):
        beta = rng.choice(betas)
        f = R.zero
        for mono in _indices(k, poly_degree):
            if rng.random() < 0.5:
                f += R({mono: S.algebra.K.convert(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))})
        if f:
            out[beta] = out.get(beta, R.zero) + f
    if not out:
        out[betas[0]] = R.one
    return NCFunctionElement(S.algebra, out, k)


def _indices(n: int, degree: int):
    from .coeffs import multi_indices
    return [a for d in range(degree + 1) for a in multi_indices(n, d)]


def cmd_dominate(cfg: RunConfig):
    L, system = resolve_algebra(cfg.args[0] if cfg.args else None, cfg)
    S = _system(L, system)
    box = _box(cfg.box, S.k)
    if len(cfg.args) >= 2:
        elements = [(cfg.args[1], _element(cfg.args[1], S, cfg.n_trunc))]
    else:
        rng = random.Random(cfg.seed)
        count = int(cfg.extra.get("count") or 5)
        elements = []
        for i in range(count):
            a = random_element(S, rng)
            elements.append((format_nc(a), a))
    if cfg.extra.get("beta"):
        betas = [_beta(cfg.extra["beta"], S.m - S.k)]
    else:
        betas = None
    rows = []
    for text, a in elements:
        for beta in betas or sorted(a.terms):
            r = verify_domination(a, beta, box, cfg.order, S)
            rows.append({"element": text, "beta": list(beta), **r})
    ok = all(r["pass"] for r in rows)
    status = 0 if ok else 1
    if cfg.format == "json":
        return _dump({"all_pass": ok, "checks": rows}), status
    if cfg.format == "csv":
        return _csv(["element", "beta", "lhs", "rhs", "C", "pass"],
                    [(r["element"], " ".join(map(str, r["beta"])), r["lhs"], r["rhs"], r["C"], r["pass"])
                     for r in rows]), status
    lines = [f"{r['element']} beta={r['beta']}: lhs {_g(r['lhs'])} <= rhs {_g(r['rhs'])} "
             f"(C={_g(r['C'])}) {'PASS' if r['pass'] else 'FAIL'}" for r in rows]
    return "\n".join(lines), status


def cmd_growth(cfg: RunConfig):
    (b,), _ = _matrices(cfg)
    rep = calculus.exp_growth_scan(b, s_max=cfg.s_max)
    if cfg.format == "csv":
        return _csv(["s", "norm"], rep.table), 0
    if cfg.format == "json":
        return _dump(rep.to_dict()), 0
    return "\n".join([f"verdict: {rep.verdict}", f"alpha: {_g(rep.alpha)}", f"K: {_g(rep.K)}",
                      f"fit residual: {_g(rep.residual)}", f"tail slope: {_g(rep.tail_slope)}"]), 0


def cmd_resolvent(cfg: RunConfig):
    (b,), _ = _matrices(cfg)
    rep = calculus.resolvent_scan(b)
    if cfg.format == "csv":
        return _csv(["re", "im", "norm"], rep["table"]), 0
    if cfg.format == "json":
        return _dump(rep), 0
    return "\n".join([f"gamma_near: {_g(rep['gamma_near'])}", f"gamma_far: {_g(rep['gamma_far'])}",
                      "real parts: " + ", ".join(_g(x) for x in rep["re_values"])]), 0


def _poly_from_json(spec: dict, m: int):
    R = poly_ring(__import__("sympy").QQ, m)
    terms = {}
    for key, val in spec.items():
        mono = tuple(int(x) for x in key.split(","))
        if len(mono) != m:
            raise ParseError("polynomial exponent has wrong length", exp=key, variables=m)
        terms[mono] = Fraction(str(val))
    return R({mo: R.domain.convert(c) for mo, c in terms.items()})


def cmd_fc(cfg: RunConfig):
    bs, doc = _matrices(cfg)
    m = len(bs)
    method = cfg.extra.get("method") or doc.get("method", "quadrature")
    weyl = bool(cfg.extra.get("weyl") or doc.get("weyl", False))
    symbol = doc.get("symbol") or {"kind": "gaussian"}
    if cfg.extra.get("gaussian") is not None:
        symbol = {"kind": "gaussian", "exponents": [int(x) for x in cfg.extra["gaussian"].split(",")]}
    if cfg.extra.get("poly") is not None:
        try:
            symbol = {"kind": "polynomial", "coeffs": json.loads(cfg.extra["poly"])}
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad --poly JSON: {exc}") from exc
    kind = symbol.get("kind")
    info = {}
    if kind == "gaussian":
        exps = symbol.get("exponents", [0] * m)
        eps = float(symbol.get("eps", 1.0))
        if len(exps) != m:
            raise ParseError("one exponent per matrix required", exponents=exps, matrices=m)
        if method == "taylor":
            out = calculus.ordered_fc_taylor(calculus.gaussian_poly(exps, eps), bs)
        else:
            run = calculus.weyl_fc_quadrature if weyl else calculus.ordered_fc_quadrature
            out, info = run(None, bs, fhat=calculus.gaussian_poly_fourier(exps, eps), detail=True,
                            max_nodes=cfg.nodes)
    elif kind == "polynomial":
        p = _poly_from_json(symbol.get("coeffs", {}), m)
        if method == "taylor":
            out = calculus.ordered_monomial_value(p, bs)
        else:
            out = calculus.polynomial_fc(p, bs, protocol=symbol.get("protocol", "cutoff"), weyl=weyl,
                                         max_nodes=cfg.nodes)
    else:
        raise ParseError(f"unknown symbol kind {kind!r}", allowed=["gaussian", "polynomial"])
    if cfg.format == "json":
        return _dump({"result": _complex_json(out), "method": method, "weyl": weyl, **info}), 0
    if cfg.format == "csv":
        return _csv(["row", "col", "re", "im"],
                    [(i, j, float(np.real(z)), float(np.imag(z))) for (i, j), z in np.ndenumerate(out)]), 0
    rows = ["[" + ", ".join(_g(float(z)) if not np.iscomplexobj(out) else f"{_g(z.real)}{z.imag:+.10g}j"
                            for z in row) + "]" for row in out]
    return "\n".join(rows), 0


def cmd_sheaf(cfg: RunConfig):
    if cfg.input is None:
        raise UsageError("sheaf needs --input with a cover description")
    doc = _load_json(cfg.input)
    try:
        ref = doc["algebra"]
        entries = doc["cover"]
        holo = doc.get("mode", "smooth") == "holomorphic"
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed cover description: {exc}") from exc
    if isinstance(ref, dict):
        L = LieAlgebra.from_dict(ref)
    else:
        L = catalog(ref).algebra
    if holo and L.mode != "complex":
        L = LieAlgebra.from_dict({**L.to_dict(), "mode": "complex"})
    k = int(doc.get("split", L.split if L.split is not None else L.m))
    mode = "holomorphic" if holo else "smooth"
    cover, sections = [], []
    for e in entries:
        try:
            U = OpenRegion.parse(e["region"], complex_vars=holo)
            a = parse_element(e["section"], L, k)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed cover entry: {exc}") from exc
        cover.append(U)
        sections.append(LocalSection(from_uea(a, k, None, mode), U))
    V = OpenRegion.parse(doc["target"], complex_vars=holo) if doc.get("target") else None
    res = glue(cover, sections, V)
    if isinstance(res, Mismatch):
        out = res.to_dict()
        return (_dump(out) if cfg.format == "json" else
                f"mismatch between regions {out['pair'][0]} and {out['pair'][1]} at beta={out['beta']}, "
                f"witness ({', '.join(out['witness'])}), level {out['level']}"), 1
    report = {"glued": True, "level": res.level, "domain": str(res.domain), "section": format_nc(res.element)}
    if cfg.format == "json":
        return _dump(report), 0
    return f"glued on {report['domain']} ({report['level']}): {report['section']}", 0


def cmd_demo_e2(cfg: RunConfig):
    from .demo import DEFAULT_DEGREES, demo_e2_blowup
    m_list = [int(x) for x in (cfg.extra.get("m") or "2,4,8").split(",")]
    degrees = [int(x) for x in cfg.extra["degrees"].split(",")] if cfg.extra.get("degrees") else DEFAULT_DEGREES
    rows = demo_e2_blowup(m_list, degrees)
    cols = ["m", "degree", "residual", "sup_g", "sup_target", "relative_gap", "sup_error", "fit_ok"]
    if cfg.format == "json":
        return _dump(rows), 0
    if cfg.format == "csv":
        return _csv(cols, [[r[c] for c in cols] for r in rows]), 0
    lines = ["   m  deg     residual        sup|g|   sup|target|   rel.gap   fit"]
    for r in rows:
        lines.append(f"{r['m']:4d} {r['degree']:4d} {r['residual']:12.4e} {r['sup_g']:13.6f} "
                     f"{r['sup_target']:13.6f} {r['relative_gap']:9.2e}   {'ok' if r['fit_ok'] else 'no'}")
    return "\n".join(lines), 0


COMMANDS = {
    "check": cmd_check, "mul": cmd_mul, "adapt": cmd_adapt, "rep": cmd_rep, "seminorm": cmd_seminorm,
    "dominate": cmd_dominate, "growth": cmd_growth, "resolvent": cmd_resolvent, "fc": cmd_fc,
    "sheaf": cmd_sheaf, "demo-e2": cmd_demo_e2,
}


def run(cfg: RunConfig) -> tuple[str, int]:
    """Execute one subcommand; returns (report text, exit status)."""
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except NCSmoothError as exc:
        return _dump(exc.to_dict()), 2
    except (ValueError, KeyError, TypeError, ZeroDivisionError, ArithmeticError) as exc:
        return _dump({"error": "bad_input", "message": str(exc), "kind": type(exc).__name__}), 2


# -- argument parsing --------------------------------------------------------------
class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", help="input file (algebra, matrix, cover description)")
    common.add_argument("--format", default="text", choices=FORMATS)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--n-trunc", type=int, default=None, help="n-degree truncation N")
    common.add_argument("--box", help="compact box, e.g. 0:1,-1:2")
    common.add_argument("--order", type=int, default=0, help="derivative order l")
    common.add_argument("--s-max", type=float, default=1e5)
    common.add_argument("--nodes", type=int, default=calculus.MAX_NODES, help="quadrature node cap per axis")
    p = _Parser(prog="ncsmooth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    helps = {
        "check": "Jacobi, solvable, nilpotent and triangular checks",
        "mul": "product in U(g), or truncated product with --n-trunc",
        "adapt": "adapted basis and representations",
        "rep": "representation for --beta, or the matrix symbol of an element",
        "seminorm": "coefficient seminorms |a|_{beta,box,order}",
        "dominate": "domination inequality (random elements when no expression is given)",
        "growth": "polynomial growth scan of exp(isb)",
        "resolvent": "resolvent norms off the real axis",
        "fc": "ordered functional calculus",
        "sheaf": "glue local sections described in --input",
        "demo-e2": "e2 blow-up table",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("args", nargs="*")
        if name in ("rep", "seminorm", "dominate"):
            sp.add_argument("--beta", help="nilradical multi-index, e.g. 1,0")
        if name == "dominate":
            sp.add_argument("--count", type=int, default=5)
        if name in ("growth", "resolvent", "fc"):
            sp.add_argument("--matrix", action="append", help="matrix as JSON rows (repeat for fc)")
        if name == "fc":
            sp.add_argument("--method", choices=("quadrature", "taylor"))
            sp.add_argument("--weyl", action="store_true")
            sp.add_argument("--gaussian", help="exponents n of x^n exp(-|x|^2/2), e.g. 1,0")
            sp.add_argument("--poly", help='polynomial symbol as JSON, e.g. {"1,0": "2"}')
        if name == "demo-e2":
            sp.add_argument("--m", help="comma-separated region sizes")
            sp.add_argument("--degrees", help="comma-separated fit degrees")
    return p


_EXTRA = ("beta", "count", "matrix", "method", "weyl", "gaussian", "poly", "m", "degrees")


_VALUE_OPTIONS = ("--box", "--matrix", "--beta", "--poly")


def _attach_negative_values(argv: list[str]) -> list[str]:
    """``--box -1:1`` -> ``--box=-1:1`` so argparse does not read the value as an option."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def config_from_args(argv: Sequence[str]) -> RunConfig:
    ns, rest = build_parser().parse_known_args(_attach_negative_values(list(argv)))
    unknown = [t for t in rest if t.startswith("--")]
    if unknown:
        raise UsageError("unrecognized arguments: " + " ".join(unknown))
    # positionals that follow options end up in ``rest``
    ns.args = list(ns.args) + rest
    extra = {k: getattr(ns, k) for k in _EXTRA if hasattr(ns, k)}
    return RunConfig(ns.subcommand, ns.args, ns.input, ns.format, ns.seed, ns.n_trunc, ns.box,
                     ns.order, ns.s_max, ns.nodes, extra)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
    except NCSmoothError as exc:
        print(_dump(exc.to_dict()))
        return 2
    text, status = run(cfg)
    print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())

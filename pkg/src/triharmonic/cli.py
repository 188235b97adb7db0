"""Command-line front end.

Exit codes: 0 pass, 1 bad input or usage, 2 a check failed, 3 no solution found.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import named
from .algebra import AlgebraParams, associativity_check, homomorphism_check, v_map
from .errors import EmptyGrid, NoSolutionFound, TriharmonicError
from .fields import first_integral_check, lamellarize
from .grid import GridSpec, GridTable, read_csv, read_json, sample_grid, stencils, to_csv, to_json
from .harmonic import AffineMap, SolverConfig, harmonicity_residual, solve_matrix, solve_params, system_residual
from .poly import PolyField, format_poly
from .pretwisted import PhiFunction, PhiPoly, cr_residual
from .serialize import (
    SpecError,
    candidates_to_json,
    field_from_json,
    function_from_json,
    loads,
    map_from_json,
    params_from_json,
)
from .scalars import format_scalar

EXIT_OK, EXIT_INPUT, EXIT_CHECK, EXIT_NO_SOLUTION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2, which means "check failed" here
        raise UsageError(f"{self.prog}: {message}")


def _num(x: Any) -> str:
    """Stable text for report values."""
    if isinstance(x, float):
        return "nan" if math.isnan(x) else format(x, ".17g")
    return str(format_scalar(x))


# -- input resolution ----------------------------------------------------------------


def _read_doc(ref: str) -> Any:
    """JSON from a file path, or inline when ``ref`` starts with ``{`` or ``[``."""
    if ref.lstrip().startswith(("{", "[")):
        return loads(ref)
    try:
        text = Path(ref).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read {ref}: {exc.strerror}") from exc
    return loads(text)


def _params(ref: str) -> AlgebraParams:
    if named.is_named(ref):
        try:
            return named.params(ref)
        except KeyError as exc:
            raise SpecError(str(exc.args[0])) from exc
    return params_from_json(_read_doc(ref))


def _matrix(ref: str) -> AffineMap:
    if named.is_named(ref):
        try:
            return named.affine_map(ref)
        except KeyError as exc:
            raise SpecError(str(exc.args[0])) from exc
    return map_from_json(_read_doc(ref))


def _field(ref: str) -> tuple[Any, bool]:
    """Resolve a field spec to ``(PolyField | PhiFunction | GridTable, lamellar)``."""
    if named.is_named(ref):
        try:
            return named.field(ref)
        except KeyError as exc:
            raise SpecError(str(exc.args[0])) from exc
    path = Path(ref)
    if path.suffix == ".csv":
        try:
            with path.open(encoding="utf-8") as fh:
                return read_csv(fh), False
        except (OSError, ValueError, StopIteration) as exc:
            raise SpecError(f"cannot read grid table {ref}: {exc}") from exc
    doc = _read_doc(ref)
    if isinstance(doc, dict) and "rows" in doc and "columns" in doc:
        try:
            return read_json(io.StringIO(json.dumps(doc))), False
        except ValueError as exc:
            raise SpecError(f"bad grid table: {exc}") from exc
    if isinstance(doc, dict) and doc.get("kind") == "polyfield":
        return field_from_json(doc), bool(doc.get("lamellar", False))
    return function_from_json(doc), bool(doc.get("lamellar", False) if isinstance(doc, dict) else False)


def _grid(ref: str) -> GridSpec:
    doc = _read_doc(ref)
    try:
        return GridSpec.from_json(doc)
    except (KeyError, TypeError) as exc:
        raise SpecError('grid spec must be {"min": [...], "max": [...], "n": [...]}') from exc
    except ValueError as exc:
        if isinstance(exc, EmptyGrid):
            raise
        raise SpecError(str(exc)) from exc


def _vector(text: str) -> list[Fraction]:
    try:
        parts = [Fraction(p.strip()) for p in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"bad vector {text!r}") from exc
    if len(parts) != 3:
        raise SpecError(f"vector {text!r} needs three components")
    return parts


# -- output ----------------------------------------------------------------------------


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- algebra check ---------------------------------------------------------------------


def cmd_algebra_check(args) -> int:
    P = _params(args.params)
    assoc = associativity_check(P, tol=args.tolerance)
    hom = homomorphism_check(P, pairs=args.pairs, seed=args.seed, tol=args.tolerance)
    ok = assoc.passed and hom.passed
    if args.format == "json":
        doc = {
            "p": [format_scalar(v) for v in P.free],
            "p789": [format_scalar(v) for v in (P.p7, P.p8, P.p9)],
            "associative": assoc.passed,
            "associativity_failures": assoc.details["failures"],
            "homomorphism": hom.passed,
            "homomorphism_pairs": args.pairs,
            "exact": assoc.exact,
            "passed": ok,
        }
        _emit(json.dumps(doc, indent=1) + "\n", args.out)
    else:
        lines = [
            f"p7={_num(P.p7)} p8={_num(P.p8)} p9={_num(P.p9)}, associative: {'yes' if assoc.passed else 'no'}",
            f"representation homomorphism: {'yes' if hom.passed else 'no'} ({args.pairs} pairs)",
        ]
        if assoc.details["failures"]:
            lines.append("failing triples: " + " ".join(f"({i},{j},{k})" for i, j, k in assoc.details["failures"]))
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_CHECK


# -- phi solve / verify ----------------------------------------------------------------


def cmd_phi_solve(args) -> int:
    if (args.matrix is None) == (args.params is None):
        raise UsageError("phi solve: give exactly one of --matrix or --params")
    cfg = SolverConfig(restarts=args.restarts, max_iterations=args.max_iterations,
                       tolerance=args.tolerance, seed=args.seed)
    try:
        if args.matrix is not None:
            phi = _matrix(args.matrix)
            if phi.is_zero():
                raise SpecError("matrix must be nonzero")
            cands = solve_params(phi, cfg)
            doc = candidates_to_json(cands, "p")
        else:
            cands = solve_matrix(_params(args.params), cfg)
            doc = candidates_to_json(cands, "A")
    except NoSolutionFound as exc:
        sys.stderr.write(f"no solution: {exc}\n")
        return EXIT_NO_SOLUTION
    _emit(json.dumps(doc, indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_phi_verify(args) -> int:
    phi = _matrix(args.matrix)
    P = _params(args.params)
    h = harmonicity_residual(phi, P)
    x = list(P.free) + [P.p7, P.p8, P.p9]
    rows = system_residual(x, phi)
    tol = 0.0 if _exact_inputs(phi, P) else args.tolerance
    h_ok = all(abs(float(v)) <= tol for v in h)
    s_ok = all(abs(float(r)) <= tol for r in rows)
    doc = {
        "harmonicity_residual": [_num(v) for v in h],
        "system_residual": [_num(v) for v in rows],
        "harmonic": h_ok,
        "system": s_ok,
        "passed": h_ok and s_ok,
    }
    if args.format == "json":
        _emit(json.dumps(doc, indent=1) + "\n", args.out)
    else:
        _emit(f"harmonicity residual: ({', '.join(doc['harmonicity_residual'])}) "
              f"{'pass' if h_ok else 'fail'}\n"
              f"system residual: ({', '.join(doc['system_residual'])}) {'pass' if s_ok else 'fail'}\n", args.out)
    return EXIT_OK if doc["passed"] else EXIT_CHECK


def _exact_inputs(phi: AffineMap, P: AlgebraParams) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in list(P.free) + [a for r in phi.A for a in r])


# -- field verify -----------------------------------------------------------------------


def _probes(seed: int, count: int, exact: bool) -> list[tuple]:
    rng = random.Random(seed)
    if exact:
        return [tuple(Fraction(rng.randint(-16, 16), 8) for _ in range(3)) for _ in range(count)]
    return [tuple(rng.uniform(-1, 1) for _ in range(3)) for _ in range(count)]


def _fd_laplacian(F: Any, q: Sequence[float], h: float) -> list[float]:
    base = [float(c) for c in F(tuple(q))]
    out = [-6 * b for b in base]
    for a in range(3):
        for s in (h, -h):
            p = list(map(float, q))
            p[a] += s
            v = F(tuple(p))
            for i in range(3):
                out[i] += float(v[i])
    return [o / h**2 for o in out]


def _check(name: str, status: str, value: Any, **extra) -> dict:
    return {"name": name, "status": status, "value": value, **extra}


def _verify_poly(F: PolyField, lamellar: bool, args) -> list[dict]:
    checks = []
    if args.laplacian:
        lap = F.laplacian()
        checks.append(_check("laplacian", "pass" if lap.is_zero() else "fail",
                             [format_poly(c) for c in lap], exact=True))
    if args.cr:
        rep = cr_residual(F, probes=_probes(args.seed, args.probes, True), h=args.h)
        checks.append(_cr_check(rep))
    strict = lamellar or args.expect_lamellar
    if args.div:
        d = F.divergence()
        checks.append(_check("div", ("pass" if d.is_zero() else "fail") if strict else "info",
                             format_poly(d), exact=True))
    if args.curl:
        c = F.curl()
        checks.append(_check("curl", ("pass" if c.is_zero() else "fail") if strict else "info",
                             [format_poly(p) for p in c], exact=True))
    for w in args.first_integral or []:
        wv = _vector(w)
        p = first_integral_check(F, wv)
        checks.append(_check(f"first-integral({w})", "pass" if p.is_zero() else "fail", format_poly(p), exact=True))
    return checks


def _cr_check(rep) -> dict:
    return _check("cr", "pass" if rep.passed and rep.rank_consistent else "fail", _num(rep.max_abs),
                  exact=rep.exact, rows=[_num(v) for v in rep.residuals],
                  reduced=None if rep.reduced is None else [_num(v) for v in rep.reduced],
                  first_failure=rep.first_failure, rank_consistent=rep.rank_consistent)


def _verify_function(F: PhiFunction, lamellar: bool, args) -> list[dict]:
    if isinstance(F, PhiPoly):
        return _verify_poly(F.expand(), lamellar, args)
    checks = []
    probes = _probes(args.seed, args.probes, False)
    ctx = F.ctx
    sampler = F
    if lamellar:
        sampler = lambda q: v_map(F(q))  # noqa: E731
    if args.laplacian:
        worst = 0.0
        for q in probes:
            worst = max(worst, max(abs(v) for v in _fd_laplacian(sampler, q, args.lap_h)))
        checks.append(_check("laplacian", "pass" if worst <= args.lap_tol else "fail", _num(worst), exact=False))
    if args.cr:
        if lamellar:
            raise SpecError("--cr applies to the function itself, not its lamellar image")
        rep = cr_residual(F, ctx.params, ctx.phi, probes, h=args.h, tol=args.cr_tol)
        checks.append(_cr_check(rep))
    strict = lamellar or args.expect_lamellar
    for name, want in (("div", args.div), ("curl", args.curl)):
        if not want:
            continue
        worst = 0.0
        for q in probes:
            J = _fd_jac(sampler, q, args.h)
            vals = [J[0][0] + J[1][1] + J[2][2]] if name == "div" else \
                [J[2][1] - J[1][2], J[0][2] - J[2][0], J[1][0] - J[0][1]]
            worst = max(worst, max(abs(v) for v in vals))
        status = ("pass" if worst <= args.cr_tol else "fail") if strict else "info"
        checks.append(_check(name, status, _num(worst), exact=False))
    for w in args.first_integral or []:
        wv = [float(c) for c in _vector(w)]
        worst = max(abs(sum(wv[i] * float(sampler(q)[i]) for i in range(3))) for q in probes)
        checks.append(_check(f"first-integral({w})", "pass" if worst <= args.cr_tol else "fail", _num(worst), exact=False))
    return checks


def _fd_jac(f, q, h):
    J = [[0.0] * 3 for _ in range(3)]
    for a in range(3):
        qp, qm = list(map(float, q)), list(map(float, q))
        qp[a] += h
        qm[a] -= h
        fp, fm = f(tuple(qp)), f(tuple(qm))
        for i in range(3):
            J[i][a] = (float(fp[i]) - float(fm[i])) / (2 * h)
    return J


def _verify_table(T: GridTable, args) -> list[dict]:
    S = stencils(T.values, T.spec)
    stats = GridTable(T.points, T.values, S, T.spec).stats()
    checks = []
    if args.laplacian:
        checks.append(_check("laplacian", "pass" if stats["lap"] <= args.lap_tol else "fail", _num(stats["lap"]),
                             exact=False, grid=True))
    strict = args.expect_lamellar
    for name in ("div", "curl"):
        if getattr(args, name):
            status = ("pass" if stats[name] <= args.lap_tol else "fail") if strict else "info"
            checks.append(_check(name, status, _num(stats[name]), exact=False, grid=True))
    if args.cr:
        raise SpecError("--cr needs a function or polynomial field, not a sampled table")
    for w in args.first_integral or []:
        wv = np.array([float(c) for c in _vector(w)])
        worst = float(np.nanmax(np.abs(T.values @ wv)))
        checks.append(_check(f"first-integral({w})", "pass" if worst <= args.lap_tol else "fail", _num(worst),
                             exact=False, grid=True))
    return checks


def cmd_field_verify(args) -> int:
    F, lamellar = _field(args.field)
    if not any([args.laplacian, args.cr, args.div, args.curl, args.first_integral]):
        raise UsageError("field verify: request at least one check")
    if isinstance(F, GridTable):
        checks = _verify_table(F, args)
    elif isinstance(F, PolyField):
        checks = _verify_poly(F, lamellar, args)
    else:
        checks = _verify_function(F, lamellar, args)
    failed = [c for c in checks if c["status"] == "fail"]
    doc = {"field": args.field, "checks": checks, "passed": not failed,
           "first_failure": failed[0]["name"] if failed else None}
    if args.format == "json":
        _emit(json.dumps(doc, indent=1) + "\n", args.out)
    else:
        lines = [f"field: {args.field}"]
        for c in checks:
            v = c["value"]
            shown = " ; ".join(v) if isinstance(v, list) else str(v)
            line = f"{c['name']}: {c['status']} {shown}"
            if c["name"] == "cr" and c.get("first_failure"):
                line += f" (first failing row {c['first_failure']})"
            lines.append(line)
        lines.append("result: " + ("pass" if not failed else f"fail ({doc['first_failure']})"))
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_CHECK if failed else EXIT_OK


# -- field gen ----------------------------------------------------------------------------


def _function_for_gen(args) -> PhiFunction:
    if args.function:
        return function_from_json(_read_doc(args.function))
    if args.kind is None:
        raise UsageError("field gen: give --function or --kind")
    coeffs = _read_doc(args.coeffs) if args.coeffs else None
    doc: dict = {"kind": args.kind}
    if args.kind == "poly":
        if coeffs is None:
            raise UsageError("field gen: --kind poly needs --coeffs")
        doc["coeffs"] = coeffs
    elif args.kind == "rational":
        if not isinstance(coeffs, dict):
            raise SpecError('rational coefficients must be {"num": [...], "den": [...]}')
        doc.update(coeffs)
    elif coeffs is not None:
        doc["coeff"] = coeffs
    if args.params:
        doc["params"] = {"p": [format_scalar(v) for v in _params(args.params).free]}
    if args.matrix:
        phi = _matrix(args.matrix)
        doc["phi"] = {"A": [[format_scalar(a) for a in r] for r in phi.A], "k": [format_scalar(c) for c in phi.k]}
    return function_from_json(doc)


def cmd_field_gen(args) -> int:
    F = _function_for_gen(args)
    spec = _grid(args.grid)
    if isinstance(F, PhiPoly):
        target: Any = F.expand()
        if args.lamellar:
            target = lamellarize(target)
        table = sample_grid(target, spec, with_stencils=args.stencils)
    else:
        table = sample_grid(F, spec, with_stencils=False)
        if args.lamellar:
            vals = table.values
            table.values = np.stack([vals[:, 2] - vals[:, 1], vals[:, 2] - vals[:, 0], vals[:, 1] - vals[:, 0]], axis=1)
        if args.stencils:
            table.stencils = stencils(table.values, spec)
    if table.singular:
        sys.stderr.write(f"warning: {table.singular} singular points written as NaN rows\n")
    text = to_json(table) if args.format == "json" else to_csv(table)
    _emit(text, args.out)
    if args.stencils:
        stats = table.stats()
        sys.stderr.write(" ".join(f"max|{k}|={_num(v)}" for k, v in stats.items()) + "\n")
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, default_format: str = "text") -> None:
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    p.add_argument("--tolerance", type=float, default=1e-10, help="certification tolerance (default 1e-10)")
    p.add_argument("--exact", action=argparse.BooleanOptionalAction, default=True,
                   help="use exact arithmetic where available (default on)")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", default=default_format, choices=("text", "json", "csv"))


def build_parser() -> Parser:
    parser = Parser(prog="triharmonic", description="Harmonic and lamellar fields from three-dimensional algebras.")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=Parser)

    alg = groups.add_parser("algebra", help="algebra parameter checks").add_subparsers(
        dest="command", required=True, parser_class=Parser)
    p = alg.add_parser("check", help="associativity and representation check")
    p.add_argument("params", help="parameters JSON file, inline JSON, or paper:cyclic-params")
    p.add_argument("--pairs", type=int, default=100, help="random pairs for the homomorphism check")
    _common(p)
    p.set_defaults(func=cmd_algebra_check)

    phi = groups.add_parser("phi", help="harmonic affine maps").add_subparsers(
        dest="command", required=True, parser_class=Parser)
    p = phi.add_parser("solve", help="solve the harmonicity system")
    p.add_argument("--matrix", help="fix A and solve for p1..p6")
    p.add_argument("--params", help="fix p1..p6 and solve for A")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-iterations", type=int, default=200)
    _common(p, "json")
    p.set_defaults(func=cmd_phi_solve)
    p = phi.add_parser("verify", help="check a (matrix, parameters) pair")
    p.add_argument("--matrix", required=True)
    p.add_argument("--params", required=True)
    _common(p)
    p.set_defaults(func=cmd_phi_verify)

    fld = groups.add_parser("field", help="field checks and sampling").add_subparsers(
        dest="command", required=True, parser_class=Parser)
    p = fld.add_parser("verify", help="verify identities of a field")
    p.add_argument("field", help="paper:phi2, paper:V-of-phi2, a function/field JSON, or a gen table")
    p.add_argument("--laplacian", action="store_true")
    p.add_argument("--cr", action="store_true", help="pre-twisted Cauchy-Riemann rows")
    p.add_argument("--div", action="store_true")
    p.add_argument("--curl", action="store_true")
    p.add_argument("--first-integral", action="append", metavar="W", help="direction w as 'a,b,c'")
    p.add_argument("--expect-lamellar", action="store_true", help="treat nonzero div/curl as failures")
    p.add_argument("--probes", type=int, default=20)
    p.add_argument("--h", type=float, default=1e-4, help="central-difference step for first derivatives")
    p.add_argument("--lap-h", type=float, default=1e-3, help="step for the numeric Laplacian")
    p.add_argument("--cr-tol", type=float, default=1e-6)
    p.add_argument("--lap-tol", type=float, default=1e-5)
    _common(p)
    p.set_defaults(func=cmd_field_verify)
    p = fld.add_parser("gen", help="sample a field on a grid")
    p.add_argument("--kind", choices=("poly", "rational", "exp", "sin", "cos", "sinh", "cosh"))
    p.add_argument("--coeffs", help="coefficients JSON (file or inline)")
    p.add_argument("--function", help="full function JSON (file or inline)")
    p.add_argument("--matrix", help="affine map (default: the standard harmonic map)")
    p.add_argument("--params", help="algebra parameters (default: cyclic)")
    p.add_argument("--lamellar", action="store_true", help="apply the V map")
    p.add_argument("--grid", required=True, help='grid JSON {"min": [...], "max": [...], "n": [...]}')
    p.add_argument("--stencils", action="store_true", help="add div, curl and Laplacian columns")
    _common(p, "csv")
    p.set_defaults(func=cmd_field_gen)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_INPUT
    except (SpecError, EmptyGrid) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except TriharmonicError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

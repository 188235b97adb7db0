"""JSON encodings of parameters, affine maps, functions, fields and solver results.

Rationals are written as ``"num/den"`` strings so exact values survive a
round trip; JSON floats are read back as floats.
"""

from __future__ import annotations

import json
from typing import Any, Sequence

from .algebra import CYCLIC, AlgebraParams, Element
from .harmonic import EQ_A, AffineMap, Candidate
from .poly import PolyField, TriPoly
from .pretwisted import (
    TRANSCENDENTAL_KINDS,
    Context,
    PhiFunction,
    PhiPoly,
    PhiRational,
    PhiTranscendental,
)
from .scalars import format_scalar, parse_scalar


class SpecError(ValueError):
    """Malformed JSON document."""


def _scalars(values: Sequence[Any], n: int | None = None, what: str = "value") -> list[Any]:
    if not isinstance(values, (list, tuple)):
        raise SpecError(f"{what} must be a list")
    if n is not None and len(values) != n:
        raise SpecError(f"{what} must have {n} entries, got {len(values)}")
    try:
        return [parse_scalar(v) for v in values]
    except ValueError as exc:
        raise SpecError(f"{what}: {exc}") from exc


def _element(values: Any, what: str = "element") -> Element:
    return Element.of(_scalars(values, 3, what))


def _out(values) -> list[Any]:
    return [format_scalar(v) for v in values]


# -- parameters and maps ----------------------------------------------------------


def params_to_json(P: AlgebraParams) -> dict:
    return {"p": _out(P.free)}


def params_from_json(doc: Any) -> AlgebraParams:
    if not isinstance(doc, dict) or "p" not in doc:
        raise SpecError('parameters must be an object {"p": [p1, ..., p6]}')
    return AlgebraParams.of(_scalars(doc["p"], 6, "p"))


def map_to_json(phi: AffineMap) -> dict:
    return {"A": [_out(r) for r in phi.A], "k": _out(phi.k)}


def map_from_json(doc: Any) -> AffineMap:
    if not isinstance(doc, dict) or "A" not in doc:
        raise SpecError('affine map must be an object {"A": [[...], [...], [...]], "k": [...]}')
    rows = doc["A"]
    if not isinstance(rows, list) or len(rows) != 3:
        raise SpecError("A must have three rows")
    A = [_scalars(r, 3, "A row") for r in rows]
    k = _scalars(doc.get("k", [0, 0, 0]), 3, "k")
    return AffineMap.of(A, k)


def candidates_to_json(cands: Sequence[Candidate], key: str = "p") -> list[dict]:
    out = []
    for c in cands:
        if key == "A":
            value: Any = [list(c.values[r * 3:(r + 1) * 3]) for r in range(3)]
        else:
            value = list(c.values)
        item = {key: value, "residual": c.residual, "restart_index": c.restart_index}
        if c.exact_residual is not None:
            item["exact_residual"] = float(c.exact_residual)
        out.append(item)
    return out


# -- functions and fields ------------------------------------------------------------


def _context_from_json(doc: dict) -> Context:
    P = params_from_json(doc["params"]) if "params" in doc else CYCLIC
    phi = map_from_json(doc["phi"]) if "phi" in doc else EQ_A
    return Context(P, phi)


def _context_to_json(ctx: Context) -> dict:
    out: dict = {}
    if ctx.params != CYCLIC:
        out["params"] = params_to_json(ctx.params)
    if ctx.phi != EQ_A:
        out["phi"] = map_to_json(ctx.phi)
    return out


def function_from_json(doc: Any) -> PhiFunction:
    """``{"kind": "poly", "coeffs": [[c1, c2, c3], ...]}``, ``rational`` with
    ``num``/``den`` coefficient lists, or a transcendental kind with ``coeff``.
    Optional ``params`` and ``phi`` override the cyclic algebra and standard map.
    """
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SpecError('function must be an object with a "kind"')
    ctx = _context_from_json(doc)
    kind = doc["kind"]

    def poly(key):
        coeffs = doc.get(key)
        if not isinstance(coeffs, list) or not coeffs:
            raise SpecError(f'"{key}" must be a non-empty list of coefficients')
        return PhiPoly(tuple(_element(c, f"{key} coefficient") for c in coeffs), ctx)

    if kind == "poly":
        return poly("coeffs")
    if kind == "rational":
        return PhiRational(poly("num"), poly("den"))
    if kind in TRANSCENDENTAL_KINDS:
        return PhiTranscendental(kind, _element(doc.get("coeff", [1, 0, 0]), "coeff"), ctx)
    raise SpecError(f"unknown function kind {kind!r}")


def function_to_json(F: PhiFunction) -> dict:
    if isinstance(F, PhiPoly):
        doc: dict = {"kind": "poly", "coeffs": [_out(c) for c in F.coeffs]}
    elif isinstance(F, PhiRational):
        doc = {"kind": "rational", "num": [_out(c) for c in F.num.coeffs],
               "den": [_out(c) for c in F.den.coeffs]}
    elif isinstance(F, PhiTranscendental):
        doc = {"kind": F.kind, "coeff": _out(F.coeff)}
    else:
        raise TypeError(f"cannot serialize {type(F).__name__}")
    doc.update(_context_to_json(F.ctx))
    return doc


def tripoly_to_json(p: TriPoly) -> list:
    return [[*e, format_scalar(c)] for e, c in sorted(p.terms.items())]


def tripoly_from_json(terms: Any) -> TriPoly:
    if not isinstance(terms, list):
        raise SpecError("polynomial must be a list of [i, j, k, coefficient] terms")
    out: dict = {}
    for t in terms:
        if not isinstance(t, list) or len(t) != 4 or not all(isinstance(v, int) and v >= 0 for v in t[:3]):
            raise SpecError(f"bad term {t!r}")
        e = tuple(t[:3])
        out[e] = out.get(e, 0) + _scalars([t[3]], 1, "coefficient")[0]
    return TriPoly(out)


def field_to_json(F: PolyField, lamellar: bool = False) -> dict:
    doc: dict = {"kind": "polyfield", "components": [tripoly_to_json(c) for c in F]}
    if lamellar:
        doc["lamellar"] = True
    return doc


def field_from_json(doc: Any) -> PolyField:
    comps = doc.get("components") if isinstance(doc, dict) else None
    if not isinstance(comps, list) or len(comps) != 3:
        raise SpecError('polynomial field needs "components": three term lists')
    return PolyField.of(tripoly_from_json(c) for c in comps)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from exc

"""Built-in examples, addressable as ``paper:<name>`` on the command line."""

from __future__ import annotations

from .algebra import CYCLIC, AlgebraParams
from .fields import lamellarize
from .harmonic import EQ_A, AffineMap
from .poly import PolyField
from .pretwisted import phi_power


def phi2() -> PolyField:
    """Square of the standard harmonic map in the cyclic algebra."""
    return phi_power(2).expand()


def v_of_phi2() -> PolyField:
    return lamellarize(phi2())


FIELDS = {"paper:phi2": (phi2, False), "paper:V-of-phi2": (v_of_phi2, True)}
MAPS: dict[str, AffineMap] = {"paper:eqA-matrix": EQ_A}
PARAMS: dict[str, AlgebraParams] = {"paper:cyclic-params": CYCLIC}

NAMES = tuple(FIELDS) + tuple(MAPS) + tuple(PARAMS)


def is_named(ref: str) -> bool:
    return ref.startswith("paper:")


def field(name: str) -> tuple[PolyField, bool]:
    """``(field, lamellar?)``."""
    if name not in FIELDS:
        raise KeyError(f"unknown field {name!r}; known: {', '.join(FIELDS)}")
    build, lamellar = FIELDS[name]
    return build(), lamellar


def affine_map(name: str) -> AffineMap:
    if name not in MAPS:
        raise KeyError(f"unknown matrix {name!r}; known: {', '.join(MAPS)}")
    return MAPS[name]


def params(name: str) -> AlgebraParams:
    if name not in PARAMS:
        raise KeyError(f"unknown parameters {name!r}; known: {', '.join(PARAMS)}")
    return PARAMS[name]

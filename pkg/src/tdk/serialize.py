"""JSON encoding of complexes, cochains and differential cochains.

Rationals are written as integers when integral and as ``"a/b"`` strings
otherwise, so documents stay exact and diffable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Mapping

from .diffcochain import DiffCochain
from .simplicial import LATTICE, VECTOR, Cochain, Lattice, SimplicialComplex

SCHEMA_ID = "tdk/1"

__all__ = [
    "SCHEMA_ID",
    "encode_number",
    "decode_number",
    "complex_to_json",
    "complex_from_json",
    "cochain_to_json",
    "cochain_from_json",
    "diffcochain_to_json",
    "diffcochain_from_json",
    "lattice_from_rank",
]


def encode_number(x) -> int | str:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decode_number(x) -> Fraction:
    if isinstance(x, bool):
        raise ValueError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise ValueError(f"expected an integer or 'a/b' string, got {x!r}")


def _label_to_json(v):
    if isinstance(v, tuple):
        return [_label_to_json(x) for x in v]
    return v


def _label_from_json(v):
    if isinstance(v, list):
        return tuple(_label_from_json(x) for x in v)
    return v


def complex_to_json(X: SimplicialComplex) -> dict:
    doc: dict[str, Any] = {
        "vertices": [_label_to_json(v) for v in X.vertices],
        "maximal": [list(s) for s in X.maximal_simplices()],
    }
    if X.name:
        doc["name"] = X.name
    return doc


def complex_from_json(doc: Mapping) -> SimplicialComplex:
    verts = [_label_from_json(v) for v in doc["vertices"]]
    n = len(verts)
    for s in doc["maximal"]:
        if any(not isinstance(i, int) or not 0 <= i < n for i in s):
            raise ValueError(f"simplex {s} refers to a missing vertex index")
    return SimplicialComplex([[verts[i] for i in s] for s in doc["maximal"]], vertices=verts, name=doc.get("name"))


def lattice_from_rank(rank: int, dual: bool = False) -> Lattice:
    L = Lattice(rank=rank, name="Z" if rank == 1 else f"Z{rank}")
    return L.dual() if dual else L


def cochain_to_json(x: Cochain) -> list:
    return [encode_number(v) for v in x.values]


def cochain_from_json(X: SimplicialComplex, degree: int, values, coeff=LATTICE, lattice=None) -> Cochain:
    lattice = lattice or lattice_from_rank(1)
    vals = [decode_number(v) for v in values]
    if coeff == LATTICE and any(v.denominator != 1 for v in vals):
        raise ValueError("lattice-valued cochains need integer values")
    return Cochain(X, degree, vals, coeff, lattice)


def diffcochain_to_json(x: DiffCochain) -> dict:
    doc = {"p": x.p, "q": x.q, "c": cochain_to_json(x.c), "h": cochain_to_json(x.h)}
    if x.omega is not None:
        doc["omega"] = cochain_to_json(x.omega)
    return doc


def diffcochain_from_json(X: SimplicialComplex, doc: Mapping, lattice=None) -> DiffCochain:
    p, q = int(doc["p"]), int(doc["q"])
    c = cochain_from_json(X, p, doc["c"], LATTICE, lattice)
    h = cochain_from_json(X, p - 1, doc["h"], VECTOR, lattice)
    w = cochain_from_json(X, p, doc["omega"], VECTOR, lattice) if "omega" in doc else None
    return DiffCochain(p, q, c, h, w)

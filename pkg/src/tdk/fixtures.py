"""Built-in fixtures and the JSON document layer.

Every document carries ``"schema": "tdk/1"`` and a ``kind``.  Fixture
documents are canonical: :func:`emit_fixture` output reloads with
:func:`load_document` to a value equal to :func:`build_fixture`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any, Mapping, Optional

import jsonschema

from .cdga import CDGA, Generator
from .diffcochain import DiffCochain, geometric_trivialisation, dot, holonomy_class
from .hori import TDualityModel
from .poincare import EquivariantLineBundle, paper_bundle, standard_bundle, trivial_bundle
from .serialize import (
    SCHEMA_ID,
    complex_from_json,
    complex_to_json,
    diffcochain_from_json,
    diffcochain_to_json,
    lattice_from_rank,
)
from .simplicial import (
    VECTOR,
    Cochain,
    SimplicialComplex,
    ngon,
    point,
    product,
    projection,
    pullback,
    sphere,
    torus9,
)

__all__ = [
    "FIXTURES",
    "REQUIRED_FIXTURES",
    "ComplexData",
    "CDGAData",
    "PairData",
    "DiffData",
    "build_fixture",
    "emit_fixture",
    "load_document",
    "to_document",
    "validate_document",
    "SchemaError",
]


class SchemaError(ValueError):
    """Document does not match the shipped schema or cannot be built."""


@dataclass(frozen=True)
class ComplexData:
    complex: SimplicialComplex
    lattice_rank: int = 1

    def to_json(self) -> dict:
        return {**complex_to_json(self.complex), "lattice_rank": self.lattice_rank}


@dataclass(frozen=True)
class CDGAData:
    algebra: CDGA
    twist: str = "0"

    def to_json(self) -> dict:
        return {**self.algebra.to_json(), "twist": self.twist}

    def __eq__(self, other):
        return isinstance(other, CDGAData) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(json.dumps(self.to_json(), sort_keys=True))


@dataclass(frozen=True)
class PairData:
    complex: SimplicialComplex
    P: DiffCochain
    Phat: DiffCochain
    sigma: Optional[DiffCochain] = None
    lattice_rank: int = 1

    def to_json(self) -> dict:
        doc = {
            "complex": complex_to_json(self.complex),
            "lattice_rank": self.lattice_rank,
            "P": diffcochain_to_json(self.P),
            "Phat": diffcochain_to_json(self.Phat),
        }
        if self.sigma is not None:
            doc["sigma"] = diffcochain_to_json(self.sigma)
        return doc


@dataclass(frozen=True)
class DiffData:
    complex: SimplicialComplex
    cochain: DiffCochain
    lattice_rank: int = 1

    def to_json(self) -> dict:
        return {"complex": complex_to_json(self.complex), "lattice_rank": self.lattice_rank,
                "cochain": diffcochain_to_json(self.cochain)}


# -- builders ----------------------------------------------------------------


def _s2xs2():
    S2 = sphere(2)
    return product(S2, S2, name="s2xs2")


def _factor_class(P: SimplicialComplex, factor: int) -> Cochain:
    S2 = sphere(2)
    g = Cochain.indicator(S2, S2.simplices(2)[0])
    return pullback(g, P, projection(P, S2, S2, factor))


def _flat_lift(c: Cochain) -> DiffCochain:
    """``(c, 0, c)``: the cocycle with curvature equal to ``c``."""
    X = c.complex
    return DiffCochain(c.degree, c.degree, c, Cochain.zero(X, c.degree - 1, VECTOR), c.vector())


def _pair(P: SimplicialComplex, a: Cochain, b: Cochain, with_sigma: bool) -> PairData:
    x, y = _flat_lift(a), _flat_lift(b)
    sigma = geometric_trivialisation(dot(x, y)).witness if with_sigma else None
    return PairData(P, x, y, sigma)


def _t3_cdga() -> CDGAData:
    return CDGAData(CDGA([("x", 1), ("y", 1), ("z", 1)], name="t3-cdga"), "x*y*z")


def _torus_pair() -> PairData:
    X = torus9()
    a = Cochain.indicator(X, X.simplices(2)[0])
    return _pair(X, a, a, True)


_BUILDERS = {
    "point": lambda: ComplexData(point()),
    "circle-3gon": lambda: ComplexData(ngon(3)),
    "torus-9": lambda: ComplexData(torus9()),
    "t3-cdga": _t3_cdga,
    "hopf-model": lambda: TDualityModel([("u", 2)], 1, ["u"], ["0"], "0", truncation={"base": 2},
                                        name="hopf-model"),
    "poincare-standard": standard_bundle,
    "poincare-paper": paper_bundle,
    # extras
    "buscher-point": lambda: TDualityModel([], 1, ["0"], ["0"], "0", name="buscher-point"),
    "k2-model": lambda: TDualityModel([("u", 2), ("v", 2)], 2, ["u", "0"], ["0", "v"], "0",
                                      relations=["u^2", "v^2"], truncation={"base": 2}, name="k2-model"),
    "sigma-model": lambda: TDualityModel([("u", 2), ("v", 2), ("s", 3, "u*v")], 1, ["u"], ["v"], "s",
                                         relations=["u^2", "v^2"], truncation={"base": 4}, name="sigma-model"),
    "poincare-trivial": trivial_bundle,
    "t3-complex": lambda: ComplexData(product(torus9(), ngon(3), name="t3-complex")),
    "s2xs2": lambda: ComplexData(_s2xs2()),
    "holonomy-third": lambda: DiffData(ngon(3), holonomy_class(ngon(3), Fraction(1, 3))),
    "pair-torus-9": _torus_pair,
    "pair-s2xs2-ab": lambda: _pair(_s2xs2(), *(lambda P: (_factor_class(P, 0), _factor_class(P, 1)))(_s2xs2()),
                                   False),
    "pair-s2xs2-aa": lambda: _pair(_s2xs2(), *(lambda P: (_factor_class(P, 0), _factor_class(P, 0)))(_s2xs2()),
                                   True),
}

REQUIRED_FIXTURES = ("point", "circle-3gon", "torus-9", "t3-cdga", "hopf-model", "poincare-standard",
                     "poincare-paper")
FIXTURES = tuple(_BUILDERS)
MODEL_FIXTURES = ("buscher-point", "hopf-model", "k2-model", "sigma-model")


def build_fixture(name: str):
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None
    return builder()


def _kind_of(obj) -> str:
    if isinstance(obj, ComplexData):
        return "complex"
    if isinstance(obj, CDGAData):
        return "cdga"
    if isinstance(obj, TDualityModel):
        return "model"
    if isinstance(obj, EquivariantLineBundle):
        return "bundle"
    if isinstance(obj, PairData):
        return "pair"
    if isinstance(obj, DiffData):
        return "diff"
    raise TypeError(f"no document kind for {type(obj).__name__}")


def to_document(obj, name: str | None = None) -> dict:
    doc = {"schema": SCHEMA_ID, "kind": _kind_of(obj)}
    if name:
        doc["name"] = name
    body = obj.to_json()
    body.pop("name", None)
    doc.update(body)
    return doc


def emit_fixture(name: str) -> dict:
    """Canonical JSON document of a built-in fixture."""
    return to_document(build_fixture(name), name)


@lru_cache(maxsize=None)
def _schema() -> dict:
    text = resources.files("tdk").joinpath("schema/tdk.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate_document(doc: Any) -> None:
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"schema violation at {where}: {exc.message}") from None


def load_document(doc: Mapping):
    """Validate and build the in-memory value of a document."""
    validate_document(doc)
    kind = doc["kind"]
    name = doc.get("name")
    try:
        if kind == "complex":
            X = complex_from_json({**doc, "name": name})
            return ComplexData(X, int(doc.get("lattice_rank", 1)))
        if kind == "cdga":
            gens = [Generator(g["name"], int(g["degree"]), g.get("d"), g.get("label", "base"))
                    for g in doc["generators"]]
            A = CDGA(gens, doc.get("relations", ()), doc.get("truncation"), name=name)
            twist = doc.get("twist", "0")
            A.parse(twist)
            return CDGAData(A, twist)
        if kind == "model":
            return TDualityModel.from_json({**doc, "name": name})
        if kind == "bundle":
            return EquivariantLineBundle.from_json({**doc, "name": name})
        if kind in ("pair", "diff"):
            X = complex_from_json(doc["complex"])
            r = int(doc.get("lattice_rank", 1))
            if kind == "diff":
                return DiffData(X, diffcochain_from_json(X, doc["cochain"], lattice_from_rank(r)), r)
            P = diffcochain_from_json(X, doc["P"], lattice_from_rank(r))
            Phat = diffcochain_from_json(X, doc["Phat"], lattice_from_rank(r, dual=True))
            sigma = diffcochain_from_json(X, doc["sigma"]) if "sigma" in doc else None
            return PairData(X, P, Phat, sigma, r)
    except (ValueError, KeyError, TypeError) as exc:
        raise SchemaError(f"invalid {kind} document: {exc}") from None
    raise SchemaError(f"kind {kind!r} cannot be loaded as a value")

"""Curvature-level T-duality pairs and the Hori transform on invariant forms.

A :class:`TDualityModel` takes a base algebra and the curvatures ``F_i``,
``F^_i`` and ``sigma`` of a pair of rank-``k`` torus bundles.  It builds the
correspondence algebra on base, ``A_1..A_k`` (``dA_i = F_i``) and
``Â_1..Â_k`` (``dÂ_i = F^_i``) and the derived forms::

    P    = sum_i A_i Â_i
    h    = sigma - sum_i A_i F^_i
    hhat = sigma - sum_i F_i Â_i

Fiber integration puts the ascending ``A``-block in front:
``pi_*(A_1..A_k b) = b``.  The dual integration does the same with the
``Â``-block.  Under this convention the transform commutes with the twisted
differentials only up to ``(-1)^k``; :func:`verify_hori` measures that sign
instead of assuming it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cdga import CDGA, Form, Generator, exp_form, is_twisted_exact, twisted_cohomology, twisted_d
from .linalg import Matrix, rank

__all__ = [
    "TDualityModel",
    "fiber_integrate",
    "dual_fiber_integrate",
    "hori_transform",
    "reverse_hori_transform",
    "verify_hori",
    "pushforward_twist_check",
    "twist_change_check",
]

FIBER = "A"
DUAL = "Ahat"


def _names(k: int):
    if k == 1:
        return ["A"], ["Â"]
    return [f"A{i}" for i in range(1, k + 1)], [f"Â{i}" for i in range(1, k + 1)]


class ModelError(ValueError):
    pass


class TDualityModel:
    """Curvature data of a differential T-duality pair.

    ``base`` holds the base generators (:class:`~tdk.cdga.Generator` or
    tuples) with their relations and truncation; ``F``, ``Fhat`` are lists of
    ``k`` degree-2 base polynomials and ``sigma`` a degree-3 base polynomial.
    """

    def __init__(self, base: Sequence, k: int, F: Sequence[str], Fhat: Sequence[str], sigma: str = "0",
                 relations: Sequence[str] = (), truncation: Mapping[str, int] | None = None,
                 name: str | None = None):
        if k < 1:
            raise ModelError("torus rank must be at least 1")
        if len(F) != k or len(Fhat) != k:
            raise ModelError("need exactly k curvatures on each side")
        self.name = name
        self.k = k
        self.base_generators = tuple(g if isinstance(g, Generator) else Generator(*g) for g in base)
        for g in self.base_generators:
            if g.label != "base":
                raise ModelError("base generators must carry the label 'base'")
        self.F_text = tuple(str(f) for f in F)
        self.Fhat_text = tuple(str(f) for f in Fhat)
        self.sigma_text = str(sigma)
        self.base_relations = tuple(relations)
        self.base_truncation = dict(truncation or {})
        self.A_names, self.Ahat_names = _names(k)
        gens = list(self.base_generators)
        gens += [Generator(n, 1, f, FIBER) for n, f in zip(self.A_names, self.F_text)]
        gens += [Generator(n, 1, f, DUAL) for n, f in zip(self.Ahat_names, self.Fhat_text)]
        try:
            self.base = CDGA(self.base_generators, relations, truncation, name=f"{name or 'model'}-base")
            self.algebra = CDGA(gens, relations, truncation, name=name)
        except ValueError as exc:
            raise ModelError(str(exc)) from None
        alg = self.algebra
        self.A = [alg.gen(n) for n in self.A_names]
        self.Ahat = [alg.gen(n) for n in self.Ahat_names]
        self.F = [alg.parse(f) for f in self.F_text]
        self.Fhat = [alg.parse(f) for f in self.Fhat_text]
        self.sigma = alg.parse(self.sigma_text)
        for f in self.F + self.Fhat:
            if not f.is_homogeneous(2) or not self._is_base(f):
                raise ModelError("curvatures must be degree-2 base forms")
            if not f.d().is_zero():
                raise ModelError("curvatures must be closed")
        if not self.sigma.is_homogeneous(3) or not self._is_base(self.sigma):
            raise ModelError("sigma must be a degree-3 base form")
        FF = sum((f * g for f, g in zip(self.F, self.Fhat)), alg.zero())
        if self.sigma.d() != FF:
            raise ModelError(f"d(sigma) = {self.sigma.d()} but sum F_i Fhat_i = {FF}")
        self.P = sum((a * b for a, b in zip(self.A, self.Ahat)), alg.zero())
        self.h = self.sigma - sum((a * f for a, f in zip(self.A, self.Fhat)), alg.zero())
        self.hhat = self.sigma - sum((f * b for f, b in zip(self.F, self.Ahat)), alg.zero())
        if not self.h.d().is_zero() or not self.hhat.d().is_zero():
            raise ModelError("twists are not closed")

    # labelling helpers
    def _labels(self, m) -> set:
        return {g.label for a, g in zip(m, self.algebra.generators) if a}

    def _is_base(self, x: Form) -> bool:
        return all(self._labels(m) <= {"base"} for m in x.terms)

    def p_side_basis(self):
        return [m for m in self.algebra.basis if DUAL not in self._labels(m)]

    def dual_side_basis(self):
        return [m for m in self.algebra.basis if FIBER not in self._labels(m)]

    def is_p_side(self, x: Form) -> bool:
        return all(DUAL not in self._labels(m) for m in x.terms)

    def is_dual_side(self, x: Form) -> bool:
        return all(FIBER not in self._labels(m) for m in x.terms)

    def weight(self, m) -> int:
        """Base degree plus number of ``A`` minus number of ``Â``."""
        w = 0
        for a, g in zip(m, self.algebra.generators):
            if g.label == FIBER:
                w += a
            elif g.label == DUAL:
                w -= a
            else:
                w += a * g.degree
        return w

    def lemma_identity_residual(self) -> Form:
        """``dP - (h - hhat)``; zero in every valid model."""
        return self.P.d() - (self.h - self.hhat)

    def to_json(self) -> dict:
        doc = {
            "base": [{"name": g.name, "degree": g.degree, "d": g.d} for g in self.base_generators],
            "relations": list(self.base_relations),
            "truncation": dict(sorted(self.base_truncation.items())),
            "k": self.k,
            "F": list(self.F_text),
            "Fhat": list(self.Fhat_text),
            "sigma": self.sigma_text,
        }
        if self.name:
            doc["name"] = self.name
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "TDualityModel":
        base = [Generator(g["name"], int(g["degree"]), g.get("d")) for g in doc.get("base", [])]
        return cls(base, int(doc["k"]), doc["F"], doc["Fhat"], doc.get("sigma", "0"),
                   doc.get("relations", ()), doc.get("truncation"), doc.get("name"))

    def __eq__(self, other):
        return isinstance(other, TDualityModel) and self.to_json() == other.to_json()

    def __repr__(self):
        return f"TDualityModel({self.name!r}, k={self.k}, dim={self.algebra.dimension})"


def _integrate_block(model: TDualityModel, omega: Form, block: list[Form]) -> Form:
    alg = model.algebra
    (blk_m, blk_c), = _product(block, alg).terms.items()
    out = {}
    for m, c in omega.terms.items():
        if not all(m[i] >= b for i, b in enumerate(blk_m)):
            continue
        rest = tuple(a - b for a, b in zip(m, blk_m))
        _, s = alg._mul_monomials(blk_m, rest, reduce=False)
        out[rest] = out.get(rest, 0) + s * c * blk_c
    return Form(alg, out)


def _product(forms, alg):
    out = alg.one()
    for f in forms:
        out = out * f
    return out


def fiber_integrate(model: TDualityModel, omega: Form) -> Form:
    """``pi_*``: coefficient of the front ``A_1..A_k`` block."""
    return _integrate_block(model, model.algebra.parse(omega), model.A)


def dual_fiber_integrate(model: TDualityModel, omega: Form) -> Form:
    """``pi^_*``: coefficient of the front ``Â_1..Â_k`` block."""
    return _integrate_block(model, model.algebra.parse(omega), model.Ahat)


def hori_transform(model: TDualityModel, omega) -> Form:
    """``T(w) = pi_*(exp(P) w)`` for a form ``w`` without dual fiber generators."""
    omega = model.algebra.parse(omega)
    if not model.is_p_side(omega):
        raise ValueError("input contains dual fiber generators")
    return fiber_integrate(model, exp_form(model.P) * omega)


def reverse_hori_transform(model: TDualityModel, omega) -> Form:
    """``T^(w) = pi^_*(exp(sum_i Â_i A_i) w)`` for a dual-side form."""
    omega = model.algebra.parse(omega)
    if not model.is_dual_side(omega):
        raise ValueError("input contains fiber generators")
    Q = sum((b * a for a, b in zip(model.A, model.Ahat)), model.algebra.zero())
    return dual_fiber_integrate(model, exp_form(Q) * omega)


@dataclass
class HoriReport:
    model: str
    chain_map: bool
    chain_map_sign: int | None
    exact_to_exact: bool
    iso: bool
    rank: int
    dimension: int
    degree_shift: int | None
    parity_shift: bool
    involution_sign: dict
    involution_constant: bool
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "chain_map": self.chain_map,
            "chain_map_sign": self.chain_map_sign,
            "exact_to_exact": self.exact_to_exact,
            "iso": self.iso,
            "rank": self.rank,
            "dimension": self.dimension,
            "degree_shift": self.degree_shift,
            "parity_shift": self.parity_shift,
            "involution_sign": {str(k): v for k, v in sorted(self.involution_sign.items())},
            "involution_constant": self.involution_constant,
            "failures": self.failures,
        }


def verify_hori(model: TDualityModel) -> HoriReport:
    """Check the transform on a full basis of the P-side invariant complex.

    ``chain_map`` is the literal identity ``d_hhat T = T d_h``.  The report
    also gives the sign ``e`` with ``d_hhat T = e T d_h`` when one exists,
    whether ``d_h``-exact forms go to ``d_hhat``-exact forms, invertibility
    of the matrix of ``T``, the weight shift and the sign of ``T^ T`` on each
    total degree.
    """
    alg = model.algebra
    src, dst = model.p_side_basis(), model.dual_side_basis()
    failures = []
    images = {}
    plus = minus = True
    exact_ok = True
    shifts = set()
    parity_ok = True
    inv_sign: dict = {}
    inv_const = True
    for m in src:
        b = Form(alg, {m: 1})
        Tb = hori_transform(model, b)
        images[m] = Tb
        lhs = twisted_d(model.hhat, Tb)
        rhs = hori_transform(model, twisted_d(model.h, b))
        if lhs != rhs:
            plus = False
            if len(failures) < 5:
                failures.append({"basis": alg.monomial_str(m), "d_hhat_T": str(lhs), "T_d_h": str(rhs)})
        if lhs != -rhs:
            minus = False
        if not is_twisted_exact(model.hhat, hori_transform(model, twisted_d(model.h, b))):
            exact_ok = False
        for m2 in Tb.terms:
            shifts.add(model.weight(m2) - model.weight(m))
            if (alg.degree(m2) - alg.degree(m) - model.k) % 2:
                parity_ok = False
        back = reverse_hori_transform(model, Tb)
        deg = alg.degree(m)
        if back == b:
            s = 1
        elif back == -b:
            s = -1
        else:
            s = 0
        if deg in inv_sign and inv_sign[deg] != s:
            inv_const = False
        inv_sign.setdefault(deg, s)
        if s == 0:
            inv_const = False
    M = Matrix.from_columns([images[m].vector(dst) for m in src], len(dst))
    r = rank(M)
    sign = 1 if plus else (-1 if minus else None)
    return HoriReport(
        model=model.name or "",
        chain_map=plus,
        chain_map_sign=sign,
        exact_to_exact=exact_ok,
        iso=(len(src) == len(dst) == r),
        rank=r,
        dimension=len(src),
        degree_shift=shifts.pop() if len(shifts) == 1 else None,
        parity_shift=parity_ok,
        involution_sign=inv_sign,
        involution_constant=inv_const,
        failures=failures,
    )


@dataclass
class PushforwardReport:
    sign: int | None
    consistent: bool
    pi_h: str
    pihat_hhat: str
    Fhat: str
    F: str

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _sign_match(x: Form, y: Form):
    """Signs ``s`` with ``x = s y``: a set of candidates."""
    if x.is_zero() and y.is_zero():
        return {1, -1}
    return {s for s in (1, -1) if x == y.scale(s)}


def pushforward_twist_check(model: TDualityModel) -> PushforwardReport:
    """``pi_* h = s Fhat`` and ``pi^_* hhat = s F`` with one sign ``s`` (rank 1)."""
    if model.k != 1:
        raise ValueError("pushforward_twist_check needs k = 1")
    ph = fiber_integrate(model, model.h)
    qh = dual_fiber_integrate(model, model.hhat)
    signs = _sign_match(ph, model.Fhat[0]) & _sign_match(qh, model.F[0])
    if len(signs) == 1:
        s = signs.pop()
    else:
        s = None
    return PushforwardReport(s, bool(signs) or s is not None, str(ph), str(qh), str(model.Fhat[0]), str(model.F[0]))


def twist_change_check(algebra: CDGA, h, beta) -> dict:
    """Compare twisted cohomology for ``h`` and ``h + d beta``.

    ``w -> exp(-beta) w`` intertwines ``d_h`` with ``d_{h + d beta}``; this is
    checked on every basis element together with the dimension equality.
    """
    h = algebra.parse(h)
    beta = algebra.parse(beta)
    if not beta.is_homogeneous(2):
        raise ValueError("beta must be a degree-2 form")
    h2 = h + beta.d()
    e = exp_form(-beta)
    intertwines = True
    for m in algebra.basis:
        b = Form(algebra, {m: 1})
        if twisted_d(h2, e * b) != e * twisted_d(h, b):
            intertwines = False
            break
    before = twisted_cohomology(algebra, h).dims()
    after = twisted_cohomology(algebra, h2).dims()
    return {"dims_h": before, "dims_h_plus_dbeta": after, "intertwines": intertwines,
            "invariant": intertwines and before == after}

"""Finite graded-commutative differential algebras over Q.

A :class:`CDGA` is the free graded-commutative algebra on a list of
generators modulo monomial relations and per-label degree bounds.  Label
bounds model formal dimension: with ``truncation={"base": 2}`` every
monomial whose base generators have total degree above 2 vanishes.  Both
kinds of relation give a monomial ideal, so the quotient has a basis of
surviving monomials and arithmetic never needs Groebner bases.

Monomials are exponent tuples in generator order.  Products carry the
Koszul sign of sorting generators back into that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .expr import evaluate
from .linalg import Matrix, kernel_basis, rank, rational_solve, InfeasibleSystem

__all__ = ["Generator", "CDGA", "Form", "TwistedCohomology", "twisted_d", "twisted_cohomology", "exp_form"]


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    d: Optional[str] = None
    label: str = "base"


def _monomial_sign(degs, a, b) -> int:
    """Koszul sign of rewriting ``g^a * g^b`` in generator order."""
    s = 0
    tail = 0  # odd weight of a-generators with index > j
    for j in range(len(degs) - 1, -1, -1):
        if b[j] and degs[j] % 2:
            s += tail * b[j]
        if a[j] and degs[j] % 2:
            tail += a[j]
    return -1 if s % 2 else 1


class CDGA:
    """Graded-commutative algebra with differential, finite-dimensional over Q.

    ``generators`` is a sequence of :class:`Generator` (or tuples
    ``(name, degree, d, label)``); ``d`` is a polynomial string in the
    generators or ``None`` for closed generators.  ``relations`` lists
    monomials (as strings such as ``"u^2"``) that are set to zero.
    """

    def __init__(self, generators: Iterable, relations: Iterable[str] = (),
                 truncation: Mapping[str, int] | None = None, name: str | None = None):
        gens = [g if isinstance(g, Generator) else Generator(*g) for g in generators]
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        for g in gens:
            if g.degree < 1:
                raise ValueError(f"generator {g.name} must have positive degree")
            if not g.name.isidentifier():
                raise ValueError(f"generator name {g.name!r} is not an identifier")
        self.generators = tuple(gens)
        self.name = name
        self.degrees = tuple(g.degree for g in gens)
        self.truncation = dict(truncation or {})
        self._pos = {n: i for i, n in enumerate(names)}
        self.relations = tuple(self._parse_monomial(r) for r in relations)
        self._relation_texts = tuple(relations)
        self._d_cache: dict = {}
        self._gen_d = [None] * len(gens)
        for i, g in enumerate(gens):
            if g.d is None:
                self._gen_d[i] = Form(self, {})
            else:
                dg = self.parse(g.d)
                if not dg.is_homogeneous(g.degree + 1):
                    raise ValueError(f"d({g.name}) must be homogeneous of degree {g.degree + 1}")
                self._gen_d[i] = dg
        self._check_ideal_stable()
        for m in self.basis:
            if not self._d_monomial(self._d_monomial_form(m)).is_zero():
                raise ValueError(f"d^2 != 0 on {self.monomial_str(m)}")

    # -- monomials ---------------------------------------------------------

    def _parse_monomial(self, text: str) -> tuple:
        exps = [0] * len(self.generators)
        for factor in text.replace(" ", "").split("*"):
            base, _, power = factor.partition("^")
            if base not in self._pos:
                raise ValueError(f"unknown generator {base!r} in relation {text!r}")
            exps[self._pos[base]] += int(power or 1)
        return tuple(exps)

    def degree(self, m: Sequence[int]) -> int:
        return sum(a * d for a, d in zip(m, self.degrees))

    def killed(self, m: Sequence[int]) -> bool:
        for a, d in zip(m, self.degrees):
            if d % 2 and a > 1:
                return True
        for r in self.relations:
            if all(a >= b for a, b in zip(m, r)):
                return True
        if self.truncation:
            load: dict[str, int] = {}
            for a, g in zip(m, self.generators):
                if a:
                    load[g.label] = load.get(g.label, 0) + a * g.degree
            for label, bound in self.truncation.items():
                if load.get(label, 0) > bound:
                    return True
        return False

    def _max_exponent(self, i: int) -> int:
        g = self.generators[i]
        if g.degree % 2:
            return 1
        caps = []
        if g.label in self.truncation:
            caps.append(self.truncation[g.label] // g.degree)
        for r in self.relations:
            if r[i] and sum(r) == r[i]:
                caps.append(r[i] - 1)
        if not caps:
            raise ValueError(f"even generator {g.name} is not nilpotent; add a relation or a truncation")
        return min(caps)

    @cached_property
    def basis(self) -> tuple[tuple, ...]:
        """Surviving monomials ordered by degree, then generator order."""
        out = []

        def rec(i, prefix):
            if i == len(self.generators):
                m = tuple(prefix)
                if not self.killed(m):
                    out.append(m)
                return
            for a in range(self._max_exponent(i) + 1):
                prefix.append(a)
                rec(i + 1, prefix)
                prefix.pop()

        rec(0, [])
        out.sort(key=lambda m: (self.degree(m), tuple(-a for a in m)))
        return tuple(out)

    @cached_property
    def index(self) -> dict:
        return {m: k for k, m in enumerate(self.basis)}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def monomial_str(self, m: Sequence[int]) -> str:
        parts = []
        for a, g in zip(m, self.generators):
            if a == 1:
                parts.append(g.name)
            elif a > 1:
                parts.append(f"{g.name}^{a}")
        return "*".join(parts) if parts else "1"

    def _mul_monomials(self, a, b, reduce=True):
        m = tuple(x + y for x, y in zip(a, b))
        if any(x > 1 and d % 2 for x, d in zip(m, self.degrees)):
            return None, 0
        if reduce and self.killed(m):
            return None, 0
        return m, _monomial_sign(self.degrees, a, b)

    # -- differential ------------------------------------------------------

    def _d_monomial_form(self, m: tuple, reduce=True) -> dict:
        """``d`` of a monomial via Leibniz over its ordered factors."""
        key = (m, reduce)
        if key in self._d_cache:
            return self._d_cache[key]
        out: dict = {}
        factors = [i for i, a in enumerate(m) for _ in range(a)]
        n = len(m)
        for k, i in enumerate(factors):
            left = [0] * n
            right = [0] * n
            for j in factors[:k]:
                left[j] += 1
            for j in factors[k + 1:]:
                right[j] += 1
            sgn = -1 if sum(self.degrees[j] for j in factors[:k]) % 2 else 1
            for dm, dc in self._gen_d[i].terms.items():
                m1, s1 = self._mul_monomials(tuple(left), dm, reduce)
                if m1 is None:
                    continue
                m2, s2 = self._mul_monomials(m1, tuple(right), reduce)
                if m2 is None:
                    continue
                out[m2] = out.get(m2, 0) + sgn * s1 * s2 * dc
        out = {k: v for k, v in out.items() if v}
        self._d_cache[key] = out
        return out

    def _d_monomial(self, terms: dict) -> "Form":
        out: dict = {}
        for m, c in terms.items():
            for m2, c2 in self._d_monomial_form(m).items():
                out[m2] = out.get(m2, 0) + c * c2
        return Form(self, out)

    def _check_ideal_stable(self):
        """``d`` must map killed monomials into the killed ideal.

        Checked on minimal killed monomials (every one-step divisor survives)
        by differentiating in the free algebra.
        """
        for m in self._minimal_killed():
            for m2 in self._d_monomial_form(m, reduce=False):
                if not self.killed(m2):
                    raise ValueError(f"relations are not d-stable: d({self.monomial_str(m)}) "
                                     f"contains {self.monomial_str(m2)}")

    def _minimal_killed(self):
        cands = set()
        for m in self.basis:
            for i in range(len(m)):
                n = tuple(x + (1 if j == i else 0) for j, x in enumerate(m))
                if self.killed(n) and not (self.degrees[i] % 2 and n[i] > 1):
                    cands.add(n)
        return sorted(cands)

    # -- elements ----------------------------------------------------------

    def one(self) -> "Form":
        return Form(self, {tuple(0 for _ in self.generators): Fraction(1)})

    def zero(self) -> "Form":
        return Form(self, {})

    def gen(self, name: str) -> "Form":
        m = tuple(int(n == name) for n in (g.name for g in self.generators))
        if name not in self._pos:
            raise KeyError(name)
        return Form(self, {m: Fraction(1)})

    def parse(self, text) -> "Form":
        """Form from a polynomial string in the generator names."""
        if isinstance(text, Form):
            return text
        val = evaluate(str(text), self.gen)
        return val if isinstance(val, Form) else self.one().scale(val)

    def from_vector(self, vec: Sequence, basis: Sequence[tuple] | None = None) -> "Form":
        basis = self.basis if basis is None else basis
        return Form(self, {m: Fraction(c) for m, c in zip(basis, vec) if c})

    def generator_d(self, name: str) -> "Form":
        return self._gen_d[self._pos[name]]

    def to_json(self) -> dict:
        out = {
            "generators": [
                {"name": g.name, "degree": g.degree, "d": g.d, "label": g.label} for g in self.generators
            ],
            "relations": list(self._relation_texts),
            "truncation": dict(sorted(self.truncation.items())),
        }
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, doc: Mapping) -> "CDGA":
        gens = [Generator(g["name"], int(g["degree"]), g.get("d"), g.get("label", "base")) for g in doc["generators"]]
        return cls(gens, doc.get("relations", ()), doc.get("truncation"), doc.get("name"))

    def __repr__(self):
        return f"CDGA({self.name or ''} gens={[g.name for g in self.generators]}, dim={self.dimension})"


class Form:
    """Element of a :class:`CDGA`; immutable map monomial -> rational."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: CDGA, terms: Mapping):
        self.algebra = algebra
        clean = {}
        for m, c in terms.items():
            c = Fraction(c)
            if c and not algebra.killed(m):
                clean[tuple(m)] = clean.get(tuple(m), 0) + c
        self.terms = {m: c for m, c in clean.items() if c}

    # arithmetic
    def _coerce(self, other) -> "Form":
        if isinstance(other, Form):
            if other.algebra is not self.algebra:
                raise ValueError("forms live in different algebras")
            return other
        if isinstance(other, (int, Fraction)):
            return self.algebra.one().scale(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Form(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return Form(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "Form":
        s = Fraction(s)
        return Form(self.algebra, {m: s * c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        A = self.algebra
        out: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                m, s = A._mul_monomials(a, b)
                if m is not None:
                    out[m] = out.get(m, 0) + s * ca * cb
        return Form(A, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.algebra.one().scale(other)
        if not isinstance(other, Form):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def d(self) -> "Form":
        return self.algebra._d_monomial(self.terms)

    def degrees(self) -> set:
        return {self.algebra.degree(m) for m in self.terms}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        ds = self.degrees()
        if not ds:
            return True
        return len(ds) == 1 and (degree is None or degree in ds)

    def component(self, degree: int) -> "Form":
        return Form(self.algebra, {m: c for m, c in self.terms.items() if self.algebra.degree(m) == degree})

    def parity_component(self, parity: int) -> "Form":
        return Form(self.algebra, {m: c for m, c in self.terms.items() if self.algebra.degree(m) % 2 == parity})

    def vector(self, basis: Sequence[tuple] | None = None) -> tuple:
        A = self.algebra
        basis = A.basis if basis is None else basis
        idx = {m: k for k, m in enumerate(basis)}
        vec = [Fraction(0)] * len(basis)
        for m, c in self.terms.items():
            if m not in idx:
                raise ValueError(f"{A.monomial_str(m)} is outside the given basis")
            vec[idx[m]] = c
        return tuple(vec)

    def sorted_terms(self):
        A = self.algebra
        return sorted(self.terms.items(), key=lambda mc: (A.degree(mc[0]), tuple(-a for a in mc[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self.sorted_terms():
            mono = self.algebra.monomial_str(m)
            mag = abs(c)
            if mono == "1":
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            pieces.append(("-" if c < 0 else "+", body))
        first_sign, first = pieces[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Form({self})"


def exp_form(x: Form) -> Form:
    """``sum_j x^j / j!`` for a nilpotent even ``x`` (stops at the first zero power)."""
    out = x.algebra.one()
    power = x.algebra.one()
    j = 0
    while True:
        j += 1
        power = (power * x).scale(Fraction(1, j))
        if power.is_zero():
            return out
        out = out + power
        if j > x.algebra.dimension + 1:
            raise ValueError("form is not nilpotent")


def _check_twist(h: Form):
    if not h.is_homogeneous(3):
        raise ValueError("twist must be homogeneous of degree 3")
    if not h.d().is_zero():
        raise ValueError("twist is not closed")


def twisted_d(h: Form, omega: Form) -> Form:
    """``d_h w = dw + h w``."""
    _check_twist(h)
    return omega.d() + h * omega


@dataclass(frozen=True)
class TwistedCohomology:
    even: int
    odd: int
    even_basis: tuple
    odd_basis: tuple

    def dims(self) -> tuple[int, int]:
        return (self.even, self.odd)


def _parity_basis(A: CDGA, parity: int):
    return [m for m in A.basis if A.degree(m) % 2 == parity]


def twisted_matrix(A: CDGA, h: Form, parity: int) -> Matrix:
    """Matrix of ``d_h`` from the parity-``parity`` part to the other part."""
    _check_twist(h)
    src, dst = _parity_basis(A, parity), _parity_basis(A, 1 - parity)
    cols = [twisted_d(h, Form(A, {m: 1})).vector(dst) for m in src]
    return Matrix.from_columns(cols, len(dst))


def twisted_cohomology(A: CDGA, h: Form | None = None) -> TwistedCohomology:
    """Dimensions and representatives of the 2-periodic twisted cohomology."""
    h = A.zero() if h is None else A.parse(h)
    out = {}
    mats = {par: twisted_matrix(A, h, par) for par in (0, 1)}
    for par in (0, 1):
        src = _parity_basis(A, par)
        ker = kernel_basis(mats[par])
        span = list(mats[1 - par].columns())  # image of d_h inside this parity
        current = rank(Matrix.from_columns(span, len(src))) if span else 0
        reps = []
        for v in ker:
            r = rank(Matrix.from_columns(span + [v], len(src)))
            if r > current:
                reps.append(Form(A, {m: c for m, c in zip(src, v)}))
                span.append(v)
                current = r
        out[par] = tuple(reps)
    return TwistedCohomology(len(out[0]), len(out[1]), out[0], out[1])


def is_twisted_exact(h: Form, omega: Form) -> bool:
    """Whether ``omega = d_h beta`` for some ``beta`` (parity-wise)."""
    A = h.algebra
    for par in (0, 1):
        part = omega.parity_component(par)
        if part.is_zero():
            continue
        M = twisted_matrix(A, h, 1 - par)
        try:
            rational_solve(M, part.vector(_parity_basis(A, par)))
        except InfeasibleSystem:
            return False
    return True

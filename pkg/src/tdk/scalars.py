"""Exact scalars for torus computations: cyclotomic numbers times powers of pi.

:class:`Cyclotomic` is an element of ``Q(zeta_M)`` in the power basis
``1, z, .., z^(phi(M)-1)`` modulo the cyclotomic polynomial.  ``i`` is
``zeta_4``.  Elements with different conductors are lifted to the lcm before
any arithmetic, so ``Q(zeta_N)[i]`` is always ``Q(zeta_lcm(4, N))``.

:class:`FormalScalar` is a Laurent polynomial in a formal ``pi`` with
cyclotomic coefficients.  ``pi`` is never evaluated; identities such as
``d(pi i (t1 dt2 - t2 dt1)) = 2 pi i dt1 dt2`` hold as ring identities.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Mapping

import sympy

from .expr import evaluate
from .linalg import InfeasibleSystem, Matrix, rational_solve

__all__ = ["Cyclotomic", "FormalScalar", "PI", "I", "ONE", "ZERO", "zeta", "exp_pi_i", "parse_scalar"]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@lru_cache(maxsize=None)
def _phi_coeffs(M: int) -> tuple[int, ...]:
    """Coefficients of the M-th cyclotomic polynomial, constant term first."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.cyclotomic_poly(M, x), x)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _reduce(coeffs: list, M: int) -> tuple:
    phi = _phi_coeffs(M)
    n = len(phi) - 1
    c = list(coeffs)
    for k in range(len(c) - 1, n - 1, -1):
        lead = c[k]
        if lead:
            for j in range(n):
                c[k - n + j] -= lead * phi[j]
        c[k] = 0
    c = c[:n] + [0] * (n - len(c))
    return tuple(Fraction(v) for v in c)


def _divisors(M: int):
    return [d for d in range(1, M + 1) if M % d == 0]


class Cyclotomic:
    """Element of ``Q(zeta_M)``."""

    __slots__ = ("M", "coeffs")

    def __init__(self, M: int, coeffs=None):
        if M < 1:
            raise ValueError("conductor must be positive")
        self.M = M
        if coeffs is None:
            coeffs = ()
        self.coeffs = _reduce(list(coeffs), M)

    @classmethod
    def rational(cls, q) -> "Cyclotomic":
        return cls(1, [Fraction(q)])

    @classmethod
    def root(cls, M: int, j: int = 1) -> "Cyclotomic":
        j %= M
        return cls(M, [0] * j + [1])

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def lift(self, L: int) -> "Cyclotomic":
        if L % self.M:
            raise ValueError(f"cannot lift conductor {self.M} to {L}")
        if L == self.M:
            return self
        step = L // self.M
        out = [0] * ((len(self.coeffs) - 1) * step + 1 if self.coeffs else 1)
        for j, c in enumerate(self.coeffs):
            out[j * step] += c
        return Cyclotomic(L, out)

    def _common(self, other: "Cyclotomic"):
        L = _lcm(self.M, other.M)
        return self.lift(L), other.lift(L), L

    def __add__(self, other):
        other = _as_cyc(other)
        if other is NotImplemented:
            return other
        a, b, L = self._common(other)
        return Cyclotomic(L, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.M, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = _as_cyc(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_cyc(other)
        if other is NotImplemented:
            return other
        a, b, L = self._common(other)
        prod = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs))
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic(L, prod)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        other = _as_cyc(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        n = self.normalized()
        return hash((n.M, n.coeffs))

    def _mul_matrix(self) -> Matrix:
        cols = []
        for j in range(self.degree):
            cols.append((self * Cyclotomic.root(self.M, j)).lift(self.M).coeffs)
        return Matrix.from_columns(cols, self.degree)

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        one = [1] + [0] * (self.degree - 1)
        x = rational_solve(self._mul_matrix(), one)
        return Cyclotomic(self.M, x)

    def __truediv__(self, other):
        other = _as_cyc(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def normalized(self) -> "Cyclotomic":
        """Same number written over the smallest conductor containing it."""
        for d in _divisors(self.M):
            if d % 4 == 2:
                continue
            if d == self.M:
                return self
            basis = [Cyclotomic.root(d, j).lift(self.M).coeffs for j in range(len(_phi_coeffs(d)) - 1)]
            try:
                c = rational_solve(Matrix.from_columns(basis, self.degree), self.coeffs)
            except InfeasibleSystem:
                continue
            return Cyclotomic(d, c)
        return self

    def as_rational(self):
        n = self.normalized()
        if n.M == 1:
            return n.coeffs[0]
        return None

    def conjugate(self) -> "Cyclotomic":
        out = Cyclotomic(self.M)
        for j, c in enumerate(self.coeffs):
            if c:
                out = out + Cyclotomic.root(self.M, -j) * Cyclotomic.rational(c)
        return out

    def __str__(self):
        n = self.normalized()
        if n.M == 1:
            return _frac_str(n.coeffs[0])
        if n.M == 4:
            terms = [(n.coeffs[0], ""), (n.coeffs[1], "i")]
        else:
            terms = [(c, f"zeta({n.M})" + (f"^{j}" if j > 1 else "")) for j, c in enumerate(n.coeffs)]
            terms[0] = (n.coeffs[0], "")
        return _join_terms(terms)

    def __repr__(self):
        return f"Cyclotomic({self})"


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _join_terms(terms) -> str:
    """``[(coeff, symbol)]`` -> ``'a + b*sym'`` with unit coefficients dropped."""
    out = ""
    for c, sym in terms:
        if not c:
            continue
        mag = abs(c)
        if sym:
            body = sym if mag == 1 else f"{_frac_str(mag)}*{sym}"
        else:
            body = _frac_str(mag)
        if not out:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out or "0"


def _as_cyc(x):
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, (int, Fraction)):
        return Cyclotomic.rational(x)
    return NotImplemented


class FormalScalar:
    """Laurent polynomial in a formal ``pi`` with cyclotomic coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, Cyclotomic] | None = None):
        clean = {}
        for k, c in (terms or {}).items():
            c = _as_cyc(c)
            if c is NotImplemented:
                raise TypeError("coefficients must be cyclotomic or rational")
            if not c.is_zero():
                clean[int(k)] = c
        self.terms = clean

    @classmethod
    def of(cls, x) -> "FormalScalar":
        if isinstance(x, FormalScalar):
            return x
        return cls({0: _as_cyc(x)})

    def __add__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return FormalScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return FormalScalar({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                v = c1 * c2
                out[k1 + k2] = out[k1 + k2] + v if k1 + k2 in out else v
        return FormalScalar(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted((k, hash(c)) for k, c in self.terms.items())))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def inverse(self) -> "FormalScalar":
        if not self.is_monomial():
            raise ZeroDivisionError("only monomials c*pi^k are invertible")
        (k, c), = self.terms.items()
        return FormalScalar({-k: c.inverse()})

    def __truediv__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_scalar(other) * self.inverse()

    def pi_degrees(self) -> list[int]:
        return sorted(self.terms)

    def coefficient(self, k: int) -> Cyclotomic:
        return self.terms.get(k, Cyclotomic.rational(0))

    def conductor(self) -> int:
        L = 1
        for c in self.terms.values():
            L = _lcm(L, c.M)
        return L

    def as_rational(self):
        if not self.terms:
            return Fraction(0)
        if set(self.terms) != {0}:
            return None
        return self.terms[0].as_rational()

    def pi_i_multiple(self):
        """``q`` with ``self = q*pi*i`` for rational ``q``, else ``None``."""
        if not self.terms:
            return Fraction(0)
        if set(self.terms) != {1}:
            return None
        q = (self.terms[1] * Cyclotomic.root(4, 3)).as_rational()  # divide by i
        return q

    def conjugate(self) -> "FormalScalar":
        return FormalScalar({k: c.conjugate() for k, c in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            c = str(self.terms[k])
            if k == 0:
                parts.append(c)
                continue
            pi = "pi" if k == 1 else f"pi^{k}"
            if c == "1":
                parts.append(pi)
            elif c == "-1":
                parts.append(f"-{pi}")
            elif (" + " in c or " - " in c[1:]):
                parts.append(f"({c})*{pi}")
            else:
                parts.append(f"{c}*{pi}")
        text = parts[0]
        for p in parts[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text

    def __repr__(self):
        return f"FormalScalar({self})"


def _as_scalar(x):
    if isinstance(x, FormalScalar):
        return x
    c = _as_cyc(x)
    if c is NotImplemented:
        return NotImplemented
    return FormalScalar({0: c})


ONE = FormalScalar({0: Cyclotomic.rational(1)})
ZERO = FormalScalar()
PI = FormalScalar({1: Cyclotomic.rational(1)})
I = FormalScalar({0: Cyclotomic.root(4, 1)})


def zeta(N: int) -> FormalScalar:
    """``exp(2 pi i / N)``."""
    return FormalScalar({0: Cyclotomic.root(int(N), 1)})


def exp_pi_i(q) -> FormalScalar:
    """``exp(pi i q)`` for rational ``q``: a root of unity of order dividing ``2*den(q)``."""
    q = Fraction(q)
    return FormalScalar({0: Cyclotomic.root(2 * q.denominator, q.numerator)})


def parse_scalar(text) -> FormalScalar:
    """Parse tokens ``pi``, ``i``, ``zeta(N)`` with rational arithmetic."""
    if isinstance(text, FormalScalar):
        return text
    if isinstance(text, (int, Fraction)):
        return FormalScalar.of(text)
    names = {"pi": PI, "i": I}

    def _zeta(n):
        if not isinstance(n, Fraction) or n.denominator != 1 or n < 1:
            raise ValueError("zeta(N) needs a positive integer N")
        return zeta(int(n))

    val = evaluate(str(text), names, {"zeta": _zeta})
    return _as_scalar(val)

"""Differential forms on ``T^n = R^n / Z^n`` with finite Fourier support.

A term is ``c * e^{2 pi i k.theta} * theta^e * dtheta_I`` with ``c`` a
:class:`~tdk.scalars.FormalScalar`, ``k`` an integer mode vector, ``e`` an
exponent vector for the polynomial (affine) slot and ``I`` an increasing
tuple of indices.  Periodic forms have ``e = 0``; connection forms on the
fundamental domain use the polynomial slot.  ``d`` and translation preserve
the sum of the two slots.
"""

from __future__ import annotations

from fractions import Fraction
import itertools
from math import comb
from typing import Mapping, Sequence

from .scalars import ONE, FormalScalar, I, PI, exp_pi_i, parse_scalar

__all__ = [
    "FourierForm",
    "average",
    "invariant_decomposition",
    "is_geometrically_invariant",
    "random_fourier_form",
    "twisted_d",
]

TWO_PI_I = 2 * PI * I


def _wedge_sign(I1: tuple, I2: tuple):
    """Sign and sorted index tuple of ``dtheta_I1 ^ dtheta_I2`` (``None`` if zero)."""
    if set(I1) & set(I2):
        return 0, None
    seq = list(I1) + list(I2)
    inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


class FourierForm:
    """Immutable form on ``T^n``; ``terms`` maps ``(k, e, I)`` to a scalar."""

    __slots__ = ("n", "terms", "cutoff")

    def __init__(self, n: int, terms: Mapping | None = None, cutoff: int | None = None):
        self.n = n
        clean: dict = {}
        for (k, e, idx), c in (terms or {}).items():
            k, e, idx = tuple(k), tuple(e), tuple(idx)
            if len(k) != n or len(e) != n:
                raise ValueError("mode and exponent vectors must have length n")
            if list(idx) != sorted(set(idx)) or any(not 0 <= j < n for j in idx):
                raise ValueError(f"exterior monomial {idx} is not strictly increasing in range")
            if any(x < 0 for x in e):
                raise ValueError("polynomial exponents must be non-negative")
            c = FormalScalar.of(c) if not isinstance(c, FormalScalar) else c
            key = (k, e, idx)
            clean[key] = clean[key] + c if key in clean else c
        self.terms = {key: c for key, c in clean.items() if not c.is_zero()}
        self.cutoff = cutoff

    # constructors --------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "FourierForm":
        return cls(n)

    @classmethod
    def constant(cls, n: int, c=1) -> "FourierForm":
        return cls(n, {((0,) * n, (0,) * n, ()): parse_scalar(c)})

    @classmethod
    def dtheta(cls, n: int, *indices: int) -> "FourierForm":
        """``dtheta_{i1} ^ dtheta_{i2} ^ ...`` (indices are 1-based)."""
        out = cls.constant(n)
        for j in indices:
            out = out.wedge(cls(n, {((0,) * n, (0,) * n, (j - 1,)): ONE}))
        return out

    @classmethod
    def theta(cls, n: int, j: int) -> "FourierForm":
        """The coordinate function ``theta_j`` (1-based) on the fundamental domain."""
        e = [0] * n
        e[j - 1] = 1
        return cls(n, {((0,) * n, tuple(e), ()): ONE})

    @classmethod
    def wave(cls, mode: Sequence[int]) -> "FourierForm":
        """``e^{2 pi i k.theta}``."""
        n = len(mode)
        return cls(n, {(tuple(mode), (0,) * n, ()): ONE})

    # arithmetic ----------------------------------------------------------

    def _check(self, other: "FourierForm"):
        if other.n != self.n:
            raise ValueError("forms on tori of different dimension")

    def __add__(self, other):
        if not isinstance(other, FourierForm):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out[key] + c if key in out else c
        return FourierForm(self.n, out, _merge_cutoff(self.cutoff, other.cutoff))

    def __neg__(self):
        return FourierForm(self.n, {key: -c for key, c in self.terms.items()}, self.cutoff)

    def __sub__(self, other):
        if not isinstance(other, FourierForm):
            return NotImplemented
        return self + (-other)

    def scale(self, s) -> "FourierForm":
        s = parse_scalar(s) if not isinstance(s, FormalScalar) else s
        return FourierForm(self.n, {key: s * c for key, c in self.terms.items()}, self.cutoff)

    def __rmul__(self, s):
        if isinstance(s, (int, Fraction, FormalScalar)):
            return self.scale(s)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, FourierForm):
            return self.wedge(other)
        if isinstance(other, (int, Fraction, FormalScalar)):
            return self.scale(other)
        return NotImplemented

    def wedge(self, other: "FourierForm") -> "FourierForm":
        self._check(other)
        out: dict = {}
        for (k1, e1, I1), c1 in self.terms.items():
            for (k2, e2, I2), c2 in other.terms.items():
                sgn, idx = _wedge_sign(I1, I2)
                if idx is None:
                    continue
                key = (tuple(a + b for a, b in zip(k1, k2)), tuple(a + b for a, b in zip(e1, e2)), idx)
                v = c1 * c2 if sgn == 1 else -(c1 * c2)
                out[key] = out[key] + v if key in out else v
        return FourierForm(self.n, out, _merge_cutoff(self.cutoff, other.cutoff))

    def __eq__(self, other):
        if not isinstance(other, FourierForm):
            return NotImplemented
        return self.n == other.n and (self - other).is_zero()

    def __hash__(self):
        return hash((self.n, frozenset((k, hash(c)) for k, c in self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    # calculus ------------------------------------------------------------

    def d(self) -> "FourierForm":
        out: dict = {}

        def add(key, v):
            out[key] = out[key] + v if key in out else v

        for (k, e, idx), c in self.terms.items():
            for j in range(self.n):
                sgn, new = _wedge_sign((j,), idx)
                if new is None:
                    continue
                if k[j]:
                    add((k, e, new), c * (TWO_PI_I * k[j]) * sgn)
                if e[j]:
                    e2 = tuple(x - 1 if t == j else x for t, x in enumerate(e))
                    add((k, e2, new), c * (e[j] * sgn))
        return FourierForm(self.n, out, self.cutoff)

    def translate(self, v: Sequence) -> "FourierForm":
        """Pull back along ``theta -> theta + v`` for a rational vector ``v``."""
        v = [Fraction(x) for x in v]
        if len(v) != self.n:
            raise ValueError("translation vector has the wrong length")
        out: dict = {}
        for (k, e, idx), c in self.terms.items():
            phase = exp_pi_i(2 * sum(a * b for a, b in zip(k, v)))
            # expand prod_j (theta_j + v_j)^{e_j}
            expansions = [((0,) * self.n, Fraction(1))]
            for j in range(self.n):
                nxt = []
                for ex, coeff in expansions:
                    for r in range(e[j] + 1):
                        ex2 = tuple(r if t == j else x for t, x in enumerate(ex))
                        nxt.append((ex2, coeff * comb(e[j], r) * v[j] ** (e[j] - r)))
                expansions = nxt
            for ex, coeff in expansions:
                if coeff:
                    key = (k, ex, idx)
                    val = c * phase * coeff
                    out[key] = out[key] + val if key in out else val
        return FourierForm(self.n, out, self.cutoff)

    def interior(self, u: Sequence) -> "FourierForm":
        """Contraction with the constant vector field ``u``."""
        u = [Fraction(x) for x in u]
        out: dict = {}
        for (k, e, idx), c in self.terms.items():
            for pos, j in enumerate(idx):
                if u[j]:
                    key = (k, e, idx[:pos] + idx[pos + 1:])
                    val = c * (u[j] * (-1 if pos % 2 else 1))
                    out[key] = out[key] + val if key in out else val
        return FourierForm(self.n, out, self.cutoff)

    # inspection ----------------------------------------------------------

    def is_periodic(self) -> bool:
        return all(not any(e) for (_, e, _) in self.terms)

    def modes(self) -> set:
        return {k for (k, _, _) in self.terms}

    def mode_part(self, k: Sequence[int]) -> "FourierForm":
        k = tuple(k)
        return FourierForm(self.n, {key: c for key, c in self.terms.items() if key[0] == k}, self.cutoff)

    def degree_part(self, p: int) -> "FourierForm":
        return FourierForm(self.n, {key: c for key, c in self.terms.items() if len(key[2]) == p}, self.cutoff)

    def coefficient(self, k=None, e=None, idx=()) -> FormalScalar:
        k = tuple(k) if k is not None else (0,) * self.n
        e = tuple(e) if e is not None else (0,) * self.n
        return self.terms.get((k, e, tuple(idx)), FormalScalar())

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0][2]), kv[0][2], kv[0][0], kv[0][1]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (k, e, idx), c in self.sorted_terms():
            factors = []
            if any(k):
                factors.append("exp(2*pi*i*(" + " + ".join((f"{a}*" if a != 1 else "") + f"t{j + 1}" for j, a in enumerate(k) if a) + "))")
            for j, a in enumerate(e):
                if a:
                    factors.append(f"t{j + 1}" + (f"^{a}" if a > 1 else ""))
            factors += [f"dt{j + 1}" for j in idx]
            body = "*".join(factors)
            cs = str(c)
            if " + " in cs or " - " in cs[1:]:
                cs = f"({cs})"
            parts.append(cs if not body else (body if cs == "1" else f"{cs}*{body}"))
        return " + ".join(parts)

    def __repr__(self):
        return f"FourierForm(n={self.n}: {self})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"mode": list(k), "poly": list(e), "dtheta": [j + 1 for j in idx], "coeff": str(c)}
                for (k, e, idx), c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "FourierForm":
        n = int(doc["n"])
        terms = {}
        for t in doc.get("terms", []):
            idx = [j - 1 for j in t.get("dtheta", [])]
            if sorted(set(idx)) != idx:
                raise ValueError("dtheta indices must be strictly increasing")
            key = (tuple(t.get("mode", [0] * n)), tuple(t.get("poly", [0] * n)), tuple(idx))
            c = parse_scalar(t["coeff"])
            terms[key] = terms[key] + c if key in terms else c
        return cls(n, terms)


def _merge_cutoff(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def average(omega: FourierForm) -> FourierForm:
    """Average over the translation action: the zero-mode projection."""
    if not omega.is_periodic():
        raise ValueError("averaging needs a periodic form (empty polynomial slot)")
    return omega.mode_part((0,) * omega.n)


def is_geometrically_invariant(omega: FourierForm) -> bool:
    """Translation-invariant: only zero modes and no polynomial dependence."""
    return all(not any(k) and not any(e) for (k, e, _) in omega.terms)


def twisted_d(h: FourierForm, omega: FourierForm) -> FourierForm:
    return omega.d() + h.wedge(omega)


def invariant_decomposition(omega: FourierForm, h: FourierForm | None = None):
    """Split a ``d_h``-closed periodic form as ``w = w_bar + d_h a``.

    ``w_bar`` is the zero mode.  On the mode ``k != 0`` the twisted
    differential acts on constant coefficients as ``D = 2 pi i kappa ^ + h ^``
    with ``kappa = sum k_j dtheta_j``.  For ``u = k/|k|^2`` the operator
    ``S = i_u D + D i_u = 2 pi i + (i_u h) ^`` is invertible (its second part
    is nilpotent) and commutes with ``D``, so ``a_k = i_u S^{-1} w_k`` solves
    ``D a_k = w_k``.  Returns ``(w_bar, a)``; the caller can check
    ``w == w_bar + d_h a`` exactly.
    """
    n = omega.n
    h = FourierForm.zero(n) if h is None else h
    if not is_geometrically_invariant(h):
        raise ValueError("twist must be invariant")
    if not h.d().is_zero():
        raise ValueError("twist must be closed")
    if not omega.is_periodic():
        raise ValueError("invariant_decomposition needs a periodic form")
    if not twisted_d(h, omega).is_zero():
        raise ValueError("form is not d_h-closed")
    zero = (0,) * n
    bar = omega.mode_part(zero)
    alpha = FourierForm.zero(n)
    inv_2pii = TWO_PI_I.inverse()
    for k in sorted(omega.modes()):
        if k == zero:
            continue
        wk = omega.mode_part(k)
        norm = sum(a * a for a in k)
        u = [Fraction(a, norm) for a in k]
        iuh = h.interior(u)
        # S^{-1} = (2 pi i)^{-1} sum_j (-N)^j with N = (i_u h)/(2 pi i)
        N = iuh.scale(inv_2pii)
        term = wk.scale(inv_2pii)
        acc = term
        for _ in range(n + 1):
            term = -(N.wedge(term))
            if term.is_zero():
                break
            acc = acc + term
        alpha = alpha + acc.interior(u)
    alpha = FourierForm(n, alpha.terms, omega.cutoff)
    return bar, alpha


def random_fourier_form(n: int, rng, degree: int | None = None, cutoff: int = 2, terms: int = 4) -> FourierForm:
    """Random periodic form with Gaussian-rational coefficients and modes in ``[-cutoff, cutoff]``."""
    out: dict = {}
    monos = [c for p in range(n + 1) for c in itertools.combinations(range(n), p)]
    if degree is not None:
        monos = [m for m in monos if len(m) == degree]
    for _ in range(terms):
        k = tuple(rng.randint(-cutoff, cutoff) for _ in range(n))
        idx = rng.choice(monos)
        c = FormalScalar.of(rng.fraction(3, 3)) + I * rng.fraction(3, 3)
        key = (k, (0,) * n, idx)
        out[key] = out[key] + c if key in out else c
    return FourierForm(n, out, cutoff)

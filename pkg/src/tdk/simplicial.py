"""Finite simplicial complexes and lattice-valued cochains.

A cochain takes values in one of three coefficient systems built from a
lattice ``L`` of rank ``r``:

``"lattice"``  ``L`` itself (integer vectors),
``"vector"``   ``V = L (x) Q`` (rational vectors),
``"torus"``    ``V / L`` (rational vectors compared modulo integer ones).

Orientation convention: a simplex is the tuple of its vertex indices in
increasing order, and the ``i``-th face drops the ``i``-th vertex with sign
``(-1)**i``.  The cup product is the Alexander--Whitney front-face/back-face
formula, which is strictly associative and satisfies the Leibniz rule on the
nose.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

from .linalg import (
    AbelianGroupPresentation,
    InfeasibleSystem,
    Matrix,
    elementary_divisors,
    integer_kernel_basis,
    rational_solve,
)

LATTICE = "lattice"
VECTOR = "vector"
TORUS = "torus"
COEFFICIENTS = (LATTICE, VECTOR, TORUS)

__all__ = [
    "LATTICE",
    "VECTOR",
    "TORUS",
    "Lattice",
    "Z",
    "SimplicialComplex",
    "Cochain",
    "coboundary",
    "cup",
    "dot_pairing",
    "cohomology",
    "is_coboundary",
    "point",
    "ngon",
    "sphere",
    "torus9",
    "product",
    "projection",
    "pullback",
    "unit",
    "random_cochain",
    "random_integer_cocycle",
]


@dataclass(frozen=True)
class Lattice:
    """A free abelian group of finite rank with a distinguished basis.

    The dual lattice ``Hom(L, Z)`` carries the dual basis, so the natural
    pairing is the identity matrix in these bases.
    """

    rank: int = 1
    name: str = "Z"

    def dual(self) -> "Lattice":
        if self.name == "Z":
            return self
        if self.name.endswith("^"):
            return Lattice(self.rank, self.name[:-1])
        return Lattice(self.rank, self.name + "^")

    @property
    def pairing_matrix(self) -> Matrix:
        return Matrix.identity(self.rank)

    def pairs_with(self, other: "Lattice") -> bool:
        return other == self.dual()

    def tensor(self, other: "Lattice") -> "Lattice":
        if self.name == "Z" and self.rank == 1:
            return other
        if other.name == "Z" and other.rank == 1:
            return self
        return Lattice(self.rank * other.rank, f"({self.name}*{other.name})")


Z = Lattice()


class SimplicialComplex:
    """Finite ordered simplicial complex.

    Vertices are stored in a fixed order; every simplex is the increasing
    tuple of its vertex indices.  Build from the maximal simplices, given
    either as vertex labels or as indices into ``vertices``.
    """

    def __init__(self, maximal: Iterable[Sequence[Hashable]], vertices: Sequence[Hashable] | None = None,
                 name: str | None = None):
        maximal = [tuple(s) for s in maximal]
        if vertices is None:
            vertices = sorted({v for s in maximal for v in s}, key=repr)
        self.vertices = tuple(vertices)
        index = {v: i for i, v in enumerate(self.vertices)}
        if len(index) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        faces: set[tuple[int, ...]] = set()
        for s in maximal:
            try:
                idx = tuple(sorted(index[v] for v in s))
            except KeyError as exc:
                raise ValueError(f"simplex {s} uses an unknown vertex") from exc
            if len(set(idx)) != len(idx):
                raise ValueError(f"simplex {s} repeats a vertex")
            for k in range(1, len(idx) + 1):
                faces.update(itertools.combinations(idx, k))
        for i in range(len(self.vertices)):
            faces.add((i,))
        self.dimension = max((len(f) - 1 for f in faces), default=-1)
        by_dim: dict[int, list] = {}
        for f in faces:
            by_dim.setdefault(len(f) - 1, []).append(f)
        self._simplices = {p: tuple(sorted(fs)) for p, fs in by_dim.items()}
        self._index = {p: {s: i for i, s in enumerate(fs)} for p, fs in self._simplices.items()}
        self.name = name
        self._matrices: dict[int, Matrix] = {}
        self._divisors: dict[int, list[int]] = {}
        self._cocycle_bases: dict[int, list[tuple]] = {}

    def __repr__(self):
        counts = [self.count(p) for p in range(self.dimension + 1)]
        label = f"{self.name!r}, " if self.name else ""
        return f"SimplicialComplex({label}f-vector={counts})"

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.vertices == other.vertices and self._simplices == other._simplices

    def __hash__(self):
        return hash((self.vertices, tuple(sorted(self._simplices.items()))))

    def simplices(self, p: int) -> tuple[tuple[int, ...], ...]:
        return self._simplices.get(p, ())

    def count(self, p: int) -> int:
        return len(self._simplices.get(p, ()))

    def index(self, simplex: Sequence[int]) -> int:
        return self._index[len(simplex) - 1][tuple(simplex)]

    def maximal_simplices(self) -> list[tuple[int, ...]]:
        all_faces = {s for fs in self._simplices.values() for s in fs}
        out = []
        for p in sorted(self._simplices, reverse=True):
            for s in self._simplices[p]:
                if not any(set(s) < set(t) for t in out):
                    out.append(s)
        assert all(s in all_faces for s in out)
        return sorted(out, key=lambda s: (len(s), s))

    def euler_characteristic(self) -> int:
        return sum((-1) ** p * self.count(p) for p in range(self.dimension + 1))

    @cached_property
    def _face_signs(self) -> dict[int, tuple]:
        # for each (p+1)-simplex: ((index of face_i in degree p, (-1)**i), ...)
        out = {}
        for p in range(-1, self.dimension):
            idx = self._index.get(p, {})
            rows = []
            for s in self.simplices(p + 1):
                if p < 0:
                    rows.append(())
                    continue
                rows.append(tuple((idx[s[:i] + s[i + 1:]], -1 if i % 2 else 1) for i in range(len(s))))
            out[p] = tuple(rows)
        return out

    def face_signs(self, p: int) -> tuple:
        return self._face_signs.get(p, tuple(() for _ in self.simplices(p + 1)))

    def coboundary_matrix(self, p: int) -> Matrix:
        """Integer matrix of ``delta: C^p -> C^{p+1}`` (rows: (p+1)-simplices)."""
        if p not in self._matrices:
            n_in, n_out = self.count(p), self.count(p + 1)
            rows = [[0] * n_in for _ in range(n_out)]
            for r, faces in enumerate(self.face_signs(p)):
                for j, sgn in faces:
                    rows[r][j] += sgn
            self._matrices[p] = Matrix(rows, ncols=n_in)
        return self._matrices[p]

    def coboundary_divisors(self, p: int) -> list[int]:
        """Elementary divisors of ``delta_p`` (cached)."""
        if p not in self._divisors:
            if p < 0 or p >= self.dimension:
                self._divisors[p] = []
            else:
                self._divisors[p] = elementary_divisors(self.coboundary_matrix(p))
        return self._divisors[p]

    def coboundary_rank(self, p: int) -> int:
        return len(self.coboundary_divisors(p))

    def betti(self, p: int) -> int:
        if p < 0:
            return 0
        return self.count(p) - self.coboundary_rank(p) - self.coboundary_rank(p - 1)

    def integer_cocycle_basis(self, p: int) -> list[tuple]:
        """Z-basis of the integral cocycles ``ker(delta_p)`` in ``C^p(X; Z)``."""
        if p not in self._cocycle_bases:
            n = self.count(p)
            if n == 0:
                basis = []
            elif self.count(p + 1) == 0:
                basis = [tuple(int(i == j) for i in range(n)) for j in range(n)]
            else:
                basis = integer_kernel_basis(self.coboundary_matrix(p))
            self._cocycle_bases[p] = basis
        return self._cocycle_bases[p]

    def fundamental_cycle(self) -> tuple[int, ...]:
        """Generator of ``H_top(X; Z)`` as integer weights on top simplices.

        Raises ``ValueError`` unless the top homology is infinite cyclic.
        """
        d = self.dimension
        boundary = self.coboundary_matrix(d - 1).transpose()
        basis = integer_kernel_basis(boundary)
        if len(basis) != 1:
            raise ValueError("top homology is not Z; complex is not an oriented pseudomanifold")
        return basis[0]


# --- built-in complexes ---------------------------------------------------


def point() -> SimplicialComplex:
    return SimplicialComplex([(0,)], name="point")


def ngon(n: int) -> SimplicialComplex:
    """The circle as the boundary of an ``n``-gon, ``n >= 3``."""
    if n < 3:
        raise ValueError("an n-gon circle needs n >= 3")
    return SimplicialComplex([(i, (i + 1) % n) for i in range(n)], vertices=range(n), name=f"circle-{n}gon")


def sphere(n: int) -> SimplicialComplex:
    """``S^n`` as the boundary of the standard ``(n+1)``-simplex."""
    verts = range(n + 2)
    return SimplicialComplex(itertools.combinations(verts, n + 1), vertices=verts, name=f"S{n}")


def product(X: SimplicialComplex, Y: SimplicialComplex, name: str | None = None) -> SimplicialComplex:
    """Simplicial product with the ordered-vertex (staircase) triangulation.

    Vertex ``(x, y)`` gets index ``ix * |Y| + iy``; simplices are chains that
    are weakly increasing in both coordinates.
    """
    ny = len(Y.vertices)
    verts = [(a, b) for a in X.vertices for b in Y.vertices]
    maximal = []
    for s in X.maximal_simplices():
        for t in Y.maximal_simplices():
            a, b = len(s) - 1, len(t) - 1
            for ups in itertools.combinations(range(a + b), a):
                i = j = 0
                chain = [s[0] * ny + t[0]]
                ups_set = set(ups)
                for step in range(a + b):
                    if step in ups_set:
                        i += 1
                    else:
                        j += 1
                    chain.append(s[i] * ny + t[j])
                maximal.append(chain)
    return SimplicialComplex(
        [[verts[k] for k in c] for c in maximal], vertices=verts,
        name=name or f"{X.name}x{Y.name}",
    )


def projection(P: SimplicialComplex, X: SimplicialComplex, Y: SimplicialComplex, factor: int = 0) -> list[int]:
    """Vertex map of ``P = product(X, Y)`` onto factor ``0`` (``X``) or ``1`` (``Y``)."""
    ny = len(Y.vertices)
    if len(P.vertices) != len(X.vertices) * ny:
        raise ValueError("P is not product(X, Y)")
    return [k // ny if factor == 0 else k % ny for k in range(len(P.vertices))]


def pullback(c: "Cochain", source: SimplicialComplex, vertex_map: Sequence[int]) -> "Cochain":
    """Pull ``c`` back along a simplicial map ``source -> c.complex``.

    Degenerate images give zero; a reordering of vertices contributes the
    sign of the permutation.
    """
    p, r = c.degree, c.lattice.rank
    target = c.complex
    vals = []
    for s in source.simplices(p):
        img = [vertex_map[v] for v in s]
        if len(set(img)) < len(img):
            vals.extend([0] * r)
            continue
        order = sorted(range(len(img)), key=img.__getitem__)
        inversions = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
        k = target.index(tuple(sorted(img)))
        sgn = -1 if inversions % 2 else 1
        vals.extend(sgn * v for v in c.values[k * r:(k + 1) * r])
    return Cochain(source, p, vals, c.coeff, c.lattice)


def torus9() -> SimplicialComplex:
    """The standard 9-vertex triangulated torus (product of two 3-gons)."""
    return product(ngon(3), ngon(3), name="torus-9")


# --- cochains ---------------------------------------------------------------


def _coerce(x, coeff):
    if coeff == LATTICE:
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"lattice cochain value {x} is not an integer")
            return x.numerator
        if isinstance(x, bool) or not isinstance(x, int):
            if isinstance(x, float):
                raise TypeError("floating point cochain values are not allowed")
            x = Fraction(x)
            if x.denominator != 1:
                raise ValueError(f"lattice cochain value {x} is not an integer")
            return x.numerator
        return x
    if isinstance(x, float):
        raise TypeError("floating point cochain values are not allowed")
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


class Cochain:
    """A ``p``-cochain on ``X`` with values in ``L``, ``V`` or ``V/L``.

    ``values`` is a flat tuple, simplex-major: the value on the ``i``-th
    ``p``-simplex occupies ``values[i*r:(i+1)*r]`` for a rank-``r`` lattice.
    Torus-valued cochains keep rational representatives; equality is tested
    modulo lattice cochains.
    """

    __slots__ = ("complex", "degree", "coeff", "lattice", "values")

    def __init__(self, X: SimplicialComplex, degree: int, values: Iterable | None = None,
                 coeff: str = LATTICE, lattice: Lattice = Z):
        if coeff not in COEFFICIENTS:
            raise ValueError(f"unknown coefficient system {coeff!r}")
        n = X.count(degree) * lattice.rank
        vals = tuple(_coerce(v, coeff) for v in values) if values is not None else (0,) * n
        if len(vals) != n:
            raise ValueError(f"degree-{degree} cochain needs {n} values, got {len(vals)}")
        if coeff == TORUS:
            vals = tuple(_coerce(v - (v.numerator // v.denominator) if isinstance(v, Fraction) else 0, coeff)
                         for v in vals)
        self.complex = X
        self.degree = degree
        self.coeff = coeff
        self.lattice = lattice
        self.values = vals

    @classmethod
    def zero(cls, X, degree, coeff=LATTICE, lattice=Z) -> "Cochain":
        return cls(X, degree, None, coeff, lattice)

    @classmethod
    def from_function(cls, X, degree, f: Callable[[tuple], object], coeff=LATTICE, lattice=Z):
        """Build from ``f(simplex) -> value`` (scalar for rank 1, else a sequence)."""
        vals = []
        for s in X.simplices(degree):
            v = f(s)
            vals.extend([v] if lattice.rank == 1 and not isinstance(v, (tuple, list)) else v)
        return cls(X, degree, vals, coeff, lattice)

    @classmethod
    def indicator(cls, X, simplex: Sequence[int], coeff=LATTICE, lattice=Z, component: int = 0):
        p = len(simplex) - 1
        vals = [0] * (X.count(p) * lattice.rank)
        vals[X.index(tuple(simplex)) * lattice.rank + component] = 1
        return cls(X, p, vals, coeff, lattice)

    def value(self, simplex: Sequence[int]) -> tuple:
        r = self.lattice.rank
        i = self.complex.index(tuple(simplex))
        return self.values[i * r:(i + 1) * r]

    def __repr__(self):
        return (f"Cochain(degree={self.degree}, coeff={self.coeff!r}, lattice={self.lattice.name!r}, "
                f"values={list(self.values)!r})")

    def _check_compatible(self, other: "Cochain"):
        if not isinstance(other, Cochain):
            raise TypeError("expected a Cochain")
        if other.complex is not self.complex and other.complex != self.complex:
            raise ValueError("cochains live on different complexes")
        if other.degree != self.degree or other.lattice != self.lattice:
            raise ValueError("cochain degree or lattice mismatch")

    def _sum_coeff(self, other: "Cochain") -> str:
        kinds = {self.coeff, other.coeff}
        if kinds == {LATTICE}:
            return LATTICE
        if TORUS in kinds:
            if VECTOR in kinds:
                raise ValueError("cannot add V-valued and V/L-valued cochains")
            return TORUS
        return VECTOR

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check_compatible(other)
        return Cochain(self.complex, self.degree, [a + b for a, b in zip(self.values, other.values)],
                       self._sum_coeff(other), self.lattice)

    def __neg__(self) -> "Cochain":
        return Cochain(self.complex, self.degree, [-a for a in self.values], self.coeff, self.lattice)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def scale(self, s) -> "Cochain":
        coeff = self.coeff
        if coeff == LATTICE and Fraction(s).denominator != 1:
            coeff = VECTOR
        if coeff == TORUS and Fraction(s).denominator != 1:
            raise ValueError("V/L cochains can only be scaled by integers")
        return Cochain(self.complex, self.degree, [s * a for a in self.values], coeff, self.lattice)

    def __rmul__(self, s) -> "Cochain":
        return self.scale(s)

    def as_coeff(self, coeff: str) -> "Cochain":
        """Change of coefficients along ``L -> V -> V/L``."""
        if coeff == self.coeff:
            return self
        allowed = {(LATTICE, VECTOR), (LATTICE, TORUS), (VECTOR, TORUS)}
        if (self.coeff, coeff) not in allowed:
            raise ValueError(f"no natural map {self.coeff} -> {coeff}")
        return Cochain(self.complex, self.degree, self.values, coeff, self.lattice)

    def vector(self) -> "Cochain":
        """The image ``c_V`` under ``L -> V``."""
        return self.as_coeff(VECTOR)

    def is_zero(self) -> bool:
        return not any(self.values)

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        if (self.degree, self.lattice) != (other.degree, other.lattice) or self.complex != other.complex:
            return False
        if TORUS in (self.coeff, other.coeff):
            return all(Fraction(a - b).denominator == 1 for a, b in zip(self.values, other.values))
        return self.values == other.values

    def __hash__(self):
        return hash((self.degree, self.coeff, self.lattice, self.values))

    def evaluate(self, chain: Sequence[int]) -> tuple:
        """Pair with an integer chain given as weights on the ``p``-simplices."""
        r = self.lattice.rank
        out = [0] * r
        for i, w in enumerate(chain):
            if w:
                for k in range(r):
                    out[k] += w * self.values[i * r + k]
        return tuple(out)


def coboundary(x: Cochain) -> Cochain:
    """``(delta x)(v_0..v_{p+1}) = sum_i (-1)^i x(v_0..^v_i..v_{p+1})``."""
    X, r = x.complex, x.lattice.rank
    vals = []
    for faces in X.face_signs(x.degree):
        acc = [0] * r
        for j, sgn in faces:
            base = j * r
            for k in range(r):
                acc[k] += sgn * x.values[base + k]
        vals.extend(acc)
    return Cochain(X, x.degree + 1, vals, x.coeff, x.lattice)


_PRODUCT_COEFF = {
    (LATTICE, LATTICE): LATTICE,
    (LATTICE, VECTOR): VECTOR,
    (VECTOR, LATTICE): VECTOR,
    (VECTOR, VECTOR): VECTOR,
    (LATTICE, TORUS): TORUS,
    (TORUS, LATTICE): TORUS,
}


def cup(x: Cochain, y: Cochain, pairing: str = "tensor") -> Cochain:
    """Alexander--Whitney cup product.

    ``(x u y)(v_0..v_{p+q}) = x(v_0..v_p) (x) y(v_p..v_{p+q})``.  With
    ``pairing="tensor"`` the values land in ``L (x) L'``; with
    ``pairing="dot"`` they are contracted with the natural pairing
    ``L (x) Hom(L, Z) -> Z``.
    """
    if x.complex != y.complex:
        raise ValueError("cup product of cochains on different complexes")
    try:
        coeff = _PRODUCT_COEFF[(x.coeff, y.coeff)]
    except KeyError:
        raise ValueError(f"no declared pairing for {x.coeff} (x) {y.coeff} coefficients") from None
    X = x.complex
    p, q = x.degree, y.degree
    r1, r2 = x.lattice.rank, y.lattice.rank
    if pairing == "tensor":
        lattice = x.lattice.tensor(y.lattice)

        def combine(a, b):
            return [ai * bj for ai in a for bj in b]
    elif pairing == "dot":
        if not x.lattice.pairs_with(y.lattice):
            raise ValueError(f"lattices {x.lattice.name} and {y.lattice.name} are not dual")
        P = x.lattice.pairing_matrix.rows
        lattice = Z

        def combine(a, b):
            return [sum(a[i] * P[i][j] * b[j] for i in range(r1) for j in range(r2) if P[i][j])]
    else:
        raise ValueError(f"unknown pairing {pairing!r}")
    if p < 0 or q < 0:  # products with (-1)-cochains vanish
        return Cochain.zero(X, p + q, coeff, lattice)
    ix, iy = X._index.get(p, {}), X._index.get(q, {})
    vals = []
    for s in X.simplices(p + q):
        a = x.values[ix[s[:p + 1]] * r1:(ix[s[:p + 1]] + 1) * r1]
        b = y.values[iy[s[p:]] * r2:(iy[s[p:]] + 1) * r2]
        vals.extend(combine(a, b))
    return Cochain(X, p + q, vals, coeff, lattice)


def dot_pairing(x: Cochain, y: Cochain) -> Cochain:
    """Cup product followed by the natural pairing ``L (x) L^ -> Z``."""
    return cup(x, y, pairing="dot")


def unit(X: SimplicialComplex, coeff: str = LATTICE) -> Cochain:
    """The unit 0-cochain (constant 1)."""
    return Cochain(X, 0, [1] * X.count(0), coeff)


def is_coboundary(x: Cochain) -> bool:
    """Whether ``x`` is ``delta`` of a rational cochain (exact over Q)."""
    X, r = x.complex, x.lattice.rank
    if x.degree == 0:
        return x.is_zero()
    D = X.coboundary_matrix(x.degree - 1)
    for k in range(r):
        try:
            rational_solve(D, x.values[k::r])
        except InfeasibleSystem:
            return False
    return True


def cohomology(X: SimplicialComplex, p: int, coeff: str = LATTICE, lattice: Lattice = Z) -> AbelianGroupPresentation:
    """``H^p(X; A)`` for ``A`` in {``L``, ``V``, ``V/L``}.

    Lattice coefficients: ``ker delta_p / im delta_{p-1}`` via Smith normal
    form.  Vector coefficients give ``Q^{b_p}``.  Torus coefficients are read
    off the Smith form of ``delta_p``: a rational ``h`` with ``delta h``
    integral decomposes into ``(1/d_i) Z`` pieces and free directions, and
    quotienting by ``C^p(Z) + delta C^{p-1}(Q)`` leaves
    ``(+) Z/d_i (+) (Q/Z)^{b_p}``.
    """
    if p < 0:
        raise ValueError("degree must be non-negative")
    if p > X.dimension:
        return AbelianGroupPresentation()
    b = X.betti(p)
    if coeff == LATTICE:
        tors = tuple(d for d in X.coboundary_divisors(p - 1) if d > 1)
        one = AbelianGroupPresentation(free_rank=b, torsion=tors)
    elif coeff == VECTOR:
        one = AbelianGroupPresentation(vector_rank=b)
    elif coeff == TORUS:
        ds = X.coboundary_divisors(p)
        n, r, s = X.count(p), len(ds), X.coboundary_rank(p - 1)
        one = AbelianGroupPresentation.from_invariants(
            orders=[d for d in ds if d > 1], divisible_rank=n - r - s
        )
    else:
        raise ValueError(f"unknown coefficient system {coeff!r}")
    return one.times(lattice.rank)


def random_cochain(X: SimplicialComplex, degree: int, rng, coeff=LATTICE, lattice=Z, bound: int = 5):
    """A random cochain drawn from ``rng`` (see :mod:`tdk.rng`)."""
    n = X.count(degree) * lattice.rank
    if coeff == LATTICE:
        vals = [rng.randint(-bound, bound) for _ in range(n)]
    else:
        vals = [rng.fraction(bound) for _ in range(n)]
    return Cochain(X, degree, vals, coeff, lattice)


def random_integer_cocycle(X: SimplicialComplex, degree: int, rng, lattice=Z, bound: int = 3) -> Cochain:
    """A random element of ``Z^p(X; L)``: integer combination of the cocycle basis."""
    basis = X.integer_cocycle_basis(degree)
    n = X.count(degree)
    vals = [0] * (n * lattice.rank)
    for k in range(lattice.rank):
        for vec in basis:
            a = rng.randint(-bound, bound)
            if a:
                for i, v in enumerate(vec):
                    vals[i * lattice.rank + k] += a * v
    return Cochain(X, degree, vals, LATTICE, lattice)

"""Hopkins--Singer differential cochains on simplicial models.

``C^p(q)(X; L)`` consists of triples ``(c, h, w)``: an ``L``-valued
``p``-cochain ``c``, a ``V``-valued ``(p-1)``-cochain ``h`` and, when
``p >= q``, a ``V``-valued ``p``-cochain ``w`` standing in for a
differential form.  In this finite model the integration map from forms to
cochains is the identity, so the differential reads::

    d(c, h, w) = (delta c, c_V - w - delta h, delta w)      p >= q
    d(c, h)    = (delta c, c_V - delta h, 0)               p == q - 1
    d(c, h)    = (delta c, c_V - delta h)                  p <  q - 1

The product of ``(c1, h1, w1)`` of degree ``p`` with ``(c2, h2, w2)`` is::

    (c1 u c2,  (-1)^p c1 u h2 + h1 u w2,  w1 u w2)

with absent form slots read as zero.  Because forms *are* cochains here,
no correction homotopy between wedge and cup is needed and the Leibniz
rule holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .linalg import (
    AbelianGroupPresentation,
    InfeasibleSystem,
    Matrix,
    cokernel_presentation,
    integer_solve,
    left_kernel_basis,
    rank,
    rational_solve,
)
from .simplicial import (
    LATTICE,
    TORUS,
    VECTOR,
    Cochain,
    Lattice,
    SimplicialComplex,
    Z,
    coboundary,
    cohomology,
    cup,
    random_cochain,
    random_integer_cocycle,
)

__all__ = [
    "DiffCochain",
    "DiffCohomologyClass",
    "GeometricMorphism",
    "NotTrivialisable",
    "dcheck",
    "diff_cup",
    "dot",
    "curvature",
    "characteristic",
    "inclusion",
    "structure_maps",
    "diff_cohomology",
    "exact_sequences",
    "geometric_trivialisation",
    "topological_trivialisation",
    "is_zero_class",
    "holonomy_class",
    "pair_check",
]


class DiffCochain:
    """An element ``(c, h, omega)`` of ``C^p(q)(X; L)``."""

    __slots__ = ("p", "q", "c", "h", "omega")

    def __init__(self, p: int, q: int, c: Cochain, h: Cochain, omega: Optional[Cochain] = None):
        if c.degree != p or c.coeff != LATTICE:
            raise ValueError("c must be a lattice-valued cochain of degree p")
        if h.degree != p - 1 or h.coeff != VECTOR:
            raise ValueError("h must be a V-valued cochain of degree p-1")
        if (omega is not None) != (p >= q):
            raise ValueError(f"form slot must be present exactly when p >= q (p={p}, q={q})")
        if omega is not None and (omega.degree != p or omega.coeff != VECTOR):
            raise ValueError("omega must be a V-valued cochain of degree p")
        for part in (h, omega):
            if part is not None and (part.lattice != c.lattice or part.complex != c.complex):
                raise ValueError("all slots must share the complex and lattice")
        self.p, self.q, self.c, self.h, self.omega = p, q, c, h, omega

    @classmethod
    def zero(cls, X: SimplicialComplex, p: int, q: int, lattice: Lattice = Z) -> "DiffCochain":
        return cls(
            p, q,
            Cochain.zero(X, p, LATTICE, lattice),
            Cochain.zero(X, p - 1, VECTOR, lattice),
            Cochain.zero(X, p, VECTOR, lattice) if p >= q else None,
        )

    @classmethod
    def random(cls, X, p, q, rng, lattice=Z) -> "DiffCochain":
        return cls(
            p, q,
            random_cochain(X, p, rng, LATTICE, lattice),
            random_cochain(X, p - 1, rng, VECTOR, lattice),
            random_cochain(X, p, rng, VECTOR, lattice) if p >= q else None,
        )

    @classmethod
    def random_cocycle(cls, X, p, rng, lattice=Z) -> "DiffCochain":
        """Random element of the cocycles of ``C^p(p)``: ``w = c - delta h``."""
        c = random_integer_cocycle(X, p, rng, lattice)
        h = random_cochain(X, p - 1, rng, VECTOR, lattice)
        return cls(p, p, c, h, c.vector() - coboundary(h))

    @property
    def complex(self) -> SimplicialComplex:
        return self.c.complex

    @property
    def lattice(self) -> Lattice:
        return self.c.lattice

    def _form(self) -> Cochain:
        return self.omega if self.omega is not None else Cochain.zero(self.complex, self.p, VECTOR, self.lattice)

    def _same_shape(self, other: "DiffCochain"):
        if (self.p, self.q) != (other.p, other.q):
            raise ValueError(f"bidegree mismatch ({self.p},{self.q}) vs ({other.p},{other.q})")

    def __add__(self, other: "DiffCochain") -> "DiffCochain":
        self._same_shape(other)
        w = None if self.omega is None else self.omega + other.omega
        return DiffCochain(self.p, self.q, self.c + other.c, self.h + other.h, w)

    def __neg__(self) -> "DiffCochain":
        return DiffCochain(self.p, self.q, -self.c, -self.h, None if self.omega is None else -self.omega)

    def __sub__(self, other: "DiffCochain") -> "DiffCochain":
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, DiffCochain):
            return NotImplemented
        return (self.p, self.q, self.c, self.h, self.omega) == (other.p, other.q, other.c, other.h, other.omega)

    def __hash__(self):
        return hash((self.p, self.q, self.c, self.h, self.omega))

    def __repr__(self):
        return f"DiffCochain(p={self.p}, q={self.q}, c={list(self.c.values)}, h={list(self.h.values)}, " \
               f"omega={None if self.omega is None else list(self.omega.values)})"

    def is_zero(self) -> bool:
        return self.c.is_zero() and self.h.is_zero() and (self.omega is None or self.omega.is_zero())

    def with_filtration(self, q: int) -> "DiffCochain":
        """Re-read the same data in ``C^p(q)``; drops or adds a zero form slot.

        Used for the inclusions ``C^p(p-1) -> C^p(p)`` of geometric morphisms.
        """
        if q <= self.p:
            return DiffCochain(self.p, q, self.c, self.h, self._form())
        if self.omega is not None and not self.omega.is_zero():
            raise ValueError("cannot drop a nonzero form slot")
        return DiffCochain(self.p, q, self.c, self.h, None)


def dcheck(x: DiffCochain) -> DiffCochain:
    """The differential ``C^p(q) -> C^{p+1}(q)`` (all three branches)."""
    p, q = x.p, x.q
    dc = coboundary(x.c)
    if p >= q:
        return DiffCochain(p + 1, q, dc, x.c.vector() - x.omega - coboundary(x.h), coboundary(x.omega))
    h_new = x.c.vector() - coboundary(x.h)
    if p == q - 1:
        return DiffCochain(p + 1, q, dc, h_new, Cochain.zero(x.complex, p + 1, VECTOR, x.lattice))
    return DiffCochain(p + 1, q, dc, h_new, None)


def diff_cup(x: DiffCochain, y: DiffCochain, pairing: str = "tensor") -> DiffCochain:
    """Bigraded product ``C^p(q) x C^p'(q') -> C^{p+p'}(q+q')``."""
    p, P, Q = x.p, x.p + y.p, x.q + y.q
    c = cup(x.c, y.c, pairing)
    sign = -1 if p % 2 else 1
    h = cup(x.c.vector(), y.h, pairing).scale(sign) + cup(x.h, y._form(), pairing)
    w = cup(x._form(), y._form(), pairing) if P >= Q else None
    return DiffCochain(P, Q, c, h, w)


def dot(x: DiffCochain, y: DiffCochain) -> DiffCochain:
    """Product followed by the natural pairing ``L (x) L^ -> Z``."""
    return diff_cup(x, y, pairing="dot")


def is_cocycle(x: DiffCochain) -> bool:
    return dcheck(x).is_zero()


class DiffCohomologyClass:
    """A class in ``H^p(X; L)`` given by a cocycle of ``C^p(p)``."""

    __slots__ = ("representative",)

    def __init__(self, representative: DiffCochain):
        if representative.p != representative.q:
            raise ValueError("differential cohomology classes live in C^p(p)")
        if not is_cocycle(representative):
            raise ValueError("representative is not a cocycle")
        self.representative = representative

    @property
    def p(self):
        return self.representative.p

    def __eq__(self, other):
        if not isinstance(other, DiffCohomologyClass):
            return NotImplemented
        return is_zero_class(self.representative - other.representative)

    def __hash__(self):  # classes are compared up to coboundaries
        raise TypeError("DiffCohomologyClass is unhashable")


def curvature(x: DiffCochain) -> Cochain:
    """``Curv``: the form slot of a cocycle."""
    if x.omega is None:
        raise ValueError("curvature needs a form slot (p >= q)")
    return x.omega


def characteristic(x: DiffCochain) -> Cochain:
    """Integral cocycle ``c`` representing the characteristic class."""
    return x.c


def inclusion(eta: Cochain) -> DiffCochain:
    """``i``: a ``V``-valued ``(p-1)``-cochain ``eta`` maps to ``(0, -eta, delta eta)``.

    The result is a cocycle with ``Curv = delta eta`` and vanishing
    characteristic class.
    """
    if eta.coeff != VECTOR:
        raise ValueError("i takes V-valued cochains")
    p = eta.degree + 1
    X = eta.complex
    return DiffCochain(p, p, Cochain.zero(X, p, LATTICE, eta.lattice), -eta, coboundary(eta))


def flat_class(x: DiffCochain) -> Cochain:
    """For a cocycle with ``Curv = 0`` return ``h`` as a ``V/L``-cocycle.

    This is the map ``ker(Curv) -> H^{p-1}(X; V/L)`` of the curvature sequence.
    """
    if curvature(x).is_zero() is False:
        raise ValueError("class is not flat")
    return x.h.as_coeff(TORUS)


def _components(cochain: Cochain):
    r = cochain.lattice.rank
    return [cochain.values[k::r] for k in range(r)]


def _interleave(columns, r):
    out = []
    for i in range(len(columns[0]) if columns else 0):
        out.extend(col[i] for col in columns)
    return out


def _integer_coboundary_solve(c: Cochain) -> Cochain:
    """Integral ``c'`` with ``delta c' = c``; raises ``InfeasibleSystem``."""
    X, p, r = c.complex, c.degree, c.lattice.rank
    if p == 0:
        if c.is_zero():
            return Cochain.zero(X, -1, LATTICE, c.lattice)
        raise InfeasibleSystem("nonzero 0-cochain is not a coboundary", ())
    D = X.coboundary_matrix(p - 1)
    cols = [integer_solve(D, comp) for comp in _components(c)]
    return Cochain(X, p - 1, _interleave(cols, r), LATTICE, c.lattice)


def _rational_coboundary_solve(v: Cochain) -> Cochain:
    X, p, r = v.complex, v.degree, v.lattice.rank
    if p == 0:
        if v.is_zero():
            return Cochain.zero(X, -1, VECTOR, v.lattice)
        raise InfeasibleSystem("nonzero 0-cochain is not a coboundary", ())
    D = X.coboundary_matrix(p - 1)
    cols = [rational_solve(D, comp) for comp in _components(v)]
    return Cochain(X, p - 1, _interleave(cols, r), VECTOR, v.lattice)


@dataclass(frozen=True)
class GeometricMorphism:
    """``witness`` in ``C^{p-1}(p-1)`` with ``target = source + d(witness)``."""

    source: DiffCochain
    target: DiffCochain
    witness: DiffCochain

    def __post_init__(self):
        p = self.target.p
        if self.witness.p != p - 1 or self.witness.q != p - 1:
            raise ValueError("witness must lie in C^{p-1}(p-1)")
        image = dcheck(self.witness).with_filtration(p)
        if self.source + image != self.target:
            raise ValueError("target != source + d(witness)")


class NotTrivialisable(Exception):
    """No trivialisation exists; ``certificate`` explains why."""

    def __init__(self, reason: str, certificate=None, residual=None):
        super().__init__(reason)
        self.reason = reason
        self.certificate = certificate
        self.residual = residual


def geometric_trivialisation(x: DiffCochain) -> GeometricMorphism:
    """Find ``a`` in ``C^{p-1}(p-1)`` with ``d a = x`` or raise :class:`NotTrivialisable`.

    Two tiers: an integer solve for ``c = delta c'`` and then a rational
    choice of the lower slots.  With the form slot of ``a`` free, the second
    tier always succeeds: ``w' = c' - h`` and ``h' = 0``.
    """
    if x.p != x.q:
        raise ValueError("geometric trivialisation is defined on C^p(p)")
    if not is_cocycle(x):
        raise ValueError("x is not a cocycle")
    try:
        c1 = _integer_coboundary_solve(x.c)
    except InfeasibleSystem as exc:
        raise NotTrivialisable("characteristic class is nonzero", exc.certificate) from None
    X, p, L = x.complex, x.p, x.lattice
    alpha = DiffCochain(p - 1, p - 1, c1, Cochain.zero(X, p - 2, VECTOR, L), c1.vector() - x.h)
    return GeometricMorphism(DiffCochain.zero(X, p, p, L), x, alpha)


def topological_trivialisation(x: DiffCochain) -> DiffCochain:
    """Find ``a`` in ``C^{p-1}(p)`` (no form slot) with ``d a = x``.

    Needs ``Curv x = 0`` and then a mixed integer/rational solve:
    ``c = delta c'`` with ``c'`` integral and ``h - c'`` rationally exact.
    ``c'`` may be shifted by any integral cocycle ``k``; projecting away the
    exact cochains turns the second condition into an integer system in the
    coordinates of ``k``.
    """
    if x.p != x.q:
        raise ValueError("topological trivialisation is defined on C^p(p)")
    if not is_cocycle(x):
        raise ValueError("x is not a cocycle")
    if not x.omega.is_zero():
        raise NotTrivialisable("curvature is nonzero", residual=x.omega)
    try:
        c0 = _integer_coboundary_solve(x.c)
    except InfeasibleSystem as exc:
        raise NotTrivialisable("characteristic class is nonzero", exc.certificate) from None
    X, p, L = x.complex, x.p, x.lattice
    r = L.rank
    n1 = X.count(p - 1)
    kbasis = X.integer_cocycle_basis(p - 1)
    Dlow = X.coboundary_matrix(p - 2) if p >= 2 else Matrix.zeros(n1, 0)
    proj = left_kernel_basis(Dlow) if Dlow.ncols else [tuple(int(i == j) for j in range(n1)) for i in range(n1)]
    P = Matrix(proj, ncols=n1) if proj else Matrix.zeros(0, n1)
    K = Matrix.from_columns(kbasis, n1)
    PK = P @ K if kbasis else Matrix.zeros(P.nrows, 0)
    shifts = []
    rest = x.h - c0.vector()
    for k, comp in enumerate(_components(rest)):
        rhs = P @ comp if P.nrows else ()
        try:
            z = integer_solve(PK, rhs)
        except InfeasibleSystem as exc:
            raise NotTrivialisable(
                "holonomy is not integral: h - c' is not exact for any integral c'", exc.certificate
            ) from None
        shifts.append(K @ z if kbasis else (0,) * n1)
    c1 = c0 + Cochain(X, p - 1, _interleave(shifts, r), LATTICE, L)
    h1 = _rational_coboundary_solve(c1.vector() - x.h)
    alpha = DiffCochain(p - 1, p, c1, h1, None)
    assert dcheck(alpha) == x
    return alpha


def is_zero_class(x: DiffCochain) -> bool:
    """Whether the cocycle ``x`` represents ``0`` in differential cohomology."""
    try:
        topological_trivialisation(x)
    except NotTrivialisable:
        return False
    return True


@dataclass(frozen=True)
class StructureMaps:
    curvature: Cochain
    characteristic: Cochain
    characteristic_vanishes: bool
    curvature_has_lattice_periods: bool


def structure_maps(x: DiffCochain) -> StructureMaps:
    """``Curv`` and the characteristic class of a cocycle of ``C^p(p)``.

    ``Curv x`` always has lattice periods: it differs from ``c`` by
    ``delta h``.  That is checked here rather than assumed.
    """
    if x.p != x.q or not is_cocycle(x):
        raise ValueError("structure maps are defined on cocycles of C^p(p)")
    w = curvature(x)
    try:
        _integer_coboundary_solve(x.c)
        vanishes = True
    except InfeasibleSystem:
        vanishes = False
    periods_ok = True
    try:
        _rational_coboundary_solve(w - x.c.vector())
    except InfeasibleSystem:
        periods_ok = False
    return StructureMaps(w, x.c, vanishes, periods_ok and coboundary(w).is_zero())


def diff_cohomology(X: SimplicialComplex, p: int, lattice: Lattice = Z) -> AbelianGroupPresentation:
    """Isomorphism type of ``H^p(X; L)`` by direct kernel/image computation.

    A cocycle is determined by ``(c, h)`` with ``c`` an integral cocycle, and
    the coboundaries are ``(delta c', c' - delta h')``.  Quotienting ``h`` by
    ``delta C^{p-2}(Q)`` first leaves ``(Z^z + Q^m) / <(Y c', R c')>`` where
    ``Y`` expresses ``delta c'`` in a cocycle basis and ``R`` projects onto
    ``C^{p-1}(Q) / im delta``.  Since the ``Q``-part is divisible the group
    splits as ``coker(Y) + (Q/Z)^t + Q^{m-t}`` with
    ``t = rank_Q R(ker_Z Y)``.
    """
    if p < 1:
        raise ValueError("differential cohomology is taken in degree p >= 1")
    n1 = X.count(p - 1)
    np_ = X.count(p)
    K = X.integer_cocycle_basis(p)
    if K and n1:
        Kmat = Matrix.from_columns(K, np_)
        D = X.coboundary_matrix(p - 1)
        cols = [rational_solve(Kmat, col) for col in D.columns()]
        Y = Matrix.from_columns(cols, len(K))
        if not Y.is_integral():
            raise AssertionError("cocycle basis is not saturated")
        top = cokernel_presentation(Y)
    else:
        top = AbelianGroupPresentation(free_rank=len(K))
    if n1:
        Dlow = X.coboundary_matrix(p - 2) if p >= 2 else Matrix.zeros(n1, 0)
        R = left_kernel_basis(Dlow) if Dlow.ncols else [tuple(int(i == j) for j in range(n1)) for i in range(n1)]
        m = len(R)
        low_cocycles = X.integer_cocycle_basis(p - 1)
        if R and low_cocycles:
            RK = Matrix(R, ncols=n1) @ Matrix.from_columns(low_cocycles, n1)
            t = rank(RK)
        else:
            t = 0
    else:
        m = t = 0
    one = top + AbelianGroupPresentation(divisible_rank=t, vector_rank=m - t)
    return one.times(lattice.rank)


def exact_sequences(X: SimplicialComplex, p: int, lattice: Lattice = Z) -> dict:
    """Assemble ``H^p`` from each of its two short exact sequences.

    curvature sequence: ``H^{p-1}(V/L)`` then closed forms with lattice
    periods (free part of ``H^p(L)`` plus the exact forms ``Q^{rank delta}``).

    characteristic sequence: forms modulo lattice-period forms
    (``(Q/Z)^{b_{p-1}} + Q^{rank delta_{p-1}}``) then ``H^p(L)``.

    Both extensions have divisible kernels, so they split and the
    presentations must agree with :func:`diff_cohomology`.
    """
    r = lattice.rank
    hp = cohomology(X, p, LATTICE, lattice)
    exact_forms = AbelianGroupPresentation(vector_rank=X.coboundary_rank(p - 1) * r)
    flat = cohomology(X, p - 1, TORUS, lattice) if p - 1 >= 0 else AbelianGroupPresentation()
    curv_image = hp.free_part() + exact_forms
    via_curv = flat + curv_image
    forms_mod = AbelianGroupPresentation(divisible_rank=X.betti(p - 1) * r) + exact_forms
    via_char = forms_mod + hp
    direct = diff_cohomology(X, p, lattice)
    return {
        "direct": direct,
        "flat": flat,
        "curvature_image": curv_image,
        "via_curvature_sequence": via_curv,
        "forms_mod_periods": forms_mod,
        "characteristic_image": hp,
        "via_characteristic_sequence": via_char,
        "consistent": direct == via_curv == via_char,
    }


def holonomy_class(X: SimplicialComplex, value=Fraction(1, 3), simplex=None) -> DiffCochain:
    """Flat degree-2 cocycle ``(0, h, 0)`` with ``h`` = ``value`` on one edge.

    On a circle this is the flat line bundle with holonomy ``exp(2 pi i value)``.
    """
    edge = simplex if simplex is not None else X.simplices(1)[0]
    h = Cochain.indicator(X, edge, VECTOR).scale(Fraction(value))
    x = DiffCochain(2, 2, Cochain.zero(X, 2), h, Cochain.zero(X, 2, VECTOR))
    if not is_cocycle(x):
        raise ValueError("(0, h, 0) is not a cocycle on this complex")
    return x


@dataclass
class PairReport:
    valid: bool
    sigma: Optional[DiffCochain]
    residual: Optional[DiffCochain]
    char_cup_vanishes: bool
    reason: str = ""
    details: dict = field(default_factory=dict)


def pair_check(P: DiffCochain, Phat: DiffCochain, sigma: Optional[DiffCochain] = None) -> PairReport:
    """Validate the data of a differential T-duality pair on a simplicial base.

    ``sigma`` in ``C^3(3)(X; Z)`` must satisfy ``d sigma = P . Phat`` (read in
    ``C^4(4)``).  Without ``sigma`` one is searched for.  The report also
    records whether ``c(P) u c(Phat)`` is an integral coboundary, which a
    valid pair forces.
    """
    for name, x in (("P", P), ("Phat", Phat)):
        if (x.p, x.q) != (2, 2):
            raise ValueError(f"{name} must lie in C^2(2)")
        if not is_cocycle(x):
            raise ValueError(f"{name} is not a cocycle")
    if not P.lattice.pairs_with(Phat.lattice):
        raise ValueError(f"lattices {P.lattice.name} and {Phat.lattice.name} are not dual")
    target = dot(P, Phat)
    try:
        _integer_coboundary_solve(target.c)
        char_vanishes = True
    except InfeasibleSystem:
        char_vanishes = False
    if sigma is not None:
        if (sigma.p, sigma.q) != (3, 3) or sigma.lattice != Z:
            raise ValueError("sigma must lie in C^3(3)(X; Z)")
        residual = target - dcheck(sigma).with_filtration(4)
        ok = residual.is_zero()
        return PairReport(ok, sigma, residual, char_vanishes,
                          "" if ok else "d(sigma) differs from P.Phat")
    try:
        morphism = geometric_trivialisation(target)
    except NotTrivialisable as exc:
        return PairReport(False, None, None, char_vanishes, exc.reason, {"certificate": exc.certificate})
    return PairReport(True, morphism.witness, DiffCochain.zero(target.complex, 4, 4), char_vanishes)

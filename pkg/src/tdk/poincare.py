"""Equivariant line bundles on ``R^2`` descending to ``T^2``.

The lattice ``Z^2`` acts by ``(n, m): (theta, xi) -> (theta + (n, m),
exp(2 pi i E(n, m, theta)) xi)`` with ``E`` a polynomial, and the connection
is ``d + A`` with ``A`` a 1-form whose coefficients may be polynomial in
``theta``.  Exponents of phases are handled with sympy; forms are
:class:`~tdk.fourier.FourierForm` objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

import sympy

from .expr import evaluate
from .fourier import FourierForm, is_geometrically_invariant
from .linalg import InfeasibleSystem, Matrix, integer_solve, rational_solve
from .scalars import I, PI, Cyclotomic, FormalScalar, exp_pi_i

__all__ = [
    "EquivariantLineBundle",
    "check_equivariance",
    "curvature",
    "holonomy",
    "holonomy_exponent",
    "cs_difference",
    "fixed_obstruction_check",
    "stokes_check",
    "random_rectilinear_loop",
]

TWO_PI_I = 2 * PI * I
_N, _M, _T1, _T2 = sympy.symbols("n m theta1 theta2")
_SYMBOLS = {"n": _N, "m": _M, "theta1": _T1, "theta2": _T2}


def _parse_exponent(text: str) -> sympy.Expr:
    expr = sympy.sympify(evaluate(text, _SYMBOLS))
    if not expr.is_polynomial(_N, _M, _T1, _T2):
        raise ValueError("phase exponent must be a polynomial in n, m, theta1, theta2")
    return sympy.expand(expr)


def _poly_to_form(expr: sympy.Expr, scale: FormalScalar) -> FourierForm:
    """A polynomial function of theta (rational coefficients) times ``scale``."""
    expr = sympy.expand(expr)
    if expr == 0:
        return FourierForm.zero(2)
    poly = sympy.Poly(expr, _T1, _T2)
    terms = {}
    for (e1, e2), c in poly.terms():
        if not c.is_Rational:
            raise ValueError(f"non-rational coefficient {c}")
        terms[((0, 0), (e1, e2), ())] = scale * Fraction(int(c.p), int(c.q))
    return FourierForm(2, terms)


def _integer_valued(expr: sympy.Expr, variables: Sequence[sympy.Symbol]) -> bool:
    """Whether a rational polynomial takes integer values on ``Z^v``.

    The binomial-basis coefficients are finite differences at the origin, so
    checking the box ``{0..D}^v`` (``D`` the total degree) suffices.
    """
    expr = sympy.expand(expr)
    if expr == 0:
        return True
    D = sympy.Poly(expr, *variables).total_degree()
    for pt in itertools.product(range(D + 1), repeat=len(variables)):
        val = expr.subs(dict(zip(variables, pt)))
        if not (val.is_Integer):
            return False
    return True


class EquivariantLineBundle:
    """Phase exponent ``E(n, m, theta1, theta2)`` and connection 1-form ``A``."""

    def __init__(self, phase_exponent: str, connection: FourierForm, name: str | None = None):
        if connection.n != 2:
            raise ValueError("connection must be a form on T^2")
        if any(len(idx) != 1 for (_, _, idx) in connection.terms):
            raise ValueError("connection must be a 1-form")
        self.phase_text = str(phase_exponent)
        self.E = _parse_exponent(self.phase_text)
        self.A = connection
        self.name = name
        rep = self.cocycle_report()
        if not rep["cocycle"]:
            raise ValueError(f"action does not satisfy the cocycle condition: defect {rep['defect']}")

    def exponent(self, v: Sequence[int]) -> sympy.Expr:
        return sympy.expand(self.E.subs({_N: v[0], _M: v[1]}))

    def phase_form_exponent(self, v) -> FourierForm:
        """``g_v^{-1} d g_v = 2 pi i dE_v`` as a form."""
        Ev = self.exponent(v)
        out = FourierForm.zero(2)
        for j, sym in enumerate((_T1, _T2)):
            coeff = _poly_to_form(sympy.diff(Ev, sym), TWO_PI_I)
            out = out + coeff.wedge(FourierForm.dtheta(2, j + 1))
        return out

    def cocycle_report(self) -> dict:
        """``E(g, theta + h) + E(h, theta) - E(g + h, theta)`` must be an integer constant."""
        n1, m1, n2, m2 = sympy.symbols("n1 m1 n2 m2")
        E = self.E

        def at(n, m, t1, t2):
            return E.subs({_N: n, _M: m, _T1: t1, _T2: t2}, simultaneous=True)

        defect = sympy.expand(at(n1, m1, _T1 + n2, _T2 + m2) + at(n2, m2, _T1, _T2) - at(n1 + n2, m1 + m2, _T1, _T2))
        theta_free = sympy.diff(defect, _T1) == 0 and sympy.diff(defect, _T2) == 0
        ok = theta_free and _integer_valued(defect, (n1, m1, n2, m2))
        # commutativity of the generators: (1,0) then (0,1) versus the reverse
        a = sympy.expand(at(0, 1, _T1 + 1, _T2) + at(1, 0, _T1, _T2))
        b = sympy.expand(at(1, 0, _T1, _T2 + 1) + at(0, 1, _T1, _T2))
        comm = sympy.expand(a - b)
        commute = comm.is_Integer if comm.free_symbols == set() else False
        return {"cocycle": bool(ok), "defect": str(defect), "generators_commute": bool(commute),
                "commutator_exponent": str(comm)}

    def to_json(self) -> dict:
        doc = {"phase_exponent": self.phase_text, "connection": self.A.to_json()}
        if self.name:
            doc["name"] = self.name
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "EquivariantLineBundle":
        return cls(doc["phase_exponent"], FourierForm.from_json(doc["connection"]), doc.get("name"))

    def __eq__(self, other):
        return isinstance(other, EquivariantLineBundle) and self.to_json() == other.to_json()

    def __repr__(self):
        return f"EquivariantLineBundle({self.name or self.phase_text!r}, A={self.A})"


@dataclass
class EquivarianceReport:
    passed: bool
    cocycle: bool
    generators_commute: bool
    residuals: dict

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "cocycle": self.cocycle,
            "generators_commute": self.generators_commute,
            "residuals": {k: str(v) for k, v in self.residuals.items()},
        }


def check_equivariance(L: EquivariantLineBundle) -> EquivarianceReport:
    """Residuals ``A(theta + v) - A(theta) - g_v^{-1} dg_v`` for ``v = (1,0), (0,1)``."""
    rep = L.cocycle_report()
    residuals = {}
    for v in ((1, 0), (0, 1)):
        r = L.A.translate(v) - L.A - L.phase_form_exponent(v)
        residuals[f"({v[0]},{v[1]})"] = r
    ok = rep["cocycle"] and all(r.is_zero() for r in residuals.values())
    return EquivarianceReport(ok, rep["cocycle"], rep["generators_commute"], residuals)


def curvature(L: EquivariantLineBundle) -> FourierForm:
    return L.A.d()


def _segment_integral(A: FourierForm, a: Sequence[Fraction], b: Sequence[Fraction]) -> FormalScalar:
    moving = [j for j in range(2) if a[j] != b[j]]
    if not moving:
        return FormalScalar()
    if len(moving) != 1:
        raise ValueError("loop segments must be axis-parallel")
    j = moving[0]
    total = FormalScalar()
    for (k, e, idx), c in A.terms.items():
        if idx != (j,):
            continue
        if any(k):
            raise ValueError("holonomy needs a connection without oscillating modes")
        fixed = Fraction(1)
        for t in range(2):
            if t != j:
                fixed *= Fraction(a[t]) ** e[t]
        p = e[j] + 1
        total = total + c * (fixed * (Fraction(b[j]) ** p - Fraction(a[j]) ** p) / p)
    return total


def _points(loop) -> list:
    pts = [tuple(Fraction(x) for x in p) for p in loop]
    if len(pts) < 2:
        raise ValueError("a loop needs at least two points")
    for p in pts:
        if len(p) != 2:
            raise ValueError("loop points must lie in the plane")
    return pts


def holonomy_exponent(L: EquivariantLineBundle, loop: Sequence[Sequence]) -> Fraction:
    """``q`` in ``[0, 2)`` with holonomy ``exp(pi i q)``.

    ``loop`` lists the corners of an axis-parallel path in ``R^2`` whose end
    differs from its start by a lattice vector ``w``.  The holonomy is
    ``exp(-int A) * g_w(start)^{-1}``.
    """
    pts = _points(loop)
    w = tuple(pts[-1][j] - pts[0][j] for j in range(2))
    if any(x.denominator != 1 for x in w):
        raise ValueError("loop does not close up on the torus")
    integral = FormalScalar()
    for a, b in zip(pts, pts[1:]):
        integral = integral + _segment_integral(L.A, a, b)
    q = integral.pi_i_multiple()
    if q is None:
        raise ValueError(f"transport integral {integral} is not a rational multiple of pi*i")
    Ew = L.exponent((int(w[0]), int(w[1]))).subs({_T1: pts[0][0], _T2: pts[0][1]})
    if not Ew.is_Rational:
        raise ValueError("cocycle phase at the base point is not rational")
    total = -q - 2 * Fraction(int(Ew.p), int(Ew.q))
    return total % 2


def holonomy(L: EquivariantLineBundle, loop: Sequence[Sequence]) -> FormalScalar:
    """Holonomy as an exact root of unity."""
    return exp_pi_i(holonomy_exponent(L, loop))


def shoelace_area(loop) -> Fraction:
    pts = _points(loop)
    s = Fraction(0)
    for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
        s += x1 * y2 - x2 * y1
    return s / 2


def random_rectilinear_loop(rng, moves: int = 3, bound: int = 3, den: int = 4) -> list:
    """Closed axis-parallel loop with rational corners (contractible: returns to its start)."""
    x0, y0 = rng.fraction(bound, den), rng.fraction(bound, den)
    pts = [(x0, y0)]
    x, y = x0, y0
    for _ in range(moves):
        x = x + rng.fraction(bound, den)
        pts.append((x, y))
        y = y + rng.fraction(bound, den)
        pts.append((x, y))
    pts.append((x0, y))
    pts.append((x0, y0))
    return pts


def stokes_check(L: EquivariantLineBundle, loop) -> dict:
    """Compare holonomy of a contractible loop with ``exp(-flux)`` of constant curvature."""
    pts = _points(loop)
    if pts[0] != pts[-1]:
        raise ValueError("Stokes check needs a loop that returns to its start")
    F = curvature(L)
    if not is_geometrically_invariant(F) or any(idx != (0, 1) for (_, _, idx) in F.terms):
        raise ValueError("Stokes check needs constant curvature")
    c = F.coefficient(idx=(0, 1))
    flux = c * shoelace_area(pts)
    q = flux.pi_i_multiple()
    if q is None:
        raise ValueError("flux is not a rational multiple of pi*i")
    expected = (-q) % 2
    got = holonomy_exponent(L, pts)
    return {"holonomy": got, "expected": expected, "area": shoelace_area(pts), "passed": got == expected}


def cs_difference(L: EquivariantLineBundle, t) -> FourierForm:
    """``t^*A - A`` for translation by ``t`` in the ``theta1`` direction."""
    return L.A.translate((Fraction(t), 0)) - L.A


@dataclass
class ObstructionReport:
    feasible: bool
    N: int
    cutoff: int
    certificate: dict | None
    solution: dict | None
    blocks: int
    details: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "N": self.N,
            "cutoff": self.cutoff,
            "certificate": self.certificate,
            "solution": self.solution,
            "blocks": self.blocks,
        }


def _mul_block(kappa: Cyclotomic, M: int) -> list[list[Fraction]]:
    """Matrix of multiplication by ``kappa`` on ``Q(zeta_M)`` in the power basis."""
    kappa = kappa.lift(M)
    cols = [(kappa * Cyclotomic.root(M, j)).lift(M).coeffs for j in range(kappa.degree)]
    n = kappa.degree
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def fixed_obstruction_check(L: EquivariantLineBundle, N: int, cutoff: int = 3) -> ObstructionReport:
    """Look for ``a`` with ``cs(t) = t^*a - a + d b_t + rho_t`` for all ``t`` in ``(1/N) Z/N``.

    ``a`` and the functions ``b_t`` range over Fourier modes with
    ``|k|_inf <= cutoff``; ``rho_t = 2 pi i (x_t dtheta1 + y_t dtheta2)`` with
    integers ``x_t, y_t``.  The zero mode only sees ``rho`` and is an integer
    system; each nonzero mode is a linear system over ``Q(zeta)`` solved per
    power of ``pi`` after writing ``b_t = b'_t / (2 pi)``.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    ts = [Fraction(j, N) for j in range(N)]
    cs = [cs_difference(L, t) for t in ts]
    for c in cs:
        if not c.is_periodic():
            raise ValueError("Chern-Simons difference is not periodic; is the bundle equivariant?")
    blocks = 0
    # zero mode: cs_0(t) = rho_t
    rhs = []
    for c in cs:
        for j in range(2):
            val = c.coefficient(idx=(j,)) / TWO_PI_I
            q = val.as_rational()
            if q is None:
                return ObstructionReport(False, N, cutoff, {
                    "block": "zero-mode", "reason": f"period {c.coefficient(idx=(j,))} is not in 2*pi*i*Q"
                }, None, 1)
            rhs.append(q)
    blocks += 1
    unknowns = 2 * len(ts)
    try:
        xy = integer_solve(Matrix.identity(unknowns), rhs)
    except InfeasibleSystem as exc:
        y = exc.certificate
        witness = [{"t": str(ts[r // 2]), "component": f"dtheta{r % 2 + 1}", "weight": str(y[r]),
                    "period_over_2pi_i": str(rhs[r])} for r in range(unknowns) if y[r]]
        return ObstructionReport(False, N, cutoff, {
            "block": "zero-mode",
            "reason": "a period of t*A - A is not in 2*pi*i*Z",
            "y": [str(v) for v in y],
            "y_dot_b": str(sum(a * b for a, b in zip(y, rhs))),
            "entries": witness,
        }, None, blocks)
    # nonzero modes
    modes = set()
    for c in cs:
        modes |= {k for k in c.modes() if any(k)}
    within = {k for k in itertools.product(range(-cutoff, cutoff + 1), repeat=2) if any(k)}
    alpha = FourierForm.zero(2)
    for k in sorted(modes | within):
        rhs_terms = [[c.coefficient(k=k, idx=(j,)) for j in range(2)] for c in cs]
        if all(x.is_zero() for row in rhs_terms for x in row):
            continue  # homogeneous block: zero solution
        blocks += 1
        if k not in within:
            return ObstructionReport(False, N, cutoff, {
                "block": f"mode {k}", "reason": "right-hand side has a mode beyond the cutoff"
            }, None, blocks)
        M = 4 * N
        for row in rhs_terms:
            for x in row:
                for cyc in x.terms.values():
                    M = M * cyc.M // gcd(M, cyc.M)
        phi = len(Cyclotomic.root(M, 0).lift(M).coeffs)
        degrees = sorted({d for row in rhs_terms for x in row for d in x.terms})
        sol_by_degree = {}
        for dgr in degrees:
            # unknowns: alpha_k1, alpha_k2, then b'_t for each t, each a Q(zeta_M)-element
            n_unk = 2 + len(ts)
            rows = []
            b = []
            for ti, t in enumerate(ts):
                shift = exp_pi_i(2 * k[0] * t).coefficient(0) - 1
                for j in range(2):
                    coeffs = [Cyclotomic.rational(0)] * n_unk
                    coeffs[j] = shift
                    coeffs[2 + ti] = Cyclotomic.root(4, 1) * k[j]
                    blk = [_mul_block(cf, M) for cf in coeffs]
                    for r in range(phi):
                        rows.append([blk[u][r][s] for u in range(n_unk) for s in range(phi)])
                    b.extend(rhs_terms[ti][j].coefficient(dgr).lift(M).coeffs)
            try:
                x = rational_solve(Matrix(rows, ncols=n_unk * phi), b)
            except InfeasibleSystem as exc:
                return ObstructionReport(False, N, cutoff, {
                    "block": f"mode {k}, pi^{dgr}", "reason": "no solution over the truncated Fourier space",
                    "y": [str(v) for v in exc.certificate],
                }, None, blocks)
            sol_by_degree[dgr] = x
        for j in range(2):
            val = FormalScalar({dgr: Cyclotomic(M, x[j * phi:(j + 1) * phi]) for dgr, x in sol_by_degree.items()})
            alpha = alpha + FourierForm(2, {(k, (0, 0), (j,)): val})
    return ObstructionReport(True, N, cutoff, None, {
        "alpha": alpha.to_json(),
        "rho_over_2pi_i": [[str(xy[2 * i]), str(xy[2 * i + 1])] for i in range(len(ts))],
    }, blocks)


def standard_bundle() -> EquivariantLineBundle:
    """Cocycle ``exp(2 pi i n theta2)`` with ``A = 2 pi i theta1 dtheta2``."""
    A = FourierForm.theta(2, 1).wedge(FourierForm.dtheta(2, 2)).scale(TWO_PI_I)
    return EquivariantLineBundle("n*theta2", A, name="poincare-standard")


def paper_bundle() -> EquivariantLineBundle:
    """Cocycle ``exp(2 pi i (n theta2 + m theta1))`` with ``A = pi i (theta1 dtheta2 - theta2 dtheta1)``."""
    t1, t2 = FourierForm.theta(2, 1), FourierForm.theta(2, 2)
    A = (t1.wedge(FourierForm.dtheta(2, 2)) - t2.wedge(FourierForm.dtheta(2, 1))).scale(PI * I)
    return EquivariantLineBundle("n*theta2 + m*theta1", A, name="poincare-paper")


def trivial_bundle() -> EquivariantLineBundle:
    return EquivariantLineBundle("0", FourierForm.zero(2), name="poincare-trivial")

"""Exact linear algebra over the integers and the rationals.

Everything here works on Python ``int`` and :class:`fractions.Fraction`, so
there is no overflow and no rounding.  The sizes we care about are "desk
scale" (a few hundred rows), so dense row/column elimination is plenty.

The main entry points are

* :func:`smith_normal_form` -- unimodular ``U``, ``V`` with ``U M V = D``;
* :func:`cokernel_presentation` -- the abelian group ``Z^rows / im M``;
* :func:`rational_solve` / :func:`integer_solve` -- solve ``A x = b`` or
  raise :class:`InfeasibleSystem` carrying a certificate.

>>> M = Matrix([[2, 0], [0, 3]])
>>> U, D, V = smith_normal_form(M)
>>> D.diagonal()
(1, 6)
>>> print(cokernel_presentation(Matrix([[2], [0]])))
Z x C2
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

__all__ = [
    "Matrix",
    "AbelianGroupPresentation",
    "InfeasibleSystem",
    "smith_normal_form",
    "elementary_divisors",
    "cokernel_presentation",
    "rational_solve",
    "integer_solve",
    "rank",
    "kernel_basis",
    "integer_kernel_basis",
    "left_kernel_basis",
]


def _canon(x):
    """Return an int when a Fraction is integral, otherwise the Fraction."""
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        raise TypeError("floating point entries are not allowed")
    return _canon(Fraction(x))


class Matrix:
    """Immutable dense matrix with ``int`` / ``Fraction`` entries.

    Integral entries are always stored as ``int``; a matrix whose entries are
    all integral is what the rest of the package calls an *IntMatrix*.
    """

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(_canon(x) for x in row) for row in rows)
        if data:
            widths = {len(r) for r in data}
            if len(widths) != 1:
                raise ValueError("ragged matrix rows")
            width = widths.pop()
            if ncols is not None and ncols != width:
                raise ValueError("ncols does not match row length")
            ncols = width
        elif ncols is None:
            ncols = 0
        self._rows = data
        self.nrows = len(data)
        self.ncols = ncols

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def diag(cls, entries: Sequence, nrows: int | None = None, ncols: int | None = None):
        nrows = len(entries) if nrows is None else nrows
        ncols = len(entries) if ncols is None else ncols
        rows = [[0] * ncols for _ in range(nrows)]
        for i, e in enumerate(entries):
            rows[i][i] = e
        return cls(rows, ncols=ncols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> "Matrix":
        if not columns:
            return cls.zeros(nrows, 0)
        return cls([[col[i] for col in columns] for i in range(nrows)], ncols=len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> tuple[tuple, ...]:
        return self._rows

    def columns(self) -> list[tuple]:
        return [tuple(r[j] for r in self._rows) for j in range(self.ncols)]

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, self._rows))

    def __repr__(self):
        return f"Matrix({[list(r) for r in self._rows]!r})"

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for r in self._rows for x in r)

    def transpose(self) -> "Matrix":
        return Matrix(zip(*self._rows), ncols=self.nrows) if self.nrows else Matrix.zeros(self.ncols, 0)

    T = property(transpose)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return Matrix(
                [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self._rows],
                ncols=other.ncols,
            )
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise ValueError("vector length does not match matrix columns")
        return tuple(_canon(sum(a * b for a, b in zip(row, vec))) for row in self._rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)], ncols=self.ncols
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self._rows], ncols=self.ncols)

    def scale(self, s) -> "Matrix":
        return Matrix([[s * a for a in r] for r in self._rows], ncols=self.ncols)

    def diagonal(self) -> tuple:
        return tuple(self._rows[i][i] for i in range(min(self.shape)))

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self._rows) for j, x in enumerate(r) if i != j)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return Matrix([a + b for a, b in zip(self._rows, other._rows)], ncols=self.ncols + other.ncols)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return Matrix(self._rows + other._rows, ncols=self.ncols)

    def det(self):
        """Exact determinant by fraction-free Bareiss elimination."""
        n = self.nrows
        if n != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        if n == 0:
            return 1
        den = 1
        for r in self._rows:
            for x in r:
                if isinstance(x, Fraction):
                    den = den * x.denominator // gcd(den, x.denominator)
        a = [[int(x * den) for x in r] for r in self._rows]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return _canon(Fraction(sign * a[n - 1][n - 1], den**n))


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """Isomorphism type ``Z^free + (+) Z/d_i + (Q/Z)^divisible + Q^vector``.

    ``vector_rank`` counts summands isomorphic to the rationals; they turn up
    in differential cohomology as the "topologically trivial exact forms" and
    are kept apart from the ``Q/Z`` summands counted by ``divisible_rank``.
    """

    free_rank: int = 0
    torsion: tuple[int, ...] = ()
    divisible_rank: int = 0
    vector_rank: int = 0

    def __post_init__(self):
        tors = tuple(int(d) for d in self.torsion)
        object.__setattr__(self, "torsion", tors)
        if min(self.free_rank, self.divisible_rank, self.vector_rank) < 0:
            raise ValueError("ranks must be non-negative")
        if any(d < 2 for d in tors):
            raise ValueError("torsion coefficients must be >= 2")
        if any(b % a for a, b in zip(tors, tors[1:])):
            raise ValueError(f"torsion {tors} violates the divisibility chain")

    @classmethod
    def from_invariants(cls, free_rank=0, orders: Iterable[int] = (), divisible_rank=0, vector_rank=0):
        """Build from arbitrary cyclic orders, normalising to a divisibility chain."""
        return cls(free_rank, _invariant_factors(orders), divisible_rank, vector_rank)

    def __add__(self, other: "AbelianGroupPresentation") -> "AbelianGroupPresentation":
        return AbelianGroupPresentation.from_invariants(
            self.free_rank + other.free_rank,
            self.torsion + other.torsion,
            self.divisible_rank + other.divisible_rank,
            self.vector_rank + other.vector_rank,
        )

    def times(self, n: int) -> "AbelianGroupPresentation":
        """Direct sum of ``n`` copies."""
        out = AbelianGroupPresentation()
        for _ in range(n):
            out = out + self
        return out

    def is_trivial(self) -> bool:
        return not (self.free_rank or self.torsion or self.divisible_rank or self.vector_rank)

    def torsion_part(self) -> "AbelianGroupPresentation":
        return AbelianGroupPresentation(torsion=self.torsion)

    def free_part(self) -> "AbelianGroupPresentation":
        return AbelianGroupPresentation(free_rank=self.free_rank)

    def to_json(self) -> dict:
        return {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "divisible_rank": self.divisible_rank,
            "vector_rank": self.vector_rank,
        }

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"C{d}" for d in self.torsion]
        parts += ["Q/Z"] * self.divisible_rank + ["Q"] * self.vector_rank
        return " x ".join(parts) if parts else "0"


def _invariant_factors(orders: Iterable[int]) -> tuple[int, ...]:
    # Z/a + Z/b = Z/gcd + Z/lcm, applied until the chain condition holds.
    ds = sorted(int(d) for d in orders if int(d) != 1)
    if any(d <= 0 for d in ds):
        raise ValueError("cyclic orders must be positive")
    changed = True
    while changed:
        changed = False
        for i in range(len(ds)):
            for j in range(i + 1, len(ds)):
                g = gcd(ds[i], ds[j])
                if g != ds[i]:
                    ds[i], ds[j] = g, ds[i] * ds[j] // g
                    changed = True
        ds = sorted(d for d in ds if d != 1)
    return tuple(ds)


class InfeasibleSystem(ValueError):
    """``A x = b`` has no solution; ``certificate`` proves it.

    For rational systems the certificate ``y`` satisfies ``y A = 0`` and
    ``y b != 0``.  For integer systems it satisfies ``y A`` integral and
    ``y b`` not an integer.
    """

    def __init__(self, message: str, certificate: tuple):
        super().__init__(message)
        self.certificate = certificate


# --- Smith normal form -----------------------------------------------------


def _smallest_nonzero(a, t, m, n):
    best = None
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            x = row[j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
                if best[0] == 1:
                    return best
    return best


def _snf(rows, track: bool):
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    Vt = [[int(i == j) for j in range(n)] for i in range(n)] if track else None  # rows = columns of V

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        if track:
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        if track:
            Vt[j], Vt[k] = Vt[k], Vt[j]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        rs, rd = a[src], a[dst]
        for j in range(n):
            if rs[j]:
                rd[j] -= q * rs[j]
        if track:
            us, ud = U[src], U[dst]
            for j in range(m):
                if us[j]:
                    ud[j] -= q * us[j]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in a:
            if row[src]:
                row[dst] -= q * row[src]
        if track:
            vs, vd = Vt[src], Vt[dst]
            for j in range(n):
                if vs[j]:
                    vd[j] -= q * vs[j]

    t = 0
    while t < min(m, n):
        found = _smallest_nonzero(a, t, m, n)
        if found is None:
            break
        _, i0, j0 = found
        if i0 != t:
            swap_rows(t, i0)
        if j0 != t:
            swap_cols(t, j0)
        while True:
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, a[i][t] // p)
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, a[t][j] // p)
            # a smaller remainder left in the pivot row/column becomes the new pivot
            cand = None
            for i in range(t + 1, m):
                if a[i][t] and (cand is None or abs(a[i][t]) < cand[0]):
                    cand = (abs(a[i][t]), "r", i)
            for j in range(t + 1, n):
                if a[t][j] and (cand is None or abs(a[t][j]) < cand[0]):
                    cand = (abs(a[t][j]), "c", j)
            if cand is not None:
                if cand[1] == "r":
                    swap_rows(t, cand[2])
                else:
                    swap_cols(t, cand[2])
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if track:
                U[t] = [-x for x in U[t]]
        t += 1
    diag = [a[i][i] for i in range(min(m, n)) if a[i][i]]
    if not track:
        return diag, None, None, None
    V = [list(col) for col in zip(*Vt)] if n else []
    return diag, U, a, V


def smith_normal_form(M: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D`` in Smith normal form.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with non-negative entries
    ``d_1 | d_2 | ...``.  Pivots are chosen as the smallest nonzero absolute
    value, ties broken by (row, column) order, so the output is deterministic.
    """
    if not M.is_integral():
        raise TypeError("smith_normal_form needs an integer matrix")
    m, n = M.shape
    if m == 0 or n == 0:
        return Matrix.identity(m), Matrix.zeros(m, n), Matrix.identity(n)
    _, U, D, V = _snf(M.rows, track=True)
    return Matrix(U, ncols=m), Matrix(D, ncols=n), Matrix(V, ncols=n)


def elementary_divisors(M: Matrix) -> list[int]:
    """Nonzero diagonal of the Smith normal form, without the transforms."""
    if not M.is_integral():
        raise TypeError("elementary_divisors needs an integer matrix")
    if M.nrows == 0 or M.ncols == 0:
        return []
    return _snf(M.rows, track=False)[0]


def cokernel_presentation(M: Matrix) -> AbelianGroupPresentation:
    """Presentation of ``Z^rows / im(M)`` read off the Smith diagonal."""
    ds = elementary_divisors(M)
    return AbelianGroupPresentation(
        free_rank=M.nrows - len(ds), torsion=tuple(d for d in ds if d > 1)
    )


# --- rational elimination --------------------------------------------------


def _rref(rows, ncols, track_rows: int = 0):
    """Reduced row echelon form over Q.

    Returns ``(R, pivots, E)`` where ``E`` (if ``track_rows``) records the row
    operations: ``E @ original == R``.
    """
    a = [[Fraction(x) for x in r] for r in rows]
    m = len(a)
    E = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)] if track_rows else None
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        if E is not None:
            E[r], E[piv] = E[piv], E[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        if E is not None:
            E[r] = [x * inv for x in E[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
                if E is not None:
                    E[i] = [x - f * y for x, y in zip(E[i], E[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots, E


def rank(M: Matrix) -> int:
    if M.nrows == 0 or M.ncols == 0:
        return 0
    if M.is_integral():
        return len(elementary_divisors(M))
    return len(_rref(M.rows, M.ncols)[1])


def kernel_basis(M: Matrix) -> list[tuple]:
    """Basis of the right kernel over Q."""
    R, pivots, _ = _rref(M.rows, M.ncols)
    free = [j for j in range(M.ncols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.ncols
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(tuple(_canon(x) for x in v))
    return basis


def left_kernel_basis(M: Matrix) -> list[tuple]:
    """Rows ``y`` with ``y @ M == 0`` (basis over Q)."""
    return kernel_basis(M.transpose()) if M.nrows else []


def integer_kernel_basis(M: Matrix) -> list[tuple]:
    """A Z-basis of ``{x in Z^n : M x = 0}`` (a saturated sublattice)."""
    if not M.is_integral():
        den = 1
        for r in M.rows:
            for x in r:
                if isinstance(x, Fraction):
                    den = den * x.denominator // gcd(den, x.denominator)
        M = M.scale(den)
    n = M.ncols
    if M.nrows == 0:
        return [tuple(int(i == j) for i in range(n)) for j in range(n)]
    U, D, V = smith_normal_form(M)
    r = sum(1 for d in D.diagonal() if d)
    cols = V.columns()
    return [tuple(c) for c in cols[r:]]


def rational_solve(A: Matrix, b: Sequence) -> tuple:
    """Solve ``A x = b`` exactly over Q.

    Returns one solution (free variables set to zero).  Raises
    :class:`InfeasibleSystem` with a row ``y`` such that ``y A = 0`` and
    ``y b != 0`` when no solution exists.
    """
    b = tuple(_canon(x) for x in b)
    if len(b) != A.nrows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {A.nrows}")
    m, n = A.shape
    if m == 0:
        return tuple([0] * n)
    aug = [list(row) + [bi] for row, bi in zip(A.rows, b)]
    R, pivots, E = _rref(aug, n + 1, track_rows=m)
    if n in pivots:
        i = pivots.index(n)
        y = tuple(_canon(x) for x in E[i])
        raise InfeasibleSystem("rational system is inconsistent", y)
    x = [Fraction(0)] * n
    for row, p in zip(R, pivots):
        x[p] = row[n]
    return tuple(_canon(v) for v in x)


def integer_solve(A: Matrix, b: Sequence) -> tuple:
    """Find an integer vector ``z`` with ``A z = b`` (``A``, ``b`` rational).

    Raises :class:`InfeasibleSystem` with a rational row ``y`` such that
    ``y A`` is integral and ``y b`` is not an integer.
    """
    b = tuple(Fraction(x) for x in b)
    if len(b) != A.nrows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {A.nrows}")
    m, n = A.shape
    den = 1
    for x in list(b) + [Fraction(x) for r in A.rows for x in r]:
        den = den * x.denominator // gcd(den, x.denominator)
    Ai = A.scale(den)
    bi = [int(x * den) for x in b]
    if m == 0:
        return tuple([0] * n)
    if n == 0:
        for i, x in enumerate(bi):
            if x:
                y = [Fraction(0)] * m
                y[i] = Fraction(1, 2 * x) * den
                raise InfeasibleSystem("integer system is inconsistent", tuple(_canon(v) for v in y))
        return ()
    U, D, V = smith_normal_form(Ai)
    ub = U @ bi
    w = [0] * n
    for i in range(m):
        d = D[i, i] if i < n else 0
        if d:
            if ub[i] % d:
                # y = e_i U / d (scaled back): y A = e_i V^{-1} integral, y b = ub_i / d
                y = tuple(_canon(Fraction(u * den, d)) for u in U.rows[i])
                raise InfeasibleSystem("integer system is inconsistent", y)
            w[i] = ub[i] // d
        elif ub[i]:
            y = tuple(_canon(Fraction(u * den, 2 * ub[i])) for u in U.rows[i])
            raise InfeasibleSystem("integer system is inconsistent", y)
    return tuple(V @ w)

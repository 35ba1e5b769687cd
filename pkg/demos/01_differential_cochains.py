"""Differential cochains on a triangulated circle.

Run with ``python3 demos/01_differential_cochains.py``.
"""

from fractions import Fraction

from tdk.diffcochain import (
    NotTrivialisable,
    diff_cohomology,
    exact_sequences,
    geometric_trivialisation,
    holonomy_class,
    topological_trivialisation,
)
from tdk.simplicial import cohomology, ngon, torus9

X = ngon(3)  # the circle as a 3-gon
print("circle:", X.count(0), "vertices,", X.count(1), "edges")
print("H^1(circle; Z) =", cohomology(X, 1))

# differential cohomology: Q/Z marks the circle-valued part, Q the non-flat directions
for p in (1, 2):
    print(f"H^{p} hat(circle) =", diff_cohomology(X, p))

# both short exact sequences give the same group
r = exact_sequences(X, 2)
print("via curvature:", r["via_curvature_sequence"], "| via characteristic:", r["via_characteristic_sequence"])

# a flat line bundle with holonomy exp(2 pi i / 3)
x = holonomy_class(X, Fraction(1, 3))
g = geometric_trivialisation(x)
print("geometric trivialisation, form slot of the witness:", [str(v) for v in g.witness.omega.values])
try:
    topological_trivialisation(x)
except NotTrivialisable as exc:
    print("no topological trivialisation:", exc.reason)
    print("certificate:", exc.certificate)

T = torus9()
print("H^2 hat(torus) =", diff_cohomology(T, 2))

"""The Poincare line bundle on T^2 and the fixed-lift obstruction.

Run with ``python3 demos/03_poincare_bundle.py``.
"""

from fractions import Fraction

from tdk.fixtures import build_fixture
from tdk.poincare import (
    check_equivariance,
    cs_difference,
    curvature,
    fixed_obstruction_check,
    holonomy,
)

std = build_fixture("poincare-standard")
paper = build_fixture("poincare-paper")

for L in (std, paper):
    print(L.name, "| A =", L.A, "| F =", curvature(L))
    print("  equivariance:", check_equivariance(L).to_json())

third = Fraction(1, 3)
print("holonomy around theta2 at theta1 = 1/3:", holonomy(std, [(third, 0), (third, 1)]))
print("holonomy of the unit square:", holonomy(std, [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]))

# translating by t in the theta1 direction changes A by a constant form
for t in (Fraction(1, 2), 1):
    print(f"t*A - A at t = {t}:", cs_difference(std, t))

# no lift of the class is fixed by (1/N) Z/N, already at the level of zero modes
for N in (2, 3, 4):
    r = fixed_obstruction_check(std, N, cutoff=3)
    print(f"N = {N}: feasible {r.feasible}, y.b = {r.certificate['y_dot_b']}")

"""Exact computations for differential T-duality.

Submodules:

- :mod:`tdk.linalg`: exact integer and rational linear algebra
- :mod:`tdk.simplicial`: simplicial complexes, cochains, cup products
- :mod:`tdk.diffcochain`: Hopkins-Singer differential cochains
- :mod:`tdk.cdga`, :mod:`tdk.hori`: invariant forms and the Hori transform
- :mod:`tdk.scalars`, :mod:`tdk.fourier`, :mod:`tdk.poincare`: Fourier forms
  on tori and the Poincare line bundle
- :mod:`tdk.fixtures`, :mod:`tdk.cli`: fixture documents and the ``tdk`` command

``twisted_d`` and ``curvature`` exist in more than one submodule, so they are
not re-exported here.
"""

from . import cdga, diffcochain, fixtures, fourier, hori, linalg, poincare, scalars, simplicial
from .cdga import CDGA, Form, Generator, twisted_cohomology
from .diffcochain import (
    DiffCochain,
    NotTrivialisable,
    dcheck,
    diff_cohomology,
    diff_cup,
    dot,
    exact_sequences,
    geometric_trivialisation,
    holonomy_class,
    pair_check,
    topological_trivialisation,
)
from .fixtures import FIXTURES, build_fixture, emit_fixture, load_document
from .fourier import FourierForm, average, invariant_decomposition, is_geometrically_invariant
from .hori import TDualityModel, hori_transform, reverse_hori_transform, verify_hori
from .linalg import AbelianGroupPresentation, InfeasibleSystem, Matrix, smith_normal_form
from .poincare import EquivariantLineBundle, check_equivariance, fixed_obstruction_check, holonomy
from .rng import LCG
from .scalars import PI, I, FormalScalar, exp_pi_i, zeta
from .simplicial import Cochain, SimplicialComplex, coboundary, cohomology, cup, ngon, point, sphere, torus9

__version__ = "0.1.0"

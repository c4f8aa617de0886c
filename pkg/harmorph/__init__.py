"""Harmonic morphisms on metric Lie algebras."""

from .algebra import bracket, jacobi_residual, make_algebra  # noqa
from .catalog import get_family, instantiate, list_families  # noqa
from .conditions import check_foliation, check_morphism  # noqa
from .exceptions import HarmorphError  # noqa
from .geometry import curvature_scan, sectional_curvature  # noqa
from .models import Decomposition, MetricLieAlgebra, ParametricAlgebra  # noqa
from .rootspace import build_carnot, check_hadamard_morphism  # noqa
from .rootspace import root_decomposition  # noqa
from .symbolic import jacobi_system, verify_family_constraints  # noqa

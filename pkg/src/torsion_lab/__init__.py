"""Numerical laboratory for the torsion of Einstein connections on
almost Hermitian, weak-structure and almost contact metric manifolds.

The core pieces are point geometry from symbolic fields (:mod:`fields`), the
closed-form torsion formulas (:mod:`connection`), a brute-force linear-system
oracle (:mod:`oracle`), the identity suite (:mod:`identities`) and a catalog
of test structures (:mod:`catalog`).
"""
from .catalog import REGISTRY as MANIFOLDS
from .catalog import get_spec, instantiate, sample_points
from .connection import (assemble_connection, connection_from_torsion, contorsion_from_torsion,
                         metricity_array, metricity_residual, torsion_acm, torsion_from_contorsion,
                         torsion_hermitian, torsion_special, torsion_weak,
                         torsion_weighted_factor)
from .errors import TorsionLabError
from .fields import StructureFields, exterior_dF, fd_validate, nabla_F, point_geometry, reeb_at
from .identities import REGISTRY as IDENTITIES
from .identities import eval_chain, eval_identity
from .oracle import compare_with_formula, solve_einstein_pointwise
from .results import CheckResult
from .suites import SUITES, PointData, run_suite

__version__ = "0.1.0"

import itertools

import numpy as np
import pytest
import scipy.linalg

from torsion_lab import catalog
from torsion_lab.fields import point_geometry
from torsion_lab.identities import PROP27
from torsion_lab.oracle import solve_einstein_pointwise
from torsion_lab.tensor_core import lower_endo
from torsion_lab.terms import OperatorAlgebra, evaluate


def standard_J(n):
    J = np.zeros((n, n))
    for k in range(0, n, 2):
        J[k + 1, k], J[k, k + 1] = 1.0, -1.0
    return J


def three_form_basis(n):
    basis = []
    for idx in itertools.combinations(range(n), 3):
        E = np.zeros((n,) * 3)
        for perm in itertools.permutations(range(3)):
            sign = round(np.linalg.det(np.eye(3)[list(perm)]))
            E[tuple(idx[q] for q in perm)] = sign
        basis.append(E)
    return basis


def nabla_from_torsion(T, J):
    """nabla^g F determined by an Einstein torsion T (f = J)."""
    return evaluate(PROP27[1], {"T": T}, OperatorAlgebra(J)) / 2


def nearly_kaehler_point(seed=0):
    """Planted 6-dim point whose Einstein torsion is a random totally skew
    3-form with T(JX,JY,Z) = -T(X,Y,Z).  Returns (fields, T)."""
    n = 6
    J = standard_J(n)
    ops = OperatorAlgebra(J)
    basis = three_form_basis(n)
    A = np.stack([evaluate("T(fX,fY,Z) +T(X,Y,Z)", {"T": E}, ops).ravel() for E in basis], 1)
    coeffs = scipy.linalg.null_space(A) @ np.random.default_rng(seed).standard_normal(2)
    T = sum(c * E for c, E in zip(coeffs, basis))
    N = nabla_from_torsion(T, J)
    return catalog.planted_fields(lower_endo(J, np.eye(n)), N, "nearly_kaehler_point"), T


class Sample:
    """Geometry and oracle at a seeded catalog point."""

    def __init__(self, name, params=None, index=0, seed=1):
        self.fields = catalog.instantiate(name, params)
        self.point = catalog.sample_points(self.fields, index + 1, seed)[index]
        self.geom = point_geometry(self.fields, self.point)
        self._oracle = None

    @property
    def oracle(self):
        if self._oracle is None:
            self._oracle = solve_einstein_pointwise(self.geom)
        return self._oracle


@pytest.fixture(scope="session")
def sample():
    cache = {}

    def get(name, params=None, index=0, seed=1):
        key = (name, tuple(sorted((params or {}).items())), index, seed)
        if key not in cache:
            cache[key] = Sample(name, params, index, seed)
        return cache[key]
    return get

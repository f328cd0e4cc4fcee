import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from torsion_lab import catalog
from torsion_lab import connection as cn
from torsion_lab.fields import point_geometry
from torsion_lab.oracle import (check_comparable, compare_with_formula, metricity_matrix,
                                operator_condition_residual, solve_einstein_pointwise)
from torsion_lab.errors import PreconditionNotMet
from torsion_lab.tensor_core import sup_norm

from conftest import nabla_from_torsion, standard_J

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_kaehler_oracle_is_zero(sample):
    o = sample("kaehler_flat").oracle
    assert o.unique and o.system_residual == 0
    assert sup_norm(o.K.K) == 0 and sup_norm(o.T.T) == 0
    assert o.f2_condition_residual == 0 and o.f_condition_residual == 0


def test_rotated_J_oracle(sample):
    s = sample("hermitian_rotated_J", index=3)
    o = s.oracle
    assert o.unique and o.system_residual < 1e-10
    assert o.f2_condition_residual < 1e-10
    assert sup_norm(o.T.T - cn.torsion_hermitian(s.geom).T) < 1e-8


def test_weighted_product_oracle_is_block_diagonal(sample):
    s = sample("weighted_product", {"lambda1": 2.0, "lambda2": 3.0})
    o = s.oracle
    assert o.unique and o.f2_condition_residual < 1e-9
    T = o.T.T.copy()
    for factor in s.fields.factors:
        T[factor.index, factor.index, factor.index] = 0
    assert sup_norm(T) < 1e-9


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_metricity_matrix_matches_equation(seed):
    # M vec(K) + vec(N) is the defining equation written with N = nabla^g F
    rng = np.random.default_rng(seed)
    J = standard_J(4)
    K = rng.standard_normal((4, 4, 4))
    N = rng.standard_normal((4, 4, 4))
    direct = (N - K.transpose(0, 2, 1) + np.einsum("xzc,cy->xyz", K, J)
              - K.transpose(1, 0, 2) - np.einsum("yxc,cz->xyz", K, J))
    assert np.abs(metricity_matrix(J) @ K.ravel() + N.ravel() - direct.ravel()).max() < 1e-12


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_oracle_recovers_planted_torsion(seed):
    # an Einstein torsion T determines N; the oracle must return T from N
    rng = np.random.default_rng(seed)
    J = standard_J(4)
    T = rng.standard_normal((4, 4, 4))
    T = T - T.transpose(1, 0, 2)
    fields = catalog.planted_fields(J, nabla_from_torsion(T, J))
    o = solve_einstein_pointwise(point_geometry(fields, np.zeros(4)))
    assert o.unique and o.system_residual < 1e-10
    assert sup_norm(o.T.T - T) < 1e-8


def test_operator_condition_residual():
    rng = np.random.default_rng(0)
    T = rng.standard_normal((4, 4, 4))
    assert operator_condition_residual(T, np.eye(4)) == 0
    assert operator_condition_residual(T, standard_J(4)) > 0.1


def test_comparison_and_gating(sample):
    s = sample("hermitian_rotated_J")
    assert compare_with_formula(s.oracle, cn.torsion_hermitian(s.geom)).passed
    w = sample("weighted_product", {"lambda1": 2.0, "lambda2": 3.0})
    assert compare_with_formula(w.oracle, cn.torsion_weak(w.geom), require_f2=True).passed


def test_comparison_skipped_when_f2_condition_fails():
    fields = catalog.instantiate("exact_symplectic")
    geom = point_geometry(fields, catalog.sample_points(fields, 1, 0)[0])
    o = solve_einstein_pointwise(geom)
    assert o.f2_condition_residual > 1e-3
    r = compare_with_formula(o, np.zeros((4, 4, 4)), require_f2=True)
    assert r.skipped and "f^2-torsion condition" in r.skip_reason
    with pytest.raises(PreconditionNotMet):
        check_comparable(o, require_f2=True)


def test_underdetermined_instance_is_skipped(sample):
    o = sample("acm_product").oracle
    assert not o.unique and o.consistent
    assert compare_with_formula(o, np.zeros((5, 5, 5))).skipped

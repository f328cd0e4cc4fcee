import dataclasses

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from torsion_lab import catalog
from torsion_lab.errors import NonFinite
from torsion_lab.fields import (christoffel, christoffel_from_metric, exterior_dF, fd_validate,
                                levi_civita_metricity, nabla_F, point_geometry)

points4 = st.lists(st.floats(min_value=-1, max_value=1), min_size=4, max_size=4)


def fd_partials(fn, p, h=1e-5):
    cols = []
    for l in range(len(p)):
        e = np.zeros(len(p))
        e[l] = h
        cols.append((np.asarray(fn(p + e)) - np.asarray(fn(p - e))) / (2 * h))
    return np.stack(cols)


def conformal_fields(c):
    xs = sp.symbols("x0:4")
    phi = sum(ci * x for ci, x in zip(c, xs))
    return catalog.sympy_fields("conformal", sp.exp(2 * phi) * sp.eye(4), catalog.J0, xs)


def test_constant_metric_has_zero_christoffels():
    fields = catalog.instantiate("kaehler_flat")
    assert np.array_equal(christoffel(fields, np.zeros(4)), np.zeros((4, 4, 4)))


def test_conformal_christoffels():
    c = np.array([0.3, -0.2, 0.5, 0.1])
    fields = conformal_fields(c)
    p = np.array([0.1, 0.4, -0.3, 0.2])
    expected = (np.einsum("i,kj->kij", c, np.eye(4)) + np.einsum("j,ki->kij", c, np.eye(4))
                - np.einsum("k,ij->kij", c, np.eye(4)))
    assert np.abs(christoffel(fields, p) - expected).max() < 1e-12
    fd = christoffel_from_metric(fields.g_at(p), fd_partials(fields.g_at, p))
    assert np.abs(christoffel(fields, p) - fd).max() < 1e-8


def test_polar_type_christoffels():
    xs = sp.symbols("x0:2")
    fields = catalog.sympy_fields("polar", sp.diag(1, xs[0] ** 2), sp.zeros(2), xs)
    p = np.array([0.7, 0.2])
    G = christoffel(fields, p)
    assert G[0, 1, 1] == pytest.approx(-0.7)
    assert G[1, 0, 1] == pytest.approx(1 / 0.7)
    fd = christoffel_from_metric(fields.g_at(p), fd_partials(fields.g_at, p))
    assert np.abs(G - fd).max() < 1e-8


def test_nabla_F_vanishes_for_constant_fields():
    fields = catalog.instantiate("kaehler_flat")
    assert np.array_equal(nabla_F(fields, np.full(4, 0.3)), np.zeros((4, 4, 4)))


@settings(max_examples=15, deadline=None)
@given(points4)
def test_nabla_F_against_finite_differences(p):
    fields = catalog.instantiate("hermitian_rotated_J")
    p = np.asarray(p)
    dF = fd_partials(fields.F_at, p)
    gamma = christoffel_from_metric(fields.g_at(p), fd_partials(fields.g_at, p))
    F = fields.F_at(p)
    fd = dF - np.einsum("mli,mj->lij", gamma, F) - np.einsum("mlj,im->lij", gamma, F)
    assert np.abs(nabla_F(fields, p) - fd).max() < 1e-6


@pytest.mark.parametrize("name", ["lck_conformal", "weak_conformal_f", "exact_symplectic"])
def test_nabla_F_routes_agree(name):
    fields = catalog.instantiate(name)
    for p in catalog.sample_points(fields, 5, 0):
        assert np.abs(nabla_F(fields, p, "gamma") - nabla_F(fields, p, "endo")).max() < 1e-12


def test_unknown_route():
    fields = catalog.instantiate("kaehler_flat")
    with pytest.raises(ValueError):
        nabla_F(fields, np.zeros(4), route="nope")
    with pytest.raises(ValueError):
        exterior_dF(fields, np.zeros(4), route="nope")


def test_dF_of_constant_and_exact_forms():
    assert np.array_equal(exterior_dF(catalog.instantiate("kaehler_flat"), np.zeros(4)),
                          np.zeros((4, 4, 4)))
    fields = catalog.instantiate("exact_symplectic")
    for p in catalog.sample_points(fields, 5, 2):
        assert np.abs(exterior_dF(fields, p)).max() < 1e-9
        assert np.abs(nabla_F(fields, p)).max() > 1e-3


@pytest.mark.parametrize("name", ["hermitian_rotated_J", "lck_conformal", "weak_conformal_f",
                                  "contact_r5"])
def test_dF_two_routes(name):
    fields = catalog.instantiate(name)
    for p in catalog.sample_points(fields, 5, 3):
        dF = exterior_dF(fields, p)
        assert np.abs(dF - exterior_dF(fields, p, "cyclic")).max() < 1e-9
        assert np.abs(dF + dF.transpose(1, 0, 2)).max() < 1e-12


def test_point_geometry_almost_hermitian(sample):
    geom = sample("hermitian_rotated_J").geom
    assert np.abs(geom.Qtilde).max() < 1e-12
    assert np.abs(geom.P - 2 * np.eye(4)).max() < 1e-12
    assert not geom.has_kernel
    assert levi_civita_metricity(geom) < 1e-12


def test_point_geometry_weighted_product(sample):
    lam = (2.0, 3.0)
    geom = sample("weighted_product", {"lambda1": lam[0], "lambda2": lam[1]}).geom
    Q = np.diag(np.repeat([lam[0] - 1, lam[1] - 1], 4))
    P = np.diag(np.repeat([1 + lam[0], 1 + lam[1]], 4))
    assert np.abs(geom.Qtilde - Q).max() < 1e-12
    assert np.abs(geom.P - P).max() < 1e-12


def test_point_geometry_kernel(sample):
    geom = sample("f_with_kernel").geom
    assert geom.kernel_split.kernel.shape == (6, 2)
    assert np.abs(geom.f @ geom.kernel_split.kernel).max() < 1e-12


def test_point_geometry_rejects_nonfinite_point():
    with pytest.raises(NonFinite):
        point_geometry(catalog.instantiate("kaehler_flat"), [0, np.nan, 0, 0])


def test_fd_validate_constant_fields():
    r = fd_validate(catalog.instantiate("kaehler_flat"), np.zeros(4))
    assert r.passed and r.residual == 0


def test_fd_validate_conformal():
    fields = catalog.instantiate("lck_conformal")
    for p in catalog.sample_points(fields, 4, 0):
        assert fd_validate(fields, p, h=1e-5).residual < 1e-6


def test_fd_validate_detects_planted_fault():
    fields = catalog.instantiate("kaehler_flat")

    def corrupted(p):
        dg = np.zeros((4, 4, 4))
        dg[1, 2, 3] = 0.1
        return dg
    r = fd_validate(dataclasses.replace(fields, dg_at=corrupted), np.zeros(4))
    assert not r.passed
    assert r.residual == pytest.approx(0.1, rel=1e-6)

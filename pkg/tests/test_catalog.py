import numpy as np
import pytest

from torsion_lab import catalog
from torsion_lab.errors import InvalidParams, SamplingExhausted, UnknownManifold
from torsion_lab.fields import exterior_dF, fd_validate, nabla_F, point_geometry


def test_registry_entries_build():
    for name, spec in catalog.REGISTRY.items():
        fields = catalog.instantiate(name)
        assert fields.dim == spec.dim_of(spec.resolve())
        p = catalog.sample_points(fields, 1, 0)[0]
        assert fd_validate(fields, p).passed


def test_kaehler_flat_is_parallel():
    fields = catalog.instantiate("kaehler_flat", dim=4)
    for p in catalog.sample_points(fields, 3, 0):
        assert np.abs(nabla_F(fields, p)).max() == 0
        assert np.abs(exterior_dF(fields, p)).max() == 0


def test_weighted_product_at_one_is_almost_hermitian():
    fields = catalog.instantiate("weighted_product", {"lambda1": 1.0, "lambda2": 1.0})
    for p in catalog.sample_points(fields, 3, 0):
        geom = point_geometry(fields, p)
        assert geom.almost_hermitian_defect() < 1e-12
        assert np.abs(geom.Qtilde).max() < 1e-12


def test_weighted_product_factor_count():
    fields = catalog.instantiate("weighted_product", {"lambda1": 2.0, "lambda2": 3.0,
                                                      "lambda3": 0.5})
    assert fields.dim == 12
    assert [f.weight for f in fields.factors] == [2.0, 3.0, 0.5]


def test_rotated_J_at_origin():
    fields = catalog.instantiate("hermitian_rotated_J", frequency=1)
    assert np.allclose(fields.F_at(np.zeros(4)), np.asarray(catalog.J0, float))
    assert np.abs(fields.dF_partials_at(np.zeros(4))).max() > 0.1
    assert fd_validate(fields, np.zeros(4)).passed


def test_sample_points_deterministic():
    fields = catalog.instantiate("weak_conformal_f")
    a = catalog.sample_points(fields, 3, 42)
    b = catalog.sample_points(fields, 3, 42)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], catalog.sample_points(fields, 3, 43)[0])


def test_kaehler_sampling_rejects_nothing():
    fields = catalog.instantiate("kaehler_flat")
    draws = np.random.default_rng(5).uniform(-1, 1, (4, 4))
    assert np.array_equal(np.array(catalog.sample_points(fields, 4, 5)), draws)


def test_kernel_rank_is_constant():
    fields = catalog.instantiate("f_with_kernel")
    for p in catalog.sample_points(fields, 10, 0):
        f = np.linalg.solve(fields.g_at(p), fields.F_at(p))
        assert np.linalg.matrix_rank(f, tol=1e-8) == 4


def test_sampling_exhausted():
    fields = catalog.instantiate("kaehler_flat")
    with pytest.raises(SamplingExhausted):
        catalog.sample_points(fields, 2, 0, rank_gap=2.0)


@pytest.mark.parametrize("name, params", [
    ("kaehler_flat", {"dim": 3}),
    ("weighted_product", {"lambda1": -1.0}),
    ("weighted_product", {"lambdax": 1.0}),
    ("lorentz_flat", {"boost": 1.0}),
    ("exact_symplectic", {"strength": 2.0}),
    ("lck_conformal", {"nope": 1.0}),
    ("lck_conformal", {"strength": float("nan")}),
])
def test_invalid_params(name, params):
    with pytest.raises(InvalidParams):
        catalog.instantiate(name, params)


def test_unknown_manifold():
    with pytest.raises(UnknownManifold):
        catalog.instantiate("nope")


def test_planted_fields():
    N = np.random.default_rng(0).standard_normal((4, 4, 4))
    N = N - N.transpose(0, 2, 1)
    fields = catalog.planted_fields(np.asarray(catalog.J0, float), N)
    assert np.abs(nabla_F(fields, np.zeros(4)) - N).max() < 1e-15
    assert fd_validate(fields, np.full(4, 0.3)).passed

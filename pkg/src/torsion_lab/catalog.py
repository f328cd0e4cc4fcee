"""Named analytic structures (g, F) on charts, with exact partials.

Closed-form fields are written in sympy, differentiated symbolically and
compiled with ``lambdify``.  Products of structures are assembled blockwise
in numpy, so factor fields are reused rather than re-derived.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import sympy as sp

from .errors import InvalidParams, SamplingExhausted, UnknownManifold
from .fields import Factor, ReebData, StructureFields

J0 = sp.Matrix([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])


# ------------------------------------------------------------ builders ---

def _compile(exprs, xs):
    fn = sp.lambdify([xs], exprs, modules="numpy", cse=True)
    shape = np.array(exprs, dtype=object).shape

    def call(p):
        # constant entries come back as python scalars; broadcast keeps the shape
        return np.broadcast_to(np.array(fn(p), dtype=float), shape).copy()
    return call


def sympy_fields(name, g, F, xs, signature=None, reeb=None, factors=(), params=None):
    """StructureFields from sympy matrices g(x), F(x) in the symbols ``xs``."""
    g, F = sp.Matrix(g), sp.Matrix(F)
    n = len(xs)
    dg = [[[sp.diff(g[i, j], x) for j in range(n)] for i in range(n)] for x in xs]
    dF = [[[sp.diff(F[i, j], x) for j in range(n)] for i in range(n)] for x in xs]
    return StructureFields(
        name=name, dim=n,
        g_at=_compile(g.tolist(), xs), dg_at=_compile(dg, xs),
        F_at=_compile(F.tolist(), xs), dF_partials_at=_compile(dF, xs),
        signature=tuple(signature or (1,) * n), reeb=reeb, factors=tuple(factors),
        params=dict(params or {}))


def scaled_form(fields, c, name=None):
    """Same metric, 2-form multiplied by c."""
    return StructureFields(
        name=name or fields.name, dim=fields.dim, g_at=fields.g_at, dg_at=fields.dg_at,
        F_at=lambda p: c * np.asarray(fields.F_at(p), float),
        dF_partials_at=lambda p: c * np.asarray(fields.dF_partials_at(p), float),
        signature=fields.signature, params=fields.params)


def product_fields(name, parts, reeb=None, factors=(), params=None):
    """Riemannian product: block-diagonal g and F, each block depending only
    on its own coordinates."""
    dims = [p.dim for p in parts]
    offsets = np.cumsum([0] + dims)
    slices = [slice(int(a), int(b)) for a, b in zip(offsets[:-1], offsets[1:])]
    n = int(offsets[-1])

    def blocks(getter, rank):
        def at(p):
            p = np.asarray(p, float)
            out = np.zeros((n,) * rank)
            for part, s in zip(parts, slices):
                val = np.asarray(getattr(part, getter)(p[s]), float)
                out[(s,) * rank] = val
            return out
        return at

    signature = sum((tuple(p.signature) for p in parts), ())
    return StructureFields(
        name=name, dim=n, g_at=blocks("g_at", 2), dg_at=blocks("dg_at", 3),
        F_at=blocks("F_at", 2), dF_partials_at=blocks("dF_partials_at", 3),
        signature=signature, reeb=reeb, factors=tuple(factors), params=dict(params or {}))


def planted_fields(F0, N, name="planted"):
    """Euclidean chart with F(x) = F0 + sum_l x_l N[l].

    Since g is constant, nabla^g F at the origin is exactly ``N`` (each N[l]
    must be skew).  Used to place a prescribed covariant derivative, such as
    one of nearly Kaehler type, at a single point.
    """
    F0, N = np.asarray(F0, float), np.asarray(N, float)
    n = F0.shape[0]
    zero = np.zeros((n, n, n))
    return StructureFields(
        name=name, dim=n, g_at=lambda p: np.eye(n), dg_at=lambda p: zero,
        F_at=lambda p: F0 + np.einsum("l,lij->ij", np.asarray(p, float), N),
        dF_partials_at=lambda p: N, signature=(1,) * n)


def flat_trivial(dim):
    """Euclidean R^dim with F = 0."""
    xs = sp.symbols(f"t0:{dim}")
    return sympy_fields(f"flat{dim}", sp.eye(dim), sp.zeros(dim), xs)


def givens(n, i, j, angle):
    R = sp.eye(n)
    c, s = sp.cos(angle), sp.sin(angle)
    R[i, i], R[j, j], R[i, j], R[j, i] = c, c, -s, s
    return R


def rotated_complex_structure(xs, frequency=1):
    """R(x) J0 R(x)^T with R a product of three coordinate-dependent rotations."""
    w = frequency
    R = (givens(4, 0, 2, w * xs[0]) * givens(4, 1, 2, w * (xs[1] + xs[2] / 2))
         * givens(4, 0, 3, sp.sin(w * xs[3])))
    return R * J0 * R.T


def _rational(v):
    return sp.nsimplify(v, rational=True) if float(v).is_integer() else sp.Float(v)


# ------------------------------------------------------------ instances ---

def build_kaehler_flat(dim=4):
    n = int(dim)
    xs = sp.symbols(f"x0:{n}")
    J = sp.zeros(n)
    for k in range(0, n, 2):
        J[k, k + 1], J[k + 1, k] = -1, 1
    return sympy_fields("kaehler_flat", sp.eye(n), J, xs)


def build_hermitian_rotated_J(frequency=1.0):
    xs = sp.symbols("x0:4")
    f = rotated_complex_structure(xs, _rational(frequency))
    return sympy_fields("hermitian_rotated_J", sp.eye(4), f, xs)


def build_lck_conformal(strength=1 / 3):
    xs = sp.symbols("x0:4")
    phi = sp.Float(strength) * (xs[0] * xs[1] + sp.sin(xs[2]))
    g = sp.exp(2 * phi) * sp.eye(4)
    return sympy_fields("lck_conformal", g, g * J0, xs)


def _factor_frequency(j):
    return (1.0, 0.7, 0.5, 0.3)[j % 4]


@lru_cache(maxsize=None)
def _rotated_factor(frequency):
    return build_hermitian_rotated_J(frequency)


def build_weighted_product(**lambdas):
    keys = sorted(lambdas, key=lambda k: int(k[len("lambda"):]))
    weights = [float(lambdas[k]) for k in keys]
    factors, parts = [], []
    offset = 0
    for j, lam in enumerate(weights):
        base = _rotated_factor(_factor_frequency(j))
        parts.append(scaled_form(base, math.sqrt(lam)))
        factors.append(Factor(slice(offset, offset + 4), base, lam))
        offset += 4
    return product_fields("weighted_product", parts, factors=factors, params=lambdas)


def _weak_conformal_sympy(amplitude, frequency):
    xs = sp.symbols("x0:4")
    a = sp.Rational(3, 2) + sp.Float(amplitude) * (sp.sin(xs[0] + 2 * xs[1]) + xs[2] * xs[3] / 2)
    f = a * rotated_complex_structure(xs, _rational(frequency))
    return sympy_fields("weak_conformal_f", sp.eye(4), f, xs)


def build_weak_conformal_f(amplitude=0.5, frequency=1.0):
    return _weak_conformal_sympy(amplitude, frequency)


def build_f_with_kernel(amplitude=0.5, frequency=1.0):
    block = _weak_conformal_sympy(amplitude, frequency)
    return product_fields("f_with_kernel", [block, flat_trivial(2)],
                          factors=[Factor(slice(0, 4), block, 1.0)])


def _constant_reeb(n, index=0):
    e = np.zeros(n)
    e[index] = 1.0
    zero = np.zeros((n, n))
    return ReebData(xi_at=lambda p: e.copy(), dxi_at=lambda p: zero.copy(),
                    eta_at=lambda p: e.copy(), deta_at=lambda p: zero.copy())


def build_acm_product(frequency=1.0):
    factor = build_hermitian_rotated_J(frequency)
    return product_fields("acm_product", [flat_trivial(1), factor], reeb=_constant_reeb(5),
                          factors=[Factor(slice(1, 5), factor, 1.0)])


def build_contact_r5():
    """Standard contact form eta = (dz - y1 dx1 - y2 dx2)/2 on R^5 with its
    associated metric; coordinates (x1, x2, y1, y2, z)."""
    xs = sp.symbols("x0:5")
    y1, y2 = xs[2], xs[3]
    eta = sp.Matrix([[-y1 / 2, -y2 / 2, 0, 0, sp.Rational(1, 2)]])
    g = eta.T * eta + sp.diag(*([sp.Rational(1, 4)] * 4), 0)
    frame = sp.Matrix.hstack(sp.Matrix([0, 0, 2, 0, 0]), sp.Matrix([0, 0, 0, 2, 0]),
                             sp.Matrix([2, 0, 0, 0, 2 * y1]), sp.Matrix([0, 2, 0, 0, 2 * y2]),
                             sp.Matrix([0, 0, 0, 0, 2]))
    Jb = sp.zeros(5)
    Jb[2, 0], Jb[3, 1], Jb[0, 2], Jb[1, 3] = 1, 1, -1, -1
    f = sp.simplify(frame * Jb * frame.inv())
    xi = np.array([0, 0, 0, 0, 2.0])
    deta = np.zeros((5, 5))
    deta[2, 0] = deta[3, 1] = -0.5
    reeb = ReebData(
        xi_at=lambda p: xi.copy(), dxi_at=lambda p: np.zeros((5, 5)),
        eta_at=lambda p: np.array([-p[2] / 2, -p[3] / 2, 0, 0, 0.5]),
        deta_at=lambda p: deta.copy())
    return sympy_fields("contact_r5", g, sp.simplify(g * f), xs, reeb=reeb)


def build_lorentz_flat(boost=0.5):
    xs = sp.symbols("x0:4")
    g = sp.diag(-1, 1, 1, 1)
    b = sp.Float(boost)
    F = sp.Matrix([[0, b, 0, 0], [-b, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    return sympy_fields("lorentz_flat", g, F, xs, signature=(-1, 1, 1, 1))


def build_exact_symplectic(strength=0.3):
    """F = dx0^dx1 + dx2^dx3 + strength * d(alpha), so dF = 0 exactly."""
    xs = sp.symbols("x0:4")
    x0, x1, x2, x3 = xs
    alpha = [sp.sin(x0 * x2), x3 * sp.cos(x1), x0 ** 2 * x1, x1 * x2 * x3]
    c = sp.Float(strength)
    F0 = -J0
    F = sp.Matrix(4, 4, lambda i, j: F0[i, j] + c * (sp.diff(alpha[j], xs[i]) - sp.diff(alpha[i], xs[j])))
    return sympy_fields("exact_symplectic", sp.eye(4), F, xs)


@dataclass(frozen=True)
class ManifoldSpec:
    name: str
    description: str
    defaults: dict
    param_doc: dict
    builder: Callable
    dim_of: Callable
    check: Callable = field(default=lambda params: None)
    almost_hermitian: Callable = field(default=lambda params: False)
    open_params: str = ""   # prefix of extra numbered params accepted, e.g. "lambda"
    sample_domain: tuple = (-1.0, 1.0)

    def resolve(self, params=None):
        merged = dict(self.defaults)
        given = dict(params or {})
        if self.open_params and any(k.startswith(self.open_params) for k in given):
            merged = {k: v for k, v in merged.items() if not k.startswith(self.open_params)}
        for k, v in given.items():
            if k not in self.defaults and not (self.open_params and _numbered(k, self.open_params)):
                raise InvalidParams(f"{self.name} has no parameter {k!r}")
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise InvalidParams(f"parameter {k}={v!r} is not a number") from None
            if not math.isfinite(v):
                raise InvalidParams(f"parameter {k}={v} is not finite")
            merged[k] = v
        self.check(merged)
        return merged


def _numbered(key, prefix):
    return key.startswith(prefix) and key[len(prefix):].isdigit() and int(key[len(prefix):]) >= 1


def _check_even_dim(params):
    d = params["dim"]
    if d < 2 or d != int(d) or int(d) % 2:
        raise InvalidParams("dim must be a positive even integer")


def _check_lambdas(params):
    keys = sorted(params, key=lambda k: int(k[len("lambda"):]))
    if [int(k[len("lambda"):]) for k in keys] != list(range(1, len(keys) + 1)):
        raise InvalidParams("weights must be numbered lambda1, lambda2, ... without gaps")
    for k in keys:
        if params[k] <= 0:
            raise InvalidParams(f"{k} must be positive")


def _check_amplitude(params):
    if not 0 <= params["amplitude"] < 1:
        raise InvalidParams("amplitude must lie in [0, 1) so that a(x) > 0 on the box")


def _check_boost(params):
    if abs(abs(params["boost"]) - 1) < 1e-6:
        raise InvalidParams("|boost| = 1 makes P = I - f^2 singular")


def _check_strength(limit):
    def check(params):
        if abs(params["strength"]) > limit:
            raise InvalidParams(f"strength must satisfy |strength| <= {limit}")
    return check


REGISTRY = {spec.name: spec for spec in [
    ManifoldSpec(
        "kaehler_flat", "flat metric with the constant complex structure; nabla F = 0",
        {"dim": 4.0}, {"dim": "even chart dimension"},
        lambda p: build_kaehler_flat(int(p["dim"])), lambda p: int(p["dim"]),
        check=_check_even_dim, almost_hermitian=lambda p: True),
    ManifoldSpec(
        "hermitian_rotated_J", "euclidean R^4 with f = R(x) J0 R(x)^T, f^2 = -I",
        {"frequency": 1.0}, {"frequency": "angular rate of the rotation R(x)"},
        lambda p: build_hermitian_rotated_J(p["frequency"]), lambda p: 4,
        almost_hermitian=lambda p: True),
    ManifoldSpec(
        "lck_conformal", "metric exp(2 phi) delta with constant J0; satisfies (s1)",
        {"strength": 1 / 3}, {"strength": "scale of phi = strength (x0 x1 + sin x2)"},
        lambda p: build_lck_conformal(p["strength"]), lambda p: 4,
        check=_check_strength(1.0), almost_hermitian=lambda p: True),
    ManifoldSpec(
        "weighted_product", "product of rotated-J factors with f = sqrt(lambda_j) J_j",
        {"lambda1": 2.0, "lambda2": 3.0},
        {"lambdaK": "weight of factor K (K = 1, 2, ...); each factor is 4-dimensional"},
        lambda p: build_weighted_product(**p), lambda p: 4 * len(p),
        check=_check_lambdas, almost_hermitian=lambda p: all(v == 1 for v in p.values()),
        open_params="lambda"),
    ManifoldSpec(
        "weak_conformal_f", "f = a(x) R(x) J0 R(x)^T on euclidean R^4, f^2 = -a^2 I",
        {"amplitude": 0.5, "frequency": 1.0},
        {"amplitude": "a = 3/2 + amplitude (sin(x0 + 2 x1) + x2 x3 / 2)",
         "frequency": "rotation rate; 0 gives a(x) J0"},
        lambda p: build_weak_conformal_f(p["amplitude"], p["frequency"]), lambda p: 4,
        check=_check_amplitude),
    ManifoldSpec(
        "f_with_kernel", "weak_conformal_f block times flat R^2 with F = 0; ker f has rank 2",
        {"amplitude": 0.5, "frequency": 1.0}, {"amplitude": "as weak_conformal_f",
                                              "frequency": "as weak_conformal_f"},
        lambda p: build_f_with_kernel(p["amplitude"], p["frequency"]), lambda p: 6,
        check=_check_amplitude),
    ManifoldSpec(
        "acm_product", "R x hermitian_rotated_J with xi = d/dt, eta = dt",
        {"frequency": 1.0}, {"frequency": "as hermitian_rotated_J; 0 gives R x Kaehler"},
        lambda p: build_acm_product(p["frequency"]), lambda p: 5),
    ManifoldSpec(
        "contact_r5", "standard contact metric structure on R^5; xi is not parallel",
        {}, {}, lambda p: build_contact_r5(), lambda p: 5),
    ManifoldSpec(
        "lorentz_flat", "metric diag(-1,1,1,1) with a constant 2-form",
        {"boost": 0.5}, {"boost": "F_01 component, |boost| != 1"},
        lambda p: build_lorentz_flat(p["boost"]), lambda p: 4, check=_check_boost),
    ManifoldSpec(
        "exact_symplectic", "euclidean R^4 with a closed 2-form F = F0 + d(alpha)",
        {"strength": 0.3}, {"strength": "size of the exact perturbation"},
        lambda p: build_exact_symplectic(p["strength"]), lambda p: 4,
        check=_check_strength(0.4)),
]}


def get_spec(name):
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownManifold(f"unknown manifold {name!r}; known: {', '.join(REGISTRY)}") from None


@lru_cache(maxsize=64)
def _instantiate(name, items):
    spec = get_spec(name)
    return spec.builder(dict(items))


def instantiate(name, params=None, **kwargs):
    spec = get_spec(name)
    resolved = spec.resolve({**(params or {}), **kwargs})
    return _instantiate(name, tuple(sorted(resolved.items())))


def sample_points(fields, count, seed, kernel_eps=1e-10, rank_gap=1e-3, domain=(-1.0, 1.0)):
    """Seeded uniform points in the box, rejecting near-degenerate ones.

    A point is rejected when |det g| < 1e-12 or when f^2 has an eigenvalue
    whose modulus lies in (kernel_eps, rank_gap), i.e. when the rank of f is
    about to jump.  At most 10 * count draws are made.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    lo, hi = domain
    accepted = []
    for _ in range(10 * count):
        p = rng.uniform(lo, hi, fields.dim)
        g = np.asarray(fields.g_at(p), float)
        if abs(np.linalg.det(g)) < 1e-12:
            continue
        f = np.linalg.solve(g, np.asarray(fields.F_at(p), float))
        mu = np.abs(np.linalg.eigvals(f @ f))
        if np.any((mu > kernel_eps) & (mu < rank_gap)):
            continue
        accepted.append(p)
        if len(accepted) == count:
            return accepted
    raise SamplingExhausted(f"only {len(accepted)} of {count} points accepted for {fields.name}")

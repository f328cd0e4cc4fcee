"""Chart fields g(x), F(x) with exact first partials, and the pointwise
geometry built from them: Levi-Civita symbols, the Levi-Civita derivative of
F, the exterior derivative dF and the structure operators f, Q, P.

Slot convention for derivatives: ``dg[l, i, j] = d_l g_ij`` and likewise for
F.  The Levi-Civita derivative of F is stored as ``nablaF[z, x, y] =
(nabla^g_{e_z} F)(e_x, e_y) = g(e_x, (nabla^g_{e_z} f) e_y)``.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateMetric, NonFinite, SingularP
from .results import judge
from .tensor_core import KernelSplit, check_metric, spectral_split, sup_norm


@dataclass(frozen=True)
class ReebData:
    """Unit vector field xi and 1-form eta of an almost contact structure."""
    xi_at: Callable
    dxi_at: Callable      # [l, k] = d_l xi^k
    eta_at: Callable
    deta_at: Callable     # [l, k] = d_l eta_k


@dataclass(frozen=True)
class Factor:
    """A block of a product chart: coordinate slice plus the factor's own fields."""
    index: slice
    fields: "StructureFields"
    weight: float = 1.0   # the factor carries sqrt(weight) * J


@dataclass(frozen=True)
class StructureFields:
    name: str
    dim: int
    g_at: Callable
    dg_at: Callable
    F_at: Callable
    dF_partials_at: Callable
    signature: tuple
    reeb: Optional[ReebData] = None
    factors: tuple = ()
    params: dict = field(default_factory=dict)

    def evaluate(self, p):
        p = _as_point(p, self.dim)
        return (np.asarray(self.g_at(p), float), np.asarray(self.dg_at(p), float),
                np.asarray(self.F_at(p), float), np.asarray(self.dF_partials_at(p), float))


@dataclass(frozen=True)
class PointGeometry:
    coords: np.ndarray
    signature: tuple
    g: np.ndarray
    g_inv: np.ndarray
    dg: np.ndarray
    F: np.ndarray
    dFp: np.ndarray
    gamma: np.ndarray
    f: np.ndarray
    f2: np.ndarray
    f3: np.ndarray
    f4: np.ndarray
    f6: np.ndarray
    Qtilde: np.ndarray
    P: np.ndarray
    Pinv: np.ndarray
    kernel_split: KernelSplit
    f6_complement_inv: np.ndarray
    nablaF: np.ndarray
    dF: np.ndarray

    @property
    def dim(self):
        return self.g.shape[0]

    @property
    def has_kernel(self):
        return self.kernel_split.kernel.shape[1] > 0

    def almost_hermitian_defect(self):
        return sup_norm(self.f2 + np.eye(self.dim))


@dataclass(frozen=True)
class ReebAtPoint:
    xi: np.ndarray
    eta: np.ndarray
    nabla_xi: np.ndarray    # [x, k] = (nabla^g_{e_x} xi)^k
    nabla_eta: np.ndarray   # [x, y] = (nabla^g_{e_x} eta)(e_y)


def _as_point(p, dim):
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape[0] != dim:
        raise ValueError(f"point has {p.shape[0]} coordinates, chart has {dim}")
    if not np.all(np.isfinite(p)):
        raise NonFinite("point has non-finite coordinates")
    return p


def christoffel_from_metric(g, dg):
    """Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)."""
    g = check_metric(g)
    first_kind = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)  # [l, i, j]
    # dg.transpose(1,0,2)[l,i,j] = d_i g_lj ; dg.transpose(1,2,0)[l,i,j] = d_j g_li
    return np.einsum("kl,lij->kij", np.linalg.inv(g), first_kind)


def christoffel(fields, p):
    g, dg, _, _ = fields.evaluate(p)
    return christoffel_from_metric(g, dg)


def _nabla_F_gamma(F, dFp, gamma):
    # nabla_l F_ij = d_l F_ij - Gamma^m_li F_mj - Gamma^m_lj F_im
    return dFp - np.einsum("mli,mj->lij", gamma, F) - np.einsum("mlj,im->lij", gamma, F)


def _nabla_F_endo(g, dg, F, dFp, gamma):
    # route through f = g^{-1} F: (nabla_z f)^k_y, then lower with g
    g_inv = np.linalg.inv(g)
    f = g_inv @ F
    df = -np.einsum("ka,lab,bc->lkc", g_inv, dg, f) + np.einsum("ka,lay->lky", g_inv, dFp)
    nf = df + np.einsum("kzm,my->zky", gamma, f) - np.einsum("mzy,km->zky", gamma, f)
    return np.einsum("xk,zky->zxy", g, nf)


def nabla_F(fields, p, route="gamma"):
    """Levi-Civita derivative of F as ``[z, x, y]``.

    ``route="gamma"`` uses the component formula with Christoffel symbols;
    ``route="endo"`` differentiates f = g^{-1}F and lowers, g(X, (nabla_Z f) Y).
    """
    g, dg, F, dFp = fields.evaluate(p)
    gamma = christoffel_from_metric(g, dg)
    if route == "gamma":
        return _nabla_F_gamma(F, dFp, gamma)
    if route == "endo":
        return _nabla_F_endo(g, dg, F, dFp, gamma)
    raise ValueError(f"unknown route {route!r}")


def coboundary_dF(dFp):
    """dF_ijk = d_i F_jk + d_j F_ki + d_k F_ij (no factor 3)."""
    return dFp + dFp.transpose(1, 2, 0) + dFp.transpose(2, 0, 1)


def cyclic_dF(N):
    """dF(X,Y,Z) as the cyclic sum of (nabla^g F)."""
    return N + N.transpose(1, 2, 0) + N.transpose(2, 0, 1)


def exterior_dF(fields, p, route="coboundary"):
    if route == "coboundary":
        return coboundary_dF(fields.evaluate(p)[3])
    if route == "cyclic":
        return cyclic_dF(nabla_F(fields, p))
    raise ValueError(f"unknown route {route!r}")


def _complement_inverse(A, split):
    """Inverse of A on the span of ``split.complement``, zero on the kernel."""
    C, Kb = split.complement, split.kernel
    n = A.shape[0]
    if C.shape[1] == 0:
        return np.zeros((n, n))
    M = np.linalg.lstsq(C, A @ C, rcond=None)[0]
    B = np.hstack([C, Kb])
    block = np.zeros((n, n))
    block[:C.shape[1], :C.shape[1]] = np.linalg.inv(M)
    return B @ block @ np.linalg.inv(B)


def point_geometry(fields, p, kernel_eps=1e-10):
    p = _as_point(p, fields.dim)
    g, dg, F, dFp = fields.evaluate(p)
    g = check_metric(g)
    n = g.shape[0]
    g_inv = np.linalg.inv(g)
    gamma = christoffel_from_metric(g, dg)
    f = g_inv @ F
    f2 = f @ f
    f3 = f2 @ f
    f4 = f2 @ f2
    f6 = f4 @ f2
    I = np.eye(n)
    Q = -f2 - I
    P = I - f2
    if abs(np.linalg.det(P)) < 1e-12:
        raise SingularP(f"|det P| = {abs(np.linalg.det(P)):.3e}")
    split = spectral_split(f2, g, kernel_eps, fields.signature)
    N = _nabla_F_gamma(F, dFp, gamma)
    return PointGeometry(
        coords=p, signature=tuple(fields.signature), g=g, g_inv=g_inv, dg=dg, F=F,
        dFp=dFp, gamma=gamma, f=f, f2=f2, f3=f3, f4=f4, f6=f6, Qtilde=Q, P=P,
        Pinv=np.linalg.inv(P), kernel_split=split,
        f6_complement_inv=_complement_inverse(f6, split), nablaF=N,
        dF=coboundary_dF(dFp))


def levi_civita_metricity(geom):
    """sup |nabla^g g| computed from the partials and the Christoffel symbols."""
    ng = (geom.dg - np.einsum("mxy,mz->xyz", geom.gamma, geom.g)
          - np.einsum("mxz,ym->xyz", geom.gamma, geom.g))
    return sup_norm(ng)


def reeb_at(fields, geom):
    if fields.reeb is None:
        return None
    p = geom.coords
    r = fields.reeb
    xi = np.asarray(r.xi_at(p), float)
    eta = np.asarray(r.eta_at(p), float)
    dxi = np.asarray(r.dxi_at(p), float)
    deta = np.asarray(r.deta_at(p), float)
    nabla_xi = dxi + np.einsum("kxm,m->xk", geom.gamma, xi)
    nabla_eta = deta - np.einsum("mxy,m->xy", geom.gamma, eta)
    return ReebAtPoint(xi, eta, nabla_xi, nabla_eta)


def _central_difference(fn, p, h):
    n = p.shape[0]
    cols = []
    for l in range(n):
        e = np.zeros(n)
        e[l] = h
        cols.append((np.asarray(fn(p + e), float) - np.asarray(fn(p - e), float)) / (2 * h))
    return np.stack(cols)


def fd_validate(fields, p, h=1e-5, tol=1e-6):
    """Compare the supplied partials with central finite differences.

    The residual is the sup-norm difference divided by max(1, sup of the
    supplied partials).
    """
    p = _as_point(p, fields.dim)
    _, dg, _, dFp = fields.evaluate(p)
    fd_g = _central_difference(fields.g_at, p, h)
    fd_F = _central_difference(fields.F_at, p, h)
    scale = max(1.0, sup_norm(dg), sup_norm(dFp))
    residual = max(sup_norm(fd_g - dg), sup_norm(fd_F - dFp)) / scale
    return judge("FD_VALIDATE", residual, tol, manifold=fields.name, point=p.tolist())

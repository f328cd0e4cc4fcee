"""Closed-form torsion of Einstein connections, contorsion/torsion
conversion, connection assembly and the metricity residual.

An Einstein connection satisfies (nabla_X G)(Y, Z) = -G(T(X, Y), Z) with
G = g + F.  Torsion and contorsion are stored as degree-3 covariant arrays,
``T[x, y, z] = g(T(e_x, e_y), e_z)`` and ``K[x, y, z] = g(K_{e_x} e_y, e_z)``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (InvalidLambda, KernelSplitUnavailable, NotAlmostHermitian,
                     ReebNotParallel, SingularP, StructureMismatch)
from .results import judge
from .tensor_core import antisymmetrize12, apply_slots, sup_norm
from .terms import OperatorAlgebra, evaluate

SOURCES = ("Hermitian213", "WeakThm42", "Special", "AlmostContact", "SkewDF",
           "Oracle", "WeightedFactor", "Contorsion")

STRUCTURE_TOL = 1e-10
REEB_TOL = 1e-9


@dataclass(frozen=True)
class TorsionAtPoint:
    T: np.ndarray
    source: str
    asymmetry: float = 0.0   # defect removed by the final antisymmetrization


@dataclass(frozen=True)
class ContorsionAtPoint:
    K: np.ndarray


@dataclass(frozen=True)
class ConnectionAtPoint:
    """nabla = nabla^g + K at a point, with the data needed to differentiate."""
    gamma_total: np.ndarray   # [k, i, j]: nabla_{e_i} e_j = gamma_total[k, i, j] e_k
    g: np.ndarray
    dg: np.ndarray
    F: np.ndarray
    dFp: np.ndarray

    def torsion(self):
        Tk = self.gamma_total - self.gamma_total.transpose(0, 2, 1)   # [k, x, y]
        return np.einsum("kxy,kz->xyz", Tk, self.g)

    def nabla_g(self):
        """(nabla_X g)(Y, Z) as ``[x, y, z]``."""
        G = self.gamma_total
        return (self.dg - np.einsum("mxy,mz->xyz", G, self.g)
                - np.einsum("mxz,ym->xyz", G, self.g))

    def nabla_F(self):
        """(nabla_X F)(Y, Z) as ``[x, y, z]``."""
        G = self.gamma_total
        return (self.dFp - np.einsum("mxy,mz->xyz", G, self.F)
                - np.einsum("mxz,ym->xyz", G, self.F))


def _tensors(geom, T=None):
    return {"T": T, "N": geom.nablaF, "dF": geom.dF}


def _ops(geom):
    return OperatorAlgebra(geom.f, geom.Pinv)


# value arrays are indexed [x, y, z]; these helpers read T off an expression
# that equals c * T(Y, Z, X) or c * T(X, Y, Z)
def _from_yzx(R, c):
    return np.einsum("xyz->yzx", R) / c


HERMITIAN_RHS = "2 N(fX,fY,Z) -N(fY,fZ,X) -N(fZ,X,fY) -N(Y,Z,X) -N(Z,X,Y)"
SPECIAL_RHS = "N(X,Y,Z) -N(fZ,fX,Y) -N(fY,fX,Z)"   # equals -T(X,Y,Z)

# T(Y, Z, L X) with L = -f^2 (3Q + 2I) P, valid for X off the kernel of f
WEAK_RHS = """
+2 N(X,fY,fZ) +2 N(X,f3Y,fZ) +2 N(Y,f2Z,X) +2 N(Z,f2X,Y)
-2 N(fX,f3Y,Z) -2 N(fX,f2Y,fZ) +2 N(fY,f3Z,X) +2 N(fZ,f2X,fY)
+dF(Y,Z,[4Q+Q2]f2X) -2 dF(fY,fZ,[Q+Q2]X) -dF(Y,fZ,Qf3X) -dF(fY,Z,Qf3X)
-2 N(QX,Y,f2Z) +2 N(QX,fY,fZ) -2 N(Qf2X,Y,Z)
"""


def weak_solve_operator(geom):
    n = geom.dim
    return -geom.f2 @ (3 * geom.Qtilde + 2 * np.eye(n)) @ geom.P


def _require_almost_hermitian(geom):
    defect = geom.almost_hermitian_defect()
    if defect > STRUCTURE_TOL:
        raise NotAlmostHermitian(f"|f^2 + I| = {defect:.3e}")


def torsion_hermitian(geom):
    """Torsion for f^2 = -I:
    2T(Y,Z,X) = 2(nabla_{fX}F)(fY,Z) - (nabla_{fY}F)(fZ,X) - (nabla_{fZ}F)(X,fY)
                - (nabla_Y F)(Z,X) - (nabla_Z F)(X,Y).
    """
    _require_almost_hermitian(geom)
    R = evaluate(HERMITIAN_RHS, _tensors(geom), _ops(geom))
    T = _from_yzx(R, 2.0)
    return TorsionAtPoint(antisymmetrize12(T), "Hermitian213",
                          sup_norm(T + T.transpose(1, 0, 2)))


def torsion_weak(geom):
    """Torsion of an Einstein connection satisfying the f^2-torsion condition.

    Off the kernel of f the torsion is read from T(Y, Z, L X) = S(X, Y, Z),
    L = -f^2 (3Q + 2I) P, by inverting L on the complement of ker f.  On
    kernel directions W it is T(Y, Z, W) = 2 (nabla_W F)(Y, Z) - dF(Y, Z, W).
    Both sides of the kernel branch vanish whenever the hypothesis holds.
    """
    split = geom.kernel_split
    if split is None:
        raise KernelSplitUnavailable("point geometry has no kernel split")
    n = geom.dim
    C, Kb = split.complement, split.kernel
    S = evaluate(WEAK_RHS, _tensors(geom), _ops(geom))
    L = weak_solve_operator(geom)
    r = C.shape[1]
    # L preserves the complement: L C = C M
    M = np.linalg.lstsq(C, L @ C, rcond=None)[0] if r else np.zeros((0, 0))
    if r:
        sv = np.linalg.svd(M, compute_uv=False)
        if sv[-1] < 1e-10 * max(1.0, sv[0]):
            raise SingularP("f^2 has the eigenvalue -1/3; the torsion is not determined")
    X_of = C @ np.linalg.inv(M) if r else np.zeros((n, 0))   # L X_j = C e_j
    T_basis = np.empty((n, n, n))
    T_basis[:, :, :r] = np.einsum("xyz,xj->yzj", S, X_of)
    if Kb.shape[1]:
        N, dF = geom.nablaF, geom.dF
        T_basis[:, :, r:] = (2 * np.einsum("wyz,wj->yzj", N, Kb)
                             - np.einsum("yzw,wj->yzj", dF, Kb))
    B = np.hstack([C, Kb])
    T = np.einsum("yzj,jk->yzk", T_basis, np.linalg.inv(B))
    return TorsionAtPoint(antisymmetrize12(T), "WeakThm42",
                          sup_norm(T + T.transpose(1, 0, 2)))


def singular_branch(geom, W, sign=+1.0):
    """2 (nabla_W F)(Y, Z) + sign * dF(Y, Z, W) as an ``[y, z]`` array."""
    W = np.asarray(W, float)
    return 2 * np.einsum("wyz,w->yz", geom.nablaF, W) + sign * np.einsum("yzw,w->yz", geom.dF, W)


WEIGHTED_FACTOR_TERMS = {
    "a": "N(X,Y,Z)",
    "b": "N(Y,Z,X) +N(Z,X,Y)",
    "c": "N(fX,fY,Z)",
    "d": "N(fY,fZ,X) +N(fZ,X,fY)",
}


def weighted_factor_coefficients(lam):
    if not np.isfinite(lam) or lam <= 0:
        raise InvalidLambda(f"weight must be positive, got {lam}")
    if abs(3 * lam - 1) < 1e-12:
        raise InvalidLambda("weight 1/3 makes the torsion undetermined")
    s = np.sqrt(lam) / (3 * lam - 1)
    return {"a": s * (lam - 1), "b": -s * (2 * lam - 1), "c": 2 * s * lam, "d": -s * lam}


def torsion_weighted_factor(geom_j, lam):
    """Torsion block on one factor of a product carrying f = sqrt(lam) J.

    ``geom_j`` is the geometry of the factor with its unscaled J (so
    f = J there) and n = nabla^g F_J.  Then

        T(Y,Z,X) = sqrt(lam)/(3 lam - 1) [ (lam-1) n(X,Y,Z)
                   - (2 lam - 1)(n(Y,Z,X) + n(Z,X,Y)) + 2 lam n(JX,JY,Z)
                   - lam (n(JY,JZ,X) + n(JZ,X,JY)) ],

    which reduces to the almost Hermitian torsion at lam = 1.
    """
    _require_almost_hermitian(geom_j)
    coef = weighted_factor_coefficients(lam)
    tensors, ops = _tensors(geom_j), _ops(geom_j)
    R = sum(coef[k] * evaluate(expr, tensors, ops) for k, expr in WEIGHTED_FACTOR_TERMS.items())
    T = _from_yzx(R, 1.0)
    return TorsionAtPoint(antisymmetrize12(T), "WeightedFactor",
                          sup_norm(T + T.transpose(1, 0, 2)))


def _almost_contact_defect(geom, reeb):
    n = geom.dim
    return sup_norm(geom.f2 + np.eye(n) - np.outer(reeb.xi, reeb.eta))


def torsion_special(geom, reeb=None):
    """Torsion of a special Einstein connection (K_X Y = -K_Y X):
    T(X,Y,Z) = -(nabla_X F)(Y,Z) + (nabla_{fZ}F)(fX,Y) + (nabla_{fY}F)(fX,Z).

    The overall factor is -1; with 1/2 the result is not an Einstein torsion.
    Before antisymmetrization the expression is skew in (X, Y) exactly when
    (s1) holds, and ``asymmetry`` equals the (s1) residual.
    """
    if geom.almost_hermitian_defect() > STRUCTURE_TOL:
        if reeb is None or _almost_contact_defect(geom, reeb) > STRUCTURE_TOL:
            raise StructureMismatch("f^2 is neither -I nor -I + eta (x) xi")
    T = -evaluate(SPECIAL_RHS, _tensors(geom), _ops(geom))
    return TorsionAtPoint(antisymmetrize12(T), "Special", sup_norm(T + T.transpose(1, 0, 2)))


def reeb_parallel_defect(reeb):
    return sup_norm(reeb.nabla_xi)


def torsion_acm(geom, reeb):
    """Horizontal torsion of an almost contact metric manifold.

    Requires nabla^g xi = 0.  The almost Hermitian formula is evaluated with f
    and projected with Pi = I - xi (x) eta onto the horizontal space in every
    slot, so every component with a xi-slot is exactly zero.
    """
    if reeb is None:
        raise StructureMismatch("no Reeb data on this structure")
    if _almost_contact_defect(geom, reeb) > STRUCTURE_TOL:
        raise StructureMismatch("f^2 != -I + eta (x) xi")
    defect = reeb_parallel_defect(reeb)
    if defect > REEB_TOL:
        raise ReebNotParallel(f"|nabla^g xi| = {defect:.3e}")
    R = evaluate(HERMITIAN_RHS, _tensors(geom), _ops(geom))
    T = _from_yzx(R, 2.0)
    Pi = np.eye(geom.dim) - np.outer(reeb.xi, reeb.eta)
    T = apply_slots(T, Pi, Pi, Pi)
    return TorsionAtPoint(antisymmetrize12(T), "AlmostContact",
                          sup_norm(T + T.transpose(1, 0, 2)))


def torsion_from_dF(geom, scale):
    """T = scale * dF (totally skew)."""
    return TorsionAtPoint(scale * geom.dF, "SkewDF")


def contorsion_from_torsion(T, geom):
    """2K(X,Y,Z) = T(X,Y,Z) - T(Z,X,fY) + T(Y,Z,fX)."""
    T = T.T if isinstance(T, TorsionAtPoint) else T
    f = geom.f
    t_zxfy = np.einsum("zxk,ky->xyz", T, f)
    t_yzfx = np.einsum("yzk,kx->xyz", T, f)
    return ContorsionAtPoint(0.5 * (T - t_zxfy + t_yzfx))


def torsion_from_contorsion(K):
    """T(X,Y,Z) = K(X,Y,Z) - K(Y,X,Z)."""
    K = K.K if isinstance(K, ContorsionAtPoint) else K
    return TorsionAtPoint(K - K.transpose(1, 0, 2), "Contorsion")


def assemble_connection(geom, K):
    K = K.K if isinstance(K, ContorsionAtPoint) else K
    gamma_total = geom.gamma + np.einsum("kl,ijl->kij", geom.g_inv, K)
    return ConnectionAtPoint(gamma_total, geom.g, geom.dg, geom.F, geom.dFp)


def metricity_array(conn):
    """(nabla_X G)(Y,Z) + G(T(X,Y), Z) over all basis triples."""
    Tk = conn.gamma_total - conn.gamma_total.transpose(0, 2, 1)
    G = conn.g + conn.F
    return conn.nabla_g() + conn.nabla_F() + np.einsum("kxy,kz->xyz", Tk, G)


def metricity_residual(conn, tol=1e-8, **context):
    return judge("METRICITY", sup_norm(metricity_array(conn)), tol, **context)


def connection_from_torsion(geom, T):
    """Connection assembled from a torsion through the contorsion formula."""
    T = T.T if isinstance(T, TorsionAtPoint) else T
    return assemble_connection(geom, contorsion_from_torsion(T, geom))

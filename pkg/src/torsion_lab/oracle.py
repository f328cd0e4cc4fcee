"""Brute-force pointwise solver for the Einstein metricity equation.

The unknowns are the n^3 contorsion components K[x, y, z], flattened in
row-major order.  Writing nabla = nabla^g + K, the equation
(nabla_X G)(Y, Z) = -G(T(X, Y), Z) becomes, for every basis triple,

    N(x,y,z) - K(x,z,y) + K(x,z,fy) - K(y,x,z) - K(y,x,fz) = 0,

with N = nabla^g F.  The system is solved by minimum-norm least squares.
"""
from dataclasses import dataclass

import numpy as np

from .connection import ContorsionAtPoint, TorsionAtPoint, torsion_from_contorsion
from .errors import PreconditionNotMet
from .results import judge, skip
from .tensor_core import solve_dense, sup_norm

SV_THRESHOLD = 1e-10
CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class OracleSolution:
    K: ContorsionAtPoint
    T: TorsionAtPoint
    system_residual: float
    unique: bool
    sv_ratio: float
    f2_condition_residual: float
    f_condition_residual: float
    s1_residual: float

    @property
    def consistent(self):
        return self.system_residual < CONSISTENCY_TOL


def metricity_matrix(f):
    """The n^3 x n^3 matrix M with M vec(K) = -vec(N)."""
    n = f.shape[0]
    I = np.eye(n)
    M = (-np.einsum("xa,zb,yc->xyzabc", I, I, I)
         + np.einsum("xa,zb,cy->xyzabc", I, I, f)
         - np.einsum("ya,xb,zc->xyzabc", I, I, I)
         - np.einsum("ya,xb,cz->xyzabc", I, I, f))
    return M.reshape(n ** 3, n ** 3)


def operator_condition_residual(T, A):
    """sup of |T(AX,Y,Z) - T(X,AY,Z)| and |T(AX,Y,Z) - T(X,Y,AZ)|."""
    a = np.einsum("pyz,px->xyz", T, A)
    b = np.einsum("xpz,py->xyz", T, A)
    c = np.einsum("xyp,pz->xyz", T, A)
    return max(sup_norm(a - b), sup_norm(a - c))


def s1_residual(geom):
    """(nabla_X F)(Y,Z) + (nabla_Y F)(X,Z) - (nabla_{fX}F)(fY,Z) - (nabla_{fY}F)(fX,Z)."""
    N, f = geom.nablaF, geom.f
    sym = N + N.transpose(1, 0, 2)
    Nff = np.einsum("abz,ax,by->xyz", N, f, f)
    return sup_norm(sym - Nff - Nff.transpose(1, 0, 2))


def solve_einstein_pointwise(geom, sv_threshold=SV_THRESHOLD):
    n = geom.dim
    M = metricity_matrix(geom.f)
    sol = solve_dense(M, -geom.nablaF.reshape(-1), sv_threshold)
    K = sol.solution.reshape(n, n, n)
    T = torsion_from_contorsion(K).T
    return OracleSolution(
        K=ContorsionAtPoint(K), T=TorsionAtPoint(T, "Oracle"),
        system_residual=sol.residual, unique=sol.unique, sv_ratio=sol.sv_ratio,
        f2_condition_residual=operator_condition_residual(T, geom.f2),
        f_condition_residual=operator_condition_residual(T, geom.f),
        s1_residual=s1_residual(geom))


def check_comparable(oracle, require_f2=False, f2_tol=1e-9):
    if not oracle.unique:
        raise PreconditionNotMet("oracle solution is not unique")
    if oracle.system_residual >= 1e-10:
        raise PreconditionNotMet(f"oracle system inconsistent ({oracle.system_residual:.3e})")
    if require_f2 and oracle.f2_condition_residual >= f2_tol:
        raise PreconditionNotMet(
            f"f^2-torsion condition fails ({oracle.f2_condition_residual:.3e})")


def compare_with_formula(oracle, formula_T, tol=1e-8, require_f2=False, id="FORMULA_VS_ORACLE",
                         **context):
    """Sup-norm distance between a formula torsion and the oracle torsion."""
    T = formula_T.T if isinstance(formula_T, TorsionAtPoint) else formula_T
    try:
        check_comparable(oracle, require_f2)
    except PreconditionNotMet as exc:
        return skip(id, str(exc), tol, **context)
    return judge(id, sup_norm(T - oracle.T.T), tol, **context)

"""Pointwise multilinear algebra.

Conventions used throughout the package:

* A (1,1)-tensor ``f`` is a square array with ``f[k, j] = f^k_j``, so
  ``f @ v`` applies it to a vector.
* A 2-form is a square array ``F[i, j] = F(e_i, e_j)``.  The pairing between
  the two is ``F_ij = g_ik f^k_j``, i.e. ``F(X, Y) = g(X, fY)``.
* A degree-3 covariant tensor is an ``(n, n, n)`` array ``A[i, j, k] =
  A(e_i, e_j, e_k)``.  Torsion, contorsion, the Levi-Civita derivative of F
  and dF are all stored this way.
"""
from collections import namedtuple

import numpy as np
import scipy.linalg

from .errors import DegenerateMetric, NonFinite, NotSelfAdjoint

SYMMETRY_FLAGS = ("none", "skew12", "skew23", "totally_skew")

DenseSolution = namedtuple("DenseSolution", "solution residual unique sv_ratio")
KernelSplit = namedtuple("KernelSplit", "kernel complement eigenvalues")


def sup_norm(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def check_metric(g, scale=1.0):
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    if not np.all(np.isfinite(g)):
        raise NonFinite("metric has non-finite entries")
    if abs(np.linalg.det(g)) < 1e-12 * scale ** n:
        raise DegenerateMetric(f"|det g| = {abs(np.linalg.det(g)):.3e} below threshold")
    return g


def lower_endo(f, g):
    """Return the 2-form F(X, Y) = g(X, fY) of an endomorphism f."""
    g = check_metric(g)
    F = g @ np.asarray(f, dtype=float)
    # exact skewness; the pre-symmetrization defect is what g-skewness of f controls
    return 0.5 * (F - F.T)


def raise_endo(F, g):
    """Inverse of :func:`lower_endo`: f^k_j = g^{ki} F_ij."""
    g = check_metric(g)
    return np.linalg.solve(g, np.asarray(F, dtype=float))


def g_skew_defect(f, g):
    """sup over basis pairs of |g(fX, Y) + g(X, fY)|."""
    gf = g @ f
    return sup_norm(gf + gf.T)


def solve_dense(A, b, sv_threshold=1e-10):
    """Minimum-norm least-squares solve of ``A x = b`` through the SVD.

    ``unique`` is true when the smallest singular value exceeds
    ``sv_threshold`` times the largest.  Singular values below that cut are
    treated as zero in the pseudo-inverse.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise NonFinite("linear system contains NaN or Inf")
    U, s, Vt = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        x = np.zeros(A.shape[1])
        return DenseSolution(x, sup_norm(b), False, 0.0)
    keep = s > sv_threshold * smax
    coef = (U[:, keep].T @ b) / s[keep]
    x = Vt[keep].T @ coef
    ratio = float(s[-1] / smax)
    return DenseSolution(x, sup_norm(A @ x - b), bool(ratio > sv_threshold), ratio)


def self_adjoint_defect(A, g):
    gA = g @ A
    return sup_norm(gA - gA.T) / max(1.0, sup_norm(gA))


def spectral_split(A, g, eps=1e-10, signature=None):
    """Split R^n into the near-kernel of a g-self-adjoint A and its g-complement.

    Returns column bases ``kernel`` (eigenvalues with ``|mu| < eps``) and
    ``complement``.  For a positive definite g both bases are g-orthonormal.
    For indefinite g the kernel is taken from the SVD of A and the complement
    is its g-orthogonal complement.
    """
    A = np.asarray(A, dtype=float)
    g = np.asarray(g, dtype=float)
    n = A.shape[0]
    if self_adjoint_defect(A, g) > 1e-10:
        raise NotSelfAdjoint(f"g-self-adjointness defect {self_adjoint_defect(A, g):.3e}")
    definite = signature is None or all(s > 0 for s in signature)
    if definite:
        gA = g @ A
        mu, V = scipy.linalg.eigh(0.5 * (gA + gA.T), g)
        small = np.abs(mu) < eps
        return KernelSplit(V[:, small], V[:, ~small], mu)
    U, s, Vt = np.linalg.svd(A)
    small = s < eps
    kernel = Vt[small].T
    if kernel.shape[1] == 0:
        return KernelSplit(np.zeros((n, 0)), np.eye(n), s)
    complement = scipy.linalg.null_space(kernel.T @ g)
    return KernelSplit(kernel, complement, s)


# ---------------------------------------------------------------- Tensor3 ---

def symmetry_defect(T, flag):
    T = np.asarray(T)
    if flag == "none":
        return 0.0
    if flag == "skew12":
        return sup_norm(T + T.transpose(1, 0, 2))
    if flag == "skew23":
        return sup_norm(T + T.transpose(0, 2, 1))
    if flag == "totally_skew":
        return max(symmetry_defect(T, "skew12"), symmetry_defect(T, "skew23"))
    raise ValueError(f"unknown symmetry flag {flag!r}")


def antisymmetrize12(T):
    return 0.5 * (T - T.transpose(1, 0, 2))


def apply_slots(T, A, B, C):
    """Array of T(A e_i, B e_j, C e_k) over all basis triples."""
    out = np.tensordot(A, T, axes=([0], [0]))           # i q r
    out = np.tensordot(out, B, axes=([1], [0]))         # i r j
    out = np.tensordot(out, C, axes=([1], [0]))         # i j k
    return out


def raise_last(T, g_inv):
    """Raise the last slot of a degree-3 covariant tensor: A^k_ij = g^{kl} A_ijl."""
    return np.einsum("kl,ijl->kij", g_inv, T)


def lower_first(A, g):
    """Inverse of :func:`raise_last` for arrays stored as A[k, i, j]."""
    return np.einsum("kl,kij->ijl", g, A)

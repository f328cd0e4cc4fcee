"""Residual evaluators for the identities satisfied by Einstein connections.

Each identity is a registry entry holding a formula anchor (the statement in
readable form), the inputs it needs, an optional hypothesis gate and an
evaluator returning a sup-norm residual over all basis index tuples.  By
multilinearity the basis suffices for identities stated "for all X, Y, Z".

Tensor names used in formulas:

* ``N(Z,X,Y) = (nabla^g_Z F)(X, Y)`` and ``dF(X,Y,Z)``;
* ``T`` and ``K``, the torsion and difference tensor of the connection;
* ``NC(Z,X,Y) = (nabla_Z F)(X, Y)`` and ``GC(Z,X,Y) = (nabla_Z g)(X, Y)``
  for the connection itself;
* ``D1 ... D5``, the correction terms of module ``deltas``.

Gate kinds:

* ``identity``: always evaluated;
* ``conditional``: evaluated when a hypothesis residual is below the gate,
  otherwise skipped;
* ``condition``: a structural property; pass when it holds, skipped when not;
* ``chain``: a step of the weak-theorem derivation, gated on the
  f^2-torsion condition of the supplied torsion.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .connection import (ContorsionAtPoint, TorsionAtPoint, contorsion_from_torsion,
                         torsion_from_contorsion)
from .deltas import delta_array
from .errors import HypothesisNotMet, MissingInput
from .fields import cyclic_dF
from .oracle import operator_condition_residual, s1_residual
from .results import condition, judge, skip
from .tensor_core import sup_norm, symmetry_defect
from .terms import OperatorAlgebra, evaluate

GATE = 1e-10


@dataclass(frozen=True)
class Identity:
    id: str
    anchor: str
    requires: tuple
    kind: str
    evaluate: Callable
    gate: Callable = None
    gate_name: str = ""


class _Inputs:
    """Lazily derived tensors shared by the evaluators of one check."""

    def __init__(self, geom, T=None, K=None, conn=None, reeb=None):
        self.geom = geom
        # ndarray has its own .T (the transpose), so unwrap by type
        self.T = T.T if isinstance(T, TorsionAtPoint) else T
        self.K = K.K if isinstance(K, ContorsionAtPoint) else K
        self.conn = conn
        self.reeb = reeb
        self._ops = None
        self._tensors = None

    @property
    def ops(self):
        if self._ops is None:
            self._ops = OperatorAlgebra(self.geom.f, self.geom.Pinv)
        return self._ops

    @property
    def tensors(self):
        if self._tensors is None:
            t = {"N": self.geom.nablaF, "dF": self.geom.dF, "T": self.T, "K": self.K}
            if self.conn is not None:
                t["NC"] = self.conn.nabla_F()
                t["GC"] = self.conn.nabla_g()
            self._tensors = t
        return self._tensors

    def with_deltas(self):
        t = self.tensors
        if "D1" not in t:
            for i in (1, 2, 3, 4):
                t[f"D{i}"] = delta_array(i, self.T, self.geom)
        return t

    def residual(self, lhs, rhs, tensors=None):
        tensors = self.tensors if tensors is None else tensors
        return sup_norm(evaluate(lhs, tensors, self.ops) - evaluate(rhs, tensors, self.ops))


def _formula(lhs, rhs, deltas=False):
    def run(inp):
        return inp.residual(lhs, rhs, inp.with_deltas() if deltas else None)
    run.lhs, run.rhs = lhs, rhs
    return run


def _anchor(lhs, rhs):
    return f"{' '.join(lhs.split())} = {' '.join(rhs.split()) or '0'}"


# ------------------------------------------------------------- formulas ---

EIN5 = ("2 NC(Z,X,Y)", "-T(Z,X,Y) -T(Z,X,fY) -T(Y,Z,X) -T(Y,Z,fX)")
EIN6 = ("2 GC(X,Y,Z)", "T(Z,X,Y) +T(Z,X,fY) -T(X,Y,Z) -T(X,Y,fZ)")
EIN7 = ("GC(Z,X,Y)", "NC(X,Y,Z) +NC(Y,X,Z)")
EIN8 = ("dF(X,Y,Z)", "-T(X,Y,Z) -T(Y,Z,X) -T(Z,X,Y)")
E_TORDFNEW = ("2 K(X,Y,Z)", "T(X,Y,Z) -T(Z,X,fY) +T(Y,Z,fX)")
E1_2_22 = ("NC(X,Y,Z)", "N(X,Y,Z) -K(X,Y,fZ) +K(X,Z,fY)")
E_TORDFNEW3 = ("2 K(Y,Z,X)", "T(X,Y,Z) +T(Y,Z,X) -T(Z,X,Y)")
E_T4A = ("T(Z,X,Y) -T(Y,Z,X)", "T(Y,Z,fX) -T(Z,X,fY)")
E_COND_E2 = "T(X,Y,Z) -T(Z,X,Y) -T(Z,X,fY) +T(X,Y,fZ)"
E_DF_0B = ("K(X,Y,Z)", "T(Z,Y,X) -1/2 dF(X,Y,Z)")
EQ_2_4_A = ("N(X,fY,fZ)", "-N(X,Y,Z)")
EQ_2_4_B = ("N(X,fY,Z)", "N(X,Y,fZ)")

PROP27 = ("2 N(X,Y,Z)",
          "-T(Z,X,Y) -T(X,Y,Z) -T(fZ,X,fY) -T(X,fY,fZ) +T(Y,fZ,fX) +T(fY,Z,fX)")
CHAIN_2_7A = ("2 N(X,fY,fZ)", """
-T(Z,X,Y) -T(X,Y,Z) -T(fZ,X,fY) -T(X,fY,fZ) -T(fY,Z,fX) -T(Y,fZ,fX)
-T(QZ,X,Y) -T(Z,X,QY) -T(X,QY,Z) -T(X,Y,QZ) -T(QZ,X,QY) -T(X,QY,QZ)
-T(fY,QZ,fX) -T(QY,fZ,fX)""")
CHAIN_2_7B = ("-2 N(X,f2Y,Z)", """
-T(Z,X,Y) -T(X,Y,Z) -T(fZ,X,fY) -T(X,fY,fZ) +T(Y,fZ,fX) +T(fY,Z,fX)
-T(Z,X,QY) -T(X,QY,Z) -T(fZ,X,QfY) -T(X,QfY,fZ) +T(QY,fZ,fX) +T(QfY,Z,fX)""")
CHAIN_2_8 = ("-T(X,fY,fZ) -T(fZ,X,fY)", """
T(X,Y,Z) +T(Z,X,Y) +T(Z,X,QY) +T(X,QY,Z) +1/2 T(fZ,X,QfY) +1/2 T(X,QfY,fZ)
+1/2 T(QZ,X,Y) +1/2 T(QZ,X,QY) +1/2 T(X,Y,QZ) +1/2 T(X,QY,QZ)
-1/2 T(QfY,Z,fX) +1/2 T(fY,QZ,fX) +N(X,fY,fZ) -N(X,f2Y,Z)""")
CHAIN_2_9 = ("-N(X,f2Y,Z) -N(X,fY,fZ)", """
T(Y,fZ,fX) +T(fY,Z,fX) +T(QY,fZ,fX) +1/2 T(QZ,X,QY) -1/2 T(fZ,X,QfY)
-1/2 T(X,QfY,fZ) +1/2 T(QZ,X,Y) +1/2 T(X,Y,QZ) +1/2 T(X,QY,QZ)
+1/2 T(QfY,Z,fX) +1/2 T(fY,QZ,fX)""")
CHAIN_2_10 = ("-N(X,f2Y,Z) -N(Y,f2Z,X) -N(Z,f2X,Y)",
              "-T(Y,Z,X) -T(X,Y,Z) -T(Z,X,Y) +1/2 D1(X,Y,Z)")
CHAIN_2_11 = ("-N(X,f3Y,fZ) -N(fY,f3Z,X) -N(fZ,f2X,fY) +N(X,f2Y,Z) -N(X,fY,fZ)",
              "T(X,Y,Z) +T(Z,X,Y) -T(fY,fZ,X) +1/2 D2(X,Y,Z)")
CHAIN_2_12 = ("T(fY,fZ,X)", """
T(Y,Z,X) +N(fX,f2Y,fZ) +N(fX,f3Y,Z)
+1/2 T(fZ,fX,QY) +1/2 T(fZ,fX,Q2Y) +1/2 T(fX,QY,fZ) +1/2 T(fX,Q2Y,fZ)
+3/2 T(QY,Z,X) +1/2 T(Q2Y,Z,X) +3/2 T(QY,Z,QX) +1/2 T(Q2Y,Z,QX)
+1/2 T(QZ,fX,fY) +1/2 T(QZ,fX,QfY) +1/2 T(fX,fY,QZ) +1/2 T(fX,QfY,QZ)
+1/2 T(Y,QZ,X) +1/2 T(QY,QZ,X) +1/2 T(Y,QZ,QX) +1/2 T(QY,QZ,QX)
-T(fY,fZ,QX) -T(QfY,fZ,X) -T(QfY,fZ,QX) +T(Y,Z,QX)""")
CHAIN_DELTA3 = ("""
N(X,f2Y,Z) -N(X,fY,fZ) -N(X,f3Y,fZ) -N(fY,f3Z,X) -N(fZ,f2X,fY)
+N(fX,f3Y,Z) +N(fX,f2Y,fZ)""", "T(X,Y,Z) +T(Z,X,Y) -T(Y,Z,X) +1/2 D3(X,Y,Z)")
CHAIN_EQFYFZ_D4 = ("2 T(Y,Z,X)", """
N(X,fY,fZ) +N(X,f3Y,fZ) +N(Y,f2Z,X) +N(Z,f2X,Y) -N(fX,f3Y,Z)
-N(fX,f2Y,fZ) +N(fY,f3Z,X) +N(fZ,f2X,fY) +1/2 D4(X,Y,Z)""")
LEM_FYFZ1 = ("T(fY,Z,PX)", """
T(Y,fZ,PX) -2 N(X,Y,fZ) +2 N(X,fY,Z) +dF(Y,fZ,PX) -dF(fY,Z,PX)""")
LEM_FYFZ2 = ("T(fY,fZ,PX)", """
T(Y,Z,Pf2X) -2 N(X,Y,f2Z) +2 N(X,fY,fZ) +dF(Y,Z,Pf2X) -dF(fY,fZ,PX)""")
LEM_FYFZ3 = ("T(fY,Z,PfX)", """
-T(Y,fZ,PfX) -T(Y,Z,[I-f4]X) -dF(Y,Z,[I-f4]X)
+2 N(PX,Y,Z) +2 N(X,Y,f2Z) -2 N(X,fY,fZ)""")
EQ32B = ("N(X,fY,fZ)", "-N(X,Y,Z) + eta(Y) N(X,xi,Z) + eta(Z) N(X,Y,xi)")
EQ32C = ("N(X,fY,Z)", "N(X,Y,fZ) + eta(Z) N(X,fY,xi) - eta(Y) N(X,xi,fZ)")
EQ3_5 = ("N(X,fY,fZ)", "-g(Y,(nabla^g_X f)Z) + eta(Y) eta((nabla^g_X f)Z) + eta(Z) g(fY,nabla^g_X xi)")
EQ31 = ("(nabla^g_X f) fY + f (nabla^g_X f) Y", "(nabla^g_X eta)(Y) xi + eta(Y) nabla^g_X xi")
THREE_F_COND = ("3 N(fX,fY,Z) +3 N(fZ,fY,X) -N(Z,X,Y) -N(X,Z,Y)", "")
FNEW = ("N(fX,fY,Z)", "-N(X,Y,Z)")


# ------------------------------------------------------------ evaluators ---

def _nabla_f(inp):
    """(nabla^g_X f)^k_y as ``[x, k, y]``."""
    return np.einsum("km,xmy->xky", inp.geom.g_inv, inp.geom.nablaF)


def _ev_eq31(inp):
    r, f = inp.reeb, inp.geom.f
    nf = _nabla_f(inp)
    lhs = np.einsum("xkm,my->xky", nf, f) + np.einsum("km,xmy->xky", f, nf)
    rhs = np.einsum("xy,k->xky", r.nabla_eta, r.xi) + np.einsum("y,xk->xky", r.eta, r.nabla_xi)
    return sup_norm(lhs - rhs)


def _ev_eq32b(inp):
    N, f, r = inp.geom.nablaF, inp.geom.f, inp.reeb
    lhs = np.einsum("xbc,by,cz->xyz", N, f, f)
    N_xi_z = np.einsum("xbz,b->xz", N, r.xi)
    N_y_xi = np.einsum("xyc,c->xy", N, r.xi)
    rhs = -N + np.einsum("y,xz->xyz", r.eta, N_xi_z) + np.einsum("z,xy->xyz", r.eta, N_y_xi)
    return sup_norm(lhs - rhs)


def _ev_eq32c(inp):
    N, f, r = inp.geom.nablaF, inp.geom.f, inp.reeb
    lhs = np.einsum("xbz,by->xyz", N, f)
    N_y_fz = np.einsum("xyc,cz->xyz", N, f)
    N_fy_xi = np.einsum("xbc,by,c->xy", N, f, r.xi)
    N_xi_fz = np.einsum("xbc,b,cz->xz", N, r.xi, f)
    rhs = N_y_fz + np.einsum("z,xy->xyz", r.eta, N_fy_xi) - np.einsum("y,xz->xyz", r.eta, N_xi_fz)
    return sup_norm(lhs - rhs)


def _ev_eq3_5(inp):
    g, f, r = inp.geom.g, inp.geom.f, inp.reeb
    N = inp.geom.nablaF
    nf = _nabla_f(inp)
    lhs = np.einsum("xbc,by,cz->xyz", N, f, f)
    g_y_nfz = np.einsum("yk,xkz->xyz", g, nf)
    eta_nfz = np.einsum("k,xkz->xz", r.eta, nf)
    g_fy_nxi = np.einsum("ab,ay,xb->xy", g, f, r.nabla_xi)
    rhs = -g_y_nfz + np.einsum("y,xz->xyz", r.eta, eta_nfz) + np.einsum("z,xy->xyz", r.eta, g_fy_nxi)
    return sup_norm(lhs - rhs)


def _ev_eq_2_4(inp):
    return max(inp.residual(*EQ_2_4_A), inp.residual(*EQ_2_4_B))


def _ev_kkz(inp):
    K, g_inv = inp.K, inp.geom.g_inv
    K_up = np.einsum("ma,yza->ymz", g_inv, K)          # (K_Y)^m_z
    A = np.einsum("ymz,xmw->xyzw", K_up, K)             # g(K_X K_Y Z, W)
    C = A - A.transpose(1, 0, 2, 3)
    return sup_norm(C + C.transpose(0, 1, 3, 2))


def _ev_lnabla_i_ii(inp):
    # (nabla_X g)(Y,Z) = -K(X,Y,Z) - K(X,Z,Y)
    return sup_norm(inp.tensors["GC"] + inp.K + inp.K.transpose(0, 2, 1))


def _ev_codazzi(inp):
    N, dF, T = inp.geom.nablaF, inp.geom.dF, inp.T
    return max(sup_norm(N - N.transpose(1, 2, 0)), sup_norm(N - N.transpose(2, 0, 1)),
               sup_norm(N - dF / 3), sup_norm(T + dF / 3))


def _ev_stat(inp):
    K = inp.K
    return sup_norm(torsion_from_contorsion(0.5 * (K + K.transpose(1, 0, 2))).T)


def _ev_roundtrip(inp):
    K = contorsion_from_torsion(inp.T, inp.geom).K
    return sup_norm(torsion_from_contorsion(K).T - inp.T)


def _ev_delta5(inp):
    D4 = delta_array(4, inp.T, inp.geom)
    return max(sup_norm(D4 - delta_array(5, inp.T, inp.geom, form))
               for form in ("q_torsion", "ein8", "nabla"))


def _ev_dF_routes(inp):
    return sup_norm(inp.geom.dF - cyclic_dF(inp.geom.nablaF))


def _ev_nabla_routes(inp):
    from .fields import _nabla_F_endo
    g = inp.geom
    return sup_norm(g.nablaF - _nabla_F_endo(g.g, g.dg, g.F, g.dFp, g.gamma))


def _ev_lc_metric(inp):
    from .fields import levi_civita_metricity
    return levi_civita_metricity(inp.geom)


# ----------------------------------------------------------------- gates ---

def _gate_metric(inp):
    return sup_norm(inp.tensors["GC"])


def _gate_e2(inp):
    return sup_norm(evaluate(E_COND_E2, inp.tensors, inp.ops))


def _gate_hermitian(inp):
    return inp.geom.almost_hermitian_defect()


def _acm_defect(inp):
    r = inp.reeb
    return sup_norm(inp.geom.f2 + np.eye(inp.geom.dim) - np.outer(r.xi, r.eta))


def _gate_f2(inp):
    return operator_condition_residual(inp.T, inp.geom.f2)


def _gate_s1(inp):
    return s1_residual(inp.geom)


def _gate_skew_structure(inp):
    """T totally skew plus the f^2-torsion condition; with Reeb data also
    nabla^g xi = 0, otherwise f^2 = -I."""
    parts = [symmetry_defect(inp.T, "totally_skew"), _gate_f2(inp)]
    if inp.reeb is not None:
        parts.append(sup_norm(inp.reeb.nabla_xi))
        parts.append(_acm_defect(inp))
    else:
        parts.append(_gate_hermitian(inp))
    return max(parts)


def _gate_codazzi(inp):
    return max(symmetry_defect(inp.T, "totally_skew"), _gate_f2(inp))


# -------------------------------------------------------------- registry ---

def _entry(id, formula, requires, kind="identity", gate=None, gate_name="", deltas=False):
    lhs, rhs = formula
    return Identity(id, _anchor(lhs, rhs), requires, kind, _formula(lhs, rhs, deltas),
                    gate, gate_name)


_CHAIN = dict(kind="chain", gate=_gate_f2, gate_name="f^2-torsion condition")

REGISTRY = {e.id: e for e in [
    _entry("EIN5", EIN5, ("T", "conn")),
    _entry("EIN6", EIN6, ("T", "conn")),
    _entry("EIN7", EIN7, ("conn",)),
    _entry("EIN8", EIN8, ("T",)),
    _entry("PROP27", PROP27, ("T",)),
    _entry("E_TORDFNEW", E_TORDFNEW, ("T", "K")),
    _entry("E1_2_22", E1_2_22, ("K", "conn")),
    _entry("E_TORDFNEW3", E_TORDFNEW3, ("T", "K", "conn"), "conditional", _gate_metric,
           "nabla g = 0"),
    _entry("E_T4A", E_T4A, ("T", "conn"), "conditional", _gate_metric, "nabla g = 0"),
    Identity("E_COND_E2", f"condition: {E_COND_E2} = 0", ("T",), "condition", _gate_e2),
    _entry("E_DF_0B", E_DF_0B, ("T", "K"), "conditional", _gate_e2, "condition E2"),
    Identity("E_COND_KKZ", "g([K_X,K_Y]Z, W) = -g([K_X,K_Y]W, Z)", ("T", "K"), "conditional",
             _ev_kkz, _gate_e2, "condition E2"),
    Identity("E_COND_2K_SPECIAL", "condition: K(X,Y,Z) + K(Y,X,Z) = 0", ("K",), "condition",
             lambda inp: sup_norm(inp.K + inp.K.transpose(1, 0, 2))),
    Identity("EQ_2_4", "N(X,fY,fZ) = -N(X,Y,Z) and N(X,fY,Z) = N(X,Y,fZ)", (), "conditional",
             _ev_eq_2_4, _gate_hermitian, "f^2 = -I"),
    Identity("COND_S1", "(s1) implies K(X,Y,Z) + K(Y,X,Z) = 0, where (s1): "
             "N(X,Y,Z) + N(Y,X,Z) - N(fX,fY,Z) - N(fY,fX,Z) = 0", ("K",), "conditional",
             lambda inp: sup_norm(inp.K + inp.K.transpose(1, 0, 2)), _gate_s1, "(s1)"),
    Identity("COND_F_TORSION", "condition: T(fX,Y,Z) = T(X,fY,Z) = T(X,Y,fZ)", ("T",),
             "condition", lambda inp: operator_condition_residual(inp.T, inp.geom.f)),
    Identity("COND_F2_TORSION", "condition: T(f2X,Y,Z) = T(X,f2Y,Z) = T(X,Y,f2Z)", ("T",),
             "condition", _gate_f2),
    Identity("CODAZZI", "N(X,Y,Z) = N(Y,Z,X) = N(Z,X,Y) = dF(X,Y,Z)/3 = -T(X,Y,Z)",
             ("T",), "conditional", _ev_codazzi, _gate_codazzi,
             "T totally skew and f^2-torsion condition"),
    Identity("EQ31", _anchor(*EQ31), ("reeb",), "conditional", _ev_eq31, _acm_defect,
             "f^2 = -I + eta (x) xi"),
    Identity("EQ32B", _anchor(*EQ32B), ("reeb",), "conditional", _ev_eq32b, _acm_defect,
             "f^2 = -I + eta (x) xi"),
    Identity("EQ32C", _anchor(*EQ32C), ("reeb",), "conditional", _ev_eq32c, _acm_defect,
             "f^2 = -I + eta (x) xi"),
    Identity("EQ3_5", _anchor(*EQ3_5), ("reeb",), "conditional", _ev_eq3_5, _acm_defect,
             "f^2 = -I + eta (x) xi"),
    _entry("THREE_F_COND", THREE_F_COND, ("T",), "conditional", _gate_skew_structure,
           "T totally skew, f^2-torsion condition, parallel xi"),
    _entry("FNEW", FNEW, ("T",), "conditional", _gate_skew_structure,
           "T totally skew, f^2-torsion condition, parallel xi"),
    _entry("LEM_FYFZ1", LEM_FYFZ1, ("T",), **_CHAIN),
    _entry("LEM_FYFZ2", LEM_FYFZ2, ("T",), **_CHAIN),
    _entry("LEM_FYFZ3", LEM_FYFZ3, ("T",), **_CHAIN),
    _entry("CHAIN_2_7A", CHAIN_2_7A, ("T",), **_CHAIN),
    _entry("CHAIN_2_7B", CHAIN_2_7B, ("T",), **_CHAIN),
    _entry("CHAIN_2_8", CHAIN_2_8, ("T",), **_CHAIN),
    _entry("CHAIN_2_9", CHAIN_2_9, ("T",), **_CHAIN),
    _entry("CHAIN_2_10", CHAIN_2_10, ("T",), deltas=True, **_CHAIN),
    _entry("CHAIN_2_11", CHAIN_2_11, ("T",), deltas=True, **_CHAIN),
    _entry("CHAIN_2_12", CHAIN_2_12, ("T",), **_CHAIN),
    _entry("CHAIN_DELTA3", CHAIN_DELTA3, ("T",), deltas=True, **_CHAIN),
    _entry("CHAIN_EQFYFZ_D4", CHAIN_EQFYFZ_D4, ("T",), deltas=True, **_CHAIN),
    Identity("DELTA5_REDUCTION", "D4(X,Y,Z) = D5(X,Y,Z) in each of its three forms", ("T",),
             "chain", _ev_delta5, _gate_f2, "f^2-torsion condition"),
    Identity("STAT_DEGENERATE", "K(X,Y,Z) = K(Y,X,Z) implies T = 0", ("K",), "identity",
             _ev_stat),
    Identity("LNABLA_I_II", "(nabla_X g)(Y,Z) = -K(X,Y,Z) - K(X,Z,Y)", ("K", "conn"),
             "identity", _ev_lnabla_i_ii),
    _entry("LNABLA_II_III", EIN7, ("conn",)),
    Identity("K_T_ROUNDTRIP", "T -> K(T) -> T is the identity", ("T",), "identity",
             _ev_roundtrip),
    Identity("DF_ROUTES", "coboundary dF = N(X,Y,Z) + N(Y,Z,X) + N(Z,X,Y)", (), "identity",
             _ev_dF_routes),
    Identity("NABLA_F_ROUTES", "d_Z F - Gamma F - F Gamma = g(X, (nabla^g_Z f) Y)", (),
             "identity", _ev_nabla_routes),
    Identity("LC_METRIC", "nabla^g g = 0", (), "identity", _ev_lc_metric),
]}

HEADLINE_IDS = ("EIN5", "EIN6", "EIN7", "EIN8", "PROP27", "E1_2_22", "E_TORDFNEW3", "E_T4A",
                "E_COND_E2", "E_COND_KKZ", "E_COND_2K_SPECIAL", "E_DF_0B", "EQ_2_4", "COND_S1",
                "COND_F_TORSION", "COND_F2_TORSION", "CODAZZI", "EQ31", "EQ32B", "EQ32C", "EQ3_5",
                "THREE_F_COND", "FNEW", "LEM_FYFZ2", "LEM_FYFZ3", "CHAIN_2_10", "CHAIN_2_11",
                "CHAIN_2_12", "CHAIN_EQFYFZ_D4", "DELTA5_REDUCTION", "STAT_DEGENERATE")
CHAIN_IDS = tuple(k for k, v in REGISTRY.items() if v.kind == "chain")


def get_identity(id):
    try:
        return REGISTRY[id]
    except KeyError:
        raise KeyError(f"unknown identity {id!r}") from None


def eval_identity(id, geom, T=None, K=None, conn=None, reeb=None, tol=1e-8, gate=GATE,
                  **context):
    """Residual of one identity as a CheckResult.

    Raises MissingInput when an input listed in the identity's ``requires``
    is None.  Gated identities whose hypothesis residual is at least ``gate``
    are returned as skipped.
    """
    entry = get_identity(id)
    supplied = {"T": T, "K": K, "conn": conn, "reeb": reeb}
    missing = [name for name in entry.requires if supplied[name] is None]
    if missing:
        raise MissingInput(f"{id} requires {', '.join(missing)}")
    inp = _Inputs(geom, T, K, conn, reeb)
    if entry.kind == "condition":
        return condition(id, entry.evaluate(inp), tol, gate, **context)
    if entry.gate is not None:
        h = entry.gate(inp)
        if not h < gate:
            return skip(id, f"hypothesis not met: {entry.gate_name} (residual {h:.3e})", tol,
                        **context)
    return judge(id, entry.evaluate(inp), tol, **context)


def eval_chain(id, geom, T, tol=1e-8, gate=GATE, strict=False, **context):
    """A derivation step of the weak theorem; needs the f^2-torsion condition.

    With ``strict=True`` an unmet hypothesis raises HypothesisNotMet instead
    of returning a skipped record.
    """
    if id not in CHAIN_IDS:
        raise KeyError(f"{id} is not a chain identity")
    if strict:
        h = _gate_f2(_Inputs(geom, T))
        if not h < gate:
            raise HypothesisNotMet(f"f^2-torsion condition residual {h:.3e}")
    return eval_identity(id, geom, T=T, tol=tol, gate=gate, **context)


def identity_table():
    """(id, kind, anchor) rows for every registered identity."""
    return [(e.id, e.kind, e.anchor + (f"  [gate: {e.gate_name}]" if e.gate_name else ""))
            for e in REGISTRY.values()]

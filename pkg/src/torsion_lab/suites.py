"""Named check suites run per sampled point.

A suite maps one :class:`PointData` to a list of CheckResults in a fixed
order.  PointData computes the geometry, the oracle solution and the oracle
connection once and shares them between suites.
"""
from functools import cached_property

import numpy as np

from . import connection as cn
from .catalog import scaled_form
from .errors import TorsionLabError
from .fields import StructureFields, fd_validate, point_geometry, reeb_at
from .identities import CHAIN_IDS, REGISTRY, eval_identity
from .oracle import CONSISTENCY_TOL, compare_with_formula, solve_einstein_pointwise
from .deltas import delta_array
from .results import FAIL, PASS, CheckResult, condition, judge, skip
from .tensor_core import sup_norm

SUITES = ("core-identities", "hermitian-theorem", "weak-theorem", "acm-theorem",
          "delta-chain", "oracle-survey")
GATE = 1e-10
ORACLE_SCALE = 2.5


class PointData:
    """Lazily computed data at one sampled point of one structure."""

    def __init__(self, fields, coords, index=0):
        self.fields = fields
        self.coords = np.asarray(coords, float)
        self.index = index

    @cached_property
    def geom(self):
        return point_geometry(self.fields, self.coords)

    @cached_property
    def oracle(self):
        return solve_einstein_pointwise(self.geom)

    @cached_property
    def conn(self):
        return cn.assemble_connection(self.geom, self.oracle.K)

    @cached_property
    def reeb(self):
        return reeb_at(self.fields, self.geom)

    @property
    def has_connection(self):
        return self.oracle.system_residual < CONSISTENCY_TOL

    @property
    def f2_condition_holds(self):
        return self.has_connection and self.oracle.f2_condition_residual < GATE


def _no_connection(ids, tol, data):
    reason = f"no Einstein connection at this point (residual {data.oracle.system_residual:.3e})"
    return [skip(i, reason, tol) for i in ids]


def _formula_checks(prefix, data, build, tol, require_f2=False):
    """Formula-vs-oracle comparison plus metricity of the formula connection."""
    try:
        T = build()
    except TorsionLabError as exc:
        reason = f"{type(exc).__name__}: {exc}"
        return [skip(f"{prefix}_VS_ORACLE", reason, tol), skip(f"{prefix}_METRICITY", reason, tol)]
    out = [compare_with_formula(data.oracle, T, tol, require_f2, id=f"{prefix}_VS_ORACLE")]
    gated = data.f2_condition_holds if require_f2 else data.has_connection
    if gated:
        conn = cn.connection_from_torsion(data.geom, T)
        out.append(judge(f"{prefix}_METRICITY", sup_norm(cn.metricity_array(conn)), tol))
    else:
        out.append(skip(f"{prefix}_METRICITY", "hypothesis of the formula not met at this point",
                        tol))
    return out


# ------------------------------------------------------------------ suites ---

def core_identities(data, tol, seed=0):
    geom = data.geom
    out = [fd_validate(data.fields, data.coords, tol=1e-6)]
    ids = [i for i, e in REGISTRY.items() if e.kind != "chain"
           and not ("reeb" in e.requires and data.reeb is None)]
    if not data.has_connection:
        return out + [eval_identity(i, geom, tol=tol) for i in ids if not REGISTRY[i].requires] \
            + _no_connection([i for i in ids if REGISTRY[i].requires], tol, data)
    out.append(cn.metricity_residual(data.conn, tol))
    for i in ids:
        out.append(eval_identity(i, geom, T=data.oracle.T, K=data.oracle.K, conn=data.conn,
                                 reeb=data.reeb, tol=tol))
    return out


def hermitian_theorem(data, tol, seed=0):
    geom = data.geom
    out = _formula_checks("HERMITIAN", data, lambda: cn.torsion_hermitian(geom), tol)
    if data.has_connection and data.oracle.s1_residual < GATE:
        out += _formula_checks("SPECIAL", data, lambda: cn.torsion_special(geom, data.reeb), tol)
    else:
        reason = "(s1) does not hold" if data.has_connection else "no Einstein connection"
        out += [skip("SPECIAL_VS_ORACLE", reason, tol), skip("SPECIAL_METRICITY", reason, tol)]
    return out


def _weighted_blocks(data):
    """Block-diagonal torsion assembled from the per-factor formula."""
    T = np.zeros((data.geom.dim,) * 3)
    for factor in data.fields.factors:
        s = factor.index
        geom_j = point_geometry(factor.fields, data.coords[s])
        T[s, s, s] = cn.torsion_weighted_factor(geom_j, factor.weight).T
    return cn.TorsionAtPoint(T, "WeightedFactor")


def _off_factor(T, factors, n):
    mask = np.ones((n,) * 3, bool)
    for factor in factors:
        s = factor.index
        mask[s, s, s] = False
    return sup_norm(np.where(mask, T, 0.0))


def weak_theorem(data, tol, seed=0):
    geom = data.geom
    out = []
    try:
        Tw = cn.torsion_weak(geom)
    except TorsionLabError as exc:
        reason = f"{type(exc).__name__}: {exc}"
        return [skip(i, reason, tol) for i in ("WEAK_VS_ORACLE", "WEAK_METRICITY",
                                               "WEAK_ASYMMETRY")]
    out += _formula_checks("WEAK", data, lambda: Tw, tol, require_f2=True)
    if data.f2_condition_holds:
        out.append(judge("WEAK_ASYMMETRY", Tw.asymmetry, tol))
    else:
        out.append(skip("WEAK_ASYMMETRY", "f^2-torsion condition does not hold", tol))
    if geom.almost_hermitian_defect() < GATE:
        out.append(judge("WEAK_VS_HERMITIAN", sup_norm(Tw.T - cn.torsion_hermitian(geom).T),
                         tol * 1e-4))
    if data.fields.name == "weighted_product":
        out += _formula_checks("WEIGHTED_FACTOR", data, lambda: _weighted_blocks(data), tol,
                               require_f2=True)
        if data.has_connection:
            out.append(judge("OFF_FACTOR_TORSION",
                             _off_factor(data.oracle.T.T, data.fields.factors, geom.dim),
                             tol * 0.1))
    if geom.has_kernel:
        out.append(singular_branch_check(data, Tw, tol * 0.01))
    return out


def singular_branch_check(data, Tw, tol):
    """T(Y,Z,W) against 2 (nabla^g_W F)(Y,Z) + dF(Y,Z,W) for W in ker f."""
    if not data.f2_condition_holds:
        return skip("SINGULAR_BRANCH", "oracle does not confirm the f^2-torsion condition", tol)
    Kb = data.geom.kernel_split.kernel
    T_on_kernel = np.einsum("yzw,wj->jyz", Tw.T, Kb)
    branch = np.stack([cn.singular_branch(data.geom, Kb[:, j]) for j in range(Kb.shape[1])])
    return judge("SINGULAR_BRANCH", sup_norm(T_on_kernel - branch), tol)


def acm_theorem(data, tol, seed=0):
    ids = ("ACM_NABLA_XI", "ACM_XI_SLOTS", "ACM_NABLA_F_XI", "ACM_VS_FACTOR", "ACM_METRICITY")
    if data.reeb is None:
        return [skip(i, "no Reeb data on this structure", tol) for i in ids]
    geom, reeb = data.geom, data.reeb
    xi = reeb.xi
    out = [judge("ACM_NABLA_XI", cn.reeb_parallel_defect(reeb), 1e-12)]
    try:
        Ta = cn.torsion_acm(geom, reeb)
    except TorsionLabError as exc:
        reason = f"{type(exc).__name__}: {exc}"
        out[0] = skip("ACM_NABLA_XI", reason, 1e-12, out[0].residual)
        return out + [skip(i, reason, tol) for i in ids[1:]]
    T = Ta.T
    xi_slots = max(sup_norm(np.einsum("ayz,a->yz", T, xi)), sup_norm(np.einsum("yza,a->yz", T, xi)))
    out.append(_exact("ACM_XI_SLOTS", xi_slots))
    N = geom.nablaF
    nf_xi = max(sup_norm(np.einsum("ayz,a->yz", N, xi)), sup_norm(np.einsum("yza,a->yz", N, xi)))
    out.append(judge("ACM_NABLA_F_XI", nf_xi, tol * 0.1))
    if data.fields.factors:
        factor = data.fields.factors[0]
        s = factor.index
        Th = cn.torsion_hermitian(point_geometry(factor.fields, data.coords[s])).T
        out.append(judge("ACM_VS_FACTOR", sup_norm(T[s, s, s] - Th), tol))
    else:
        out.append(skip("ACM_VS_FACTOR", "structure has no almost Hermitian factor", tol))
    conn = cn.connection_from_torsion(geom, Ta)
    out.append(judge("ACM_METRICITY", sup_norm(cn.metricity_array(conn)), tol))
    return out


def _exact(id, residual):
    """Pass only when the residual is exactly zero."""
    return CheckResult(id, float(residual), 0.0, PASS if residual == 0 else FAIL)


def delta_chain(data, tol, seed=0):
    geom = data.geom
    out = []
    if geom.almost_hermitian_defect() < GATE:
        rng = np.random.default_rng([seed, data.index])
        T = rng.standard_normal((geom.dim,) * 3)
        T = T - T.transpose(1, 0, 2)
        for i in range(1, 6):
            out.append(judge(f"DELTA{i}_VANISH", sup_norm(delta_array(i, T, geom)), tol * 0.01))
    else:
        out += [skip(f"DELTA{i}_VANISH", "Q is not zero", tol * 0.01) for i in range(1, 6)]
    if not data.has_connection:
        return out + _no_connection(CHAIN_IDS, tol, data)
    for i in CHAIN_IDS:
        out.append(eval_identity(i, geom, T=data.oracle.T, tol=tol))
    return out


def _scaled_oracle_K(data):
    fields = data.fields
    c = ORACLE_SCALE
    scaled = StructureFields(
        name=fields.name, dim=fields.dim,
        g_at=lambda p: c * np.asarray(fields.g_at(p), float),
        dg_at=lambda p: c * np.asarray(fields.dg_at(p), float),
        F_at=fields.F_at, dF_partials_at=fields.dF_partials_at, signature=fields.signature)
    geom = point_geometry(scaled_form(scaled, c), data.coords)
    return np.einsum("kz,xyz->xyk", geom.g_inv, solve_einstein_pointwise(geom).K.K)


def oracle_survey(data, tol, seed=0):
    o = data.oracle
    out = [
        judge("ORACLE_UNIQUE", 0.0, tol) if o.unique
        else skip("ORACLE_UNIQUE", f"underdetermined (sv ratio {o.sv_ratio:.3e})", tol),
        condition("ORACLE_CONSISTENT", o.system_residual, tol, CONSISTENCY_TOL),
        condition("COND_F2_TORSION", o.f2_condition_residual, tol),
        condition("COND_F_TORSION", o.f_condition_residual, tol),
        condition("S1", o.s1_residual, tol),
    ]
    if data.has_connection:
        out.append(eval_identity("E_TORDFNEW", data.geom, T=o.T, K=o.K, tol=tol))
        K_up = np.einsum("kz,xyz->xyk", data.geom.g_inv, o.K.K)
        if o.unique:
            out.append(judge("ORACLE_SCALE_INVARIANCE", sup_norm(_scaled_oracle_K(data) - K_up),
                             tol * 0.01))
        else:
            out.append(skip("ORACLE_SCALE_INVARIANCE", "oracle solution is not unique", tol * 0.01))
    else:
        out += _no_connection(("E_TORDFNEW", "ORACLE_SCALE_INVARIANCE"), tol, data)
    return out


RUNNERS = {
    "core-identities": core_identities,
    "hermitian-theorem": hermitian_theorem,
    "weak-theorem": weak_theorem,
    "acm-theorem": acm_theorem,
    "delta-chain": delta_chain,
    "oracle-survey": oracle_survey,
}


def run_suite(name, data, tol=1e-8, seed=0):
    """CheckResults of one suite at one point.  A geometry that cannot be
    built at the point (e.g. singular P) yields a single skipped record."""
    try:
        data.geom
    except TorsionLabError as exc:
        return [skip("POINT_GEOMETRY", f"{type(exc).__name__}: {exc}", tol)]
    return RUNNERS[name](data, tol, seed)

"""Acceptance suite: one test per headline property, each printing a
PASS/FAIL line with the worst residual it saw."""
import json
import os
import subprocess
import sys
from functools import lru_cache

import numpy as np
import pytest

from torsion_lab import catalog
from torsion_lab import connection as cn
from torsion_lab.deltas import eval_delta
from torsion_lab.errors import ReebNotParallel
from torsion_lab.fields import exterior_dF, fd_validate, point_geometry, reeb_at
from torsion_lab.identities import CHAIN_IDS, REGISTRY, eval_chain
from torsion_lab.oracle import solve_einstein_pointwise
from torsion_lab.suites import PointData, run_suite
from torsion_lab.tensor_core import sup_norm

SEED = 1
LAMBDAS = [(1.0, 1.0), (2.0, 3.0), (4.0, 1.0)]


@pytest.fixture
def verdict(capsys):
    def report(name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail
    return report


def metricity(geom, T):
    return sup_norm(cn.metricity_array(cn.connection_from_torsion(geom, T)))


def points(name, count, params=None, seed=SEED):
    fields = catalog.instantiate(name, params)
    return fields, catalog.sample_points(fields, count, seed)


@lru_cache(maxsize=None)
def hermitian_run():
    fields, pts = points("hermitian_rotated_J", 100)
    rows = []
    for p in pts:
        geom = point_geometry(fields, p)
        o = solve_einstein_pointwise(geom)
        T = cn.torsion_hermitian(geom)
        rows.append(dict(geom=geom, unique=o.unique, system=o.system_residual,
                         err=sup_norm(T.T - o.T.T), formulas=[T]))
    return rows


@lru_cache(maxsize=None)
def weighted_run(lam):
    params = {"lambda1": lam[0], "lambda2": lam[1]}
    fields, pts = points("weighted_product", 50, params)
    rows = []
    for p in pts:
        geom = point_geometry(fields, p)
        o = solve_einstein_pointwise(geom)
        Tw = cn.torsion_weak(geom)
        Tb = np.zeros_like(Tw.T)
        off = o.T.T.copy()
        block_err = 0.0
        for factor in fields.factors:
            s = factor.index
            Tf = cn.torsion_weighted_factor(point_geometry(factor.fields, p[s]), factor.weight).T
            Tb[s, s, s] = Tf
            block_err = max(block_err, sup_norm(Tf - o.T.T[s, s, s]))
            off[s, s, s] = 0
        row = dict(geom=geom, f2=o.f2_condition_residual, weak=sup_norm(Tw.T - o.T.T),
                   block=block_err, off=sup_norm(off), formulas=[Tw, Tb], oracle_T=o.T.T)
        if lam == (1.0, 1.0):
            row["vs_hermitian"] = sup_norm(Tw.T - cn.torsion_hermitian(geom).T)
        rows.append(row)
    return rows


def test_hermitian_theorem_equivalence(verdict):
    rows = hermitian_run()
    unique = all(r["unique"] for r in rows)
    system = max(r["system"] for r in rows)
    err = max(r["err"] for r in rows)
    ok = len(rows) == 100 and unique and system < 1e-10 and err < 1e-8
    verdict("hermitian theorem equivalence", ok,
            f"100 points, unique={unique}, max system residual {system:.2e}, "
            f"max |T - T_oracle| {err:.2e}")


def test_kaehler_degeneracy(verdict):
    fields, pts = points("kaehler_flat", 25)
    worst = 0.0
    for p in pts:
        geom = point_geometry(fields, p)
        o = solve_einstein_pointwise(geom)
        torsions = [o.K.K, o.T.T, cn.torsion_hermitian(geom).T, cn.torsion_weak(geom).T,
                    cn.torsion_special(geom).T, cn.torsion_from_dF(geom, -1 / 3).T]
        torsions += [cn.torsion_weighted_factor(geom, lam).T for lam in (0.5, 1.0, 2.0, 4.0)]
        worst = max(worst, max(sup_norm(t) for t in torsions))
    verdict("Kaehler degeneracy", worst < 1e-12,
            f"25 points, max |K|, |T| over oracle and all formulas {worst:.2e}")


def test_weak_theorem_equivalence(verdict):
    parts, ok = [], True
    for lam in LAMBDAS:
        rows = weighted_run(lam)
        f2 = max(r["f2"] for r in rows)
        weak = max(r["weak"] for r in rows)
        block = max(r["block"] for r in rows)
        off = max(r["off"] for r in rows)
        good = f2 < 1e-9 and weak < 1e-8 and block < 1e-8 and off < 1e-9
        text = f"lambda={lam}: f2 {f2:.1e}, weak {weak:.1e}, block {block:.1e}, off {off:.1e}"
        if lam == (1.0, 1.0):
            herm = max(r["vs_hermitian"] for r in rows)
            good = good and herm < 1e-12
            text += f", vs hermitian {herm:.1e}"
        ok = ok and good and len(rows) == 50
        parts.append(text)
    verdict("weak theorem equivalence", ok, "; ".join(parts))


def test_defining_equation_closure(verdict):
    rows = list(hermitian_run())
    for lam in LAMBDAS:
        rows += weighted_run(lam)
    worst = max(metricity(r["geom"], T) for r in rows for T in r["formulas"])
    count = sum(len(r["formulas"]) for r in rows)
    verdict("defining-equation closure", worst < 1e-8,
            f"{count} formula connections over {len(rows)} points, max metricity {worst:.2e}")


UNCONDITIONAL = ["EIN5", "EIN6", "EIN7", "EIN8", "PROP27", "E1_2_22", "EQ_2_4",
                 "LNABLA_I_II", "LNABLA_II_III"]
CONDITIONAL = ["E_TORDFNEW3", "E_T4A", "E_DF_0B", "E_COND_KKZ", "CODAZZI", "COND_S1"]


def test_identity_battery(verdict):
    results = {i: [] for i in UNCONDITIONAL + CONDITIONAL}
    for name in catalog.REGISTRY:
        fields, pts = points(name, 25)
        for k, p in enumerate(pts):
            for r in run_suite("core-identities", PointData(fields, p, k)):
                if r.id in results:
                    results[r.id].append(r)
    problems, active = [], {}
    for i, rs in results.items():
        ran = [r for r in rs if not r.skipped]
        active[i] = len(ran)
        if any(not r.passed for r in ran):
            problems.append(f"{i} failed")
        if any(r.skipped and i in UNCONDITIONAL and "hypothesis" not in r.skip_reason
               for r in rs):
            problems.append(f"{i} skipped without a hypothesis")
        if any(r.skipped and "hypothesis not met" not in r.skip_reason
               and "condition does not hold" not in r.skip_reason for r in rs):
            problems.append(f"{i} skipped for another reason")
        if i in UNCONDITIONAL and not ran:
            problems.append(f"{i} never active")
    worst = max((r.residual for rs in results.values() for r in rs if not r.skipped), default=0)
    detail = (f"{len(catalog.REGISTRY)} instances x 25 points, max residual {worst:.2e}, "
              f"activations {active}")
    verdict("identity battery", not problems, detail + (f"; {problems}" if problems else ""))


def test_delta_suite(verdict):
    fields, pts = points("hermitian_rotated_J", 20, seed=11)
    rng = np.random.default_rng(11)
    worst_q0 = 0.0
    for p in pts:
        geom = point_geometry(fields, p)
        T = rng.standard_normal((4, 4, 4))
        X, Y, Z = rng.standard_normal((3, 4))
        worst_q0 = max(worst_q0, max(abs(eval_delta(i, T, geom, X, Y, Z)) for i in range(1, 6)))
    worst_chain = 0.0
    for lam in LAMBDAS[1:]:
        for r in weighted_run(lam)[:25]:
            for i in CHAIN_IDS:
                res = eval_chain(i, r["geom"], r["oracle_T"], strict=True)
                worst_chain = max(worst_chain, res.residual)
    ok = worst_q0 < 1e-10 and worst_chain < 1e-8
    verdict("delta suite", ok, f"20 draws with f^2=-I, max |delta_i| {worst_q0:.2e}; "
            f"{len(CHAIN_IDS)} chain steps on weighted products, max residual {worst_chain:.2e}")


def test_almost_contact_theorem(verdict):
    fields, pts = points("acm_product", 25)
    xi_slots, nabla_xi, block, nf_xi = 0.0, 0.0, 0.0, 0.0
    (factor,) = fields.factors
    s = factor.index
    for p in pts:
        geom = point_geometry(fields, p)
        reeb = reeb_at(fields, geom)
        T = cn.torsion_acm(geom, reeb).T
        xi = reeb.xi
        xi_slots = max(xi_slots, sup_norm(np.einsum("ayz,a->yz", T, xi)),
                       sup_norm(np.einsum("yaz,a->yz", T, xi)),
                       sup_norm(np.einsum("yza,a->yz", T, xi)))
        nabla_xi = max(nabla_xi, sup_norm(reeb.nabla_xi))
        Th = cn.torsion_hermitian(point_geometry(factor.fields, p[s])).T
        block = max(block, sup_norm(T[s, s, s] - Th))
        N = geom.nablaF
        nf_xi = max(nf_xi, sup_norm(np.einsum("ayz,a->yz", N, xi)),
                    sup_norm(np.einsum("yza,a->yz", N, xi)))
    contact_fields, contact_pts = points("contact_r5", 5)
    raised = 0
    for p in contact_pts:
        geom = point_geometry(contact_fields, p)
        try:
            cn.torsion_acm(geom, reeb_at(contact_fields, geom))
        except ReebNotParallel:
            raised += 1
    ok = (xi_slots == 0 and nabla_xi < 1e-12 and block < 1e-8 and nf_xi < 1e-9
          and raised == len(contact_pts))
    verdict("almost contact theorem", ok,
            f"xi-slots {xi_slots:.1e} (exact), |nabla xi| {nabla_xi:.1e}, block {block:.1e}, "
            f"(nabla F)(xi) {nf_xi:.1e}, ReebNotParallel on contact {raised}/{len(contact_pts)}")


def test_singular_branch(verdict):
    fields, pts = points("f_with_kernel", 25)
    worst, gated, kernels = 0.0, 0, 0
    for p in pts:
        geom = point_geometry(fields, p)
        o = solve_einstein_pointwise(geom)
        if not o.consistent:
            continue
        gated += 1
        T = cn.torsion_weak(geom).T
        for W in geom.kernel_split.kernel.T:
            kernels += 1
            lhs = np.einsum("yzw,w->yz", T, W)
            worst = max(worst, sup_norm(lhs - cn.singular_branch(geom, W)))
    ok = gated == len(pts) and kernels == 2 * gated and worst < 1e-10
    verdict("singular branch", ok, f"{gated} consistent points, {kernels} kernel directions, "
            f"max |T(.,.,W) - (2 nabla_W F + dF)| {worst:.2e}")


def _cli_report(path, threads):
    env = {**os.environ, "TORSION_LAB_THREADS": str(threads)}
    proc = subprocess.run([sys.executable, "-m", "torsion_lab", "--report", str(path)],
                          env=env, capture_output=True, text=True)
    with open(path, "rb") as fh:
        lines = fh.read().split(b"\n")
    return proc.returncode, json.loads(lines[0]), b"\n".join(lines[1:])


def test_numerics_hygiene(verdict, tmp_path):
    fd, routes = 0.0, 0.0
    for name in catalog.REGISTRY:
        fields, pts = points(name, 32)
        for p in pts:
            fd = max(fd, fd_validate(fields, p).residual)
            routes = max(routes, sup_norm(exterior_dF(fields, p) - exterior_dF(fields, p, "cyclic")))
    code1, header1, body1 = _cli_report(tmp_path / "a.jsonl", 1)
    code2, header2, body2 = _cli_report(tmp_path / "b.jsonl", 4)
    same = body1 == body2 and header1["record"] == header2["record"] == "header"
    records = body1.count(b"\n")
    ok = fd < 1e-6 and routes < 1e-9 and code1 == 0 and code2 == 0 and same
    verdict("numerics hygiene", ok,
            f"fd_validate max {fd:.2e}, dF routes max {routes:.2e}, default CLI exit codes "
            f"{code1}/{code2}, {records} records byte-identical across thread counts: {same}")

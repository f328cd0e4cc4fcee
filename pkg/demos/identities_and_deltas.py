"""Evaluate the identity registry and the delta chain on oracle connections.

Run: python3 demos/identities_and_deltas.py
"""
import numpy as np

from torsion_lab import catalog
from torsion_lab import connection as cn
from torsion_lab.deltas import eval_delta
from torsion_lab.fields import point_geometry, reeb_at
from torsion_lab.identities import CHAIN_IDS, REGISTRY, eval_chain, eval_identity
from torsion_lab.oracle import solve_einstein_pointwise

fields = catalog.instantiate("lck_conformal")
geom = point_geometry(fields, catalog.sample_points(fields, 1, seed=1)[0])
o = solve_einstein_pointwise(geom)
conn = cn.assemble_connection(geom, o.K)
reeb = reeb_at(fields, geom)
for i, entry in REGISTRY.items():
    if reeb is None and "reeb" in entry.requires:
        continue
    r = eval_identity(i, geom, T=o.T, K=o.K, conn=conn, reeb=reeb)
    shown = "-" if r.residual is None else f"{r.residual:.1e}"
    print(f"{i:16s} {r.status:8s} {shown:>9s} {r.skip_reason or ''}")

# every delta term carries a factor of Q, so all vanish when f^2 = -I
herm = catalog.instantiate("hermitian_rotated_J")
hgeom = point_geometry(herm, catalog.sample_points(herm, 1, seed=1)[0])
rng = np.random.default_rng(0)
T = rng.standard_normal((4, 4, 4))
X, Y, Z = rng.standard_normal((3, 4))
print("deltas with f^2=-I:", [f"{eval_delta(i, T, hgeom, X, Y, Z):.1e}" for i in range(1, 6)])

wp = catalog.instantiate("weighted_product", {"lambda1": 2.0, "lambda2": 3.0})
wgeom = point_geometry(wp, catalog.sample_points(wp, 1, seed=1)[0])
Tw = solve_einstein_pointwise(wgeom).T.T
for i in CHAIN_IDS:
    print(f"{i:20s} {eval_chain(i, wgeom, Tw).residual:.1e}")

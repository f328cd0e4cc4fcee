"""Solve the metricity system numerically and compare with the closed-form torsions.

Run: python3 demos/oracle_vs_formulas.py
"""
from torsion_lab import catalog
from torsion_lab import connection as cn
from torsion_lab.fields import point_geometry
from torsion_lab.oracle import solve_einstein_pointwise
from torsion_lab.tensor_core import sup_norm

fields = catalog.instantiate("hermitian_rotated_J")
for k, p in enumerate(catalog.sample_points(fields, 5, seed=1)):
    geom = point_geometry(fields, p)
    o = solve_einstein_pointwise(geom)
    T = cn.torsion_hermitian(geom)
    conn = cn.connection_from_torsion(geom, T)
    print(f"point {k}: unique={o.unique} system residual={o.system_residual:.1e} "
          f"|T_formula - T_oracle|={sup_norm(T.T - o.T.T):.1e} "
          f"metricity={sup_norm(cn.metricity_array(conn)):.1e}")

# on a Kaehler chart every torsion vanishes
flat = catalog.instantiate("kaehler_flat")
geom = point_geometry(flat, catalog.sample_points(flat, 1, seed=1)[0])
print("kaehler_flat oracle |K| =", sup_norm(solve_einstein_pointwise(geom).K.K))

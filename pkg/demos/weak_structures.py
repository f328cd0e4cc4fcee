"""Weak almost Hermitian structures: weighted products and a degenerate f.

Run: python3 demos/weak_structures.py
"""
from torsion_lab import catalog
from torsion_lab import connection as cn
from torsion_lab.fields import point_geometry
from torsion_lab.oracle import solve_einstein_pointwise
from torsion_lab.tensor_core import sup_norm

for lam in [(1.0, 1.0), (2.0, 3.0), (4.0, 1.0)]:
    fields = catalog.instantiate("weighted_product", {"lambda1": lam[0], "lambda2": lam[1]})
    p = catalog.sample_points(fields, 1, seed=1)[0]
    geom = point_geometry(fields, p)
    o = solve_einstein_pointwise(geom)
    T = cn.torsion_weak(geom)
    print(f"lambda={lam}: f^2-condition residual {o.f2_condition_residual:.1e}, "
          f"|T_weak - T_oracle| {sup_norm(T.T - o.T.T):.1e}, asymmetry {T.asymmetry:.1e}")
    for factor in fields.factors:
        s = factor.index
        Tf = cn.torsion_weighted_factor(point_geometry(factor.fields, p[s]), factor.weight)
        print(f"  factor weight {factor.weight}: |block - oracle| "
              f"{sup_norm(Tf.T - o.T.T[s, s, s]):.1e}")

# directions in ker f use the singular branch
fields = catalog.instantiate("f_with_kernel")
geom = point_geometry(fields, catalog.sample_points(fields, 1, seed=1)[0])
T = cn.torsion_weak(geom).T
for W in geom.kernel_split.kernel.T:
    err = sup_norm(T @ W - cn.singular_branch(geom, W))
    print(f"kernel direction {W.round(3)}: singular branch error {err:.1e}")

"""Almost contact metric structures: horizontal torsion and the contact control.

Run: python3 demos/almost_contact.py
"""
import numpy as np

from torsion_lab import catalog
from torsion_lab import connection as cn
from torsion_lab.errors import ReebNotParallel
from torsion_lab.fields import point_geometry, reeb_at
from torsion_lab.tensor_core import sup_norm

fields = catalog.instantiate("acm_product")
geom = point_geometry(fields, catalog.sample_points(fields, 1, seed=1)[0])
reeb = reeb_at(fields, geom)
T = cn.torsion_acm(geom, reeb).T
print("xi =", reeb.xi, " |nabla xi| =", sup_norm(reeb.nabla_xi))
print("torsion with xi in the first slot:", sup_norm(np.einsum("ayz,a->yz", T, reeb.xi)))
print("horizontal torsion size:", sup_norm(T))

contact = catalog.instantiate("contact_r5")
geom = point_geometry(contact, catalog.sample_points(contact, 1, seed=1)[0])
try:
    cn.torsion_acm(geom, reeb_at(contact, geom))
except ReebNotParallel as exc:
    print("contact_r5 rejected:", exc)

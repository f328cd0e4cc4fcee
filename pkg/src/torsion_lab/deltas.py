"""The five correction terms delta_1 ... delta_5 of the weak almost Hermitian
derivation, transcribed term by term.  Every term carries at least one factor
Q, so all of them vanish when f^2 = -I.

delta_5 has three evaluable forms:

* ``"q_torsion"``: delta_4 simplified with the f^2-torsion condition;
* ``"ein8"``: the same after eliminating cyclic sums with
  dF(X,Y,Z) = -T(X,Y,Z) - T(Y,Z,X) - T(Z,X,Y);
* ``"nabla"``: the T(Y,Z,.) part collected into a single operator, with the
  remaining terms written through nabla^g F and dF.  This replaces a printed
  rewrite whose auxiliary identities carry sign errors.
"""
import numpy as np

from .terms import OperatorAlgebra, evaluate

DELTA1 = """
-T(fZ,X,QfY) -T(X,QY,Z) -T(X,QfY,fZ) +T(QfY,Z,fX)
-T(Z,X,QY) -T(X,Y,QZ) +T(QY,fZ,fX) -T(fX,Y,QfZ)
-T(Y,QZ,X) -T(Y,QfZ,fX) -T(Y,Z,QX) +T(QfZ,X,fY)
-T(Z,QX,Y) +T(QfX,Y,fZ) -T(fY,Z,QfX) -T(Z,QfX,fY)
+T(QZ,fX,fY) +T(QX,fY,fZ)
"""

DELTA2 = """
+T(X,QY,Z) -T(QY,fZ,fX) -2 T(QfY,Z,fX) +T(Z,X,QY)
+2 T(QZ,X,Y) +T(QZ,X,QY) +T(X,Y,QZ) +2 T(fY,QZ,fX)
-T(QfX,fY,Z) -T(QfX,fY,QZ) +T(fX,fY,QZ)
+T(fX,fY,Q2Z) +T(fY,Q2Z,fX) +T(Y,fZ,QfX)
+T(QY,fZ,QfX) -T(Q2Y,fZ,fX) +T(fZ,QfX,Y)
+T(fZ,QfX,QY) -T(QfY,QZ,fX) -T(QfZ,fX,Y)
-T(QfZ,fX,QY) -T(X,fY,QfZ) -T(fY,QfZ,X)
-T(fY,fZ,QX) +T(Q2Z,X,Y) +T(Q2Z,X,QY)
-T(X,Q2Y,Z) -T(X,Q2Y,QZ) +T(QX,QY,Z)
+T(QX,QY,QZ) -T(Z,X,Q2Y) -T(QZ,X,Q2Y)
+T(QX,Y,Z) +T(QX,Y,QZ) -T(fZ,QX,fY)
"""

DELTA3 = """
+T(fZ,QfX,QY) -T(QfZ,fX,QY) -T(QfZ,fX,Y) -T(QfY,QZ,fX)
+T(fZ,QfX,Y) -T(Q2Y,fZ,fX) +T(QY,fZ,QfX) +T(Y,fZ,QfX)
+T(fY,Q2Z,fX) +T(fX,fY,Q2Z) -T(QfX,fY,QZ) -T(QfX,fY,Z)
-T(QZ,X,Q2Y) -T(Z,X,Q2Y) -3 T(QY,Z,QX) +T(QX,QY,QZ)
-T(fX,QY,fZ) -3 T(QY,Z,X) -T(fX,QfY,QZ) -T(QZ,fX,QfY)
+2 T(QfY,fZ,QX) +2 T(QfY,fZ,X) -T(fX,Q2Y,fZ) -T(fZ,fX,QY)
-T(fZ,fX,Q2Y) -T(Q2Y,Z,X) -T(Q2Y,Z,QX) -T(QY,QZ,X)
-T(QY,QZ,QX) -T(Y,QZ,QX) +T(QX,QY,Z) -T(X,Q2Y,QZ)
-T(X,Q2Y,Z) +T(Q2Z,X,QY) +T(Q2Z,X,Y) +T(fY,fZ,QX)
-T(fY,QfZ,X) -T(X,fY,QfZ) -T(fZ,QX,fY) +T(QX,Y,QZ)
+T(QX,Y,Z) -T(QY,fZ,fX) +T(X,Y,QZ) +T(QZ,X,QY)
+T(Z,X,QY) +T(X,QY,Z) +2 T(fY,QZ,fX) +2 T(QZ,X,Y)
-2 T(QfY,Z,fX) -T(QZ,fX,fY) -2 T(Y,Z,QX) -T(Y,QZ,X)
"""

DELTA4 = """
+2 T(QZ,X,Y) -T(fZ,X,QfY) -T(X,QfY,fZ) -T(QfY,Z,fX)
+T(QZ,X,QY) +2 T(fY,QZ,fX) -T(fX,Y,QfZ) -2 T(Y,QZ,X)
-T(Y,QfZ,fX) +T(QX,Y,Z) +T(QX,Y,QZ) -3 T(Y,Z,QX)
-T(Y,QZ,QX) +T(QfZ,X,fY) -T(fZ,QX,fY) -T(Z,QX,Y)
+T(QfX,Y,fZ) -T(fY,Z,QfX) -T(Z,QfX,fY) -3 T(QY,Z,X)
-3 T(QY,Z,QX) -T(fX,QY,fZ) +T(QX,fY,fZ) -T(X,fY,QfZ)
-T(fY,QfZ,X) +T(fY,fZ,QX) +T(Q2Z,X,Y) +T(Q2Z,X,QY)
-T(X,Q2Y,Z) -T(X,Q2Y,QZ) +T(QX,QY,Z) +T(QX,QY,QZ)
-T(Z,X,Q2Y) -T(QZ,X,Q2Y) -T(QfX,fY,Z) -T(QfX,fY,QZ)
+T(fX,fY,Q2Z) +T(fY,Q2Z,fX) +T(Y,fZ,QfX) +T(QY,fZ,QfX)
-T(Q2Y,fZ,fX) +T(fZ,QfX,Y) +T(fZ,QfX,QY) -T(fX,Q2Y,fZ)
-T(fZ,fX,QY) -T(fZ,fX,Q2Y) -T(Q2Y,Z,X) -T(Q2Y,Z,QX)
-T(QY,QZ,X) -T(QY,QZ,QX) +2 T(QfY,fZ,X)
+2 T(QfY,fZ,QX) -T(QfY,QZ,fX) -T(QfZ,fX,Y)
-T(QfZ,fX,QY) -T(QZ,fX,QfY) -T(fX,QfY,QZ)
"""

DELTA5 = {
    "q_torsion": """
-T(fZ,X,QfY) +T(Z,X,QY) +T(X,Y,QZ) -8 T(Y,Z,QX)
-T(fX,Y,QfZ) -T(X,fY,QfZ) +T(Z,X,Q2Y) -T(fX,fY,QZ)
-T(fX,fY,Q2Z) +2 T(fY,fZ,QX) -T(fZ,fX,QY) -T(fZ,fX,Q2Y)
+2 T(fY,fZ,Q2X) -6 T(Y,Z,Q2X) -2 T(Y,Z,Q3X) -T(Z,fX,Q2fY)
+T(X,Y,Q2Z) -T(fX,Y,Q2fZ) -T(Z,fX,QfY)
""",
    "ein8": """
-T(Y,Z,[9Q+7Q2+2Q3]X) +T(fY,fZ,[3Q+2Q2]X)
-T(Y,fZ,Qf3X) -T(fY,Z,Qf3X) -dF(Y,fZ,Qf3X)
-dF(fY,Z,Qf3X) +dF(fY,fZ,QX) +dF(Y,Z,Qf2X)
""",
    "nabla": """
+T(Y,Z,[-12Q-11Q2-3Q3]X)
+dF(Y,Z,[4Q+Q2]f2X) -2 dF(fY,fZ,[Q+Q2]X) -dF(Y,fZ,Qf3X) -dF(fY,Z,Qf3X)
-2 N(QX,Y,f2Z) +2 N(QX,fY,fZ) -2 N(Qf2X,Y,Z)
""",
}

DELTA_TABLES = {1: DELTA1, 2: DELTA2, 3: DELTA3, 4: DELTA4}


def delta_expression(i, form="q_torsion"):
    if i in DELTA_TABLES:
        return DELTA_TABLES[i]
    if i == 5:
        return DELTA5[form]
    raise ValueError(f"delta index must be 1..5, got {i}")


def delta_array(i, T, geom, form="q_torsion"):
    """delta_i on all basis triples, as an array ``[x, y, z]``."""
    ops = OperatorAlgebra(geom.f, geom.Pinv)
    tensors = {"T": T, "N": geom.nablaF, "dF": geom.dF}
    return evaluate(delta_expression(i, form), tensors, ops)


def eval_delta(i, T, geom, X=None, Y=None, Z=None, form="q_torsion"):
    """delta_i(X, Y, Z); with no vectors given, the full basis array."""
    arr = delta_array(i, T, geom, form)
    if X is None and Y is None and Z is None:
        return arr
    return float(np.einsum("ijk,i,j,k->", arr, X, Y, Z))

"""A small interpreter for linear combinations of tensor terms.

Long expressions such as the delta terms are kept as readable text, e.g.::

    -T(fZ,X,QfY) +2 T(QZ,X,Y) -1/2 dF(Y,Z,[4Q+Q2]f2X)

Each term is ``coef NAME(slot,slot,slot)``.  A slot is an operator word
applied to one of the variables X, Y, Z.  Operator words are read left to
right as a matrix product of ``f``, ``Q`` (the operator -f^2 - I), ``P``
(I - f^2), ``Pinv`` and ``I``, each with an optional power, so ``Qf3X`` means
Q(f^3 X).  A bracket holds a polynomial in such words: ``[9Q+7Q2+2Q3]X``.

Evaluating an expression returns an array ``E[x, y, z]`` holding its value on
the basis vectors ``X = e_x, Y = e_y, Z = e_z``.
"""
import re
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .tensor_core import apply_slots

TENSOR_NAMES = ("NC", "GC", "dF", "D1", "D2", "D3", "D4", "D5", "T", "K", "N")
_TERM = re.compile(r"([+-])?\s*(\d+(?:/\d+)?)?\s*(" + "|".join(TENSOR_NAMES) + r")\(([^()]*)\)")
_WORD = re.compile(r"(Pinv|Q|f|P|I)(\d*)")
_MONO = re.compile(r"\s*([+-]?)\s*(\d+(?:/\d+)?)?\s*([A-Za-z0-9]+)\s*")
VARIABLES = "XYZ"


@lru_cache(maxsize=None)
def parse(expr):
    """Parse an expression into a tuple of ``(coef, tensor, slots)``.

    Raises ValueError when any part of the text is not consumed by a term, so
    a transcription typo cannot be silently dropped.
    """
    terms = []
    pos = 0
    for m in _TERM.finditer(expr):
        gap = expr[pos:m.start()]
        if gap.strip():
            raise ValueError(f"unparsed text {gap!r} in expression")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        slots = tuple(s.strip() for s in m.group(4).split(","))
        if len(slots) != 3:
            raise ValueError(f"term {m.group(0)!r} does not have three slots")
        for s in slots:
            _split_slot(s)
        terms.append((sign * coef, m.group(3), slots))
    if expr[pos:].strip():
        raise ValueError(f"unparsed text {expr[pos:]!r} in expression")
    return tuple(terms)


def _split_slot(slot):
    if not slot or slot[-1] not in VARIABLES:
        raise ValueError(f"slot {slot!r} must end with X, Y or Z")
    return slot[:-1], slot[-1]


def _word_tokens(word):
    tokens = []
    pos = 0
    while pos < len(word):
        m = _WORD.match(word, pos)
        if not m:
            raise ValueError(f"bad operator word {word!r}")
        tokens.append((m.group(1), int(m.group(2) or 1)))
        pos = m.end()
    return tokens


class OperatorAlgebra:
    """Evaluates operator words against the structure operators at a point."""

    def __init__(self, f, Pinv=None):
        n = f.shape[0]
        I = np.eye(n)
        f2 = f @ f
        P = I - f2
        self.base = {"f": f, "Q": -f2 - I, "P": P, "I": I,
                     "Pinv": np.linalg.inv(P) if Pinv is None else Pinv}
        self.n = n
        self._cache = {}

    def word(self, word):
        if word not in self._cache:
            M = np.eye(self.n)
            for name, power in _word_tokens(word):
                M = M @ np.linalg.matrix_power(self.base[name], power)
            self._cache[word] = M
        return self._cache[word]

    def prefix(self, text):
        """Matrix of a slot prefix made of words and bracketed polynomials."""
        if text in self._cache:
            return self._cache[text]
        M = np.eye(self.n)
        pos = 0
        while pos < len(text):
            if text[pos] == "[":
                end = text.index("]", pos)
                M = M @ self.polynomial(text[pos + 1:end])
                pos = end + 1
            else:
                nxt = text.find("[", pos)
                nxt = len(text) if nxt < 0 else nxt
                M = M @ self.word(text[pos:nxt])
                pos = nxt
        self._cache[text] = M
        return M

    def polynomial(self, text):
        total = np.zeros((self.n, self.n))
        pos = 0
        while pos < len(text):
            m = _MONO.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"bad polynomial {text!r}")
            sign = -1.0 if m.group(1) == "-" else 1.0
            coef = float(Fraction(m.group(2))) if m.group(2) else 1.0
            total = total + sign * coef * self.word(m.group(3))
            pos = m.end()
        return total


def evaluate(expr, tensors, ops):
    """Value array ``E[x, y, z]`` of ``expr`` on basis vectors."""
    n = ops.n
    total = np.zeros((n, n, n))
    for coef, name, slots in parse(expr):
        if name not in tensors or tensors[name] is None:
            raise KeyError(f"tensor {name} not supplied")
        mats, variables = [], ""
        for s in slots:
            pre, var = _split_slot(s)
            mats.append(ops.prefix(pre))
            variables += var
        A = apply_slots(tensors[name], *mats)
        if variables != "XYZ":
            A = np.einsum(variables.lower() + "->xyz", A)
        total += float(coef) * A
    return total


def residual(lhs, rhs, tensors, ops):
    return evaluate(lhs, tensors, ops) - evaluate(rhs, tensors, ops)

"""Fast GF(q) matrix layer: elements as uint16 codes, table-backed kernels.

The compiled core (_fqcore) is used when the extension built; otherwise the
numpy fallback. INVTOOL_PURE=1 forces the fallback. Both implement the same
two primitives (rref_inplace, matmul); everything else lives here.
"""

import os

import numpy as np

from . import fqfallback
from .numbers import FiniteFieldElement

try:
    from . import _fqcore
except ImportError:
    _fqcore = None

core = fqfallback if (_fqcore is None or os.environ.get("INVTOOL_PURE") == "1") \
    else _fqcore


def backend_name():
    return "fallback" if core is fqfallback else "cython"


class FqTables:
    """Numpy views of a finite field's arithmetic tables."""

    def __init__(self, field):
        field._ensure_tables()
        self.field = field
        self.q = field.q
        self.add = np.array(field._add_table, dtype=np.uint16)
        self.mul = np.array(field._mul_table, dtype=np.uint16)
        self.inv = np.array(field._inv_table, dtype=np.uint16)
        neg = [(-FiniteFieldElement(field, a)).code for a in range(field.q)]
        self.neg = np.array(neg, dtype=np.uint16)


_TABLES = {}


def tables_for(field):
    key = (field.p, field.k, field.poly)
    t = _TABLES.get(key)
    if t is None:
        t = FqTables(field)
        _TABLES[key] = t
    return t


def to_codes(rows):
    """Object matrix (FiniteFieldElement entries) -> uint16 code array."""
    return np.array([[x.code for x in row] for row in rows], dtype=np.uint16)


def from_codes(arr, field):
    return [[FiniteFieldElement(field, int(c)) for c in row] for row in arr]


def fq_identity(n):
    return np.eye(n, dtype=np.uint16)


def fq_add(a, b, tables):
    return tables.add[a, b]


def fq_sub(a, b, tables):
    return tables.add[a, tables.neg[b]]


def fq_scale(c, a, tables):
    return tables.mul[c, a]


def fq_matmul(a, b, tables):
    a = np.ascontiguousarray(a, dtype=np.uint16)
    b = np.ascontiguousarray(b, dtype=np.uint16)
    return core.matmul(a, b, tables.add, tables.mul)


def fq_rref(arr, tables):
    M = np.ascontiguousarray(arr, dtype=np.uint16).copy()
    pivots = core.rref_inplace(M, tables.add, tables.mul, tables.neg,
                               tables.inv)
    return M, list(pivots)


def fq_rank(arr, tables):
    return len(fq_rref(arr, tables)[1])


def fq_nullspace(arr, ncols, tables):
    """Canonical right-kernel basis, one row per basis vector."""
    arr = np.asarray(arr, dtype=np.uint16)
    if arr.shape[0] == 0:
        return fq_identity(ncols)
    R, pivots = fq_rref(arr, tables)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    out = np.zeros((len(free), ncols), dtype=np.uint16)
    for idx, fc in enumerate(free):
        out[idx, fc] = 1
        for r, pc in enumerate(pivots):
            out[idx, pc] = tables.neg[R[r, fc]]
    return out

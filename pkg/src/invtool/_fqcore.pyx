# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Table-driven GF(q) matrix kernels over uint16 element codes."""

import numpy as np


def rref_inplace(unsigned short[:, ::1] M, unsigned short[:, ::1] add,
                 unsigned short[:, ::1] mul, unsigned short[::1] neg,
                 unsigned short[::1] inv):
    """In-place reduced row echelon form; returns the pivot column list."""
    cdef Py_ssize_t nrows = M.shape[0]
    cdef Py_ssize_t ncols = M.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, pr
    cdef unsigned short pivinv, fneg, tmp
    pivots = []
    for c in range(ncols):
        pr = -1
        for i in range(r, nrows):
            if M[i, c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(c, ncols):
                tmp = M[r, j]
                M[r, j] = M[pr, j]
                M[pr, j] = tmp
        pivinv = inv[M[r, c]]
        if pivinv != 1:
            for j in range(c, ncols):
                M[r, j] = mul[pivinv, M[r, j]]
        for i in range(nrows):
            if i != r and M[i, c] != 0:
                fneg = neg[M[i, c]]
                for j in range(c, ncols):
                    M[i, j] = add[M[i, j], mul[fneg, M[r, j]]]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def matmul(unsigned short[:, ::1] A, unsigned short[:, ::1] B,
           unsigned short[:, ::1] add, unsigned short[:, ::1] mul):
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t k = A.shape[1]
    cdef Py_ssize_t m = B.shape[1]
    out = np.zeros((n, m), dtype=np.uint16)
    cdef unsigned short[:, ::1] C = out
    cdef Py_ssize_t i, j, t
    cdef unsigned short a
    for i in range(n):
        for t in range(k):
            a = A[i, t]
            if a != 0:
                for j in range(m):
                    C[i, j] = add[C[i, j], mul[a, B[t, j]]]
    return out

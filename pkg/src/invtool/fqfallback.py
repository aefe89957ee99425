"""Pure numpy GF(q) matrix kernels; same contract as the compiled core.

Row operations are table lookups through fancy indexing, so elimination is
one vectorized call per pivot instead of a tight element loop."""

import numpy as np


def rref_inplace(M, add, mul, neg, inv):
    nrows, ncols = M.shape
    pivots = []
    r = 0
    for c in range(ncols):
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            M[[r, pr]] = M[[pr, r]]
        piv = M[r, c]
        if piv != 1:
            M[r] = mul[inv[piv], M[r]]
        rows = np.nonzero(M[:, c])[0]
        rows = rows[rows != r]
        if rows.size:
            factors = neg[M[rows, c]]
            M[rows] = add[M[rows], mul[factors[:, None], M[r][None, :]]]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def matmul(A, B, add, mul):
    n, k = A.shape
    m = B.shape[1]
    C = np.zeros((n, m), dtype=np.uint16)
    for t in range(k):
        col = A[:, t]
        nz = np.nonzero(col)[0]
        if nz.size:
            C[nz] = add[C[nz], mul[col[nz][:, None], B[t][None, :]]]
    return C

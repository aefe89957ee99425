"""Exact dense linear algebra over any of the number carriers.

Matrices are lists of row lists; entries support +,-,*,/ and ==. Every
routine takes the field descriptor (QQ, a CyclotomicField, or a FiniteField)
to mint zeros and ones. Pivoting is deterministic: topmost row, leftmost
column, so reduced forms are canonical for a given input order.
"""


def identity(n, field):
    one, zero = field.one(), field.zero()
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(nrows, ncols, field):
    zero = field.zero()
    return [[zero] * ncols for _ in range(nrows)]


def mat_copy(A):
    return [list(row) for row in A]


def mat_eq(A, B):
    if len(A) != len(B):
        return False
    for ra, rb in zip(A, B):
        if len(ra) != len(rb):
            return False
        for x, y in zip(ra, rb):
            if x != y:
                return False
    return True


def mat_add(A, B):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def scalar_mul(c, A):
    return [[c * x for x in row] for row in A]


def mat_mul(A, B, field):
    n, m = len(A), len(B[0]) if B else 0
    k = len(B)
    zero = field.zero()
    out = []
    for i in range(n):
        Ai = A[i]
        row = []
        for j in range(m):
            acc = zero
            for t in range(k):
                a = Ai[t]
                if a:
                    acc = acc + a * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(A, v, field):
    zero = field.zero()
    out = []
    for row in A:
        acc = zero
        for a, x in zip(row, v):
            if a:
                acc = acc + a * x
        out.append(acc)
    return out


def mat_pow(A, e, field):
    n = len(A)
    result = identity(n, field)
    base = mat_copy(A)
    while e:
        if e & 1:
            result = mat_mul(result, base, field)
        base = mat_mul(base, base, field)
        e >>= 1
    return result


def transpose(A):
    return [list(col) for col in zip(*A)] if A else []


def kron(A, B, field):
    if not A or not B:
        return []
    out = []
    for ra in A:
        for rb in B:
            row = []
            for a in ra:
                for b in rb:
                    row.append(a * b)
            out.append(row)
    return out


def trace(A, field):
    acc = field.zero()
    for i in range(len(A)):
        acc = acc + A[i][i]
    return acc


def rref(A, field):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = mat_copy(A)
    nrows = len(R)
    ncols = len(R[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if R[i][c]:
                pr = i
                break
        if pr is None:
            continue
        R[r], R[pr] = R[pr], R[r]
        inv = R[r][c] ** -1
        R[r] = [inv * x for x in R[r]]
        for i in range(nrows):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return R, pivots


def rank(A, field):
    return len(rref(A, field)[1])


def nullspace(A, ncols, field):
    """Canonical right-kernel basis of A (vectors of length ncols).

    Each basis vector carries a 1 in its free column and is supported on
    that column and the pivot columns; free columns in increasing order."""
    zero, one = field.zero(), field.one()
    if not A:
        return [[one if i == j else zero for i in range(ncols)]
                for j in range(ncols)]
    R, pivots = rref(A, field)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [zero] * ncols
        v[free] = one
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][free]
        basis.append(v)
    return basis


def solve(A, b, field):
    """One solution of A x = b, or None when inconsistent."""
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug, field)
    zero = field.zero()
    for r in range(len(pivots) - 1, -1, -1):
        if pivots[r] == ncols:
            return None
    # also catch rows 0 ... 0 | nonzero below the pivot rows
    for i in range(len(pivots), nrows):
        if R[i][ncols]:
            return None
    x = [zero] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = R[r][ncols]
    return x


def inverse(A, field):
    n = len(A)
    aug = [list(row) + irow for row, irow in zip(A, identity(n, field))]
    R, pivots = rref(aug, field)
    if pivots != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R]


def det(A, field):
    n = len(A)
    if n == 0:
        return field.one()
    M = mat_copy(A)
    sign = 1
    acc = field.one()
    for c in range(n):
        pr = None
        for i in range(c, n):
            if M[i][c]:
                pr = i
                break
        if pr is None:
            return field.zero()
        if pr != c:
            M[c], M[pr] = M[pr], M[c]
            sign = -sign
        acc = acc * M[c][c]
        inv = M[c][c] ** -1
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    if sign < 0:
        acc = -acc
    return acc


def charpoly(A, field):
    """Coefficients of det(t*I - A), ascending in t (index = exponent).

    Berkowitz's division-free algorithm, valid over any field including
    small characteristic."""
    n = len(A)
    one, zero = field.one(), field.zero()
    if n == 0:
        return [one]
    # v holds the coefficients for the leading r x r block, highest power first
    v = [one, -A[0][0]]
    for r in range(2, n + 1):
        a = A[r - 1][r - 1]
        R = A[r - 1][: r - 1]
        C = [A[i][r - 1] for i in range(r - 1)]
        M = [row[: r - 1] for row in A[: r - 1]]
        s = [one, -a]
        w = C
        for _ in range(r - 1):
            dot = zero
            for x, y in zip(R, w):
                if x:
                    dot = dot + x * y
            s.append(-dot)
            w = mat_vec(M, w, field)
        nv = []
        for i in range(r + 1):
            acc = zero
            for j in range(max(0, i - (len(s) - 1)), min(i, r - 1) + 1):
                acc = acc + s[i - j] * v[j]
            nv.append(acc)
        v = nv
    v.reverse()
    return v


def det_one_minus_tg(A, field):
    """Coefficients of det(I - t*A), ascending in t."""
    c = charpoly(A, field)
    return list(reversed(c))


def row_span_rref(vectors, field):
    """Canonical basis (nonzero rref rows) of the span of the given vectors."""
    if not vectors:
        return []
    R, pivots = rref(vectors, field)
    return [R[i] for i in range(len(pivots))]


def in_span(rref_rows, pivots, v, field):
    """Membership test against a precomputed rref basis."""
    w = list(v)
    for row, pc in zip(rref_rows, pivots):
        if w[pc]:
            f = w[pc]
            w = [x - f * y for x, y in zip(w, row)]
    return not any(w)

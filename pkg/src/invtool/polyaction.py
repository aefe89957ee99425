"""Graded action of matrix groups on k[V] by linear substitution.

Convention, fixed once for the whole package: (g . f)(w) = f(g^-1 w), so the
degree-1 action matrix is the inverse-transpose and action_matrix(g, d) is
its d-th symmetric power. Invariants and relative invariants are computed as
exact kernels degree by degree, which stays valid in modular characteristic
where averaging would fail.

Monomials are ordered graded-lex (x1 > x2 > ... > xn). All bases are reduced
row-echelon canonical, so outputs are diffable across runs and backends.
"""

import itertools
from math import comb

import numpy as np

from . import fq
from . import linalg as la
from .numbers import TABLE_LIMIT, FiniteField


class PolyError(Exception):
    pass


class ActionMismatch(PolyError):
    pass


class FiberNotCStable(PolyError):
    pass


class TooLarge(PolyError):
    pass


# ---------------------------------------------------------------------------
# monomial combinatorics
# ---------------------------------------------------------------------------

_MONO = {}
_MONO_IDX = {}
_PROMOTE = {}
_MULT = {}


def monomial_basis(n, d):
    """Exponent vectors of total degree d, graded-lex descending."""
    key = (n, d)
    if key in _MONO:
        return _MONO[key]
    out = []
    if n == 0:
        out = [()] if d == 0 else []
    else:
        def rec(prefix, remaining, slots):
            if slots == 1:
                out.append(tuple(prefix) + (remaining,))
                return
            for e in range(remaining, -1, -1):
                rec(prefix + [e], remaining - e, slots - 1)
        rec([], d, n)
    _MONO[key] = out
    return out


def monomial_index(n, d):
    key = (n, d)
    if key in _MONO_IDX:
        return _MONO_IDX[key]
    idx = {m: i for i, m in enumerate(monomial_basis(n, d))}
    _MONO_IDX[key] = idx
    return idx


def _promote(n, d, j):
    """Index map: position of alpha in basis(d) -> position of alpha + e_j
    in basis(d+1)."""
    key = (n, d, j)
    if key in _PROMOTE:
        return _PROMOTE[key]
    tgt = monomial_index(n, d + 1)
    out = []
    for alpha in monomial_basis(n, d):
        beta = list(alpha)
        beta[j] += 1
        out.append(tgt[tuple(beta)])
    arr = np.array(out, dtype=np.int64)
    _PROMOTE[key] = arr
    return arr


def _mult_table(n, d1, d2):
    """2D index table: (i1, i2) -> index of the product monomial."""
    key = (n, d1, d2)
    if key in _MULT:
        return _MULT[key]
    b1, b2 = monomial_basis(n, d1), monomial_basis(n, d2)
    tgt = monomial_index(n, d1 + d2)
    tab = np.empty((len(b1), len(b2)), dtype=np.int64)
    for i1, a in enumerate(b1):
        for i2, b in enumerate(b2):
            tab[i1, i2] = tgt[tuple(x + y for x, y in zip(a, b))]
    _MULT[key] = tab
    return tab


# ---------------------------------------------------------------------------
# sparse polynomial helpers (dict: exponent tuple -> field element)
# ---------------------------------------------------------------------------

def poly_degree(f):
    return max((sum(e) for e, c in f.items() if c), default=0)


def is_homogeneous(f):
    degs = {sum(e) for e, c in f.items() if c}
    return len(degs) <= 1


def poly_to_vec(ring, f, d):
    idx = monomial_index(ring.n, d)
    if ring.fast:
        vec = np.zeros(len(idx), dtype=np.uint16)
        for e, c in f.items():
            if c:
                vec[idx[e]] = c.code
        return vec
    vec = [ring.field.zero()] * len(idx)
    for e, c in f.items():
        if c:
            vec[idx[e]] = vec[idx[e]] + c
    return vec


def vec_to_poly(ring, vec, d):
    basis = monomial_basis(ring.n, d)
    out = {}
    if ring.fast:
        from .numbers import FiniteFieldElement
        for i, c in enumerate(vec):
            if c:
                if not isinstance(c, FiniteFieldElement):
                    c = FiniteFieldElement(ring.field, int(c))
                out[basis[i]] = c
    else:
        for i, c in enumerate(vec):
            if c:
                out[basis[i]] = c
    return out


def eval_poly(f, point, field):
    acc = field.zero()
    for e, c in f.items():
        if not c:
            continue
        term = c
        for x, ei in zip(point, e):
            if ei:
                term = term * x ** ei
        acc = acc + term
    return acc


# ---------------------------------------------------------------------------
# the graded action
# ---------------------------------------------------------------------------

class PolyRing:
    """k[x1..xn] over a fixed field, with the substitution action machinery.

    Over a small finite field everything runs on uint16 code arrays through
    the fq kernels; otherwise on exact objects through linalg."""

    def __init__(self, field, n):
        self.field = field
        self.n = n
        self.fast = isinstance(field, FiniteField) and field.q <= TABLE_LIMIT
        self.tables = fq.tables_for(field) if self.fast else None

    def dim(self, d):
        return comb(d + self.n - 1, self.n - 1)

    def identity_slice(self, d):
        if self.fast:
            return fq.fq_identity(self.dim(d))
        return la.identity(self.dim(d), self.field)

    def action_matrices_up_to(self, mat, D):
        """[M_0, ..., M_D] for f -> f o mat^-1 on each degree slice."""
        mat = [[self.field.coerce(x) for x in row] for row in mat]
        m1 = la.transpose(la.inverse(mat, self.field))
        if self.fast:
            return self._chain_fast(fq.to_codes(m1), D)
        return self._chain_obj(m1, D)

    def action_matrix(self, mat, d):
        return self.action_matrices_up_to(mat, d)[d]

    def _chain_fast(self, m1, D):
        t = self.tables
        mats = [np.ones((1, 1), dtype=np.uint16)]
        if D == 0:
            return mats
        mats.append(m1.copy())
        for d in range(2, D + 1):
            basis = monomial_basis(self.n, d)
            prev_idx = monomial_index(self.n, d - 1)
            Nd = len(basis)
            M = np.zeros((Nd, Nd), dtype=np.uint16)
            Mp = mats[d - 1]
            for i in range(self.n):
                cols, parents = [], []
                for a, alpha in enumerate(basis):
                    lead = next(k for k in range(self.n) if alpha[k])
                    if lead == i:
                        beta = list(alpha)
                        beta[i] -= 1
                        cols.append(a)
                        parents.append(prev_idx[tuple(beta)])
                if not cols:
                    continue
                sub = Mp[:, parents]
                cols = np.array(cols, dtype=np.int64)
                for j in range(self.n):
                    cj = int(m1[j, i])
                    if cj == 0:
                        continue
                    Pj = _promote(self.n, d - 1, j)
                    block = M[np.ix_(Pj, cols)]
                    M[np.ix_(Pj, cols)] = t.add[block, t.mul[cj, sub]]
            mats.append(M)
        return mats

    def _chain_obj(self, m1, D):
        field = self.field
        zero = field.zero()
        mats = [[[field.one()]]]
        if D == 0:
            return mats
        mats.append([list(row) for row in m1])
        for d in range(2, D + 1):
            basis = monomial_basis(self.n, d)
            prev_idx = monomial_index(self.n, d - 1)
            Nd, Np = len(basis), len(monomial_basis(self.n, d - 1))
            M = [[zero] * Nd for _ in range(Nd)]
            Mp = mats[d - 1]
            proms = [_promote(self.n, d - 1, j) for j in range(self.n)]
            for a, alpha in enumerate(basis):
                i = next(k for k in range(self.n) if alpha[k])
                beta = list(alpha)
                beta[i] -= 1
                parent = prev_idx[tuple(beta)]
                for r in range(Np):
                    v = Mp[r][parent]
                    if not v:
                        continue
                    for j in range(self.n):
                        c = m1[j][i]
                        if c:
                            rr = int(proms[j][r])
                            M[rr][a] = M[rr][a] + c * v
            mats.append(M)
        return mats

    # --- slice arithmetic -------------------------------------------------

    def mult_vec(self, v1, d1, v2, d2):
        """Product of two slice vectors, as a degree d1+d2 slice vector."""
        tab = _mult_table(self.n, d1, d2)
        if self.fast:
            t = self.tables
            out = np.zeros(self.dim(d1 + d2), dtype=np.uint16)
            for i1 in np.nonzero(v1)[0]:
                tgt = tab[i1]
                out[tgt] = t.add[out[tgt], t.mul[int(v1[i1]), v2]]
            return out
        out = [self.field.zero()] * self.dim(d1 + d2)
        for i1, c1 in enumerate(v1):
            if not c1:
                continue
            row = tab[i1]
            for i2, c2 in enumerate(v2):
                if c2:
                    k = int(row[i2])
                    out[k] = out[k] + c1 * c2
        return out

    def shift_by_monomial(self, vec, d, m_idx, dm):
        """vec * x^mu for the monomial at index m_idx in basis(dm)."""
        tab = _mult_table(self.n, d, dm)
        tgt = tab[:, m_idx]
        if self.fast:
            out = np.zeros(self.dim(d + dm), dtype=np.uint16)
            out[tgt] = vec
            return out
        out = [self.field.zero()] * self.dim(d + dm)
        for i, c in enumerate(vec):
            if c:
                out[int(tgt[i])] = c
        return out

    def promote_by_var(self, vec, d, j):
        """vec * x_j as a degree d+1 slice vector."""
        P = _promote(self.n, d, j)
        if self.fast:
            out = np.zeros(self.dim(d + 1), dtype=np.uint16)
            out[P] = vec
            return out
        out = [self.field.zero()] * self.dim(d + 1)
        for i, c in enumerate(vec):
            if c:
                out[int(P[i])] = c
        return out

    def kernel(self, rows, ncols):
        """Canonical kernel basis plus the free-column list."""
        if self.fast:
            if rows is None or (hasattr(rows, "shape") and rows.shape[0] == 0) \
                    or (isinstance(rows, list) and not rows):
                return fq.fq_identity(ncols), list(range(ncols))
            arr = np.asarray(rows, dtype=np.uint16)
            R, pivots = fq.fq_rref(arr, self.tables)
            pivset = set(pivots)
            free = [c for c in range(ncols) if c not in pivset]
            out = np.zeros((len(free), ncols), dtype=np.uint16)
            for i, fc in enumerate(free):
                out[i, fc] = 1
                for r, pc in enumerate(pivots):
                    out[i, pc] = self.tables.neg[R[r, fc]]
            return out, free
        if not rows:
            return la.identity(ncols, self.field), list(range(ncols))
        R, pivots = la.rref(rows, self.field)
        pivset = set(pivots)
        free = [c for c in range(ncols) if c not in pivset]
        zero, one = self.field.zero(), self.field.one()
        out = []
        for fc in free:
            v = [zero] * ncols
            v[fc] = one
            for r, pc in enumerate(pivots):
                v[pc] = -R[r][fc]
            out.append(v)
        return out, free

    def rank(self, rows):
        if self.fast:
            arr = np.asarray(rows, dtype=np.uint16)
            if arr.shape[0] == 0:
                return 0
            return len(fq.fq_rref(arr, self.tables)[1])
        if not rows:
            return 0
        return len(la.rref(rows, self.field)[1])


class GroupPolyAction:
    """A PolyRing together with an enumerated matrix group acting on it."""

    def __init__(self, G, ring=None):
        self.G = G
        self.ring = ring or PolyRing(G.field, G.dim)
        if self.ring.n != G.dim:
            raise PolyError("ring variable count must match the group degree")
        self._chains = {}

    def element_action(self, i, d):
        """Action matrix of group element i on the degree-d slice, cached."""
        chain = self._chains.get(i)
        if chain is None or len(chain) <= d:
            chain = self.ring.action_matrices_up_to(self.G.elements[i], d)
            self._chains[i] = chain
        return chain[d]

    def generator_action(self, pos, d):
        return self.element_action(self.G.gen_indices[pos], d)


class GradedSubspace:
    """Per-degree canonical bases of a graded subspace of U (x) k[V]."""

    def __init__(self, ring, udim, bases, frees):
        self.ring = ring
        self.udim = udim
        self.bases = bases
        self.frees = frees
        self.D = len(bases) - 1

    @property
    def dims(self):
        return [len(b) for b in self.bases]

    def basis_rows(self, d):
        """Raw basis rows (numpy array on the fast path, row lists otherwise)."""
        return self.bases[d]

    def basis(self, d):
        """Basis vectors in object form."""
        rows = self.bases[d]
        if self.ring.fast:
            return fq.from_codes(rows, self.ring.field)
        return [list(r) for r in rows]

    def ambient_dim(self, d):
        return self.udim * self.ring.dim(d)


def invariants_up_to(act, D):
    """Degreewise bases of k[V]^G through degree D, by exact kernels."""
    ring = act.ring
    bases, frees = [], []
    ngens = len(act.G.generators)
    for d in range(D + 1):
        N = ring.dim(d)
        if ngens == 0:
            basis, free = ring.kernel([] if not ring.fast else
                                      np.zeros((0, N), dtype=np.uint16), N)
        else:
            blocks = []
            for p in range(ngens):
                M = act.generator_action(p, d)
                if ring.fast:
                    blocks.append(fq.fq_sub(M, fq.fq_identity(N),
                                            ring.tables))
                else:
                    blocks.append(la.mat_sub(M, la.identity(N, ring.field)))
            if ring.fast:
                stacked = np.vstack(blocks)
            else:
                stacked = [row for b in blocks for row in b]
            basis, free = ring.kernel(stacked, N)
        bases.append(basis)
        frees.append(free)
    return GradedSubspace(ring, 1, bases, frees)


# ---------------------------------------------------------------------------
# the bimodule U and relative invariants
# ---------------------------------------------------------------------------

class BimoduleU:
    """A right k(G)-module, stored through tau(g): the matrix of u -> u.g^-1,
    which is an honest homomorphism G -> GL(U).

    Optional commuting outer actions ride along as (v_matrix, u_matrix)
    pairs: v_matrix acts on V by substitution, u_matrix on U from the left.
    gamma_pairs hold the Gamma-generators, c_pairs the C-generators."""

    def __init__(self, dim, tau_gens, gamma_pairs=None, c_pairs=None,
                 label="U"):
        self.dim = dim
        self.tau_gens = tau_gens
        self.gamma_pairs = gamma_pairs or []
        self.c_pairs = c_pairs or []
        self.label = label
        self._table = None
        self._group = None

    def verify(self, G):
        """Extend tau along the element table and check every product edge;
        check the outer u-matrices commute with the G-action on U."""
        if self._table is not None and self._group is G:
            return self._table
        if len(self.tau_gens) != len(G.generators):
            raise ActionMismatch("one tau matrix per group generator required")
        field = G.field
        taus = [[[field.coerce(x) for x in row] for row in m]
                for m in self.tau_gens]
        table = [None] * len(G.elements)
        table[0] = la.identity(self.dim, field)
        order = [0]
        head = 0
        while head < len(order):
            i = order[head]
            head += 1
            for p, gidx in enumerate(G.gen_indices):
                j = G.mul_index(i, gidx)
                prod = la.mat_mul(table[i], taus[p], field)
                if table[j] is None:
                    table[j] = prod
                    order.append(j)
                elif not la.mat_eq(table[j], prod):
                    raise ActionMismatch(
                        f"tau is inconsistent at element {j}: the generator "
                        f"assignment does not extend to the group")
        for _, um in itertools.chain(self.gamma_pairs, self.c_pairs):
            if um is None:
                continue
            mm = [[field.coerce(x) for x in row] for row in um]
            for p, t in enumerate(taus):
                if not la.mat_eq(la.mat_mul(mm, t, field),
                                 la.mat_mul(t, mm, field)):
                    raise ActionMismatch(
                        f"outer u-matrix does not commute with tau of "
                        f"generator {p}")
        self._table = table
        self._group = G
        return table

    def tau(self, G, i):
        """Matrix of u -> u.g^-1 for element index i."""
        return self.verify(G)[i]

    def right_action_matrix(self, G, i):
        """Matrix of u -> u.g for element index i (= tau of the inverse)."""
        return self.verify(G)[G.inverse_index(i)]


def trivial_U(G):
    one = G.field.one()
    return BimoduleU(1, [[[one]]] * len(G.generators), label="trivial")


def det_U(G):
    """u.g = det(g) u, so tau(g) = det(g)^-1."""
    mats = []
    for g in G.generators:
        d = la.det(g, G.field)
        mats.append([[d ** -1]])
    return BimoduleU(1, mats, label="det")


def natural_U(G):
    """U = V with u.g = g^-1 u, so tau(g) = g."""
    return BimoduleU(G.dim, [la.mat_copy(g) for g in G.generators],
                     label="natural")


def dual_U(G):
    """U = V* with u.g = u o g, so tau(g) = (g^-1)^T."""
    mats = [la.transpose(la.inverse(g, G.field)) for g in G.generators]
    return BimoduleU(G.dim, mats, label="dual")


def regular_U(G):
    """U = k(G) with e_h.g = e_(hg), so tau(g): e_h -> e_(h g^-1)."""
    field = G.field
    zero, one = field.zero(), field.one()
    mats = []
    for gidx in G.gen_indices:
        gi = G.inverse_index(gidx)
        m = [[zero] * len(G.elements) for _ in range(len(G.elements))]
        for h in range(len(G.elements)):
            m[G.mul_index(h, gi)][h] = one
        mats.append(m)
    return BimoduleU(len(G.elements), mats, label="regular")


def relative_invariants_up_to(act, U, D):
    """Degreewise bases of (U (x) k[V])^G; the diagonal action is
    tau(g) (x) action_matrix(g, d). Residual Gamma/C actions are recorded
    per degree when U carries the matrices."""
    ring = act.ring
    G = act.G
    U.verify(G)
    r = U.dim
    bases, frees = [], []
    for d in range(D + 1):
        N = ring.dim(d)
        nc = r * N
        blocks = []
        for p in range(len(G.generators)):
            M = act.generator_action(p, d)
            taup = U.tau(G, G.gen_indices[p])
            if ring.fast:
                A = _fq_kron(fq.to_codes(taup), M, ring.tables)
                blocks.append(fq.fq_sub(A, fq.fq_identity(nc), ring.tables))
            else:
                A = la.kron(taup, M, ring.field)
                blocks.append(la.mat_sub(A, la.identity(nc, ring.field)))
        if not blocks:
            stacked = np.zeros((0, nc), dtype=np.uint16) if ring.fast else []
        elif ring.fast:
            stacked = np.vstack(blocks)
        else:
            stacked = [row for b in blocks for row in b]
        basis, free = ring.kernel(stacked, nc)
        bases.append(basis)
        frees.append(free)
    space = GradedSubspace(ring, r, bases, frees)
    space.U = U
    residual = {}
    for tag, pairs in (("gamma", U.gamma_pairs), ("c", U.c_pairs)):
        for k, (vm, um) in enumerate(pairs):
            per_degree = []
            for d in range(D + 1):
                A = ambient_action(act, d, vm, um, r)
                per_degree.append(restrict_to_space(space, d, A))
            residual[f"{tag}_{k}"] = per_degree
    space.residual = residual
    return space


def _fq_kron(A, B, tables):
    r1, c1 = A.shape
    r2, c2 = B.shape
    K = tables.mul[A[:, None, :, None], B[None, :, None, :]]
    return np.ascontiguousarray(K.reshape(r1 * r2, c1 * c2))


def ambient_action(act, d, v_mat, u_mat=None, udim=1):
    """Matrix of (u_mat (x) substitution-by-v_mat) on U (x) k[V]_d.

    v_mat may be a group element index (cached chain) or a raw matrix."""
    ring = act.ring
    if isinstance(v_mat, int):
        M = act.element_action(v_mat, d)
    else:
        M = ring.action_matrix(v_mat, d)
    if u_mat is None and udim == 1:
        return M
    field = ring.field
    if u_mat is None:
        u_mat = la.identity(udim, field)
    u_mat = [[field.coerce(x) for x in row] for row in u_mat]
    if ring.fast:
        return _fq_kron(fq.to_codes(u_mat), M, ring.tables)
    return la.kron(u_mat, M, field)


def restrict_to_space(space, d, A):
    """Matrix of A on span(basis(d)), coordinates in that basis.

    The basis is kernel-canonical (identity pattern on free columns), so
    coordinates are read off the free columns; a reconstruction check makes
    sure A actually preserves the space."""
    ring = space.ring
    rows = space.bases[d]
    free = space.frees[d]
    rdim = len(free)
    if rdim == 0:
        return np.zeros((0, 0), dtype=np.uint16) if ring.fast else []
    if ring.fast:
        W = fq.fq_matmul(A, rows.T.copy(), ring.tables)  # images as columns
        R = W[np.array(free, dtype=np.int64), :]
        recon = fq.fq_matmul(rows.T.copy(), R, ring.tables)
        if not (recon == W).all():
            raise ActionMismatch(
                "matrix does not preserve the graded subspace "
                f"at degree {d}")
        return np.ascontiguousarray(R)
    field = ring.field
    W = [la.mat_vec(A, list(v), field) for v in rows]  # images as rows
    R = [[W[j][fc] for j in range(rdim)] for fc in free]
    for j in range(rdim):
        recon = [field.zero()] * len(W[j])
        for jp in range(rdim):
            c = R[jp][j]
            if c:
                recon = [x + c * y for x, y in zip(recon, rows[jp])]
        if recon != list(W[j]):
            raise ActionMismatch(
                f"matrix does not preserve the graded subspace at degree {d}")
    return R


# ---------------------------------------------------------------------------
# coinvariants and subalgebras
# ---------------------------------------------------------------------------

def coinvariant_dims(act, D, inv=None):
    """dim of (k[V] / ideal(k[V]^G_+))_d for d = 0..D.

    Uses the recursion ideal_d = ideal_(d-1) * V_1 + invariants_d."""
    ring = act.ring
    inv = inv or invariants_up_to(act, D)
    dims = [1]
    prev_rows = None  # canonical basis rows of the ideal slice
    for d in range(1, D + 1):
        N = ring.dim(d)
        rows = []
        if prev_rows is not None:
            for v in prev_rows:
                for j in range(ring.n):
                    rows.append(ring.promote_by_var(v, d - 1, j))
        for v in inv.basis_rows(d):
            rows.append(np.asarray(v, dtype=np.uint16) if ring.fast
                        else list(v))
        if ring.fast:
            stacked = np.array(rows, dtype=np.uint16) if rows else \
                np.zeros((0, N), dtype=np.uint16)
            R, piv = fq.fq_rref(stacked, ring.tables) if rows else \
                (stacked, [])
            prev_rows = R[:len(piv)]
            dims.append(N - len(piv))
        else:
            if rows:
                R, piv = la.rref(rows, ring.field)
                prev_rows = [R[i] for i in range(len(piv))]
                dims.append(N - len(piv))
            else:
                prev_rows = []
                dims.append(N)
    return dims


def subalgebra_dims(ring, polys, D):
    """Per-degree dimension of the subalgebra k[f1..fr] through degree D.

    polys: sparse homogeneous polynomials. Products are enumerated by
    exponent vectors of weighted degree d and ranked."""
    gens = []
    for f in polys:
        if not is_homogeneous(f):
            raise PolyError("subalgebra generators must be homogeneous")
        dg = poly_degree(f)
        if dg == 0:
            raise PolyError("constant generator")
        gens.append((dg, f))
    degs = [dg for dg, _ in gens]
    vecs = {tuple([0] * len(gens)): None}  # exponent tuple -> slice vector
    dims = [1]
    for d in range(1, D + 1):
        rows = []
        for expo in _weighted_exponents(degs, d):
            rows.append(_product_vector(ring, gens, vecs, expo))
        if not rows:
            dims.append(0)
            continue
        dims.append(ring.rank(rows))
    return dims


def _weighted_exponents(degs, d):
    """All exponent tuples e with sum e_i * degs_i = d, deterministic order."""
    out = []

    def rec(pos, remaining, acc):
        if pos == len(degs) - 1:
            if remaining % degs[pos] == 0:
                out.append(tuple(acc + [remaining // degs[pos]]))
            return
        step = degs[pos]
        for e in range(remaining // step, -1, -1):
            rec(pos + 1, remaining - e * step, acc + [e])
    if degs:
        rec(0, d, [])
    return out


def _product_vector(ring, gens, cache, expo):
    if expo in cache:
        v = cache[expo]
        if v is not None:
            return v
    # find a position to decrement
    pos = max(i for i, e in enumerate(expo) if e)
    prev = list(expo)
    prev[pos] -= 1
    prev = tuple(prev)
    dprev = sum(e * gens[i][0] for i, e in enumerate(prev))
    gdeg, gpoly = gens[pos]
    gvec = poly_to_vec(ring, gpoly, gdeg)
    if dprev == 0:
        out = gvec
    else:
        pv = _product_vector(ring, gens, cache, prev)
        out = ring.mult_vec(pv, dprev, gvec, gdeg)
    cache[expo] = out
    return out


# ---------------------------------------------------------------------------
# fibers over finite fields
# ---------------------------------------------------------------------------

def verify_invariant_poly(act, f):
    """Check f in k[V]^G by applying each generator's substitution."""
    if not is_homogeneous(f):
        raise PolyError("expected a homogeneous polynomial")
    d = poly_degree(f)
    ring = act.ring
    vec = poly_to_vec(ring, f, d)
    for p in range(len(act.G.generators)):
        M = act.generator_action(p, d)
        if ring.fast:
            img = fq.fq_matmul(M, np.asarray(vec, dtype=np.uint16)
                               .reshape(-1, 1), ring.tables).ravel()
            if not (img == vec).all():
                return False
        else:
            img = la.mat_vec(M, vec, ring.field)
            if img != vec:
                return False
    return True


def enumerate_fiber(act, v, polys, c_mats=(), cap=10 ** 6):
    """Full fiber {w : f_i(w) = f_i(v)} with orbit, freeness, C-stability
    and transporter data."""
    ring = act.ring
    field = ring.field
    G = act.G
    if not isinstance(field, FiniteField):
        raise PolyError("fiber enumeration needs a finite field")
    if field.q ** ring.n > cap:
        raise TooLarge(f"|V| = {field.q}^{ring.n} exceeds cap {cap}")
    for f in polys:
        if not verify_invariant_poly(act, f):
            raise PolyError("fiber polynomial is not G-invariant")
    v = tuple(field.coerce(x) for x in v)
    values = [eval_poly(f, v, field) for f in polys]
    points = []
    for w in itertools.product(field.elements(), repeat=ring.n):
        if all(eval_poly(f, w, field) == val
               for f, val in zip(polys, values)):
            points.append(w)
    points.sort(key=lambda w: tuple(x.code for x in w))
    point_set = set(points)
    # orbit decomposition, minimal representative first
    assigned = {}
    orbits, reps = [], []
    for w in points:
        if w in assigned:
            continue
        orb = set()
        for i in range(len(G.elements)):
            gw = tuple(la.mat_vec(G.elements[i], list(w), field))
            orb.add(gw)
        if not orb <= point_set:
            raise PolyError("fiber is not G-stable; check the polynomials")
        for x in orb:
            assigned[x] = len(orbits)
        orbits.append(sorted(orb, key=lambda t: tuple(x.code for x in t)))
        reps.append(w)
    stab_orders = [len(G.elements) // len(orb) for orb in orbits]
    free = all(len(orb) == len(G.elements) for orb in orbits)
    # C analysis
    c_stable, orbit_maps, transporters = [], [], {}
    for ci, cm in enumerate(c_mats):
        cmat = [[field.coerce(x) for x in row] for row in cm]
        stable = True
        omap = []
        for oi, w in enumerate(reps):
            cw = tuple(la.mat_vec(cmat, list(w), field))
            if cw not in point_set:
                raise FiberNotCStable(
                    f"c-generator {ci} maps the fiber off itself")
            target = assigned[cw]
            omap.append(target)
            if target == oi:
                found = None
                for gi in range(len(G.elements)):
                    gw = tuple(la.mat_vec(G.elements[gi], list(w), field))
                    if gw == cw:
                        found = gi
                        break
                transporters[(ci, oi)] = found
            else:
                stable = False
                transporters[(ci, oi)] = None
        # also confirm every non-rep point stays inside
        for w in points:
            cw = tuple(la.mat_vec(cmat, list(w), field))
            if cw not in point_set:
                raise FiberNotCStable(
                    f"c-generator {ci} maps the fiber off itself")
        c_stable.append(stable)
        orbit_maps.append(omap)
    return {
        "base_point": v,
        "values": values,
        "points": points,
        "orbits": orbits,
        "reps": reps,
        "stab_orders": stab_orders,
        "free": free,
        "c_stable": c_stable,
        "orbit_maps": orbit_maps,
        "transporters": transporters,
    }

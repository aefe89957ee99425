"""Truncated minimal free resolutions, Koszul Tor and graded Betti tables.

Two independent Tor engines are kept on purpose. The syzygy iteration works
over any connected graded subalgebra of k[V]; the Koszul complex only over a
certified polynomial normalization, and where both apply they must agree.
Everything here runs on exact field objects; the per-degree slices are small
enough that the uint16 kernels are not worth the plumbing, even when the
ambient ring carries them.
"""

from fractions import Fraction
from itertools import combinations

import numpy as np

from . import fq
from . import linalg as la
from . import polyaction as pa
from .series import TruncatedSeries


class HomologyError(Exception):
    pass


class NotAnRModule(HomologyError):
    pass


class NotThetaStable(HomologyError):
    pass


class TruncationTooSmall(HomologyError):
    pass


class NotIndependent(HomologyError):
    pass


class AlgebraNotClosed(HomologyError):
    pass


class ThetaNotSemisimple(HomologyError):
    pass


# ---------------------------------------------------------------------------
# object-level plumbing over possibly fast-path rings
# ---------------------------------------------------------------------------

def _field_char(field):
    return getattr(field, "p", 0)


def _vec_obj(ring, v):
    if ring.fast and not isinstance(v, list):
        return fq.from_codes([np.asarray(v, dtype=np.uint16)], ring.field)[0]
    return list(v)


def _mat_obj(ring, A):
    if ring.fast and not isinstance(A, list):
        return fq.from_codes(A, ring.field)
    return A


def _mult(ring, v1, d1, v2, d2):
    """Slice product with object vectors in and out."""
    if ring.fast:
        c1 = np.array([x.code for x in v1], dtype=np.uint16)
        c2 = np.array([x.code for x in v2], dtype=np.uint16)
        out = ring.mult_vec(c1, d1, c2, d2)
        return fq.from_codes([out], ring.field)[0]
    return ring.mult_vec(list(v1), d1, list(v2), d2)


def _rmult_ambient(ring, udim, fvec, e, vec, d):
    """(1 (x) f) applied to a vector of U (x) k[V]_d, blockwise in U."""
    nd = ring.dim(d)
    out = []
    for u in range(udim):
        out.extend(_mult(ring, fvec, e, vec[u * nd:(u + 1) * nd], d))
    return out


def _coords(rows, cols, vec, field):
    """Coordinates of vec in a basis with identity pattern on cols.

    Returns None when vec is not in the span (reconstruction check)."""
    zero = field.zero()
    if not rows:
        return [] if all(not x for x in vec) else None
    coords = [vec[c] for c in cols]
    recon = [zero] * len(vec)
    for c, row in zip(coords, rows):
        if c:
            recon = [x + c * y for x, y in zip(recon, row)]
    if recon != list(vec):
        return None
    return coords


def _nullspace_with_frees(rows, ncols, field):
    """Canonical kernel basis and its free columns."""
    if not rows:
        return la.identity(ncols, field), list(range(ncols))
    R, pivots = la.rref(rows, field)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    zero, one = field.zero(), field.one()
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][fc]
        basis.append(v)
    return basis, free


def _rref_rows(rows, field):
    if not rows:
        return [], []
    R, pivots = la.rref(rows, field)
    return [R[i] for i in range(len(pivots))], pivots


# ---------------------------------------------------------------------------
# graded pieces: modules and the algebra R
# ---------------------------------------------------------------------------

class SpaceView:
    """Uniform per-degree view of a graded subspace of U (x) k[V].

    Basis rows carry an identity pattern on the listed columns, so
    coordinates are read off and certified by reconstruction."""

    def __init__(self, ring, udim, rows_by_deg, cols_by_deg):
        self.ring = ring
        self.udim = udim
        self._rows = rows_by_deg
        self._cols = cols_by_deg
        self.D = len(rows_by_deg) - 1

    @classmethod
    def of(cls, space):
        rows = [space.basis(d) for d in range(space.D + 1)]
        cols = [list(space.frees[d]) for d in range(space.D + 1)]
        return cls(space.ring, space.udim, rows, cols)

    @classmethod
    def full(cls, ring, D, udim=1):
        rows, cols = [], []
        for d in range(D + 1):
            n = udim * ring.dim(d)
            rows.append(la.identity(n, ring.field))
            cols.append(list(range(n)))
        return cls(ring, udim, rows, cols)

    def dim(self, d):
        return len(self._rows[d])

    def rows(self, d):
        return self._rows[d]

    def coord(self, d, vec):
        return _coords(self._rows[d], self._cols[d], vec, self.ring.field)

    @property
    def dims(self):
        return [len(r) for r in self._rows]


class QuotientView:
    """M_d = N_d / W_d for graded subspaces W <= N of U (x) k[V].

    Representatives are W-reduced; coordinates first reduce mod W, then
    read the complement basis. W must be R-stable (and theta-stable when
    theta is used); the adapters check both."""

    def __init__(self, ring, udim, num_rows_by_deg, den_rows_by_deg):
        self.ring = ring
        self.udim = udim
        self.D = len(num_rows_by_deg) - 1
        field = ring.field
        self._w = []
        self._rows = []
        self._cols = []
        for d in range(self.D + 1):
            wr, wpiv = _rref_rows([list(r) for r in den_rows_by_deg[d]],
                                  field)
            self._w.append((wr, wpiv))
            reduced = [self._reduce_with(wr, wpiv, list(r), field)
                       for r in num_rows_by_deg[d]]
            cr, cpiv = _rref_rows(reduced, field)
            self._rows.append(cr)
            self._cols.append(cpiv)

    @staticmethod
    def _reduce_with(wr, wpiv, vec, field):
        for r, pc in enumerate(wpiv):
            c = vec[pc]
            if c:
                vec = [x - c * y for x, y in zip(vec, wr[r])]
        return vec

    def reduce(self, d, vec):
        wr, wpiv = self._w[d]
        return self._reduce_with(wr, wpiv, list(vec), self.ring.field)

    def in_denominator(self, d, vec):
        return not any(self.reduce(d, vec))

    def denominator_rows(self, d):
        return self._w[d][0]

    def dim(self, d):
        return len(self._rows[d])

    def rows(self, d):
        return self._rows[d]

    def coord(self, d, vec):
        return _coords(self._rows[d], self._cols[d], self.reduce(d, vec),
                       self.ring.field)

    @property
    def dims(self):
        return [len(r) for r in self._rows]


def residue_field_module(R):
    """k = R / R_+ as a graded module over R."""
    num = [R.basis_rows(d) for d in range(R.D + 1)]
    den = [[] if d == 0 else R.basis_rows(d) for d in range(R.D + 1)]
    return QuotientView(R.ring, 1, num, den)


def _as_view(M):
    if isinstance(M, (SpaceView, QuotientView)):
        return M
    if isinstance(M, GradedAlgebraR):
        return SpaceView(M.ring, 1,
                         [M.basis_rows(d) for d in range(M.D + 1)],
                         [M.coord_cols(d) for d in range(M.D + 1)])
    return SpaceView.of(M)


class GradedAlgebraR:
    """A connected graded subalgebra R of k[V], by bases or by generators."""

    def __init__(self, ring, rows_by_deg, cols_by_deg, kind,
                 gens=None, gen_degrees=None):
        self.ring = ring
        self.kind = kind
        self._rows = rows_by_deg
        self._cols = cols_by_deg
        self.D = len(rows_by_deg) - 1
        self.gens = gens
        self.gen_degrees = gen_degrees
        self._mult_cache = {}
        if len(rows_by_deg[0]) != 1:
            raise AlgebraNotClosed("R_0 must be one dimensional (connected)")

    @property
    def is_polynomial(self):
        return self.kind == "polynomial"

    @property
    def dims(self):
        return [len(r) for r in self._rows]

    def dim(self, d):
        return len(self._rows[d])

    def basis_rows(self, d):
        return self._rows[d]

    def coord_cols(self, d):
        return self._cols[d]

    def coord(self, d, vec):
        return _coords(self._rows[d], self._cols[d], vec, self.ring.field)

    def positive_degrees(self, top=None):
        top = self.D if top is None else min(top, self.D)
        return [e for e in range(1, top + 1) if self.dim(e)]

    def mult_coords(self, e, a):
        """[u][v] -> coordinates of basis_e[u] * basis_a[v] in R_{e+a}."""
        if e + a > self.D:
            raise TruncationTooSmall(
                f"product degree {e + a} exceeds truncation {self.D}")
        key = (e, a)
        if key not in self._mult_cache:
            out = []
            for u in range(self.dim(e)):
                fu = self._rows[e][u]
                row = []
                for v in range(self.dim(a)):
                    prod = _mult(self.ring, fu, e, self._rows[a][v], a)
                    c = self.coord(e + a, prod)
                    if c is None:
                        raise AlgebraNotClosed(
                            f"basis product R_{e} * R_{a} leaves R")
                    row.append(c)
                out.append(row)
            self._mult_cache[key] = out
        return self._mult_cache[key]


def polynomial_normalization(ring, polys, D):
    """R = k[f_1..f_n] with independence certified through degree D.

    The certificate: at every degree, the power products with that weighted
    degree stay linearly independent."""
    gens = []
    for f in polys:
        if not pa.is_homogeneous(f):
            raise HomologyError("generators must be homogeneous")
        dg = pa.poly_degree(f)
        if dg <= 0:
            raise HomologyError("generators must have positive degree")
        gens.append((dg, f))
    degs = [dg for dg, _ in gens]
    field = ring.field
    cache = {tuple([0] * len(gens)): None}
    rows_by_deg = [[[field.one()]]]
    cols_by_deg = [[0]]
    for d in range(1, D + 1):
        expos = pa._weighted_exponents(degs, d)
        rows = [_vec_obj(ring, pa._product_vector(ring, gens, cache, ex))
                for ex in expos]
        rr, pivots = _rref_rows(rows, field)
        if len(pivots) != len(expos):
            raise NotIndependent(
                f"power products collapse at degree {d}: "
                f"{len(pivots)} < {len(expos)}")
        rows_by_deg.append(rr)
        cols_by_deg.append(pivots)
    return GradedAlgebraR(ring, rows_by_deg, cols_by_deg, "polynomial",
                          gens=[f for _, f in gens], gen_degrees=degs)


def subalgebra_by_degrees(space, product_budget=2000):
    """Wrap explicit per-degree bases (e.g. the full invariant ring).

    Multiplicative closure is spot-checked on basis products up to a
    budget; a failed product is a hard error."""
    ring = space.ring
    if space.udim != 1:
        raise HomologyError("an algebra lives in k[V] itself")
    rows = [space.basis(d) for d in range(space.D + 1)]
    cols = [list(space.frees[d]) for d in range(space.D + 1)]
    alg = GradedAlgebraR(ring, rows, cols, "by_degrees")
    checked = 0
    for a in alg.positive_degrees():
        if checked >= product_budget:
            break
        for b in alg.positive_degrees():
            if a > b or a + b > alg.D:
                continue
            alg.mult_coords(a, b)
            checked += alg.dim(a) * alg.dim(b)
            if checked >= product_budget:
                break
    return alg


def algebra_as_module(alg):
    return SpaceView(alg.ring, 1,
                     [alg.basis_rows(d) for d in range(alg.D + 1)],
                     [alg.coord_cols(d) for d in range(alg.D + 1)])


# ---------------------------------------------------------------------------
# theta: a finite symmetry group acting on everything at once
# ---------------------------------------------------------------------------

class ThetaAction:
    """Symmetries given as (label, v_mat, u_mat) triples.

    v_mat acts on V by substitution, u_mat on the U factor; the list must
    carry a whole finite group when averaging is requested."""

    def __init__(self, ring, elements, udim=1):
        self.ring = ring
        self.udim = udim
        self.labels = []
        self._vm, self._um = {}, {}
        for label, v_mat, u_mat in elements:
            if label in self._vm:
                raise HomologyError(f"duplicate theta label {label!r}")
            self.labels.append(label)
            self._vm[label] = v_mat
            self._um[label] = u_mat
        self._amb = {}
        self._amb_v = {}

    @property
    def order(self):
        return len(self.labels)

    def ambient_v(self, label, d):
        """Action on k[V]_d alone (object matrix)."""
        key = (label, d)
        if key not in self._amb_v:
            A = self.ring.action_matrix(self._vm[label], d)
            self._amb_v[key] = _mat_obj(self.ring, A)
        return self._amb_v[key]

    def ambient(self, label, d):
        """Action on U (x) k[V]_d (object matrix)."""
        key = (label, d)
        if key not in self._amb:
            A = self.ambient_v(label, d)
            u = self._um[label]
            if u is None and self.udim == 1:
                self._amb[key] = A
            else:
                field = self.ring.field
                if u is None:
                    u = la.identity(self.udim, field)
                u = [[field.coerce(x) for x in row] for row in u]
                self._amb[key] = la.kron(u, A, field)
        return self._amb[key]


# ---------------------------------------------------------------------------
# adapters: what the syzygy iteration needs from a container
# ---------------------------------------------------------------------------

class _ModuleAdapter:
    """M itself: native vectors are ambient U (x) k[V]_d vectors.

    For a QuotientView the natives are W-reduced representatives; the
    denominator's R-stability is checked once up front."""

    def __init__(self, view, alg, theta=None):
        self.view = view
        self.alg = alg
        self.theta = theta
        self.field = view.ring.field
        self._tm = {}
        if isinstance(view, QuotientView):
            for e in alg.positive_degrees():
                for d in range(view.D + 1 - e):
                    for w in view.denominator_rows(d):
                        fv = alg.basis_rows(e)
                        for u in range(alg.dim(e)):
                            prod = _rmult_ambient(
                                view.ring, view.udim, fv[u], e, w, d)
                            if not view.in_denominator(d + e, prod):
                                raise NotAnRModule(
                                    "the quotient's denominator is not "
                                    f"R-stable at degree {d}")

    def dim(self, d):
        return self.view.dim(d)

    def basis(self, d):
        return self.view.rows(d)

    def from_coords(self, d, coords):
        rows = self.view.rows(d)
        out = [self.field.zero()] * len(rows[0])
        for c, row in zip(coords, rows):
            if c:
                out = [x + c * y for x, y in zip(out, row)]
        return out

    def coordinatize(self, d, vec):
        c = self.view.coord(d, vec)
        if c is None:
            raise NotAnRModule(
                f"R-multiple leaves the module at degree {d}")
        return c

    def rmult(self, e, u, vec, d):
        fvec = self.alg.basis_rows(e)[u]
        return _rmult_ambient(self.view.ring, self.view.udim,
                              fvec, e, vec, d)

    def stored_image(self, d, w):
        """Linear representative of the map image, zero iff zero in M."""
        if isinstance(self.view, QuotientView):
            return self.view.reduce(d, w)
        return w

    def theta_matrix(self, label, d):
        key = (label, d)
        if key not in self._tm:
            A = self.theta.ambient(label, d)
            if isinstance(self.view, QuotientView):
                for w in self.view.denominator_rows(d):
                    img = la.mat_vec(A, list(w), self.field)
                    if not self.view.in_denominator(d, img):
                        raise NotThetaStable(
                            f"theta element {label!r} does not preserve "
                            f"the quotient's denominator at degree {d}")
            cols = []
            for row in self.view.rows(d):
                img = la.mat_vec(A, list(row), self.field)
                c = self.view.coord(d, img)
                if c is None:
                    raise NotThetaStable(
                        f"theta element {label!r} does not preserve the "
                        f"module at degree {d}")
                cols.append(c)
            self._tm[key] = la.transpose(cols) if cols else []
        return self._tm[key]


class _KernelAdapter:
    """A kernel K inside a free module: native vectors are F-slice vectors."""

    def __init__(self, free, rows_by_deg, frees_by_deg, theta_slice=None):
        self.free = free
        self._rows = rows_by_deg
        self._frees = frees_by_deg
        self.field = free.alg.ring.field
        self._theta_slice = theta_slice  # callable (label, d) -> F-slice matrix
        self._tm = {}

    def dim(self, d):
        return len(self._rows[d])

    def basis(self, d):
        return self._rows[d]

    def from_coords(self, d, coords):
        rows = self._rows[d]
        n = self.free.dim(d)
        out = [self.field.zero()] * n
        for c, row in zip(coords, rows):
            if c:
                out = [x + c * y for x, y in zip(out, row)]
        return out

    def coordinatize(self, d, vec):
        c = _coords(self._rows[d], self._frees[d], vec, self.field)
        if c is None:
            raise HomologyError(
                f"vector escapes the syzygy module at degree {d}")
        return c

    def rmult(self, e, u, vec, d):
        return self.free.rmult(e, u, vec, d)

    def stored_image(self, d, w):
        return w

    def theta_matrix(self, label, d):
        key = (label, d)
        if key not in self._tm:
            T = self._theta_slice(label, d)
            cols = []
            for row in self._rows[d]:
                img = la.mat_vec(T, list(row), self.field)
                c = _coords(self._rows[d], self._frees[d], img, self.field)
                if c is None:
                    raise NotThetaStable(
                        f"theta element {label!r} does not preserve the "
                        f"syzygies at degree {d}")
                cols.append(c)
            self._tm[key] = la.transpose(cols) if cols else []
        return self._tm[key]


class FreeMod:
    """A graded free R-module with listed generator degrees."""

    def __init__(self, alg, gen_degrees):
        self.alg = alg
        self.J = list(gen_degrees)

    def blocks(self, d):
        out = []
        off = 0
        for k, j in enumerate(self.J):
            size = self.alg.dim(d - j) if d >= j else 0
            out.append((k, off, size))
            off += size
        return out

    def dim(self, d):
        return sum(size for _, _, size in self.blocks(d))

    def rmult(self, e, u, vec, d):
        """Multiply a degree-d slice vector by R_e basis element u."""
        alg = self.alg
        out = [alg.ring.field.zero()] * self.dim(d + e)
        tgt = {k: off for k, off, _ in self.blocks(d + e)}
        for k, off, size in self.blocks(d):
            if size == 0:
                continue
            a = d - self.J[k]
            mc = alg.mult_coords(e, a)
            toff = tgt[k]
            for v in range(size):
                c = vec[off + v]
                if not c:
                    continue
                for i, x in enumerate(mc[u][v]):
                    if x:
                        out[toff + i] = out[toff + i] + c * x
        return out

    def theta_slice(self, label, d, gen_action, rho):
        """Matrix of theta on the degree-d slice, columns are images.

        gen_action: label -> generator-space matrix (columns are images);
        rho(label, e): theta on R_e coordinates."""
        field = self.alg.ring.field
        n = self.dim(d)
        out = [[field.zero()] * n for _ in range(n)]
        blocks = self.blocks(d)
        G = gen_action[label]
        for k, off_k, size_k in blocks:
            if size_k == 0:
                continue
            e = d - self.J[k]
            re = rho(label, e)
            for l, off_l, size_l in blocks:
                if size_l == 0 or self.J[l] != self.J[k]:
                    continue
                g = G[l][k]
                if not g:
                    continue
                for v in range(size_l):
                    for u in range(size_k):
                        c = re[v][u]
                        if c:
                            out[off_l + v][off_k + u] = \
                                out[off_l + v][off_k + u] + g * c
        return out


# ---------------------------------------------------------------------------
# minimal generators, plain and theta-stable
# ---------------------------------------------------------------------------

def _minimal_generators_of(cur, alg, D, theta):
    """Per-degree generator data of a container modulo R_+ . container.

    Returns (degrees, natives, coord_vectors, action) where action is
    None or {label: {degree: matrix on that degree's generators}}."""
    field = cur.field if hasattr(cur, "field") else alg.ring.field
    degrees, natives, coord_vecs = [], [], []
    action = None if theta is None else {lab: {} for lab in theta.labels}
    for d in range(D + 1):
        nd = cur.dim(d)
        if nd == 0:
            continue
        rows = []
        for e in alg.positive_degrees(d):
            for u in range(alg.dim(e)):
                for b in cur.basis(d - e):
                    w = cur.rmult(e, u, list(b), d - e)
                    rows.append(cur.coordinatize(d, w))
        rr, pivots = _rref_rows(rows, field)
        free = [c for c in range(nd) if c not in set(pivots)]
        if not free:
            continue
        if theta is None:
            for pos in free:
                cv = [field.zero()] * nd
                cv[pos] = field.one()
                degrees.append(d)
                coord_vecs.append(cv)
                natives.append(cur.from_coords(d, cv))
            continue
        gen_rows, act_blocks = _theta_stable_complement(
            cur, d, rr, pivots, free, theta, field)
        for cv in gen_rows:
            degrees.append(d)
            coord_vecs.append(cv)
            natives.append(cur.from_coords(d, cv))
        for lab in theta.labels:
            action[lab][d] = act_blocks[lab]
    return degrees, natives, coord_vecs, action


def _theta_stable_complement(cur, d, rr, pivots, free, theta, field):
    """Averaged projector onto a theta-stable complement of span(rr).

    Returns canonical complement basis rows plus per-label action
    matrices on that basis (columns are images)."""
    nd = cur.dim(d)
    zero, one = field.zero(), field.one()
    # p0(e_i) = e_i - sum_r (e_i)[pivot_r] rr_r: kills span(rr), fixes the
    # free coordinates
    p0 = []
    for i in range(nd):
        v = [zero] * nd
        v[i] = one
        for r, pc in enumerate(pivots):
            c = v[pc]
            if c:
                v = [x - c * y for x, y in zip(v, rr[r])]
        p0.append(v)  # rows are images of basis vectors
    p0 = la.transpose(p0)  # columns are images
    tmats = {lab: cur.theta_matrix(lab, d) for lab in theta.labels}
    inv_order = field.coerce(theta.order) ** -1
    acc = la.zeros(nd, nd, field)
    for lab in theta.labels:
        T = tmats[lab]
        Tinv = la.inverse(T, field)
        acc = la.mat_add(acc, la.mat_mul(T, la.mat_mul(
            p0, Tinv, field), field))
    pi = la.scalar_mul(inv_order, acc)
    if not la.mat_eq(la.mat_mul(pi, pi, field), pi):
        raise NotThetaStable(
            "averaged projector is not idempotent; the theta list "
            "is not a group stabilizing the data")
    img_rows = la.transpose(pi)
    gen_rows, gpivots = _rref_rows(img_rows, field)
    if len(gen_rows) != len(free):
        raise NotThetaStable(
            "theta-stable complement has wrong dimension")
    acts = {}
    stacked = rr + gen_rows
    for lab in theta.labels:
        T = tmats[lab]
        cols = []
        for g in gen_rows:
            w = la.mat_vec(T, g, field)
            sol = la.solve(la.transpose(stacked), w, field)
            if sol is None:
                raise NotThetaStable(
                    f"theta element {lab!r} escapes the complement")
            cols.append(sol[len(rr):])
        acts[lab] = la.transpose(cols) if cols else []
    return gen_rows, acts


def minimal_generators(M, R, D=None):
    """Degreewise bases of M modulo R_+ . M (ambient vectors)."""
    view = _as_view(M)
    D = view.D if D is None else min(D, view.D, R.D)
    cur = _ModuleAdapter(view, R)
    degrees, natives, _, _ = _minimal_generators_of(cur, R, D, None)
    by_degree, counts = {}, {}
    for d, v in zip(degrees, natives):
        by_degree.setdefault(d, []).append(v)
        counts[d] = counts.get(d, 0) + 1
    return {"counts": counts, "by_degree": by_degree}


# ---------------------------------------------------------------------------
# the syzygy engine
# ---------------------------------------------------------------------------

class TruncatedResolution:
    """A minimal free resolution computed through internal degree D."""

    def __init__(self, alg, D, gen_degrees, gen_vectors, free_mods,
                 maps_cols, kernels, theta_labels=None, gen_actions=None):
        self.alg = alg
        self.D = D
        self.gen_degrees = gen_degrees      # per i: list of degrees
        self.gen_vectors = gen_vectors      # per i: natives in target
        self.free_mods = free_mods
        self._maps_cols = maps_cols         # per i, per d: image columns
        self._kernels = kernels             # per i, per d: (rows, frees)
        self.theta_labels = theta_labels
        self.gen_actions = gen_actions      # per i: {label: {d: matrix}}

    @property
    def length(self):
        return len(self.gen_degrees) - 1

    def betti(self):
        out = {}
        for i, degs in enumerate(self.gen_degrees):
            for d in degs:
                out[(i, d)] = out.get((i, d), 0) + 1
        return out

    def differential_columns(self, i, d):
        return self._maps_cols[i][d]

    def tor_table(self, trace_fn=None):
        """trace_fn(label, matrix, field, degree) may replace the plain
        trace, e.g. with a Brauer-lifted one."""
        dims = self.betti()
        field = self.alg.ring.field
        tr = trace_fn if trace_fn is not None else _plain_trace
        chars = None
        if self.theta_labels is not None:
            chars = {}
            for i, acts in enumerate(self.gen_actions):
                degs = sorted(set(self.gen_degrees[i]))
                for d in degs:
                    vals = {}
                    for lab in self.theta_labels:
                        block = acts[lab].get(d, [])
                        vals[lab] = tr(lab, block, field, d)
                    chars[(i, d)] = vals
        m = max((i for i, degs in enumerate(self.gen_degrees) if degs),
                default=0)
        hd = f"hd <= {m} within truncation D={self.D}"
        return TorTable(dims, self.D, hd, chars=chars,
                        labels=self.theta_labels, engine="syzygy")

    def verify(self):
        """Re-check d.d = 0, exactness, minimality, mindeg growth."""
        field = self.alg.ring.field
        out = {"complex": True, "exact": True, "minimal": True,
               "mindeg": True}
        for i in range(1, len(self.gen_degrees)):
            J, Jprev = self.gen_degrees[i], self.gen_degrees[i - 1]
            if J and Jprev and min(J) <= min(Jprev):
                out["mindeg"] = False
            # minimality: no R_0 component between equal-degree generators
            F_prev = self.free_mods[i - 1]
            for k, vec in enumerate(self.gen_vectors[i]):
                for l, off, size in F_prev.blocks(J[k]):
                    if Jprev[l] == J[k] and size and vec[off]:
                        out["minimal"] = False
        for i in range(1, len(self.gen_degrees)):
            for d in range(self.D + 1):
                cols = self._maps_cols[i][d]
                prev_cols = self._maps_cols[i - 1][d]
                for col in cols:
                    acc = [field.zero()] * (len(prev_cols[0])
                                            if prev_cols else 0)
                    for idx, c in enumerate(col):
                        if c and prev_cols:
                            acc = [x + c * y for x, y in
                                   zip(acc, prev_cols[idx])]
                    if any(acc):
                        out["complex"] = False
                rank_i = la.rank(cols, field) if cols else 0
                ker_prev = len(self._kernels[i - 1][d][0]) \
                    if self._kernels[i - 1][d] else 0
                if rank_i != ker_prev:
                    out["exact"] = False
        return out


def truncated_minimal_resolution(M, R, D=None, theta=None):
    """Iterated syzygies with minimal, optionally theta-stable, covers."""
    view = _as_view(M)
    D = view.D if D is None else min(D, view.D, R.D)
    field = view.ring.field
    if theta is not None:
        p = _field_char(field)
        if p and theta.order % p == 0:
            raise ThetaNotSemisimple(
                f"|Theta| = {theta.order} is divisible by char {p}")
        if theta.udim != view.udim:
            raise HomologyError("theta udim does not match the module")
    cur = _ModuleAdapter(view, R, theta)
    rho_cache = {}

    def rho(label, e):
        key = (label, e)
        if key not in rho_cache:
            A = theta.ambient_v(label, e)
            cols = []
            for row in R.basis_rows(e):
                img = la.mat_vec(A, list(row), field)
                c = R.coord(e, img)
                if c is None:
                    raise NotThetaStable(
                        f"theta element {label!r} does not preserve R_{e}")
                cols.append(c)
            rho_cache[key] = la.transpose(cols) if cols else []
        return rho_cache[key]

    gen_degrees, gen_vectors, free_mods = [], [], []
    maps_cols, kernels, gen_actions = [], [], []
    for i in range(D + 2):
        degrees, natives, coord_vecs, action = _minimal_generators_of(
            cur, R, D, theta)
        if not degrees:
            break
        F = FreeMod(R, degrees)
        # slice maps F -> cur, columns are images in cur coordinates;
        # natives kept too for the next stage's kernels
        cols_by_deg, native_cols_by_deg = [], []
        for d in range(D + 1):
            cols, ncols = [], []
            for k, off, size in F.blocks(d):
                if size == 0:
                    continue
                e = d - degrees[k]
                for u in range(size):
                    if e == 0:
                        w = list(natives[k])
                    else:
                        w = cur.rmult(e, u, natives[k], degrees[k])
                    ncols.append(cur.stored_image(d, w))
                    cols.append(cur.coordinatize(d, w))
            cols_by_deg.append(cols)
            native_cols_by_deg.append(ncols)
        ker_by_deg, frees_by_deg = [], []
        for d in range(D + 1):
            nd = F.dim(d)
            mat = la.transpose(cols_by_deg[d]) if cols_by_deg[d] else []
            kb, fr = _nullspace_with_frees(mat, nd, field)
            if nd == 0:
                kb, fr = [], []
            ker_by_deg.append(kb)
            frees_by_deg.append(fr)
        gen_degrees.append(degrees)
        gen_vectors.append(natives)
        free_mods.append(F)
        maps_cols.append(native_cols_by_deg)
        kernels.append(list(zip(ker_by_deg, frees_by_deg)))
        gen_actions.append(action)
        if theta is not None:
            gen_act_full = {}
            for lab in theta.labels:
                n = len(degrees)
                Gm = [[field.zero()] * n for _ in range(n)]
                for d, block in action[lab].items():
                    idxs = [k for k, dg in enumerate(degrees) if dg == d]
                    for a, ka in enumerate(idxs):
                        for b, kb_ in enumerate(idxs):
                            Gm[ka][kb_] = block[a][b]
                gen_act_full[lab] = Gm

            def theta_slice(label, d, F=F, ga=gen_act_full):
                return F.theta_slice(label, d, ga, rho)
        else:
            theta_slice = None
        cur = _KernelAdapter(F, ker_by_deg, frees_by_deg, theta_slice)
        if all(len(kb) == 0 for kb in ker_by_deg):
            break
    return TruncatedResolution(
        R, D, gen_degrees, gen_vectors, free_mods, maps_cols, kernels,
        theta_labels=None if theta is None else list(theta.labels),
        gen_actions=None if theta is None else gen_actions)


# ---------------------------------------------------------------------------
# the Koszul engine
# ---------------------------------------------------------------------------

class TorTable:
    """Graded Betti numbers with optional theta characters."""

    def __init__(self, dims, D, hd_report, chars=None, labels=None,
                 engine=""):
        self.dims = {k: int(v) for k, v in dims.items() if v}
        self.D = D
        self.hd_report = hd_report
        self.chars = chars
        self.labels = labels
        self.engine = engine

    def dim(self, i, j):
        return self.dims.get((i, j), 0)

    def character(self, i, j):
        if self.chars is None:
            return None
        return self.chars.get((i, j))

    @property
    def max_i(self):
        return max((i for i, _ in self.dims), default=0)

    def betti_layout(self):
        """Macaulay-style layout: rows are j - i, columns are i."""
        imax = self.max_i
        rmax = max((j - i for i, j in self.dims), default=0)
        cols = list(range(imax + 1))
        totals = [sum(v for (i, _), v in self.dims.items() if i == c)
                  for c in cols]
        cells = []
        for r in range(rmax + 1):
            row = []
            for c in cols:
                v = self.dims.get((c, c + r), 0)
                row.append(str(v) if v else ".")
            cells.append(row)
        w = max([len(str(c)) for c in cols] +
                [len(x) for row in cells for x in row] +
                [len(str(t)) for t in totals] + [1]) + 2
        lab = max(len(f"{rmax}:"), len("total:")) + 1
        lines = [" " * lab + "".join(str(c).rjust(w) for c in cols)]
        lines.append("total:".rjust(lab) +
                     "".join(str(t).rjust(w) for t in totals))
        for r in range(rmax + 1):
            lines.append(f"{r}:".rjust(lab) +
                         "".join(x.rjust(w) for x in cells[r]))
        return "\n".join(lines)

    def to_csv(self):
        labels = self.labels or []
        header = ["i", "j", "dim"] + [f"chi[{lab}]" for lab in labels]
        lines = [",".join(header)]
        for (i, j) in sorted(self.dims):
            row = [str(i), str(j), str(self.dims[(i, j)])]
            if self.chars is not None:
                vals = self.chars.get((i, j), {})
                row += [str(vals.get(lab, 0)) for lab in labels]
            lines.append(",".join(row))
        return "\n".join(lines)


def _plain_trace(label, mat, field, degree):
    return la.trace(mat, field) if mat else field.zero()


def koszul_tor(M, R, D=None, theta=None, trace_fn=None):
    """Tor_i(M, k) via M (x) Lambda(e_1..e_n), f_s acting by multiplication.

    Valid in every characteristic; the theta action on homology is the
    honest subquotient action. trace_fn(label, matrix, field, degree)
    replaces the plain trace on each homology cell when given."""
    if not R.is_polynomial:
        raise HomologyError("the Koszul engine needs a polynomial "
                            "normalization")
    view = _as_view(M)
    D = view.D if D is None else min(D, view.D, R.D)
    ring, field = view.ring, view.ring.field
    n = len(R.gens)
    degs = R.gen_degrees
    fvecs = [_vec_obj(ring, pa.poly_to_vec(ring, f, dg))
             for f, dg in zip(R.gens, degs)]
    adapter = _ModuleAdapter(view, R, theta)
    scalars = None
    if theta is not None:
        if theta.udim != view.udim:
            raise HomologyError("theta udim does not match the module")
        scalars = {}
        for lab in theta.labels:
            lams = []
            for s in range(n):
                A = theta.ambient_v(lab, degs[s])
                img = la.mat_vec(A, fvecs[s], field)
                lam = None
                for x, y in zip(img, fvecs[s]):
                    if y:
                        lam = x / y
                        break
                if lam is None or [lam * y for y in fvecs[s]] != img:
                    raise NotThetaStable(
                        f"theta element {lab!r} does not scale generator "
                        f"{s}")
                lams.append(lam)
            scalars[lab] = lams

    def slice_blocks(i, j):
        out, off = [], 0
        for S in combinations(range(n), i):
            dS = sum(degs[s] for s in S)
            if dS > j:
                continue
            mdim = view.dim(j - dS)
            if mdim == 0:
                continue
            out.append((S, off, mdim, j - dS))
            off += mdim
        return out, off

    # differential columns per (i, j): images in slice (i-1, j) coordinates
    def boundary(i, j, blocks_i, blocks_prev):
        pos_prev = {}
        for S, off, mdim, jm in blocks_prev:
            pos_prev[S] = (off, mdim, jm)
        total_prev = sum(m for _, _, m, _ in blocks_prev)
        cols = []
        for S, off, mdim, jm in blocks_i:
            for idx in range(mdim):
                mvec = view.rows(jm)[idx]
                col = [field.zero()] * total_prev
                for r, s in enumerate(S):
                    Sm = tuple(x for x in S if x != s)
                    w = _rmult_ambient(ring, view.udim, fvecs[s],
                                       degs[s], mvec, jm)
                    c = view.coord(jm + degs[s], w)
                    if c is None:
                        raise NotAnRModule(
                            f"f_{s} pushes the module out of itself "
                            f"at degree {jm}")
                    if Sm not in pos_prev:
                        continue
                    poff, _, pjm = pos_prev[Sm]
                    for t, x in enumerate(c):
                        if x:
                            if r % 2:
                                col[poff + t] = col[poff + t] - x
                            else:
                                col[poff + t] = col[poff + t] + x
                cols.append(col)
        return cols

    dims_out, chars_out = {}, ({} if theta is not None else None)
    hd_seen = 0
    for j in range(D + 1):
        blocks = [slice_blocks(i, j) for i in range(n + 2)]
        bnd = [None] * (n + 2)
        for i in range(1, n + 2):
            if blocks[i][1]:
                bnd[i] = boundary(i, j, blocks[i][0], blocks[i - 1][0])
            else:
                bnd[i] = []
        for i in range(n + 1):
            dim_i = blocks[i][1]
            if dim_i == 0:
                continue
            if i == 0:
                ker_rows = la.identity(dim_i, field)
                frees = list(range(dim_i))
            else:
                mat = la.transpose(bnd[i]) if bnd[i] else []
                ker_rows, frees = _nullspace_with_frees(mat, dim_i, field)
            im_cols = bnd[i + 1]
            im_rrows, im_piv = _rref_rows(im_cols, field) if im_cols \
                else ([], [])
            tor = len(ker_rows) - len(im_rrows)
            if tor < 0:
                raise HomologyError("image larger than kernel; broken "
                                    "complex")
            if tor:
                dims_out[(i, j)] = tor
                hd_seen = max(hd_seen, i)
            if theta is not None and tor:
                comp = _complement_in(ker_rows, im_rrows, field)
                T = _koszul_theta_slice(adapter, blocks[i][0], scalars,
                                        theta, j, field)
                vals = {}
                stacked = im_rrows + comp
                tr_hook = trace_fn if trace_fn is not None else _plain_trace
                for lab in theta.labels:
                    Tl = T[lab]
                    cell_cols = []
                    for g in comp:
                        w = la.mat_vec(Tl, g, field)
                        sol = la.solve(la.transpose(stacked), w, field)
                        if sol is None:
                            raise NotThetaStable(
                                f"theta element {lab!r} escapes the "
                                f"homology subquotient at ({i}, {j})")
                        cell_cols.append(sol[len(im_rrows):])
                    cell = la.transpose(cell_cols) if cell_cols else []
                    vals[lab] = tr_hook(lab, cell, field, j)
                chars_out[(i, j)] = vals
    hd = f"hd <= {hd_seen} within truncation D={D}"
    return TorTable(dims_out, D, hd, chars=chars_out,
                    labels=None if theta is None else list(theta.labels),
                    engine="koszul")


def _complement_in(ker_rows, im_rrows, field):
    """Deterministic complement of span(im) inside span(ker)."""
    comp, cur = [], [list(r) for r in im_rrows]
    rank = len(im_rrows)
    for v in ker_rows:
        trial = cur + [list(v)]
        if la.rank(trial, field) > rank:
            comp.append(list(v))
            cur = trial
            rank += 1
    return comp


def _koszul_theta_slice(adapter, blocks_i, scalars, theta, j, field):
    """Per-label matrices of theta on a Koszul slice (columns are images)."""
    total = sum(m for _, _, m, _ in blocks_i)
    out = {}
    for lab in theta.labels:
        T = [[field.zero()] * total for _ in range(total)]
        for S, off, mdim, jm in blocks_i:
            lamS = field.one()
            for s in S:
                lamS = lamS * scalars[lab][s]
            Tm = adapter.theta_matrix(lab, jm)
            for a in range(mdim):
                for b in range(mdim):
                    c = Tm[a][b]
                    if c:
                        T[off + a][off + b] = lamS * c
        out[lab] = T
    return out


# ---------------------------------------------------------------------------
# Euler characteristic series
# ---------------------------------------------------------------------------

def euler_character_series(M, R, theta, D=None, trace_fn=None):
    """Per-label truncated series of sum_i (-1)^i [Tor_i](t) = [M](t)/[R](t).

    trace_fn(label, matrix, field, degree) may replace the plain trace
    (e.g. with a Brauer-lifted one); the default is the honest trace in
    the coefficient field."""
    view = _as_view(M)
    D = view.D if D is None else min(D, view.D, R.D)
    field = view.ring.field
    adapter = _ModuleAdapter(view, R, theta)

    def tr(label, mat, dg):
        if trace_fn is not None:
            return trace_fn(label, mat, field, dg)
        return la.trace(mat, field) if mat else field.zero()

    r_view = algebra_as_module(R)
    out = {}
    for lab in theta.labels:
        mvals, rvals = [], []
        for d in range(D + 1):
            mat = adapter.theta_matrix(lab, d) if view.dim(d) else []
            mvals.append(tr(lab, mat, d))
            A = theta.ambient_v(lab, d)
            cols = []
            for row in r_view.rows(d):
                img = la.mat_vec(A, list(row), field)
                c = R.coord(d, img)
                if c is None:
                    raise NotThetaStable(
                        f"theta element {lab!r} does not preserve R_{d}")
                cols.append(c)
            rmat = la.transpose(cols) if cols else []
            rvals.append(tr(lab, rmat, d))
        out[lab] = TruncatedSeries(mvals).divide(TruncatedSeries(rvals))
    return out

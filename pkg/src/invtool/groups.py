"""Finite matrix groups by closure enumeration.

Elements, orders, conjugacy classes with p-regularity, eigenvalues over a
splitting carrier, regular-element certificates, and coset spaces H\\G with
commuting left/right actions. Everything is deterministic: breadth-first
element order, minimal-index class representatives, fixed search sweeps.
"""

import itertools
from math import gcd

from . import linalg as la
from .numbers import (
    QQ,
    BrauerLiftContext,
    Char0LiftContext,
    CyclotomicField,
    CyclotomicNumber,
    FieldEmbedding,
    FiniteField,
    FiniteFieldElement,
    element_order as scalar_order,
    lcm,
)

DEFAULT_CAP = 10_000


class GroupError(Exception):
    pass


class CapExceeded(GroupError):
    pass


class NotInvertible(GroupError):
    pass


class NotRegular(GroupError):
    pass


def freeze(mat):
    return tuple(tuple(row) for row in mat)


def field_of_matrix(mat):
    for row in mat:
        for x in row:
            if isinstance(x, FiniteFieldElement):
                return x.field
            if isinstance(x, CyclotomicNumber):
                return x.field
    return QQ


class MatrixGroup:
    """A finite subgroup of GL_n, fully enumerated.

    elements[0] is the identity; the element list is the breadth-first
    closure from the identity in the given generator order."""

    def __init__(self, field, dim, generators, elements, index):
        self.field = field
        self.dim = dim
        self.generators = generators
        self.elements = elements
        self.index = index
        self.gen_indices = [index[freeze(g)] for g in generators]
        self._mul = {}
        self._inv = {}
        self._orders = {}
        self._classes = {}
        self._split = {}

    def __len__(self):
        return len(self.elements)

    @property
    def order(self):
        return len(self.elements)

    def element(self, i):
        return self.elements[i]

    def index_of(self, mat):
        key = freeze(mat)
        if key not in self.index:
            raise GroupError("matrix is not a group member")
        return self.index[key]

    def mul_index(self, i, j):
        key = (i, j)
        r = self._mul.get(key)
        if r is None:
            prod = la.mat_mul(self.elements[i], self.elements[j], self.field)
            r = self.index[freeze(prod)]
            self._mul[key] = r
        return r

    def inverse_index(self, i):
        r = self._inv.get(i)
        if r is None:
            # i has finite order, so walk the cyclic group it generates
            j, prev = i, 0
            while j != 0:
                prev = j
                j = self.mul_index(j, i)
            r = prev if i != 0 else 0
            self._inv[i] = r
        return r

    def element_order(self, i):
        r = self._orders.get(i)
        if r is None:
            n, j = 1, i
            while j != 0:
                j = self.mul_index(j, i)
                n += 1
            r = n if i != 0 else 1
            self._orders[i] = r
        return r

    def exponent(self, p_regular_only=None):
        """lcm of element orders; with a prime given, of their p'-parts."""
        m = 1
        for i in range(len(self.elements)):
            d = self.element_order(i)
            if p_regular_only:
                d = _p_prime_part(d, p_regular_only)
            m = lcm(m, d)
        return m

    # --- conjugacy -------------------------------------------------------

    def conjugacy_classes(self, char=0):
        """Class table: list of dicts with rep, members, order, p_regular."""
        if char in self._classes:
            return self._classes[char]
        n = len(self.elements)
        unassigned = [True] * n
        gen_invs = [self.inverse_index(g) for g in self.gen_indices]
        classes = []
        for start in range(n):
            if not unassigned[start]:
                continue
            orbit = [start]
            unassigned[start] = False
            queue = [start]
            while queue:
                x = queue.pop(0)
                for g, gi in zip(self.gen_indices, gen_invs):
                    y = self.mul_index(self.mul_index(g, x), gi)
                    if unassigned[y]:
                        unassigned[y] = False
                        orbit.append(y)
                        queue.append(y)
            d = self.element_order(start)
            classes.append({
                "rep": start,
                "members": sorted(orbit),
                "order": d,
                "size": len(orbit),
                "p_regular": char == 0 or gcd(d, char) == 1,
            })
        self._classes[char] = classes
        return classes

    def class_of(self, i, char=0):
        for idx, cl in enumerate(self.conjugacy_classes(char)):
            if i in cl["members"]:
                return idx
        raise GroupError("element not in any class")

    # --- eigen data ------------------------------------------------------

    def splitting_context(self, char=0):
        """(carrier field, embed fn, lift context) splitting all p-regular
        eigenvalues of the group at once."""
        if char in self._split:
            return self._split[char]
        if char == 0:
            m = 1
            for cl in self.conjugacy_classes(0):
                m = lcm(m, cl["order"])
            if m > 2:
                E = CyclotomicField(m)
            else:
                E = QQ
            ctx = Char0LiftContext(m)
            result = (E, lambda x: E.coerce(x), ctx)
        else:
            F = self.field
            m = 1
            for cl in self.conjugacy_classes(char):
                m = lcm(m, _p_prime_part(cl["order"], char))
            s = 1
            while (F.q ** s - 1) % m != 0:
                s += 1
            E = F if s == 1 else FiniteField(F.p, F.k * s)
            emb = (lambda x: x) if s == 1 else FieldEmbedding(F, E)
            ctx = BrauerLiftContext(E, m)
            result = (E, emb, ctx)
        self._split[char] = result
        return result

    def eigenvalues(self, i, char=0):
        """Eigen data of element i over the splitting carrier.

        Returns dict: pairs [(value, multiplicity)], order, semisimple flag,
        carrier, warning (None when clean)."""
        E, emb, ctx = self.splitting_context(char)
        g = self.elements[i]
        d = self.element_order(i)
        dp = d if char == 0 else _p_prime_part(d, char)
        gE = [[emb(x) if char != 0 else E.coerce(x) for x in row] for row in g]
        cp = la.charpoly(gE, E)
        # scan the group of dp-th roots of unity inside the carrier
        if char == 0:
            base = E.zeta(ctx.m // dp) if isinstance(E, CyclotomicField) \
                else E.coerce(-1 if dp == 2 else 1)
        else:
            base = ctx.xi ** (ctx.m // dp)
        pairs = []
        poly = list(cp)
        lam = E.one()
        seen = set()
        for j in range(dp):
            if j:
                lam = lam * base
            key = repr(lam)
            if key in seen:
                continue
            seen.add(key)
            mult = 0
            while len(poly) > 1:
                q, rem = _synth_div(poly, lam, E)
                if rem:
                    break
                poly = q
                mult += 1
            if mult:
                pairs.append((lam, mult))
        total = sum(m for _, m in pairs)
        if total != self.dim:
            raise GroupError(
                f"characteristic polynomial failed to split (got {total} of "
                f"{self.dim} roots); splitting context too small")
        # semisimple iff the product of (g - lam) over distinct roots vanishes
        prod = la.identity(self.dim, E)
        for lam, _ in pairs:
            shifted = [[gE[r][c] - (lam if r == c else E.zero())
                        for c in range(self.dim)] for r in range(self.dim)]
            prod = la.mat_mul(prod, shifted, E)
        semisimple = all(not x for row in prod for x in row)
        warning = None
        if not semisimple:
            warning = ("element is not semisimple; values are roots of the "
                       "characteristic polynomial with multiplicity")
        return {
            "pairs": pairs,
            "order": d,
            "semisimple": semisimple,
            "carrier": E,
            "warning": warning,
            "lift_context": ctx,
        }

    def __repr__(self):
        return (f"MatrixGroup(order={len(self.elements)}, dim={self.dim}, "
                f"field={self.field!r})")


def _p_prime_part(d, p):
    while d % p == 0:
        d //= p
    return d


def _synth_div(poly, lam, field):
    """Divide poly (ascending coeffs) by (x - lam); returns (quotient, rem)."""
    n = len(poly) - 1
    b = [field.zero()] * n
    b[n - 1] = poly[n]
    for i in range(n - 1, 0, -1):
        b[i - 1] = poly[i] + lam * b[i]
    rem = poly[0] + lam * b[0]
    return b, rem


def generate_group(gens, cap=DEFAULT_CAP, field=None, dim=None):
    """Breadth-first closure of the generator set; deterministic order."""
    if not gens:
        if field is None or dim is None:
            raise GroupError("empty generator list needs field and dim")
        ident = la.identity(dim, field)
        key = freeze(ident)
        return MatrixGroup(field, dim, [], [ident], {key: 0})
    field = field or field_of_matrix(gens[0])
    dim = len(gens[0])
    gens = [[[field.coerce(x) for x in row] for row in g] for g in gens]
    for g in gens:
        if not la.det(g, field):
            raise NotInvertible("singular generator")
    ident = la.identity(dim, field)
    elements = [ident]
    index = {freeze(ident): 0}
    queue = [0]
    while queue:
        i = queue.pop(0)
        e = elements[i]
        for g in gens:
            w = la.mat_mul(e, g, field)
            key = freeze(w)
            if key not in index:
                if len(elements) >= cap:
                    raise CapExceeded(f"closure exceeds cap {cap}")
                index[key] = len(elements)
                elements.append(w)
                queue.append(index[key])
    return MatrixGroup(field, dim, gens, elements, index)


# ---------------------------------------------------------------------------
# named constructors
# ---------------------------------------------------------------------------

def cyclic_scalar_group(n, dim, field=None):
    """The scalar group generated by zeta_n * I."""
    if field is None or field is QQ or isinstance(field, CyclotomicField):
        if n == 1:
            base = QQ if field is None else field
            return generate_group([], field=base, dim=dim)
        if n == 2:
            base = QQ if field is None else field
            z = base.coerce(-1)
        else:
            base = CyclotomicField(n) if field is None \
                or not isinstance(field, CyclotomicField) else field
            z = base.coerce(CyclotomicField(n).zeta())
        gen = la.scalar_mul(z, la.identity(dim, base))
        return generate_group([gen], field=base, dim=dim)
    if (field.q - 1) % n != 0:
        raise GroupError(f"mu_{n} is not inside {field}")
    z = field.generator() ** ((field.q - 1) // n)
    gen = la.scalar_mul(z, la.identity(dim, field))
    return generate_group([gen], field=field, dim=dim)


def symmetric_group(n, field=None):
    """S_n as n x n permutation matrices (adjacent transpositions)."""
    field = field or QQ
    gens = []
    for t in range(n - 1):
        m = la.identity(n, field)
        m[t][t] = field.zero()
        m[t + 1][t + 1] = field.zero()
        m[t][t + 1] = field.one()
        m[t + 1][t] = field.one()
        gens.append(m)
    if not gens:
        return generate_group([], field=field, dim=max(n, 1))
    return generate_group(gens, field=field)


def dihedral_group(n, field=None):
    """Dihedral group of order 2n: diag(zeta, zeta^-1) and the swap."""
    if field is None:
        field = CyclotomicField(n) if n > 2 else QQ
    if isinstance(field, FiniteField):
        if (field.q - 1) % n != 0:
            raise GroupError(f"mu_{n} is not inside {field}")
        z = field.generator() ** ((field.q - 1) // n)
    else:
        z = field.coerce(CyclotomicField(n).zeta()) if n > 2 \
            else field.coerce(-1 if n == 2 else 1)
    zero, one = field.zero(), field.one()
    rot = [[z, zero], [zero, z ** -1]]
    swap = [[zero, one], [one, zero]]
    return generate_group([rot, swap], field=field)


# ---------------------------------------------------------------------------
# regular-element certificates
# ---------------------------------------------------------------------------

def _stabilizer_trivial(G, v, field, embed=None):
    for i in range(1, len(G.elements)):
        g = G.elements[i]
        if embed is not None:
            g = [[embed(x) for x in row] for row in g]
        if la.mat_vec(g, v, field) == v:
            return False
    return True


def find_regular_certificate(G, i, omega, sweep_bound=6):
    """Search the omega-eigenspace of element i for a vector with trivial
    stabilizer; deterministic sweep. Raises NotRegular when exhausted."""
    g = G.elements[i]
    field = G.field
    # carrier of omega may be an extension of the group field
    if isinstance(omega, CyclotomicNumber):
        E = omega.field
        if field is QQ:
            embed = lambda x: E.coerce(x)
        elif isinstance(field, CyclotomicField):
            embed = lambda x: E.coerce(x)
        else:
            raise GroupError("cyclotomic eigenvalue over a finite-field group")
    elif isinstance(omega, FiniteFieldElement):
        E = omega.field
        if E is field:
            embed = lambda x: x
        else:
            embed = FieldEmbedding(field, E)
    else:
        E = field
        omega = field.coerce(omega)
        embed = lambda x: x
    gE = [[embed(x) for x in row] for row in g]
    shifted = [[gE[r][c] - (omega if r == c else E.zero())
                for c in range(G.dim)] for r in range(G.dim)]
    basis = la.nullspace(shifted, G.dim, E)
    if not basis:
        raise GroupError(f"{omega!r} is not an eigenvalue of element {i}")
    emb_for_stab = None if E is field else embed
    tried = 0
    if isinstance(E, FiniteField):
        candidates = itertools.product(E.elements(), repeat=len(basis))
    else:
        candidates = _integer_sweeps(len(basis), sweep_bound)
    for count, coeffs in enumerate(candidates):
        if count > 200_000:
            break
        v = [E.zero()] * G.dim
        any_nonzero = False
        for c, b in zip(coeffs, basis):
            c = E.coerce(c)
            if c:
                any_nonzero = True
                v = [x + c * y for x, y in zip(v, b)]
        if not any_nonzero:
            continue
        tried += 1
        if _stabilizer_trivial(G, v, E, emb_for_stab):
            return {
                "element": i,
                "eigenvalue": omega,
                "eigenvalue_order": scalar_order(omega),
                "vector": v,
                "carrier": E,
                "orbit_size": len(G.elements),
                "tried": tried,
            }
    raise NotRegular(
        f"no regular eigenvector found for element {i} at {omega!r} "
        f"({tried} candidates searched; search is not a proof of absence)")


def _integer_sweeps(r, bound):
    """Integer coefficient tuples in a deterministic by-max-norm order."""
    out = []
    for b in range(1, bound + 1):
        span = list(range(-b, b + 1))
        stack = [[]]
        for _ in range(r):
            stack = [s + [c] for s in stack for c in span]
        for tup in stack:
            if max((abs(c) for c in tup), default=0) == b:
                out.append(tup)
    return out


# ---------------------------------------------------------------------------
# coset spaces
# ---------------------------------------------------------------------------

class CosetSpace:
    """Right cosets H\\G with a right G-action (Hg . x = Hgx) and, for
    normalizer members, a commuting left action (gamma . Hg = H gamma g).
    An optional designated element c drives fixed-point counts."""

    def __init__(self, G, h_indices, c=None):
        self.G = G
        self.H = sorted(set(h_indices))
        hset = set(self.H)
        if 0 not in hset:
            raise GroupError("H must contain the identity")
        for a in self.H:
            for b in self.H:
                if G.mul_index(a, b) not in hset:
                    raise GroupError("H is not closed under multiplication")
        seen = {}
        reps = []
        for i in range(len(G.elements)):
            if i in seen:
                continue
            coset = sorted(G.mul_index(h, i) for h in self.H)
            for m in coset:
                seen[m] = len(reps)
            reps.append(coset[0])
        self.reps = reps
        self.coset_of = seen  # element index -> coset number
        self.c = c

    def __len__(self):
        return len(self.reps)

    def right_action(self, x):
        """Permutation: coset number -> coset number under Hg -> Hgx."""
        return [self.coset_of[self.G.mul_index(r, x)] for r in self.reps]

    def left_action(self, gamma):
        """Hg -> H(gamma g); well-defined only for gamma normalizing H."""
        if not self.normalizes(gamma):
            raise GroupError("left action needs a normalizer element")
        return [self.coset_of[self.G.mul_index(gamma, r)] for r in self.reps]

    def normalizes(self, gamma):
        gi = self.G.inverse_index(gamma)
        hset = set(self.H)
        return all(
            self.G.mul_index(self.G.mul_index(gamma, h), gi) in hset
            for h in self.H)

    def fixed_points(self, j, c=None):
        """|X^(c^j)|: cosets with H g c^j = H g."""
        c = self.c if c is None else c
        if c is None:
            raise GroupError("no designated c element")
        cj = 0
        for _ in range(j):
            cj = self.G.mul_index(cj, c)
        perm = self.right_action(cj)
        return sum(1 for k, img in enumerate(perm) if img == k)


def coset_fixed_points(X, j):
    return X.fixed_points(j)

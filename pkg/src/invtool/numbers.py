"""Exact number carriers: Q, cyclotomic fields Q(zeta_m), finite fields GF(p^k),
and the lift from roots of unity in characteristic p to cyclotomic numbers.

All values are immutable; all operations are pure. Hashes of cyclotomic numbers
are consistent within a fixed conductor (rational-valued elements hash like
their Fraction in every conductor), which is all the containers here rely on.
"""

from fractions import Fraction
from math import gcd

LCM_CAP = 10_000
TABLE_LIMIT = 1024


class NumbersError(Exception):
    pass


class NotARootOfUnity(NumbersError):
    pass


class NotInRootGroup(NumbersError):
    pass


class ConductorMismatch(NumbersError):
    pass


class NotIrreducible(NumbersError):
    pass


def lcm(a, b):
    return a // gcd(a, b) * b


# ---------------------------------------------------------------------------
# rationals
# ---------------------------------------------------------------------------

def parse_rational(s):
    """Parse "a/b" or "a" into a Fraction (lowest terms, denominator > 0)."""
    return Fraction(str(s).strip())


class RationalField:
    """The field Q, as a field-descriptor object (elements are Fraction)."""

    characteristic = 0

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return parse_rational(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


QQ = RationalField()


# ---------------------------------------------------------------------------
# integer polynomial helpers (dense lists, index = exponent)
# ---------------------------------------------------------------------------

def _trim(poly):
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def _int_poly_div_exact(num, den):
    """Exact division of integer polynomials; raises if not exact."""
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        if c % den[-1] != 0:
            raise ArithmeticError("non-exact polynomial division")
        c //= den[-1]
        q[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return q


_CYCLOTOMIC_CACHE = {}


def cyclotomic_polynomial(m):
    """Coefficients of Phi_m as a tuple of ints, by the divisibility recursion
    on x^m - 1."""
    if m in _CYCLOTOMIC_CACHE:
        return _CYCLOTOMIC_CACHE[m]
    if m < 1:
        raise ValueError("conductor must be >= 1")
    poly = [0] * (m + 1)
    poly[0], poly[m] = -1, 1
    for d in range(1, m):
        if m % d == 0:
            poly = _int_poly_div_exact(poly, cyclotomic_polynomial(d))
    result = tuple(poly)
    _CYCLOTOMIC_CACHE[m] = result
    return result


# ---------------------------------------------------------------------------
# cyclotomic fields
# ---------------------------------------------------------------------------

_CYC_FIELDS = {}


class CyclotomicField:
    """Q(zeta_m) in the power basis of zeta_m modulo Phi_m."""

    characteristic = 0

    def __new__(cls, m):
        if m in _CYC_FIELDS:
            return _CYC_FIELDS[m]
        self = super().__new__(cls)
        _CYC_FIELDS[m] = self
        return self

    def __init__(self, m):
        if getattr(self, "_ready", False):
            return
        self.m = m
        self.phi = cyclotomic_polynomial(m)
        self.degree = len(self.phi) - 1
        # reduction rows: coefficients of t^e mod Phi_m for
        # e = degree .. max(2*degree-2, m-1) (products and zeta powers)
        rows = []
        top_exp = max(2 * self.degree - 2, m - 1)
        if self.degree > 0 and top_exp >= self.degree:
            lead = Fraction(self.phi[-1])  # = 1
            base = [-Fraction(c) / lead for c in self.phi[:-1]]
            rows.append(tuple(base))
            prev = base
            for _ in range(top_exp - self.degree):
                nxt = [Fraction(0)] + prev[:-1]
                top = prev[-1]
                if top:
                    nxt = [nxt[i] + top * base[i] for i in range(self.degree)]
                rows.append(tuple(nxt))
                prev = nxt
        self._red = rows
        self._ready = True

    def zero(self):
        return CyclotomicNumber(self, (Fraction(0),) * self.degree)

    def one(self):
        return self.coerce(1)

    def coerce(self, x):
        if isinstance(x, CyclotomicNumber):
            if x.field.m == self.m:
                return x
            return cyclotomic_embed(x, self.m)
        if isinstance(x, str):
            return self.parse(x)
        x = Fraction(x)
        coeffs = [Fraction(0)] * self.degree
        coeffs[0] = x
        return CyclotomicNumber(self, tuple(coeffs))

    def zeta(self, j=1):
        """zeta_m^j as an element."""
        j %= self.m
        coeffs = [Fraction(0)] * (j + 1)
        coeffs[j] = Fraction(1)
        return self.element(coeffs)

    def element(self, coeffs):
        """Element from a coefficient list (any length; reduced mod Phi_m)."""
        coeffs = [Fraction(c) for c in coeffs]
        while len(coeffs) > self.degree:
            if len(coeffs) - 1 >= self.m:
                # fold exponents >= m by zeta^m = 1 first
                e = len(coeffs) - 1
                c = coeffs.pop()
                if c:
                    coeffs[e - self.m] += c
                continue
            e = len(coeffs) - 1
            c = coeffs.pop()
            if c:
                row = self._red[e - self.degree]
                for i in range(self.degree):
                    if row[i]:
                        coeffs[i] += c * row[i]
        coeffs += [Fraction(0)] * (self.degree - len(coeffs))
        return CyclotomicNumber(self, tuple(coeffs))

    def parse(self, s):
        """Parse a polynomial string in z, e.g. "z^2 - 1/2*z + 3"."""
        terms = parse_poly_literal(s, "z")
        coeffs = [Fraction(0)] * max((e for e, _ in terms), default=0)
        coeffs.append(Fraction(0))
        for e, c in terms:
            coeffs[e] += c
        return self.element(coeffs)

    def __repr__(self):
        return f"Q(zeta_{self.m})"


class CyclotomicNumber:
    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = coeffs

    @property
    def conductor(self):
        return self.field.m

    def is_rational(self):
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def _pair(self, other):
        if isinstance(other, CyclotomicNumber):
            if other.field is self.field:
                return self, other
            m = lcm(self.field.m, other.field.m)
            if m > LCM_CAP:
                raise ConductorMismatch(
                    f"lcm conductor {m} exceeds cap {LCM_CAP}")
            return cyclotomic_embed(self, m), cyclotomic_embed(other, m)
        if isinstance(other, (int, Fraction)):
            return self, self.field.coerce(other)
        return None, None

    def __add__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CyclotomicNumber(
            a.field, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.field, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CyclotomicNumber(
            a.field, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        n = a.field.degree
        prod = [Fraction(0)] * (2 * n - 1 if n > 1 else 1)
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    prod[i + j] += x * y
        return a.field.element(prod)

    __rmul__ = __mul__

    def _inverse(self):
        """Inverse modulo Phi_m by the extended Euclidean algorithm."""
        if not self:
            raise ZeroDivisionError("cyclotomic division by zero")
        if self.is_rational():
            return self.field.coerce(1 / self.coeffs[0])
        # r0 = Phi_m, r1 = self; track s only against r1
        r0 = [Fraction(c) for c in self.field.phi]
        r1 = list(self.coeffs)
        _trim_f(r1)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1 or r1[0] != 0:
            q, r = _frac_poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _frac_poly_sub(s0, _frac_poly_mul(q, s1))
        c = r0[0]  # gcd is a nonzero constant since Phi_m is irreducible
        inv = [x / c for x in s0]
        return self.field.element(inv)

    def __truediv__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return a * b._inverse()

    def __rtruediv__(self, other):
        return self._inverse() * other

    def __pow__(self, e):
        if e < 0:
            return self._inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if isinstance(other, CyclotomicNumber):
            a, b = self._pair(other)
            return a.coeffs == b.coeffs
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.field.m, self.coeffs))

    def __repr__(self):
        if self.is_rational():
            return str(self.coeffs[0])
        parts = []
        for e, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if e == 0:
                parts.append(str(c))
            else:
                z = "z" if e == 1 else f"z^{e}"
                if c == 1:
                    parts.append(z)
                elif c == -1:
                    parts.append(f"-{z}")
                else:
                    parts.append(f"{c}*{z}")
        s = " + ".join(parts).replace("+ -", "- ")
        return f"({s})@{self.field.m}"


def _trim_f(poly):
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def _frac_poly_divmod(num, den):
    num = list(num)
    dn = len(den) - 1
    if len(num) - 1 < dn:
        return [Fraction(0)], _trim_f(num)
    q = [Fraction(0)] * (len(num) - dn)
    for i in range(len(num) - dn - 1, -1, -1):
        c = num[i + dn] / den[-1]
        q[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    del num[dn:]
    if not num:
        num = [Fraction(0)]
    return _trim_f(q), _trim_f(num)


def _frac_poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _trim_f(out)


def _frac_poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _trim_f([x - y for x, y in zip(a, b)])


def cyclotomic_embed(x, m2):
    """Image of x under zeta_m -> zeta_{m2}^(m2/m); a ring homomorphism."""
    m = x.field.m
    if m2 % m != 0:
        raise ConductorMismatch(f"{m} does not divide {m2}")
    if m2 == m:
        return x
    target = CyclotomicField(m2)
    step = m2 // m
    out = [Fraction(0)] * (max((e * step for e in range(len(x.coeffs))), default=0) + 1)
    for e, c in enumerate(x.coeffs):
        if c:
            out[e * step] += c
    return target.element(out)


# ---------------------------------------------------------------------------
# finite fields GF(p^k)
# ---------------------------------------------------------------------------

def _gfp_poly_mulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = (out[i + j] + x * y) % p
    return _gfp_poly_rem(out, mod, p)


def _gfp_poly_rem(num, den, p):
    num = list(num)
    dn = len(den) - 1
    inv_lead = pow(den[-1], p - 2, p)
    for i in range(len(num) - dn - 1, -1, -1):
        c = (num[i + dn] * inv_lead) % p
        if c:
            for j, d in enumerate(den):
                num[i + j] = (num[i + j] - c * d) % p
    del num[dn:]
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return num or [0]


def _gfp_is_irreducible(poly, p):
    """Trial factorization: test divisibility by every monic polynomial of
    degree up to deg/2. Feasible at desk scale."""
    k = len(poly) - 1
    if k < 1:
        return False
    for d in range(1, k // 2 + 1):
        for code in range(p ** d):
            h = []
            c = code
            for _ in range(d):
                h.append(c % p)
                c //= p
            h.append(1)
            if _gfp_poly_rem(poly, h, p) == [0]:
                return False
    return True


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


_FF_CACHE = {}


class FiniteField:
    """GF(p^k) as GF(p)[x]/(defining polynomial); elements carry an integer
    code sum(c_i p^i) and arithmetic is table-backed for q <= TABLE_LIMIT."""

    def __new__(cls, p, k=1, poly=None):
        key = (p, k, tuple(poly) if poly is not None else None)
        if key in _FF_CACHE:
            return _FF_CACHE[key]
        self = super().__new__(cls)
        _FF_CACHE[key] = self
        return self

    def __init__(self, p, k=1, poly=None):
        if getattr(self, "_ready", False):
            return
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.k = k
        self.q = p ** k
        self.characteristic = p
        if poly is None:
            poly = self._default_poly(p, k)
        poly = [c % p for c in poly]
        if len(poly) != k + 1 or poly[-1] != 1:
            raise ValueError("defining polynomial must be monic of degree k")
        if k > 1 and not _gfp_is_irreducible(poly, p):
            raise NotIrreducible(f"{poly} is reducible over GF({p})")
        self.poly = tuple(poly)
        self._mul_table = None
        self._add_table = None
        self._inv_table = None
        self._log = None
        self._exp = None
        self._gen = None
        self._ready = True

    @staticmethod
    def _default_poly(p, k):
        if k == 1:
            return [0, 1]
        for code in range(p ** k):
            poly = []
            c = code
            for _ in range(k):
                poly.append(c % p)
                c //= p
            poly.append(1)
            if _gfp_is_irreducible(poly, p):
                return poly
        raise NotIrreducible(f"no monic irreducible of degree {k} over GF({p})")

    # --- coding ---------------------------------------------------------

    def code_of(self, coeffs):
        code = 0
        for c in reversed(list(coeffs)):
            code = code * self.p + (c % self.p)
        return code

    def coeffs_of(self, code):
        out = []
        for _ in range(self.k):
            out.append(code % self.p)
            code //= self.p
        return out

    def _code_mul(self, a, b):
        """Product of two codes at the polynomial level (table-free)."""
        if a == 0 or b == 0:
            return 0
        return self.code_of(_gfp_poly_mulmod(
            self.coeffs_of(a), self.coeffs_of(b), list(self.poly), self.p)
            + [0] * self.k)

    def _code_pow(self, a, e):
        r = 1
        while e:
            if e & 1:
                r = self._code_mul(r, a)
            a = self._code_mul(a, a)
            e >>= 1
        return r

    def _find_generator_code(self):
        n = self.q - 1
        primes = _prime_factors(n)
        for cand in range(2, self.q):
            if all(self._code_pow(cand, n // r) != 1 for r in primes):
                return cand
        raise NumbersError("no multiplicative generator found")

    def _ensure_tables(self):
        """exp/log tables off a generator, then O(q^2) table fill."""
        if self._mul_table is not None:
            return
        if self.q > TABLE_LIMIT:
            raise NumbersError(
                f"GF({self.q}) exceeds the table limit {TABLE_LIMIT}")
        p, q, k = self.p, self.q, self.k
        gcode = self._find_generator_code() if q > 2 else 1
        exp = [1]
        for _ in range(q - 2):
            exp.append(self._code_mul(exp[-1], gcode))
        log = {c: j for j, c in enumerate(exp)}
        mul = [[0] * q]
        for a in range(1, q):
            la = log[a]
            row = [0] * q
            for b in range(1, q):
                row[b] = exp[(la + log[b]) % (q - 1)]
            mul.append(row)
        digits = [self.coeffs_of(a) for a in range(q)]
        add = []
        for a in range(q):
            da = digits[a]
            row = []
            for b in range(q):
                db = digits[b]
                row.append(self.code_of(
                    [(x + y) % p for x, y in zip(da, db)]))
            add.append(row)
        inv = [0] * q
        for a in range(1, q):
            inv[a] = exp[(q - 1 - log[a]) % (q - 1)]
        self._exp, self._log = exp, log
        if self._gen is None:
            self._gen = FiniteFieldElement(self, gcode)
        self._add_table, self._mul_table, self._inv_table = add, mul, inv

    # --- field protocol ---------------------------------------------------

    def zero(self):
        return FiniteFieldElement(self, 0)

    def one(self):
        return FiniteFieldElement(self, 1)

    def coerce(self, x):
        if isinstance(x, FiniteFieldElement):
            if x.field is self:
                return x
            raise TypeError("element of a different finite field")
        if isinstance(x, int):
            return FiniteFieldElement(self, x % self.p)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in GF({self.q})")
            num = x.numerator % self.p
            den_inv = pow(x.denominator % self.p, self.p - 2, self.p)
            return FiniteFieldElement(self, (num * den_inv) % self.p)
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"cannot coerce {x!r} into GF({self.q})")

    def element(self, coeffs):
        return FiniteFieldElement(self, self.code_of(coeffs))

    def parse(self, s):
        terms = parse_poly_literal(s, "g")
        coeffs = [0] * self.k
        for e, c in terms:
            if e >= self.k:
                raise ValueError(f"exponent {e} >= extension degree {self.k}")
            fr = Fraction(c)
            if fr.denominator % self.p == 0:
                raise ZeroDivisionError(f"{c} has no image mod {self.p}")
            v = (fr.numerator * pow(fr.denominator, self.p - 2, self.p)) % self.p
            coeffs[e] = (coeffs[e] + v) % self.p
        return self.element(coeffs)

    def elements(self):
        return [FiniteFieldElement(self, c) for c in range(self.q)]

    def generator(self):
        """Smallest-code multiplicative generator."""
        if self._gen is None:
            code = self._find_generator_code() if self.q > 2 else 1
            self._gen = FiniteFieldElement(self, code)
        return self._gen

    def __repr__(self):
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k})"


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class FiniteFieldElement:
    __slots__ = ("field", "code")

    def __init__(self, field, code):
        self.field = field
        self.code = code

    def _check(self, other):
        if isinstance(other, FiniteFieldElement):
            if other.field is not self.field:
                raise TypeError("mixed finite fields; embed explicitly")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.coerce(other)
        return None

    def __add__(self, other):
        b = self._check(other)
        if b is None:
            return NotImplemented
        f = self.field
        if f.q <= TABLE_LIMIT:
            f._ensure_tables()
            return FiniteFieldElement(f, f._add_table[self.code][b.code])
        s = [(x + y) % f.p for x, y in
             zip(f.coeffs_of(self.code), f.coeffs_of(b.code))]
        return f.element(s)

    __radd__ = __add__

    def __neg__(self):
        f = self.field
        return f.element([(-c) % f.p for c in f.coeffs_of(self.code)])

    def __sub__(self, other):
        b = self._check(other)
        if b is None:
            return NotImplemented
        return self + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._check(other)
        if b is None:
            return NotImplemented
        f = self.field
        if f.q <= TABLE_LIMIT:
            f._ensure_tables()
            return FiniteFieldElement(f, f._mul_table[self.code][b.code])
        m = _gfp_poly_mulmod(f.coeffs_of(self.code), f.coeffs_of(b.code),
                             list(f.poly), f.p)
        return f.element(m + [0] * f.k)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._check(other)
        if b is None:
            return NotImplemented
        return self * b ** -1

    def __rtruediv__(self, other):
        return self ** -1 * other

    def __pow__(self, e):
        f = self.field
        if e < 0:
            if self.code == 0:
                raise ZeroDivisionError("inverse of zero")
            if f.q <= TABLE_LIMIT:
                f._ensure_tables()
                base = FiniteFieldElement(f, f._inv_table[self.code])
            else:
                base = self ** (f.q - 2)
            return base ** (-e)
        result = f.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return self.code != 0

    def __eq__(self, other):
        if isinstance(other, FiniteFieldElement):
            return self.field is other.field and self.code == other.code
        if isinstance(other, (int, Fraction)):
            try:
                return self.code == self.field.coerce(other).code
            except ZeroDivisionError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.code))

    def __repr__(self):
        f = self.field
        if f.k == 1:
            return str(self.code)
        parts = []
        for e, c in enumerate(f.coeffs_of(self.code)):
            if c == 0:
                continue
            if e == 0:
                parts.append(str(c))
            else:
                gsym = "g" if e == 1 else f"g^{e}"
                parts.append(gsym if c == 1 else f"{c}*{gsym}")
        return " + ".join(parts) if parts else "0"


class FieldEmbedding:
    """Embedding GF(p^k) -> GF(p^(k*s)) by a declared image of the generator
    (a root of the small field's defining polynomial in the big field)."""

    def __init__(self, small, big, root=None):
        if small.p != big.p or big.k % small.k != 0:
            raise NumbersError(f"no embedding {small} -> {big}")
        self.small = small
        self.big = big
        if root is None:
            root = self._find_root()
        self.root = root
        # image table for all small-field codes
        self._images = {}

    def _find_root(self):
        coeffs = [self.big.coerce(c) for c in self.small.poly]
        for code in range(self.big.q):
            x = FiniteFieldElement(self.big, code)
            acc = self.big.zero()
            xp = self.big.one()
            for c in coeffs:
                acc = acc + c * xp
                xp = xp * x
            if not acc:
                return x
        raise NumbersError("defining polynomial has no root in the big field")

    def __call__(self, x):
        if x.field is self.big:
            return x
        if x.field is not self.small:
            raise TypeError("element not in the source field")
        if x.code in self._images:
            return self._images[x.code]
        acc = self.big.zero()
        rp = self.big.one()
        for c in x.field.coeffs_of(x.code):
            if c:
                acc = acc + self.big.coerce(c) * rp
            rp = rp * self.root
        self._images[x.code] = acc
        return acc


# ---------------------------------------------------------------------------
# orders and the Brauer lift
# ---------------------------------------------------------------------------

def element_order(x):
    """Least n >= 1 with x^n = 1; NotARootOfUnity when there is none."""
    if isinstance(x, FiniteFieldElement):
        if not x:
            raise NotARootOfUnity("zero has no multiplicative order")
        n = x.field.q - 1
        for r in _prime_factors(n):
            while n % r == 0 and (x ** (n // r)).code == 1:
                n //= r
        return n
    if isinstance(x, CyclotomicNumber):
        if not x:
            raise NotARootOfUnity("zero has no multiplicative order")
        bound = x.field.m if x.field.m % 2 == 0 else 2 * x.field.m
        acc = x
        for n in range(1, bound + 1):
            if acc == 1:
                return n
            acc = acc * x
        raise NotARootOfUnity(f"{x!r} is not a root of unity")
    if isinstance(x, (int, Fraction)):
        if x == 1:
            return 1
        if x == -1:
            return 2
        raise NotARootOfUnity(f"{x!r} is not a root of unity")
    raise TypeError(f"unsupported carrier {type(x)}")


class BrauerLiftContext:
    """A fixed pair (xi, zeta_m): xi a primitive m-th root of unity in a
    finite field, zeta_m the designated primitive root in Q(zeta_m). The
    lift xi^j -> zeta_m^j is shared by every computation in a session."""

    def __init__(self, field, m, xi=None):
        if (field.q - 1) % m != 0:
            raise NotInRootGroup(f"mu_{m} is not inside {field}^x")
        self.field = field
        self.m = m
        if xi is None:
            xi = field.generator() ** ((field.q - 1) // m)
        if element_order(xi) != m:
            raise NotInRootGroup(f"xi does not have exact order {m}")
        self.xi = xi
        self.cyclotomic = CyclotomicField(m)
        self.zeta_hat = self.cyclotomic.zeta(1)
        self._dlog = {}
        acc = field.one()
        for j in range(m):
            self._dlog[acc.code] = j
            acc = acc * xi

    def lift(self, x):
        """zeta_m^j for x = xi^j; NotInRootGroup when x is not in mu_m."""
        if isinstance(x, FiniteFieldElement) and x.field is not self.field:
            raise TypeError("element not in the lift context's field")
        if not x:
            raise NotInRootGroup("zero is not a root of unity")
        j = self._dlog.get(x.code)
        if j is None:
            raise NotInRootGroup(f"{x!r} is not a power of xi")
        return self.cyclotomic.zeta(j)

    def fingerprint(self):
        poly = ",".join(str(c) for c in self.field.poly)
        return (f"GF({self.field.p}^{self.field.k});poly=[{poly}];"
                f"m={self.m};xi={self.xi!r};zeta_hat=z^1@{self.m}")


class Char0LiftContext:
    """Characteristic-zero stand-in: eigenvalues are already cyclotomic, the
    lift is the identity embedding. Keeps report plumbing uniform."""

    def __init__(self, m=1):
        self.m = m
        self.field = QQ

    def lift(self, x):
        if isinstance(x, (int, Fraction)):
            return CyclotomicField(1).coerce(x)
        return x

    def fingerprint(self):
        return f"char0;m={self.m};zeta_hat=z^1@{self.m}"


def brauer_lift(ctx, x):
    return ctx.lift(x)


# ---------------------------------------------------------------------------
# polynomial string literals
# ---------------------------------------------------------------------------

def parse_poly_literal(s, sym):
    """Parse "2*z^3 - z + 5/2" into [(exponent, Fraction coefficient), ...].

    Accepts the symbol alone, coeff*sym^e, sym^e, and bare rationals."""
    s = s.replace(" ", "")
    if not s:
        raise ValueError("empty literal")
    # split into signed terms
    terms = []
    start = 0
    for i in range(1, len(s)):
        if s[i] in "+-" and s[i - 1] not in "+-*/^":
            terms.append(s[start:i])
            start = i
    terms.append(s[start:])
    out = []
    for term in terms:
        sign = Fraction(1)
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        if not term:
            raise ValueError(f"malformed term in {s!r}")
        if sym not in term:
            out.append((0, sign * Fraction(term)))
            continue
        head, _, tail = term.partition(sym)
        if head.endswith("*"):
            head = head[:-1]
        coeff = Fraction(head) if head else Fraction(1)
        if tail.startswith("^"):
            exp = int(tail[1:])
        elif not tail:
            exp = 1
        else:
            raise ValueError(f"malformed term {term!r}")
        out.append((exp, sign * coeff))
    return out

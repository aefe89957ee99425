"""Exact truncated power series and rational functions in t.

Coefficients are Fractions or cyclotomic numbers; mixed arithmetic promotes
through the carriers' own coercion. Rational functions are kept canonical:
gcd removed, denominator monic. Evaluation at a pole is a first-class
verdict (PoleAtPoint carries the order), not a crash.
"""

import warnings
from fractions import Fraction

from . import linalg as la


class SeriesError(Exception):
    pass


class NoStabilization(SeriesError):
    pass


class DivisionByZeroSeries(SeriesError):
    pass


class CharacterLengthMismatch(SeriesError):
    pass


class PoleAtPoint(SeriesError):
    def __init__(self, message, order=1, point=None):
        super().__init__(message)
        self.order = order
        self.point = point


class ModularNonProjective(UserWarning):
    pass


# ---------------------------------------------------------------------------
# dense polynomials, ascending coefficients, mixed exact carriers
# ---------------------------------------------------------------------------

def ptrim(p):
    p = list(p)
    while len(p) > 1 and not p[-1]:
        p.pop()
    return p


def padd(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return ptrim([x + y for x, y in zip(a, b)])


def pneg(a):
    return [-x for x in a]


def psub(a, b):
    return padd(a, pneg(b))


def pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return ptrim(out)


def peval(p, point):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * point + c
    return acc


def pdivmod(num, den):
    den = ptrim(den)
    if len(den) == 1 and not den[0]:
        raise ZeroDivisionError("polynomial division by zero")
    num = list(num)
    dn = len(den) - 1
    if len(num) - 1 < dn:
        return [Fraction(0)], ptrim(num)
    inv = den[-1] ** -1
    q = [Fraction(0)] * (len(num) - dn)
    for i in range(len(num) - dn - 1, -1, -1):
        c = num[i + dn] * inv
        q[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] = num[i + j] - c * d
    del num[dn:]
    return ptrim(q), ptrim(num or [Fraction(0)])


def pmonic(p):
    p = ptrim(p)
    lead = p[-1]
    if not lead:
        return p
    if lead == 1:
        return p
    inv = lead ** -1
    return [inv * x for x in p]


def pgcd(a, b):
    """Monic gcd by the Euclidean algorithm over the exact carrier field."""
    a, b = ptrim(a), ptrim(b)
    while len(b) > 1 or b[0]:
        a, b = b, pdivmod(a, b)[1]
        b = ptrim(b)
    return pmonic(a) if (len(a) > 1 or a[0]) else [Fraction(1)]


def _root_multiplicity(p, point):
    mult = 0
    p = ptrim(p)
    while len(p) > 1:
        n = len(p) - 1
        b = [Fraction(0)] * n
        b[n - 1] = p[n]
        for i in range(n - 1, 0, -1):
            b[i - 1] = p[i] + point * b[i]
        rem = p[0] + point * b[0]
        if rem:
            break
        p = ptrim(b)
        mult += 1
    return mult


# ---------------------------------------------------------------------------
# truncated series
# ---------------------------------------------------------------------------

class TruncatedSeries:
    """c0 + c1 t + ... + cD t^D, exact coefficients, hard truncation."""

    def __init__(self, coeffs, D=None):
        coeffs = list(coeffs)
        if D is not None:
            coeffs = coeffs[:D + 1]
            coeffs += [Fraction(0)] * (D + 1 - len(coeffs))
        self.coeffs = coeffs

    @property
    def D(self):
        return len(self.coeffs) - 1

    def __add__(self, other):
        D = min(self.D, other.D)
        return TruncatedSeries(
            [self.coeffs[i] + other.coeffs[i] for i in range(D + 1)])

    def __sub__(self, other):
        D = min(self.D, other.D)
        return TruncatedSeries(
            [self.coeffs[i] - other.coeffs[i] for i in range(D + 1)])

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            D = min(self.D, other.D)
            out = [Fraction(0)] * (D + 1)
            for i, x in enumerate(self.coeffs[:D + 1]):
                if x:
                    for j in range(0, D + 1 - i):
                        y = other.coeffs[j]
                        if y:
                            out[i + j] = out[i + j] + x * y
            return TruncatedSeries(out)
        return TruncatedSeries([other * c for c in self.coeffs])

    __rmul__ = __mul__

    def divide(self, other):
        """Power-series division through the common truncation."""
        D = min(self.D, other.D)
        b0 = other.coeffs[0]
        if not b0:
            raise DivisionByZeroSeries("divisor has zero constant term")
        inv = b0 ** -1
        out = []
        for j in range(D + 1):
            acc = self.coeffs[j]
            for k in range(1, j + 1):
                c = other.coeffs[k]
                if c:
                    acc = acc - c * out[j - k]
            out.append(acc * inv)
        return TruncatedSeries(out)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        D = min(self.D, other.D)
        return all(self.coeffs[i] == other.coeffs[i] for i in range(D + 1))

    def __repr__(self):
        parts = _poly_str(self.coeffs)
        return f"{parts} + O(t^{self.D + 1})"


def _poly_str(coeffs):
    parts = []
    for e, c in enumerate(coeffs):
        if not c:
            continue
        if e == 0:
            parts.append(str(c))
            continue
        tpow = "t" if e == 1 else f"t^{e}"
        if c == 1:
            parts.append(tpow)
        elif c == -1:
            parts.append(f"-{tpow}")
        else:
            cs = str(c)
            if ("+" in cs[1:]) or ("-" in cs[1:]) or " " in cs:
                cs = f"({cs})"
            parts.append(f"{cs}*{tpow}")
    if not parts:
        return "0"
    return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RationalFunctionT:
    """num/den in canonical form: gcd cancelled, denominator monic."""

    def __init__(self, num, den=None):
        num = ptrim([_as_coeff(c) for c in (num if hasattr(num, "__iter__")
                                            else [num])])
        den = ptrim([_as_coeff(c) for c in den]) if den is not None \
            else [Fraction(1)]
        if len(den) == 1 and not den[0]:
            raise DivisionByZeroSeries("zero denominator")
        if len(num) == 1 and not num[0]:
            self.num, self.den = [Fraction(0)], [Fraction(1)]
            return
        g = pgcd(num, den)
        if len(g) > 1:
            num = pdivmod(num, g)[0]
            den = pdivmod(den, g)[0]
        lead = den[-1]
        if lead != 1:
            inv = lead ** -1
            num = [inv * x for x in num]
            den = [inv * x for x in den]
        self.num, self.den = ptrim(num), ptrim(den)

    @property
    def is_polynomial(self):
        return self.den == [Fraction(1)] or (len(self.den) == 1
                                             and self.den[0] == 1)

    def __add__(self, other):
        other = _as_rf(other)
        return RationalFunctionT(
            padd(pmul(self.num, other.den), pmul(other.num, self.den)),
            pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunctionT(pneg(self.num), self.den)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) + (-self)

    def __mul__(self, other):
        other = _as_rf(other)
        return RationalFunctionT(pmul(self.num, other.num),
                                 pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        if len(other.num) == 1 and not other.num[0]:
            raise DivisionByZeroSeries("division by the zero function")
        return RationalFunctionT(pmul(self.num, other.den),
                                 pmul(self.den, other.num))

    def __rtruediv__(self, other):
        return _as_rf(other) / self

    def __eq__(self, other):
        other = _as_rf(other)
        return self.num == other.num and self.den == other.den

    def series(self, D):
        """Long-division expansion through degree D."""
        out = []
        num = list(self.num) + [Fraction(0)] * max(
            0, D + 1 - len(self.num))
        d0 = self.den[0]
        if not d0:
            raise DivisionByZeroSeries(
                "denominator vanishes at t=0; not a power series")
        inv = d0 ** -1
        for j in range(D + 1):
            acc = num[j] if j < len(num) else Fraction(0)
            for k in range(1, min(j, len(self.den) - 1) + 1):
                acc = acc - self.den[k] * out[j - k]
            out.append(acc * inv)
        return TruncatedSeries(out)

    def evaluate(self, point):
        b = peval(self.den, point)
        if not b:
            order = _root_multiplicity(self.den, point)
            raise PoleAtPoint(
                f"pole of order {order} at t = {point!r}", order, point)
        return peval(self.num, point) / b

    def pole_order_at(self, point):
        if peval(self.den, point):
            return 0
        return _root_multiplicity(self.den, point)

    def __repr__(self):
        if self.is_polynomial:
            return _poly_str(self.num)
        num, den = _integer_cleared(self.num, self.den)
        return f"({_poly_str(num)}) / ({_poly_str(den)})"


def _as_coeff(c):
    if isinstance(c, int):
        return Fraction(c)
    return c


def _as_rf(x):
    if isinstance(x, RationalFunctionT):
        return x
    if isinstance(x, (int, Fraction)):
        return RationalFunctionT([x])
    if hasattr(x, "__iter__"):
        return RationalFunctionT(list(x))
    return RationalFunctionT([x])


def _integer_cleared(num, den):
    """Scale num and den by a common rational so coefficients are integral."""
    from math import gcd

    def denoms(p):
        out = []
        for c in p:
            if isinstance(c, Fraction):
                out.append(c.denominator)
            elif hasattr(c, "coeffs"):
                out.extend(x.denominator for x in c.coeffs)
        return out

    L = 1
    for d in denoms(num) + denoms(den):
        L = L // gcd(L, d) * d
    if L != 1:
        num = [c * L for c in num]
        den = [c * L for c in den]
    low = next((c for c in den if c), None)
    if low is not None and hasattr(low, "is_rational") and low.is_rational():
        low = low.as_fraction()
    try:
        if low is not None and low < 0:
            num, den = pneg(num), pneg(den)
    except TypeError:
        pass
    return num, den


# ---------------------------------------------------------------------------
# the named operations
# ---------------------------------------------------------------------------

def molien(G, chi, char=0, projective=False):
    """(1/|G|) sum over g of chi_U(g) / det(1 - t g^-1), grouped by class.

    chi: one value per conjugacy class of G (in class-table order); in
    characteristic p it must vanish on the non-p-regular classes and the
    series is only guaranteed meaningful for projective U."""
    classes = G.conjugacy_classes(char)
    if len(chi) != len(classes):
        raise CharacterLengthMismatch(
            f"{len(chi)} values for {len(classes)} classes")
    if char != 0 and not projective:
        warnings.warn(ModularNonProjective(
            "modular Molien series without the projectivity hypothesis"))
    total = RationalFunctionT([0])
    for cl, value in zip(classes, chi):
        if not cl["p_regular"]:
            if value:
                raise SeriesError(
                    "character must vanish on non-p-regular classes")
            continue
        if not value:
            continue
        den = _det_one_minus_t_ginv(G, cl["rep"], char)
        total = total + RationalFunctionT([cl["size"] * value], den)
    return Fraction(1, len(G.elements)) * total


def _det_one_minus_t_ginv(G, i, char):
    if char == 0:
        ginv = G.elements[G.inverse_index(i)]
        return la.det_one_minus_tg(ginv, G.field)
    ev = G.eigenvalues(i, char)
    ctx = ev["lift_context"]
    den = [Fraction(1)]
    for lam, mult in ev["pairs"]:
        lam_hat_inv = ctx.lift(lam) ** -1
        for _ in range(mult):
            den = pmul(den, [Fraction(1), -lam_hat_inv])
    return den


def hilbert_from_dims(dims, den_degrees=None):
    """Truncated Hilbert series from a dimension vector; with denominator
    degrees, also the exact rational fit num / prod(1 - t^d_i).

    The fit is certified by stabilization evidence: every computed numerator
    coefficient above the last nonzero one vanishes, and that zero tail is
    at least min(d_i) long. Raises NoStabilization otherwise."""
    series = TruncatedSeries([Fraction(d) for d in dims])
    if den_degrees is None:
        return series, None
    D = series.D
    den = [Fraction(1)]
    for dd in den_degrees:
        factor = [Fraction(0)] * (dd + 1)
        factor[0], factor[dd] = Fraction(1), Fraction(-1)
        den = pmul(den, factor)
    # truncated numerator = series * den, degrees 0..D (exact there)
    num = [Fraction(0)] * (D + 1)
    for i, x in enumerate(series.coeffs):
        if x:
            for j, y in enumerate(den):
                if y and i + j <= D:
                    num[i + j] = num[i + j] + x * y
    last = max((i for i, c in enumerate(num) if c), default=-1)
    tail = D - last
    if tail < min(den_degrees):
        raise NoStabilization(
            f"numerator has not stabilized: zero tail {tail} < "
            f"min denominator degree {min(den_degrees)}")
    return series, RationalFunctionT(num[:last + 1] if last >= 0 else [0],
                                     den)


def quotient_X(m_series, r_series):
    """X = Hilb(M)/Hilb(R) as a canonical rational function."""
    r = _as_rf(r_series)
    if len(r.num) == 1 and not r.num[0]:
        raise DivisionByZeroSeries("R series is zero")
    return _as_rf(m_series) / r


def evaluate(f, point):
    return _as_rf(f).evaluate(point)


def evaluate_report(f, point):
    """Evaluation as a verdict dict, poles included."""
    f = _as_rf(f)
    try:
        value = f.evaluate(point)
        return {"regular": True, "value": value, "pole_order": 0}
    except PoleAtPoint as e:
        return {"regular": False, "value": None, "pole_order": e.order}


def _fit_carrier(values):
    """A field object whose linear algebra covers all the given values."""
    from .numbers import QQ, CyclotomicField, CyclotomicNumber, \
        cyclotomic_embed, lcm
    m = 1
    for v in values:
        if isinstance(v, CyclotomicNumber):
            m = lcm(m, v.field.m)
    if m == 1:
        return QQ, [Fraction(v.as_fraction()) if hasattr(v, "as_fraction")
                    else Fraction(v) for v in values]
    E = CyclotomicField(m)
    out = [cyclotomic_embed(v, m) if isinstance(v, CyclotomicNumber)
           else E.coerce(v) for v in values]
    return E, out


def fit_rational(series, guard=None):
    """Minimal rational function reproducing a truncated series exactly.

    Degree pairs are searched by total size; a candidate is accepted only
    when the matched window leaves a surplus of at least max(den degree, 1)
    coefficients beyond the Pade determinacy bound, so short windows raise
    NoStabilization instead of guessing."""
    if isinstance(series, TruncatedSeries):
        coeffs = list(series.coeffs)
    else:
        coeffs = [_as_coeff(c) for c in series]
    D = len(coeffs) - 1
    if D < 0:
        raise NoStabilization("empty series")
    field, c = _fit_carrier(coeffs)
    zero = field.zero()
    for total in range(D + 1):
        for dden in range(total + 1):
            dnum = total - dden
            surplus = (D - dnum) - dden
            need = guard if guard is not None else max(dden, 1)
            if surplus < need:
                continue
            rows, rhs = [], []
            for j in range(dnum + 1, D + 1):
                rows.append([c[j - k] if j - k >= 0 else zero
                             for k in range(1, dden + 1)])
                rhs.append(-c[j])
            if dden == 0:
                if any(x for x in rhs):
                    continue
                sol = []
            else:
                sol = la.solve(rows, rhs, field)
                if sol is None:
                    continue
            den = [field.one()] + list(sol)
            num = [zero] * (dnum + 1)
            for i in range(dnum + 1):
                acc = zero
                for k in range(min(i, dden) + 1):
                    acc = acc + den[k] * c[i - k]
                num[i] = acc
            return RationalFunctionT(num, den)
    raise NoStabilization(
        f"no rational fit with certification surplus within D={D}")

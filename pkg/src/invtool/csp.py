"""Cyclic sieving on coset spaces, and character values read off series.

The sieving check ties three independent computations together: fixed
cosets counted by hand, the series quotient X(t) evaluated at lifted
roots of unity, and a Burnside recount. The character-from-series route
does the same for Brauer character values against Hilbert series
quotients, with the fiber hypotheses checked by enumeration where the
field is small enough to allow it.
"""

import math
from fractions import Fraction

from . import groth as gt
from . import groups as gr
from . import homology as ho
from . import linalg as la
from . import polyaction as pa
from . import series as se
from .groups import CosetSpace
from .numbers import CyclotomicNumber, FiniteField, element_order


class CspError(Exception):
    pass


class NonPolynomialX(CspError):
    """X(t) failed to be a polynomial although the hypotheses held."""


# ---------------------------------------------------------------------------
# subgroups and coset bookkeeping
# ---------------------------------------------------------------------------

def subgroup_indices(G, H):
    """Closure of H inside G, as a sorted index list.

    H may be a MatrixGroup, an iterable of matrices, or an iterable of
    element indices."""
    if hasattr(H, "elements") and hasattr(H, "index_of"):
        idxs = {G.index_of(m) for m in H.elements}
    else:
        idxs = set()
        for h in H:
            idxs.add(h if isinstance(h, int) else G.index_of(h))
    idxs.add(0)
    frontier = list(idxs)
    while frontier:
        a = frontier.pop()
        for b in list(idxs):
            for prod in (G.mul_index(a, b), G.mul_index(b, a)):
                if prod not in idxs:
                    idxs.add(prod)
                    frontier.append(prod)
    return sorted(idxs)


def subgroup_group(G, h_idx):
    """The subgroup as a standalone MatrixGroup."""
    return gr.generate_group([G.elements[i] for i in h_idx],
                             field=G.field, dim=G.dim)


def normalizer_transversal(G, h_idx):
    """Coset representatives for N_G(H)/H, identity coset first."""
    X = CosetSpace(G, h_idx)
    seen = set()
    reps = []
    for i in range(len(G.elements)):
        if not X.normalizes(i):
            continue
        co = X.coset_of[i]
        if co not in seen:
            seen.add(co)
            reps.append(i)
    return reps


def induced_coset_module(G, H, c=None, D=4):
    """Permutation bimodule on the right cosets H\\G.

    tau follows the regular-module pattern (tau(g): coset Hr -> Hr g^-1);
    the left action of the normalizer quotient and the designated
    c-translation ride along as outer pairs. The standard bookkeeping,
    relative invariants of the module matching k[V]^H degreewise, is
    checked through degree D before the module is handed back."""
    if c is not None and not isinstance(c, int):
        c = G.index_of(c)
    h_idx = subgroup_indices(G, H)
    X = CosetSpace(G, h_idx, c=c)
    field = G.field
    zero, one = field.zero(), field.one()
    n = len(X)

    def right_perm(x):
        m = [[zero] * n for _ in range(n)]
        for k, r in enumerate(X.reps):
            m[X.coset_of[G.mul_index(r, x)]][k] = one
        return m

    taus = [right_perm(G.inverse_index(gi)) for gi in G.gen_indices]
    gamma_pairs = []
    for t in normalizer_transversal(G, h_idx):
        if t == 0:
            continue
        m = [[zero] * n for _ in range(n)]
        for k, r in enumerate(X.reps):
            m[X.coset_of[G.mul_index(t, r)]][k] = one
        gamma_pairs.append((la.mat_copy(G.elements[t]), m))
    c_pairs = []
    if c is not None:
        c_pairs.append((la.mat_copy(G.elements[c]), right_perm(c)))
    U = pa.BimoduleU(n, taus, gamma_pairs=gamma_pairs, c_pairs=c_pairs,
                     label=f"coset[{n}]")
    U.verify(G)
    M = pa.relative_invariants_up_to(pa.GroupPolyAction(G), U, D)
    Hgrp = subgroup_group(G, h_idx)
    dims_h = pa.invariants_up_to(pa.GroupPolyAction(Hgrp), D).dims
    if M.dims != dims_h:
        raise CspError(
            f"induced module bookkeeping failed through degree {D}: "
            f"{M.dims} vs {dims_h}")
    U.coset_space = X
    return U


# ---------------------------------------------------------------------------
# the sieving check
# ---------------------------------------------------------------------------

def _rational_coeffs(coeffs):
    """Coefficients as Fractions, or (None, reason) when one is not
    rational."""
    out = []
    for c in coeffs:
        if isinstance(c, CyclotomicNumber):
            try:
                c = c.as_fraction()
            except Exception:
                return None, f"coefficient {c!r} is not rational"
        out.append(Fraction(c))
    return out, None


class CspInstance:
    """Assembled sieving data with its coefficient invariant.

    When the polynomiality certificate holds, X(t) must be a polynomial
    with nonnegative integer coefficients summing to the coset count;
    coefficient_report says how that went."""

    def __init__(self, G, h_idx, certificate, X, x_rf, D, polynomiality):
        self.G = G
        self.H = h_idx
        self.certificate = certificate
        self.X = X
        self.X_poly = x_rf
        self.D = D
        self.polynomiality = polynomiality

    def coefficient_report(self):
        if self.X_poly is None or not self.X_poly.is_polynomial:
            return {"ok": None, "coeffs": None,
                    "reason": "X is not available as a polynomial"}
        coeffs, reason = _rational_coeffs(self.X_poly.num)
        if coeffs is None:
            return {"ok": False, "coeffs": None, "reason": reason}
        ok = (all(c.denominator == 1 and c >= 0 for c in coeffs)
              and sum(coeffs) == len(self.X))
        return {"ok": ok, "coeffs": [int(c) if c.denominator == 1 else c
                                     for c in coeffs],
                "reason": None if ok else
                f"coefficients {coeffs} against {len(self.X)} cosets"}


def _orbit_count(perm):
    seen = [False] * len(perm)
    count = 0
    for s in range(len(perm)):
        if seen[s]:
            continue
        count += 1
        while not seen[s]:
            seen[s] = True
            s = perm[s]
    return count


def csp_check(G, H, c, D, polys=None, den_degrees=None, sweep_bound=6):
    """Sieving table for the triple (H\\G, X(t), <c>).

    X(t) is the quotient of the two invariant-ring Hilbert series,
    computed by Molien summation away from the modular case and by
    degreewise kernel dimensions plus rational fits inside it. Every j
    gets the hand count of fixed cosets against the evaluation at the
    lifted root of unity, and a Burnside recount closes the report."""
    field = G.field
    char = gt._field_char(field)
    if not isinstance(c, int):
        c = G.index_of(c)
    h_idx = subgroup_indices(G, H)
    X = CosetSpace(G, h_idx, c=c)
    d = G.element_order(c)
    notes = []

    cert = gt.regular_certificate(G, c, sweep_bound=sweep_bound)
    omega = cert["eigenvalue"]
    if char == 0:
        omega_hat = omega
        lift = f"char0;m={element_order(omega)}"
    else:
        _, _, ctx = G.splitting_context(char)
        omega_hat = ctx.lift(omega)
        lift = ctx.fingerprint()

    act = pa.GroupPolyAction(G)
    inv = pa.invariants_up_to(act, D)
    R = ho.subalgebra_by_degrees(inv)
    ring = act.ring
    polynomiality = {"certified": False, "degrees": None, "reason": None}
    gens = None
    try:
        if polys is not None:
            gens = [gt._coerce_poly(f, field) for f in polys]
            for f in gens:
                if not pa.verify_invariant_poly(act, f):
                    raise CspError(
                        "a supplied generator polynomial is not invariant")
        else:
            gens = gt._window_generators(R, ring)
        Rk = ho.polynomial_normalization(ring, gens, D)
        if Rk.dims != R.dims:
            polynomiality["reason"] = (
                f"generators span dims {Rk.dims}, invariants have {R.dims}")
        else:
            polynomiality["certified"] = True
            polynomiality["degrees"] = sorted(
                pa.poly_degree(f) for f in gens)
    except ho.NotIndependent as e:
        polynomiality["reason"] = str(e)

    Hgrp = subgroup_group(G, h_idx)
    nonmodular = char == 0 or len(G.elements) % char
    x_rf = None
    if nonmodular:
        route = "molien"
        # trivial characters; the trivial module is projective here
        hg = se.molien(G, [Fraction(1)] * len(G.conjugacy_classes(char)),
                       char=char, projective=True)
        hh = se.molien(Hgrp,
                       [Fraction(1)] * len(Hgrp.conjugacy_classes(char)),
                       char=char, projective=True)
        got = hg.series(D).coeffs
        if any(a != b for a, b in zip(got, R.dims)):
            raise CspError(
                f"Molien series and kernel dims disagree: {got} vs {R.dims}")
        x_rf = se.quotient_X(hh, hg)
    else:
        route = "dims"
        degs = list(den_degrees) if den_degrees else polynomiality["degrees"]
        if degs is None:
            notes.append("no denominator certificate, X(t) not computed")
        else:
            dims_h = pa.invariants_up_to(pa.GroupPolyAction(Hgrp), D).dims
            _, hg = se.hilbert_from_dims(R.dims, den_degrees=degs)
            _, hh = se.hilbert_from_dims(dims_h, den_degrees=degs)
            x_rf = se.quotient_X(hh, hg)

    if x_rf is not None and not x_rf.is_polynomial:
        if polynomiality["certified"]:
            raise NonPolynomialX(f"X(t) = {x_rf!r} is not a polynomial")
        notes.append(f"X(t) = {x_rf!r} is not a polynomial; the "
                     "polynomiality hypothesis was not certified")

    inst = CspInstance(G, h_idx, cert, X, x_rf, D, polynomiality)
    coeff = inst.coefficient_report()

    rows = []
    rows_ok = x_rf is not None and x_rf.is_polynomial
    if rows_ok:
        for j in range(d):
            fixed = X.fixed_points(j)
            point = omega_hat ** j
            value = se.evaluate(x_rf, point)
            ok = value == fixed
            rows.append({
                "j": j,
                "order_cj": d // math.gcd(d, j),
                "order_lift": element_order(point),
                "fixed": fixed,
                "value": value,
                "ok": ok,
            })
            rows_ok = rows_ok and ok

    perm = X.right_action(c)
    orbits = _orbit_count(perm)
    fixed_sum = sum(X.fixed_points(j) for j in range(d))
    burnside = {"orbit_count": orbits, "fixed_sum": fixed_sum,
                "ok": fixed_sum == d * orbits}

    if not polynomiality["certified"]:
        verdict = "hypotheses unverified"
    elif rows_ok and burnside["ok"] and coeff["ok"]:
        verdict = "pass"
    else:
        verdict = "fail"
    return {
        "task": "csp",
        "field": repr(field),
        "group_order": len(G.elements),
        "subgroup_order": len(h_idx),
        "coset_count": len(X),
        "element": c,
        "element_order": d,
        "certificate": gt._cert_summary(cert, c, d),
        "lift": lift,
        "route": route,
        "truncation": D,
        "polynomiality": polynomiality,
        "X": None if x_rf is None else repr(x_rf),
        "coefficients": coeff,
        "rows": rows,
        "burnside": burnside,
        "notes": notes,
        "verdict": verdict,
    }


# ---------------------------------------------------------------------------
# character values from Hilbert series quotients
# ---------------------------------------------------------------------------

class ModularCharacterQuery:
    """One character-value question: which group element, which module,
    which normalization to quotient against.

    omega picks the eigenvalue (defaults to the first of full order
    carrying a regular certificate); polys give the normalization R
    (defaults to window generators of the invariant ring, which then
    must be certified polynomial)."""

    def __init__(self, G, g, U, omega=None, polys=None,
                 fiber_cap=10 ** 6, sweep_bound=6):
        if not isinstance(g, int):
            g = G.index_of(g)
        self.G = G
        self.g = g
        self.U = U
        self.omega = omega
        self.polys = polys
        self.fiber_cap = fiber_cap
        self.sweep_bound = sweep_bound


def character_from_series(query, D):
    """chi_U(g) as the value of X_{M, k[V]^G} at the lifted eigenvalue.

    The three hypotheses are reported tri-state: fiber freeness and the
    transporter-class condition are decided by enumeration when the
    carrier field is finite and small enough, and marked not checkable
    at scale otherwise; the nonvanishing condition is always evaluated.
    The directly computed Brauer character value rides along for
    comparison whenever the element is p-regular (it always is here,
    since the eigenvalue lift requires it)."""
    G, U, g = query.G, query.U, query.g
    field = G.field
    char = gt._field_char(field)
    d = G.element_order(g)
    if char and d % char == 0:
        raise gt.NotPRegular(
            f"element {g} has order {d}, divisible by the characteristic")
    _, _, ctx = G.splitting_context(char)
    U.verify(G)

    cert = gt.regular_certificate(G, g, omega=query.omega,
                                  sweep_bound=query.sweep_bound)
    omega = cert["eigenvalue"]
    v = cert["vector"]
    carrier = cert["carrier"]
    omega_hat = omega if char == 0 else ctx.lift(omega)

    act = pa.GroupPolyAction(G)
    ring = act.ring
    inv = pa.invariants_up_to(act, D)
    R = ho.subalgebra_by_degrees(inv)
    if query.polys is not None:
        gens = [gt._coerce_poly(f, field) for f in query.polys]
        for f in gens:
            if not pa.verify_invariant_poly(act, f):
                raise gt.HypothesisFailure(
                    "a normalization polynomial is not invariant")
    else:
        gens = gt._window_generators(R, ring)
    try:
        ho.polynomial_normalization(ring, gens, D)
    except ho.NotIndependent as e:
        raise gt.HypothesisFailure(
            f"normalization is not algebraically independent: {e}")
    degs = [pa.poly_degree(f) for f in gens]

    M = pa.relative_invariants_up_to(act, U, D)
    _, m_fit = se.hilbert_from_dims(M.dims, den_degrees=degs)
    _, g_fit = se.hilbert_from_dims(R.dims, den_degrees=degs)
    x_m = se.quotient_X(m_fit, g_fit)
    den = [Fraction(1)]
    for dd in degs:
        f = [Fraction(0)] * (dd + 1)
        f[0], f[dd] = Fraction(1), Fraction(-1)
        den = se.pmul(den, f)
    x_0 = g_fit * se.RationalFunctionT(den)  # X_{k[V]^G, R}

    value = se.evaluate(x_m, omega_hat)  # PoleAtPoint propagates

    x0_report = se.evaluate_report(x_0, omega_hat)
    checklist = {
        "x_nonzero": {
            "status": "verified" if (x0_report["regular"]
                                     and x0_report["value"]) else "failed",
            "value": x0_report["value"],
        },
    }

    fiber_info = None
    if isinstance(carrier, FiniteField) \
            and carrier.q ** G.dim <= query.fiber_cap:
        if carrier is field:
            GE, actE, gensE, omegaE = G, act, gens, omega
        else:
            _, emb, _ = G.splitting_context(char)
            GE = gt._embedded_group(G, emb, carrier)
            actE = pa.GroupPolyAction(GE)
            gensE = [{k: emb(val) for k, val in f.items()} for f in gens]
            omegaE = omega
        scalar = gt._scalar_mat(omegaE, G.dim, carrier)
        fiber = pa.enumerate_fiber(actE, v, gensE, c_mats=[scalar],
                                   cap=query.fiber_cap)
        checklist["fiber_free"] = {
            "status": "verified" if fiber["free"] else "failed",
            "points": len(fiber["points"]),
            "orbits": len(fiber["orbits"]),
        }
        chi_g = gt.brauer_value(U.tau(G, g), field, ctx)
        stable, mismatches = 0, []
        for oi, target in enumerate(fiber["orbit_maps"][0]):
            if target != oi:
                continue
            stable += 1
            t_idx = fiber["transporters"][(0, oi)]
            if t_idx is None:
                mismatches.append(f"orbit {oi}: no transporter")
                continue
            if gt.brauer_value(U.tau(G, t_idx), field, ctx) != chi_g:
                mismatches.append(f"orbit {oi}: transporter {t_idx}")
        checklist["transporter_classes"] = {
            "status": "failed" if mismatches else "verified",
            "stable_orbits": stable,
            "mismatches": mismatches,
        }
        fiber_info = {"points": len(fiber["points"]),
                      "orbits": len(fiber["orbits"]),
                      "stab_orders": fiber["stab_orders"]}
    else:
        reason = ("carrier field is infinite" if not
                  isinstance(carrier, FiniteField) else
                  f"|V| = {carrier.q}^{G.dim} exceeds cap {query.fiber_cap}")
        checklist["fiber_free"] = {"status": "not-checkable-at-scale",
                                   "reason": reason}
        checklist["transporter_classes"] = {
            "status": "not-checkable-at-scale", "reason": reason}

    chi_direct = gt.brauer_value(U.tau(G, g), field, ctx)
    agree = value == chi_direct

    statuses = [item["status"] for item in checklist.values()]
    if "failed" in statuses:
        verdict = "hypotheses unverified"
    elif "not-checkable-at-scale" in statuses:
        verdict = "pass" if agree else "hypotheses unverified"
    else:
        verdict = "pass" if agree else "fail"
    return {
        "task": "modchar",
        "field": repr(field),
        "group_order": len(G.elements),
        "element": g,
        "element_order": d,
        "U": U.label,
        "certificate": gt._cert_summary(cert, g, d),
        "lift": ctx.fingerprint(),
        "truncation": D,
        "normalization_degrees": degs,
        "X_M": repr(x_m),
        "X_0": repr(x_0),
        "value": value,
        "chi_U": chi_direct,
        "agree": agree,
        "checklist": checklist,
        "fiber": fiber_info,
        "verdict": verdict,
    }

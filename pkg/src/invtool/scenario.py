"""Scenario files: the JSON schema behind `invtool run`.

A scenario is a single JSON document, schema tag "invtool/1". Every
field scalar (matrix entry, polynomial coefficient, evaluation point,
expected value) is a string parsed by the ground field, so nothing is
ever read through floating point. Structural integers (dimensions,
exponents, degrees, truncations, group orders) stay plain JSON numbers.

Top-level keys:

  schema        "invtool/1" (required)
  name          short identifier, used for report headers and --out names
  description   one line for list-scenarios
  field         {"kind": "Q"} | {"kind": "cyclotomic", "m": 4}
                | {"kind": "finite", "p": 3, "k": 1}
  group         {"generators": [matrix, ...]} or {"data": "g168",
                "adjoin_minus_identity": true}; matrices are row lists of
                scalar strings
  subgroup      like group (closure is taken inside the big group)
  element       matrix literal, or {"data": ..., "element": name}; the
                designated c for springer/csp, g for modchar
  gamma         {"kind": "cyclic", "order": n, "v": matrix, "u": matrix,
                "prefix": "g"} or {"kind": "trivial"}; the outer action
  module        {"kind": "trivial"|"sign"|"natural"|"dual"|"regular"
                |"induced"|"matrices", "tau": [matrix per group generator],
                "label": ...}
  normalization list of polynomials, each a list of [coeff, [exponents]]
                terms, or {"data": ..., "name": ...}
  truncation    working degree D
  tasks         list of task dicts, run in order

Each task dict carries "task" (one of invariants, molien, tor, omnibus,
springer, csp, modchar), may override any top-level block locally, and
may add expectations ("expect" for the verdict, defaulting to "pass",
plus task-specific expect_* keys). A scenario succeeds when every task's
verdict and expectations come out as declared, so an expected-failure
scenario exits 0 exactly like a positive one.

Finite-field literals use the structural root g (so "g+1" in GF(9)),
cyclotomic ones the root z, and both accept plain rationals. Polynomial
expectations ("expect_X", "expect_numerator", "expect_closed") are
strings in t and are compared as exact rational functions, never as
text.
"""

import json
import os
import time
from fractions import Fraction
from importlib import resources

from . import csp as cs
from . import groth as gt
from . import groups as gr
from . import homology as ho
from . import polyaction as pa
from . import series as se
from .numbers import QQ, CyclotomicField, FiniteField, parse_poly_literal

SCHEMA = "invtool/1"
DATA_SCHEMA = "invtool-data/1"
TASKS = ("invariants", "molien", "tor", "omnibus", "springer", "csp",
         "modchar")

# blocks every task needs before it can run at all
_NEEDS = {
    "invariants": ("field", "group", "truncation"),
    "molien": ("field", "group", "truncation"),
    "tor": ("field", "group", "truncation"),
    "omnibus": ("field", "group", "truncation"),
    "springer": ("field", "group", "element", "truncation"),
    "csp": ("field", "group", "subgroup", "element", "truncation"),
    "modchar": ("field", "group", "element", "truncation"),
}

_BLOCKS = ("field", "group", "subgroup", "element", "gamma", "module",
           "normalization", "truncation")


class ScenarioError(Exception):
    pass


class MissingBlock(ScenarioError):
    pass


# ---------------------------------------------------------------------------
# loading and validation
# ---------------------------------------------------------------------------

def load_scenario(path):
    """Parse and structurally validate one scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ScenarioError(f"{path}: {e.strerror or e}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(
            f"{path}: line {e.lineno} column {e.colno}: {e.msg}")
    validate_scenario(doc, origin=path)
    return Scenario(doc, origin=path)


def validate_scenario(doc, origin="<scenario>"):
    if not isinstance(doc, dict):
        raise ScenarioError(f"{origin}: top level must be an object")
    if doc.get("schema") != SCHEMA:
        raise ScenarioError(
            f"{origin}: schema is {doc.get('schema')!r}, expected {SCHEMA!r}")
    tasks = doc.get("tasks")
    if not isinstance(tasks, list):
        raise ScenarioError(f"{origin}: tasks must be a list")
    for i, t in enumerate(tasks):
        if not isinstance(t, dict) or "task" not in t:
            raise ScenarioError(f"{origin}: task {i} is not a task object")
        kind = t["task"]
        if kind not in TASKS:
            raise ScenarioError(
                f"{origin}: task {i} kind {kind!r} is not one of "
                f"{'/'.join(TASKS)}")
        for block in _NEEDS[kind]:
            if t.get(block) is None and doc.get(block) is None:
                raise MissingBlock(
                    f"{origin}: task {i} ({kind}) needs a {block!r} block")


def bundled_dir():
    return resources.files("invtool") / "scenarios"


def bundled_scenarios():
    """(name, path, description) for every scenario shipped in-package."""
    out = []
    root = bundled_dir()
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if not entry.name.endswith(".json"):
            continue
        try:
            doc = json.loads(entry.read_text(encoding="utf-8"))
            desc = doc.get("description", "")
            name = doc.get("name", entry.name[:-5])
        except (json.JSONDecodeError, OSError):
            desc, name = "(unreadable)", entry.name[:-5]
        out.append((name, str(entry), desc))
    return out


def resolve_data(name):
    """Locate and parse a named data file (INVTOOL_DATA first, then the
    packaged data directory)."""
    env = os.environ.get("INVTOOL_DATA")
    if env:
        path = env
        if os.path.isdir(path):
            path = os.path.join(path, name + ".json")
        if not os.path.exists(path):
            raise MissingBlock(
                f"INVTOOL_DATA points at {path}, which does not exist")
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        entry = resources.files("invtool") / "data" / (name + ".json")
        try:
            doc = json.loads(entry.read_text(encoding="utf-8"))
        except (FileNotFoundError, OSError):
            raise MissingBlock(
                f"data file {name}.json is not bundled and INVTOOL_DATA "
                "is unset")
    if doc.get("schema") != DATA_SCHEMA:
        raise ScenarioError(
            f"data file {name}: schema {doc.get('schema')!r}, expected "
            f"{DATA_SCHEMA!r}")
    return doc


# ---------------------------------------------------------------------------
# literal parsing
# ---------------------------------------------------------------------------

def parse_scalar(field, s):
    if isinstance(s, (int, Fraction)):
        return field.coerce(s if isinstance(s, Fraction) else int(s))
    if not isinstance(s, str):
        raise ScenarioError(f"scalar literal {s!r} must be a string")
    try:
        if hasattr(field, "parse"):
            return field.parse(s)
        return field.coerce(s)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise ScenarioError(f"bad scalar literal {s!r}: {e}")


def parse_matrix(field, rows, what="matrix"):
    if not isinstance(rows, list) or not rows or \
            not all(isinstance(r, list) for r in rows):
        raise ScenarioError(f"{what} must be a list of row lists")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ScenarioError(f"{what} is ragged")
    return [[parse_scalar(field, x) for x in row] for row in rows]


def parse_polys(field, block, what="normalization"):
    """Term lists -> coefficient dicts keyed by exponent tuples."""
    if not isinstance(block, list):
        raise ScenarioError(f"{what} must be a list of term lists")
    out = []
    for k, terms in enumerate(block):
        f = {}
        if not isinstance(terms, list) or not terms:
            raise ScenarioError(f"{what}[{k}] must be a non-empty term list")
        for term in terms:
            if (not isinstance(term, list) or len(term) != 2
                    or not isinstance(term[1], list)):
                raise ScenarioError(
                    f"{what}[{k}] terms are [coeff, [exponents]] pairs")
            coeff, expo = parse_scalar(field, term[0]), tuple(term[1])
            if any(not isinstance(e, int) or e < 0 for e in expo):
                raise ScenarioError(
                    f"{what}[{k}] exponents must be non-negative integers")
            f[expo] = f[expo] + coeff if expo in f else coeff
        out.append(f)
    return out


def parse_t_poly(s):
    """A polynomial string in t as an ascending Fraction list."""
    terms = parse_poly_literal(s, "t")
    deg = max(e for e, _ in terms)
    out = [Fraction(0)] * (deg + 1)
    for e, c in terms:
        out[e] += c
    return se.ptrim(out)


def _same_rf(fit, num_s, den_s="1"):
    """Exact equality of a RationalFunctionT against string num/den."""
    a, b = parse_t_poly(num_s), parse_t_poly(den_s)
    lhs = se.pmul([Fraction(x) for x in _frac_list(fit.num)], b)
    rhs = se.pmul([Fraction(x) for x in _frac_list(fit.den)], a)
    return se.ptrim(se.psub(lhs, rhs)) == [Fraction(0)]


def _frac_list(coeffs):
    out = []
    for c in coeffs:
        if hasattr(c, "as_fraction"):
            c = c.as_fraction()
        out.append(Fraction(c))
    return out


def _as_fraction(v):
    if v is None:
        return None
    if hasattr(v, "as_fraction"):
        return v.as_fraction()
    return Fraction(v)


# ---------------------------------------------------------------------------
# the runner
# ---------------------------------------------------------------------------

class Scenario:
    """A validated scenario document plus its block builders."""

    def __init__(self, doc, origin="<scenario>"):
        self.doc = doc
        self.origin = origin
        self.name = doc.get("name", os.path.basename(origin))
        self._cache = {}

    # --- block resolution -------------------------------------------------

    def _block(self, task, key):
        v = task.get(key, self.doc.get(key))
        if v is None:
            raise MissingBlock(
                f"{self.origin}: task {task['task']!r} needs a {key!r} block")
        return v

    def _cached(self, tag, block, builder):
        key = (tag, json.dumps(block, sort_keys=True))
        if key not in self._cache:
            self._cache[key] = builder(block)
        return self._cache[key]

    def field(self, task):
        return self._cached("field", self._block(task, "field"), build_field)

    def group(self, task, key="group"):
        field = self.field(task)
        block = self._block(task, key)
        return self._cached(key, block, lambda b: build_group(b, field))

    def element_index(self, task, G):
        block = self._block(task, "element")
        if isinstance(block, dict) and "data" in block:
            doc = resolve_data(block["data"])
            name = block.get("element")
            mats = doc.get("elements", {})
            if name not in mats:
                raise MissingBlock(
                    f"data file {block['data']} has no element {name!r}")
            mat = parse_matrix(G.field, mats[name], f"element {name}")
        else:
            mat = parse_matrix(G.field, block, "element")
        try:
            return G.index_of(mat)
        except gr.GroupError:
            raise ScenarioError("the designated element is not in the group")

    def gamma(self, task, field):
        block = task.get("gamma", self.doc.get("gamma"))
        if block is None:
            return None
        return self._cached("gamma", block, lambda b: build_gamma(b, field))

    def module(self, task, G):
        block = task.get("module", self.doc.get("module"))
        if block is None:
            block = {"kind": "trivial"}
        kind = block.get("kind")
        if kind == "induced":
            H = self.group(task, "subgroup") if (
                task.get("subgroup", self.doc.get("subgroup")) is not None
            ) else None
            if H is None:
                raise MissingBlock("induced module needs a subgroup block")
            c = None
            if task.get("element", self.doc.get("element")) is not None:
                c = self.element_index(task, G)
            return cs.induced_coset_module(G, H, c=c,
                                           D=self.truncation(task))
        return self._cached("module", block, lambda b: build_module(b, G))

    def normalization(self, task, field):
        block = task.get("normalization", self.doc.get("normalization"))
        if block is None:
            return None
        return self._polys(block, field)

    def _polys(self, block, field):
        if isinstance(block, dict) and "data" in block:
            doc = resolve_data(block["data"])
            name = block.get("name")
            norms = doc.get("normalizations", {})
            if name not in norms:
                raise MissingBlock(
                    f"data file {block['data']} has no normalization "
                    f"{name!r}")
            return parse_polys(field, norms[name], f"normalization {name}")
        return parse_polys(field, block)

    def truncation(self, task):
        D = task.get("truncation", self.doc.get("truncation"))
        if not isinstance(D, int) or D < 0:
            raise ScenarioError("truncation must be a non-negative integer")
        return D


def build_field(block):
    if not isinstance(block, dict) or "kind" not in block:
        raise ScenarioError("field block must be an object with a kind")
    kind = block["kind"]
    if kind in ("Q", "rational"):
        return QQ
    if kind == "cyclotomic":
        m = block.get("m")
        if not isinstance(m, int) or m < 3:
            raise ScenarioError(
                "cyclotomic field needs integer m >= 3 (use kind Q below)")
        return CyclotomicField(m)
    if kind == "finite":
        p, k = block.get("p"), block.get("k", 1)
        if not isinstance(p, int) or not isinstance(k, int) or k < 1:
            raise ScenarioError("finite field needs integer p and k >= 1")
        return FiniteField(p, k)
    raise ScenarioError(f"unknown field kind {kind!r}")


def build_group(block, field):
    if not isinstance(block, dict):
        raise ScenarioError("group block must be an object")
    if "data" in block:
        doc = resolve_data(block["data"])
        fblk = doc.get("field", {})
        if getattr(field, "p", None) != fblk.get("p") or \
                getattr(field, "k", None) != fblk.get("k"):
            raise ScenarioError(
                f"data file {block['data']} is over GF({fblk.get('p')}^"
                f"{fblk.get('k')}), the scenario field does not match")
        gens = [parse_matrix(field, m, "data generator")
                for m in doc["generators"]]
        if block.get("adjoin_minus_identity"):
            n = len(gens[0])
            gens.append([[-field.one() if i == j else field.zero()
                          for j in range(n)] for i in range(n)])
        return gr.generate_group(gens, field=field, dim=len(gens[0]))
    mats = block.get("generators")
    if mats is None:
        raise MissingBlock("group block has neither generators nor data")
    if not mats:
        dim = block.get("dim")
        if not isinstance(dim, int) or dim < 1:
            raise ScenarioError(
                "a generator-free group block needs an explicit dim")
        ident = [[field.one() if i == j else field.zero()
                  for j in range(dim)] for i in range(dim)]
        return gr.generate_group([ident], field=field, dim=dim)
    gens = [parse_matrix(field, m, "generator") for m in mats]
    return gr.generate_group(gens, field=field, dim=len(gens[0]))


def build_gamma(block, field):
    kind = block.get("kind", "cyclic")
    if kind == "trivial":
        return gt.trivial_theta(field)
    if kind != "cyclic":
        raise ScenarioError(f"unknown gamma kind {kind!r}")
    order = block.get("order")
    if not isinstance(order, int) or order < 1:
        raise ScenarioError("gamma needs an integer order")
    v = block.get("v")
    u = block.get("u")
    return gt.cyclic_theta(
        field, order,
        v_gen=None if v is None else parse_matrix(field, v, "gamma v"),
        u_gen=None if u is None else parse_matrix(field, u, "gamma u"),
        prefix=block.get("prefix", "c"))


def build_module(block, G):
    kind = block.get("kind")
    named = {"trivial": pa.trivial_U, "sign": pa.det_U, "det": pa.det_U,
             "natural": pa.natural_U, "dual": pa.dual_U,
             "regular": pa.regular_U}
    if kind in named:
        return named[kind](G)
    if kind == "matrices":
        taus = block.get("tau")
        if not isinstance(taus, list) or len(taus) != len(G.gen_indices):
            raise ScenarioError(
                "module tau needs one matrix per group generator")
        mats = [parse_matrix(G.field, m, "module tau") for m in taus]
        return BimoduleU_checked(mats, block.get("label", "U"), G)
    raise ScenarioError(f"unknown module kind {kind!r}")


def BimoduleU_checked(mats, label, G):
    dim = len(mats[0])
    U = pa.BimoduleU(dim, mats, label=label)
    U.verify(G)
    return U


# ---------------------------------------------------------------------------
# task dispatch
# ---------------------------------------------------------------------------

def run_scenario(scenario, truncation=None, jobs=1):
    """Execute every task in order.

    Returns a bundle dict with one report per task, per-task outcomes
    (verdict vs. expectation), and the process exit code: 0 when every
    task came out as declared, 2 when the only surprises were hypothesis
    failures, 1 for failed verifications or errors. Timings are kept
    apart from the reports so report bytes stay run-independent.
    """
    if jobs < 1:
        raise ScenarioError("--jobs must be at least 1")
    # jobs is accepted for interface stability; every engine here is
    # exact and single-threaded
    sc = scenario if isinstance(scenario, Scenario) else Scenario(scenario)
    if truncation is not None:
        doc = dict(sc.doc)
        doc["truncation"] = truncation
        doc["tasks"] = [{k: v for k, v in t.items() if k != "truncation"}
                        for t in doc["tasks"]]
        sc = Scenario(doc, origin=sc.origin)
    reports, outcomes, timings = [], [], []
    for i, task in enumerate(sc.doc["tasks"]):
        kind = task["task"]
        expect = task.get("expect", "pass")
        t0 = time.perf_counter()
        try:
            rep = _DISPATCH[kind](sc, task)
        except (gt.HypothesisFailure, gt.NotPRegular) as e:
            rep = {"task": kind, "verdict": "hypotheses unverified",
                   "reason": str(e), "expectations": []}
        timings.append(time.perf_counter() - t0)
        checks = rep.get("expectations", [])
        ok = (rep["verdict"] == expect) and all(c["ok"] for c in checks)
        outcomes.append({
            "index": i,
            "task": kind,
            "label": task.get("label", kind),
            "verdict": rep["verdict"],
            "expected": expect,
            "ok": ok,
        })
        reports.append(rep)
    if all(o["ok"] for o in outcomes):
        code = 0
    elif all(o["ok"] or o["verdict"] == "hypotheses unverified"
             for o in outcomes):
        code = 2
    else:
        code = 1
    return {
        "scenario": sc.name,
        "origin": sc.origin,
        "schema": SCHEMA,
        "tasks": reports,
        "outcomes": outcomes,
        "exit_code": code,
        "timings_s": timings,
    }


def _expect_rows(rows):
    return {"expectations": rows, "failed": [r["check"] for r in rows
                                             if not r["ok"]]}


def _row(check, ok, got=None, want=None):
    r = {"check": check, "ok": bool(ok)}
    if got is not None:
        r["got"] = got
    if want is not None:
        r["want"] = want
    return r


def _task_invariants(sc, task):
    field = sc.field(task)
    G = sc.group(task)
    D = sc.truncation(task)
    char = gt._field_char(field)
    act = pa.GroupPolyAction(G)
    ring = act.ring
    inv = pa.invariants_up_to(act, D)
    R = ho.subalgebra_by_degrees(inv)
    gens = gt._window_generators(R, ring)
    gdegs = sorted(pa.poly_degree(f) for f in gens)
    classes = G.conjugacy_classes(char)
    class_rows = sorted(
        ({"order": cl["order"], "size": cl["size"],
          "p_regular": cl["p_regular"]} for cl in classes),
        key=lambda r: (r["order"], r["size"]))

    rows = []
    if "expect_order" in task:
        rows.append(_row("group order", len(G) == task["expect_order"],
                         got=len(G), want=task["expect_order"]))
    if "expect_classes" in task:
        want = sorted((int(a), int(b)) for a, b in task["expect_classes"])
        got = sorted((r["size"], r["order"]) for r in class_rows)
        rows.append(_row("conjugacy classes (size, order)", got == want,
                         got=got, want=want))
    if "expect_dims" in task:
        want = list(task["expect_dims"])
        rows.append(_row("invariant dimensions", R.dims[:len(want)] == want,
                         got=R.dims[:len(want)], want=want))
    if "expect_generator_degrees" in task:
        want = list(task["expect_generator_degrees"])
        rows.append(_row("generator degrees", gdegs == want,
                         got=gdegs, want=want))

    fit = None
    hilbert = None
    den = task.get("den_degrees")
    if den:
        try:
            _, fit = se.hilbert_from_dims(R.dims, den_degrees=den)
            hilbert = str(fit)
            if "expect_numerator" in task:
                want = task["expect_numerator"]
                ok = _frac_list(fit.num) == parse_t_poly(want)
                rows.append(_row("hilbert numerator", ok,
                                 got=se._poly_str(fit.num), want=want))
        except se.NoStabilization as e:
            hilbert = None
            rows.append(_row("hilbert fit stabilized", False, got=str(e)))

    norm_reports = []
    for entry in task.get("normalizations", []):
        polys = sc._polys(entry["polys"], field)
        degs = [pa.poly_degree(f) for f in polys]
        nrep = {"degrees": degs}
        inv_ok = all(pa.verify_invariant_poly(act, f) for f in polys)
        rows.append(_row(f"normalization {degs} invariant", inv_ok))
        try:
            ho.polynomial_normalization(ring, polys, D)
            nrep["independent"] = True
            rows.append(_row(f"normalization {degs} independent", True))
        except ho.NotIndependent as e:
            nrep["independent"] = False
            rows.append(_row(f"normalization {degs} independent", False,
                             got=str(e)))
        if fit is None:
            rows.append(_row(f"X over degrees {degs}", False,
                             got="no certified hilbert fit (den_degrees)"))
            norm_reports.append(nrep)
            continue
        denpoly = [Fraction(1)]
        for dd in degs:
            factor = [Fraction(0)] * (dd + 1)
            factor[0], factor[dd] = Fraction(1), Fraction(-1)
            denpoly = se.pmul(denpoly, factor)
        x = fit * se.RationalFunctionT(denpoly)
        nrep["X"] = str(x)
        if "expect_X" in entry:
            ok = _same_rf(x, entry["expect_X"])
            rows.append(_row(f"X over degrees {degs}", ok, got=str(x),
                             want=entry["expect_X"]))
        for ev in entry.get("evaluate", []):
            pt = Fraction(ev["at"])
            er = se.evaluate_report(x, pt)
            want = Fraction(ev["expect"])
            ok = er["regular"] and _as_fraction(er["value"]) == want
            rows.append(_row(f"X({ev['at']}) over degrees {degs}", ok,
                             got=(str(er["value"]) if er["regular"]
                                  else f"pole of order {er['pole_order']}"),
                             want=ev["expect"]))
        norm_reports.append(nrep)

    verdict = "pass" if all(r["ok"] for r in rows) else "fail"
    return {
        "task": "invariants",
        "field": repr(field),
        "group_order": len(G),
        "truncation": D,
        "dims": list(R.dims),
        "generator_degrees": gdegs,
        "classes": class_rows,
        "hilbert": hilbert,
        "den_degrees": list(den) if den else None,
        "normalizations": norm_reports,
        "expectations": rows,
        "verdict": verdict,
    }


def _task_molien(sc, task):
    field = sc.field(task)
    G = sc.group(task)
    D = sc.truncation(task)
    char = gt._field_char(field)
    if char and len(G) % char == 0:
        raise ScenarioError(
            "molien task needs the group order invertible in the field")
    U = sc.module(task, G)
    U.verify(G)
    classes = G.conjugacy_classes(char)
    if char == 0:
        chi = []
        for cl in classes:
            m = U.tau(G, cl["rep"])
            tr = m[0][0]
            for i in range(1, U.dim):
                tr = tr + m[i][i]
            chi.append(tr)
        lift = "char0"
    else:
        _, _, ctx = G.splitting_context(char)
        chi = [gt.brauer_value(U.tau(G, cl["rep"]), field, ctx)
               for cl in classes]
        lift = ctx.fingerprint()
    mol = se.molien(G, chi, char=char, projective=(char != 0))
    coeffs = mol.series(D).coeffs
    act = pa.GroupPolyAction(G)
    M = pa.relative_invariants_up_to(act, U, D)
    rows = []
    for d in range(D + 1):
        want = Fraction(M.dims[d])
        got = _as_fraction(coeffs[d])
        rows.append(_row(f"degree {d}", got == want, got=str(coeffs[d]),
                         want=M.dims[d]))
    verdict = "pass" if all(r["ok"] for r in rows) else "fail"
    return {
        "task": "molien",
        "field": repr(field),
        "group_order": len(G),
        "U": U.label,
        "truncation": D,
        "lift": lift,
        "molien": str(mol),
        "kernel_dims": list(M.dims),
        "expectations": rows,
        "verdict": verdict,
    }


def _task_tor(sc, task):
    field = sc.field(task)
    G = sc.group(task)
    D = sc.truncation(task)
    char = gt._field_char(field)
    U = sc.module(task, G)
    U.verify(G)
    gamma = sc.gamma(task, field)
    theta = gamma if gamma is not None else gt.trivial_theta(field)
    gt._check_outer_pairs(G, U, theta)
    polys = sc.normalization(task, field)
    act = pa.GroupPolyAction(G)
    ring = act.ring
    ctx = gt.lift_context(field, theta.exponent(char))
    tr = gt.make_trace_fn(ctx)
    ta = theta.action(ring, udim=U.dim)
    inv = pa.invariants_up_to(act, D)
    R = ho.subalgebra_by_degrees(inv)
    M = pa.relative_invariants_up_to(act, U, D)
    notes = []
    engines, tab, agree, res = gt._run_engines(M, R, D, ta, tr, ring, act,
                                               polys, notes)
    top_j = max((j for (_i, j) in tab.dims), default=0)
    certified = ((res is not None and gt._resolution_terminated(res))
                 or ("koszul" in engines and top_j < D))
    reps = theta.p_regular_reps(char)
    ecs = ho.euler_character_series(M, R, theta=ta, D=D, trace_fn=tr)
    series_rows = []
    closed_fits = {}
    for r in reps:
        entry = {"label": r}
        try:
            fit = se.fit_rational(ecs[r])
            closed_fits[r] = fit
            entry["closed"] = str(fit)
            at1 = se.evaluate_report(fit, Fraction(1))
            entry["pole_order"] = at1["pole_order"]
            entry["value_at_1"] = at1["value"]
        except se.NoStabilization as e:
            closed_fits[r] = None
            entry["closed"] = None
            entry["note"] = str(e)
        series_rows.append(entry)

    rows = [_row("engines agree", agree is not False, got=sorted(engines))]
    # the unconditional identity: [M](t)/[R](t) against the alternating
    # character series of the table, classwise through the window
    consistent = True
    for r in reps:
        for j in range(min(D, tab.D) + 1):
            acc = Fraction(0)
            for (i, jj), vals in (tab.chars or {}).items():
                if jj == j:
                    v = vals.get(r, Fraction(0))
                    acc = acc + v if i % 2 == 0 else acc - v
            if acc != ecs[r].coeffs[j]:
                consistent = False
                break
    rows.append(_row("series identity classwise", consistent))
    if "expect_betti" in task:
        want = {(int(i), int(j)): int(v) for i, j, v in task["expect_betti"]}
        rows.append(_row("betti table", dict(tab.dims) == want,
                         got=sorted(tab.dims.items()),
                         want=sorted(want.items())))
    for label, spec_nd in (task.get("expect_closed") or {}).items():
        fit = closed_fits.get(label)
        ok = fit is not None and _same_rf(fit, spec_nd.get("num", "0"),
                                          spec_nd.get("den", "1"))
        rows.append(_row(f"closed form at {label}", ok,
                         got=None if fit is None else str(fit),
                         want=f"({spec_nd.get('num')}) / "
                              f"({spec_nd.get('den', '1')})"))
    for label, val in (task.get("expect_value_at_1") or {}).items():
        entry = next((e for e in series_rows if e["label"] == label), None)
        got = None if entry is None else entry.get("value_at_1")
        try:
            ok = got is not None and _as_fraction(got) == Fraction(val)
        except (ValueError, TypeError, ArithmeticError):
            ok = str(got) == val
        rows.append(_row(f"value at t=1 of {label}", ok,
                         got=None if got is None else str(got), want=val))

    verdict = "pass" if all(r["ok"] for r in rows) else "fail"
    return {
        "task": "tor",
        "field": repr(field),
        "group_order": len(G),
        "U": U.label,
        "theta_labels": theta.labels,
        "truncation": D,
        "lift": ctx.fingerprint(),
        "engines": sorted(engines),
        "engines_agree": agree,
        "hd": tab.hd_report,
        "window_certified": certified,
        "betti": dict(tab.dims),
        "series": series_rows,
        "notes": notes,
        "expectations": rows,
        "verdict": verdict,
    }


def _poles_of(rep):
    out = []
    for label, entry in rep["part_iii"]["classes"].items():
        if entry.get("pole_order"):
            out.append(label)
    return sorted(out)


def _task_omnibus(sc, task):
    field = sc.field(task)
    G = sc.group(task)
    U = sc.module(task, G)
    gamma = sc.gamma(task, field)
    polys = sc.normalization(task, field)
    rep = gt.verify_omnibus(G, U, sc.truncation(task), gamma=gamma,
                            polys=polys)
    rows = []
    if "expect_poles" in task:
        want = sorted(task["expect_poles"])
        got = _poles_of(rep)
        rows.append(_row("poles at t=1", got == want, got=got, want=want))
    for label, val in (task.get("expect_value_at_1") or {}).items():
        entry = rep["part_iii"]["classes"].get(label, {})
        got = entry.get("value_at_1")
        try:
            ok = got is not None and _as_fraction(got) == Fraction(val)
        except (ValueError, TypeError, ArithmeticError):
            ok = str(got) == val
        rows.append(_row(f"value at t=1 of {label}", ok,
                         got=None if got is None else str(got), want=val))
    for label, spec_nd in (task.get("expect_closed") or {}).items():
        fit = rep["series"].closed.get(label)
        ok = fit is not None and _same_rf(fit, spec_nd.get("num", "0"),
                                          spec_nd.get("den", "1"))
        rows.append(_row(f"closed form at {label}", ok,
                         got=None if fit is None else str(fit),
                         want=f"({spec_nd.get('num')}) / "
                              f"({spec_nd.get('den', '1')})"))
    rep["expectations"] = rows
    if rows and not all(r["ok"] for r in rows) and rep["verdict"] == "pass":
        rep["verdict"] = "fail"
    return rep


def _task_springer(sc, task):
    field = sc.field(task)
    G = sc.group(task)
    U = sc.module(task, G)
    c = sc.element_index(task, G)
    gamma = sc.gamma(task, field)
    polys = sc.normalization(task, field)
    rep = gt.verify_springer(G, U, c, sc.truncation(task), gamma=gamma,
                             polys=polys, mode=task.get("mode", "invariant"),
                             cap=task.get("fiber_cap", 10 ** 6))
    rows = []
    if "expect_classes" in task:
        want = {k: v for k, v in task["expect_classes"].items()}
        got = {r["label"]: str(r["right"]) for r in rep["classes"]}
        ok = all(got.get(k) == str(v) for k, v in want.items())
        rows.append(_row("class values", ok, got=got, want=want))
    rep["expectations"] = rows
    if rows and not all(r["ok"] for r in rows) and rep["verdict"] == "pass":
        rep["verdict"] = "fail"
    return rep


def _task_csp(sc, task):
    field = sc.field(task)
    G = sc.group(task)
    H = sc.group(task, "subgroup")
    c = sc.element_index(task, G)
    polys = sc.normalization(task, field)
    rep = cs.csp_check(G, H, c, sc.truncation(task), polys=polys,
                       den_degrees=task.get("den_degrees"))
    rows = []
    if "expect_fixed" in task:
        want = [int(x) for x in task["expect_fixed"]]
        got = [r["fixed"] for r in rep["rows"]]
        rows.append(_row("fixed-point counts", got == want, got=got,
                         want=want))
    if "expect_coefficients" in task:
        want = [Fraction(x) for x in task["expect_coefficients"]]
        got = rep["coefficients"].get("coeffs")
        ok = got is not None and [Fraction(x) for x in got] == want
        rows.append(_row("X coefficients", ok, got=got,
                         want=task["expect_coefficients"]))
    rep["expectations"] = rows
    if rows and not all(r["ok"] for r in rows) and rep["verdict"] == "pass":
        rep["verdict"] = "fail"
    return rep


def _task_modchar(sc, task):
    field = sc.field(task)
    G = sc.group(task)
    U = sc.module(task, G)
    g = sc.element_index(task, G)
    polys = sc.normalization(task, field)
    query = cs.ModularCharacterQuery(
        G, g, U, polys=polys, fiber_cap=task.get("fiber_cap", 10 ** 6))
    rep = cs.character_from_series(query, sc.truncation(task))
    rows = []
    if "expect_value" in task:
        want = task["expect_value"]
        got = rep["value"]
        try:
            ok = got is not None and _as_fraction(got) == Fraction(want)
        except (ValueError, TypeError, ArithmeticError):
            ok = str(got) == want
        rows.append(_row("character value", ok,
                         got=None if got is None else str(got), want=want))
    rep["expectations"] = rows
    if rows and not all(r["ok"] for r in rows) and rep["verdict"] == "pass":
        rep["verdict"] = "fail"
    return rep


_DISPATCH = {
    "invariants": _task_invariants,
    "molien": _task_molien,
    "tor": _task_tor,
    "omnibus": _task_omnibus,
    "springer": _task_springer,
    "csp": _task_csp,
    "modchar": _task_modchar,
}

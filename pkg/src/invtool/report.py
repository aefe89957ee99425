"""Report rendering: one run bundle, three deterministic serializations.

Reports carry exact objects (Fractions, cyclotomic numbers, rational
functions in t, class-indexed series). Rendering stringifies them
through their exact printers, so emitting twice from the same bundle is
byte-identical, and two runs of the same scenario produce the same
bytes because nothing run-relative is ever rendered: wall-clock timings
ride along in the bundle for the command line to put on stderr, and are
dropped here.

Formats: "text" is sectioned and aligned for reading, "json" is the
whole normalized bundle with sorted keys, "csv" is the flattened
key/value table (one row per leaf, path-addressed, so Betti entries
come out as betti[i,j] rows).
"""

import csv
import io
import json
from fractions import Fraction

from .groth import GrothSeries

# run-relative data stays out of every serialization
_DROP = frozenset({"timings_s"})


class ReportError(Exception):
    pass


def normalize(value):
    """Exact objects down to str/int/bool/None, recursively."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        raise ReportError(
            f"float {value!r} reached a report; exact values only")
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else str(value)
    if isinstance(value, GrothSeries):
        return {
            "closed": {lab: None if f is None else str(f)
                       for lab, f in sorted(value.closed.items())},
            "window": value.D,
        }
    if isinstance(value, (list, tuple)):
        return [normalize(v) for v in value]
    if isinstance(value, dict):
        out = {}
        for k, v in value.items():
            if isinstance(k, tuple):
                k = ",".join(str(x) for x in k)
            elif not isinstance(k, str):
                k = str(k)
            if k in _DROP:
                continue
            out[k] = normalize(v)
        return out
    return str(value)


def emit_report(bundle, format="text"):
    """Serialize a run bundle (or a single task report) to bytes."""
    norm = normalize(bundle)
    if format == "json":
        return (json.dumps(norm, sort_keys=True, indent=2,
                           ensure_ascii=True) + "\n").encode("ascii")
    if format == "csv":
        return _emit_csv(norm)
    if format == "text":
        return _emit_text(norm)
    raise ReportError(f"unknown format {format!r}")


# ---------------------------------------------------------------------------
# csv
# ---------------------------------------------------------------------------

def _flatten(prefix, value, rows):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], rows)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, "" if value is None else value))


def _emit_csv(norm):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["task", "name", "key", "value"])
    tasks = norm.get("tasks")
    if tasks is None:
        tasks, norm = [norm], {}
    outcomes = norm.get("outcomes", [])
    for i, rep in enumerate(tasks):
        name = rep.get("task", "")
        rows = []
        _flatten("", rep, rows)
        if i < len(outcomes):
            rows.append(("outcome.ok", outcomes[i]["ok"]))
            rows.append(("outcome.expected", outcomes[i]["expected"]))
        for key, val in rows:
            w.writerow([i, name, key, val])
    for key in ("scenario", "exit_code"):
        if key in norm:
            w.writerow(["", "", key, norm[key]])
    return buf.getvalue().encode("utf-8")


# ---------------------------------------------------------------------------
# text
# ---------------------------------------------------------------------------

def _is_table(val):
    return (isinstance(val, list) and val
            and all(isinstance(r, dict) for r in val)
            and len({frozenset(r) for r in val}) == 1)


def _cell(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _write_table(out, rows, indent):
    cols = list(rows[0].keys())
    grid = [[_cell(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(g[i]) for g in grid))
              for i, c in enumerate(cols)]
    pad = " " * indent
    out.append(pad + "  ".join(c.ljust(w) for c, w in zip(cols, widths)))
    for g in grid:
        out.append(pad + "  ".join(x.ljust(w) for x, w in zip(g, widths)))


def _write_value(out, key, val, indent):
    pad = " " * indent
    if _is_table(val):
        out.append(f"{pad}{key}:")
        _write_table(out, val, indent + 2)
    elif isinstance(val, dict):
        if not val:
            out.append(f"{pad}{key}: {{}}")
            return
        out.append(f"{pad}{key}:")
        for k in val:
            _write_value(out, k, val[k], indent + 2)
    elif isinstance(val, list):
        out.append(f"{pad}{key}: {json.dumps(val, sort_keys=True)}")
    else:
        out.append(f"{pad}{key}: {_cell(val)}")


# keys already shown in the task header line
_HEADER_KEYS = ("task", "verdict")


def _emit_text(norm):
    out = []
    if "tasks" in norm:
        out.append(f"invtool report: {norm.get('scenario', '?')}")
        out.append(f"schema: {norm.get('schema', '?')}")
        tasks = norm["tasks"]
        outcomes = norm.get("outcomes", [])
    else:
        tasks, outcomes = [norm], []
    for i, rep in enumerate(tasks):
        oc = outcomes[i] if i < len(outcomes) else None
        label = oc.get("label") if oc else None
        head = f"task {i}: {rep.get('task', '?')}"
        if label and label != rep.get("task"):
            head += f" ({label})"
        out.append("")
        out.append(head)
        out.append("-" * len(head))
        verdict = rep.get("verdict", "?")
        if oc:
            out.append(f"verdict: {verdict}  expected: {oc['expected']}  "
                       f"-> {'ok' if oc['ok'] else 'NOT OK'}")
        else:
            out.append(f"verdict: {verdict}")
        for key, val in rep.items():
            if key in _HEADER_KEYS:
                continue
            _write_value(out, key, val, 0)
    if "exit_code" in norm:
        ok = sum(1 for o in outcomes if o["ok"])
        out.append("")
        out.append(f"summary: {ok}/{len(outcomes)} tasks as declared; "
                   f"exit {norm['exit_code']}")
    return ("\n".join(out) + "\n").encode("utf-8")

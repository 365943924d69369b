"""Report serialization: deterministic JSON (17 significant digits) and summaries."""

import csv
import datetime as _dt
import json
import math
import os
import platform

import numpy as np

SCHEMA = "v1"


def _encode(obj):
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "to_dict"):
        return _encode(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj) + "\n"


def build(command, config, reports, extra=None):
    failed = [r for r in reports if not r.passed]
    doc = {
        "schema": SCHEMA,
        "command": command,
        "config": config,
        "summary": {"total": len(reports), "failed": len(failed), "pass": not failed},
        "reports": [r.to_dict() for r in reports],
    }
    if extra:
        doc.update(extra)
    return doc


def write(path, doc):
    """Write the report and a sidecar ``<path>.meta.json`` holding the timestamp."""
    with open(path, "w") as fh:
        fh.write(dumps(doc))
    meta = {
        "report": os.path.basename(path),
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "threads": os.environ.get("YPL_THREADS", ""),
    }
    with open(path + ".meta.json", "w") as fh:
        fh.write(dumps(meta))


def load(path):
    with open(path) as fh:
        return json.load(fh)


def summary_lines(reports):
    """One line per report, failures first."""
    rows = sorted(reports, key=lambda r: (r["pass"], r["model"], r["relation"]))
    out = []
    for r in rows:
        mark = "PASS" if r["pass"] else "FAIL"
        mx = r["max_abs"]
        mx = "n/a" if mx is None else f"{mx:.3e}"
        out.append(f"{mark}  {r['model']:<12} {r['case']:<3} {r['relation']:<48} "
                   f"max={mx} tol={r['tol']:.1e} n={r['samples']} rejects={r['rejects']}")
    return out


def collapse(reports):
    """Group per-component reports by (model, case, equation label)."""
    groups = {}
    for r in reports:
        label = r["relation"].split(" ")[0] if r["relation"].startswith("(") else r["relation"]
        key = (r["model"], r["case"], label)
        g = groups.setdefault(key, {"count": 0, "failed": 0, "max_abs": 0.0})
        g["count"] += 1
        g["failed"] += 0 if r["pass"] else 1
        if r["max_abs"] is not None:
            g["max_abs"] = max(g["max_abs"], r["max_abs"])
    return groups


def write_csv(path, reports):
    cols = ("model", "case", "relation", "samples", "max_abs", "mean_abs", "tol", "pass", "rejects")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in reports:
            w.writerow([format(r[c], ".17g") if isinstance(r[c], float) else r[c] for c in cols])

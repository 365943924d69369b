import json
import math

import numpy as np

from ypl import report
from ypl.algebra import check_relations, relation_set
from ypl.phasespace import ModelParams, SampleSpec
from ypl.realizations import yang_special


def test_floats_keep_seventeen_digits():
    x = 0.1 + 0.2
    text = report.dumps({"x": x, "y": np.float64(1 / 3)})
    back = json.loads(text)
    assert back["x"] == x and back["y"] == 1 / 3
    assert "0.30000000000000004" in text


def test_non_finite_becomes_null():
    back = json.loads(report.dumps([math.nan, math.inf, None, True, np.int64(3)]))
    assert back == [None, None, None, True, 3]


def _reports():
    p = ModelParams()
    return check_relations(yang_special(p), relation_set("yang", p)[:4], SampleSpec(count=20))


def test_build_write_load(tmp_path):
    doc = report.build("verify", {"case": "pp"}, _reports())
    assert doc["schema"] == "v1"
    assert doc["summary"] == {"total": 4, "failed": 0, "pass": True}
    path = str(tmp_path / "r.json")
    report.write(path, doc)
    assert report.load(path) == json.loads(report.dumps(doc))
    meta = report.load(path + ".meta.json")
    assert meta["report"] == "r.json" and "created" in meta


def test_summary_and_collapse():
    rows = [r.to_dict() for r in _reports()]
    rows[1] = dict(rows[1], **{"pass": False})
    lines = report.summary_lines(rows)
    assert lines[0].startswith("FAIL") and len(lines) == 4
    groups = report.collapse(rows)
    assert sum(g["count"] for g in groups.values()) == 4
    assert sum(g["failed"] for g in groups.values()) == 1


def test_csv_rows(tmp_path):
    path = tmp_path / "r.csv"
    report.write_csv(path, [r.to_dict() for r in _reports()])
    lines = path.read_text().splitlines()
    assert lines[0].startswith("model,case,relation") and len(lines) == 5

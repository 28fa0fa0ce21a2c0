"""Strict JSON model and ranges files, report serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path

from .kinematics import DHRow, InvalidInput, ManipulatorModel, PositionerModel
from .search import DH_KEYS, DHRanges

MODEL_KEYS = {"name", "dh"}
CSV_COLUMNS = (
    "id", "I2", "I3", "I4", "I5", "s2", "s3", "s4", "s5", "separating", "cell_count",
    "c2", "c3", "c4", "c5", "parity_even", "flags",
)


def _load(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise InvalidInput(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def parse_model(obj, source="model"):
    """ManipulatorModel (6 rows) or PositionerModel (3 rows) from a decoded object."""
    if not isinstance(obj, dict):
        raise InvalidInput(f"{source}: top level must be an object")
    extra = sorted(set(obj) - MODEL_KEYS)
    if extra:
        raise InvalidInput(f"{source}: unknown key {extra[0]!r}")
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise InvalidInput(f"{source}: 'name' must be a string")
    if "dh" not in obj:
        raise InvalidInput(f"{source}: missing key 'dh'")
    dh = obj["dh"]
    if not isinstance(dh, list):
        raise InvalidInput(f"{source}: 'dh' must be a list of rows")
    rows = []
    for i, rec in enumerate(dh):
        where = f"{source}: dh[{i}]"
        if not isinstance(rec, dict):
            raise InvalidInput(f"{where}: expected an object")
        extra = sorted(set(rec) - set(DH_KEYS))
        if extra:
            raise InvalidInput(f"{where}: unknown key {extra[0]!r}")
        missing = [k for k in DH_KEYS if k not in rec]
        if missing:
            raise InvalidInput(f"{where}: missing key {missing[0]!r}")
        rows.append(DHRow(*(_number(rec[k], f"{where}.{k}") for k in DH_KEYS)))
    if len(rows) not in (3, 6):
        raise InvalidInput(f"{source}: 'dh' must hold 6 rows (or 3 for a positioner), got {len(rows)}")
    cls = ManipulatorModel if len(rows) == 6 else PositionerModel
    return cls(tuple(rows), name)


def load_model(path):
    return parse_model(_load(path), str(path))


def model_to_dict(model) -> dict:
    return {"name": model.name, "dh": [r.as_dict() for r in model.rows]}


def save_model(path, model) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def parse_ranges(obj, source="ranges") -> DHRanges:
    """``{"dh": [6 x {key: number | [lo, hi]}]}``; a number pins the value."""
    if not isinstance(obj, dict) or set(obj) != {"dh"}:
        raise InvalidInput(f"{source}: expected an object with the single key 'dh'")
    dh = obj["dh"]
    if not isinstance(dh, list) or len(dh) != 6:
        raise InvalidInput(f"{source}: 'dh' must list 6 rows")
    rows = []
    for i, rec in enumerate(dh):
        where = f"{source}: dh[{i}]"
        if not isinstance(rec, dict):
            raise InvalidInput(f"{where}: expected an object")
        extra = sorted(set(rec) - set(DH_KEYS))
        if extra:
            raise InvalidInput(f"{where}: unknown key {extra[0]!r}")
        row = {}
        for key in DH_KEYS:
            v = rec.get(key, 0.0)
            if isinstance(v, list):
                if len(v) != 2:
                    raise InvalidInput(f"{where}.{key}: interval must be [lo, hi]")
                row[key] = tuple(_number(x, f"{where}.{key}") for x in v)
            else:
                x = _number(v, f"{where}.{key}")
                row[key] = (x, x)
        rows.append(row)
    return DHRanges(tuple(rows))


def load_ranges(path) -> DHRanges:
    return parse_ranges(_load(path), str(path))


def report_json(report, config=None) -> str:
    """Deterministic JSON text (key order fixed, no timestamps)."""
    body = report.as_dict()
    if config is not None:
        body = {"config": config, **body}
    return json.dumps(body, indent=2) + "\n"


def report_csv(report) -> str:
    """Branch table, one row per branch."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for b in report.branches:
        lab = list(b.class_label) + [""] * (4 - len(b.class_label))
        sig = list(b.class_signed) + [""] * (4 - len(b.class_signed))
        cr = list(b.crossing_total) + [""] * (4 - len(b.crossing_total))
        w.writerow([b.id, *lab, *sig, int(b.separating), b.cell_count, *cr, int(b.parity_even),
                    ";".join(b.flags)])
    return buf.getvalue()


def fixture_names() -> list[str]:
    root = resources.files("sixr") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def fixture(name: str):
    """Load a shipped DH fixture by stem, e.g. ``fixture("arm_a")``."""
    path = resources.files("sixr") / "fixtures" / f"{name}.json"
    if not path.is_file():
        raise InvalidInput(f"unknown fixture {name!r}; have {fixture_names()}")
    return parse_model(json.loads(path.read_text()), f"fixture {name}")

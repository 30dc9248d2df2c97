"""Knot file formats and report serialisation.

Knot JSON::

    {"schema": 1, "name": "trefoil", "vertices": [[x, y, z], ...]}

Closure is implicit. XYZ is one ``x y z`` triple per line. Coordinates are
written with 17 significant digits so files round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import KnotError
from .geometry import PolylineKnot, build_knot

SCHEMA = 1


class KnotFormatError(KnotError):
    pass


def _num(x: float) -> str:
    return format(float(x), ".17g")


def knot_to_json(knot: PolylineKnot, config: dict | None = None) -> str:
    rows = ",\n    ".join("[" + ", ".join(_num(c) for c in v) + "]" for v in knot.vertices)
    head = {"schema": SCHEMA, "name": knot.name}
    if config is not None:
        head["config"] = config
    text = json.dumps(head, sort_keys=True)[:-1]
    return text + ',\n  "vertices": [\n    ' + rows + "\n  ]\n}\n"


def knot_from_json(text: str) -> PolylineKnot:
    try:
        data = json.loads(text)
        verts = data["vertices"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise KnotFormatError(f"not a knot JSON document: {exc}") from None
    return build_knot(np.asarray(verts, dtype=float), name=str(data.get("name", "knot")))


def knot_to_xyz(knot: PolylineKnot) -> str:
    return "".join(" ".join(_num(c) for c in v) + "\n" for v in knot.vertices)


def knot_from_xyz(text: str, name: str = "knot") -> PolylineKnot:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise KnotFormatError(f"line {lineno}: expected 3 numbers, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise KnotFormatError(f"line {lineno}: not a number") from None
    return build_knot(np.asarray(rows, dtype=float).reshape(-1, 3), name=name)


def read_knot(path) -> PolylineKnot:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".xyz":
        return knot_from_xyz(text, name=path.stem)
    return knot_from_json(text)


def write_knot(knot: PolylineKnot, path, config: dict | None = None) -> None:
    path = Path(path)
    if path.suffix.lower() == ".xyz":
        path.write_text(knot_to_xyz(knot))
    else:
        path.write_text(knot_to_json(knot, config))


def _plain(obj):
    """Convert numpy scalars/arrays and non-finite floats for JSON output."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps_report(payload: dict) -> str:
    """Deterministic JSON text for a report dictionary."""
    body = {"schema": SCHEMA, **_plain(payload)}
    return json.dumps(body, indent=2, sort_keys=True, allow_nan=False) + "\n"


def dumps_csv(header: list[str], rows, config: dict | None = None) -> str:
    """CSV text preceded by ``# schema`` and ``# config`` comment lines."""
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA}\n")
    if config is not None:
        buf.write("# config: " + json.dumps(_plain(config), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def loads_csv(text: str) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]

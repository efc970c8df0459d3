"""File formats for distributions, tables, constraints and reports.

Distributions are CSV ``label,prob`` rows (header optional) or a JSON array.
Tables are CSV matrices whose first row and first column may hold labels, or
JSON nested arrays (the only format for three-way tables). Parsing never
depends on the locale: ``.`` is the decimal separator.

Reports are JSON. Non-finite floats are written as the strings ``"inf"``,
``"-inf"`` and ``"nan"`` so the output stays strict JSON.
"""

import csv
import io as _io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import FormatError


def _read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FormatError(f"no such file: {path}") from None
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path} is not UTF-8 text: {exc}") from None
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None


def load_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def _num(cell):
    cell = cell.strip()
    try:
        return float(cell)
    except ValueError:
        return None


def _is_json(path, text):
    return str(path).lower().endswith(".json") or text.lstrip()[:1] in ("[", "{")


def _csv_rows(text):
    rows = [row for row in csv.reader(_io.StringIO(text)) if row and any(c.strip() for c in row)]
    if not rows:
        raise FormatError("empty CSV input")
    return rows


def read_vector(path):
    """Return ``(values, labels)`` from a distribution or count file."""
    text = _read_text(path)
    if _is_json(path, text):
        data = load_json(path)
        if isinstance(data, dict):
            values, labels = data.get("probs", data.get("counts")), data.get("labels")
        else:
            values, labels = data, None
        try:
            values = np.array(values, dtype=np.float64)
        except (TypeError, ValueError):
            raise FormatError(f"{path}: expected an array of numbers") from None
        if values.ndim != 1:
            raise FormatError(f"{path}: expected a flat array")
        return values, labels
    rows = _csv_rows(text)
    if len(rows[0]) >= 2 and _num(rows[0][-1]) is None:
        rows = rows[1:]  # header
    values, labels = [], []
    for i, row in enumerate(rows):
        if len(row) == 1:
            v, lab = _num(row[0]), None
        elif len(row) == 2:
            lab, v = row[0].strip(), _num(row[1])
        else:
            raise FormatError(f"{path}: line {i + 1} has {len(row)} fields, expected label,prob")
        if v is None:
            raise FormatError(f"{path}: line {i + 1}: not a number")
        values.append(v)
        labels.append(lab)
    labels = None if all(lab is None for lab in labels) else labels
    return np.array(values), labels


def read_table(path):
    """Return ``(array, row_labels, col_labels)``; labels may be ``None``."""
    text = _read_text(path)
    if _is_json(path, text):
        data = load_json(path)
        if isinstance(data, dict):
            arr, rl, cl = data.get("probs", data.get("counts")), data.get("row_labels"), data.get("col_labels")
        else:
            arr, rl, cl = data, None, None
        try:
            arr = np.array(arr, dtype=np.float64)
        except (TypeError, ValueError):
            raise FormatError(f"{path}: expected nested arrays of numbers") from None
        if arr.ndim not in (2, 3):
            raise FormatError(f"{path}: expected a 2-d or 3-d array, got {arr.ndim}-d")
        return arr, rl, cl
    rows = _csv_rows(text)
    col_labels = None
    if any(_num(c) is None for c in rows[0][1:]) or (len(rows[0]) == 1 and _num(rows[0][0]) is None):
        col_labels = [c.strip() for c in rows[0]]
        rows = rows[1:]
    row_labels = None
    if rows and all(_num(r[0]) is None for r in rows):
        row_labels = [r[0].strip() for r in rows]
        rows = [r[1:] for r in rows]
        if col_labels is not None and len(col_labels) == len(rows[0]) + 1:
            col_labels = col_labels[1:]
    if not rows:
        raise FormatError(f"{path}: table has no data rows")
    width = len(rows[0])
    out = []
    for i, r in enumerate(rows):
        if len(r) != width:
            raise FormatError(f"{path}: row {i + 1} has {len(r)} cells, expected {width}")
        vals = [_num(c) for c in r]
        if any(v is None for v in vals):
            raise FormatError(f"{path}: row {i + 1} has a non-numeric cell")
        out.append(vals)
    return np.array(out), row_labels, col_labels


def read_constraints(path):
    """List of ``(coeffs, target)`` pairs from a JSON array (a single object is accepted too)."""
    data = load_json(path)
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not data:
        raise FormatError(f"{path}: expected a nonempty array of {{coeffs, target}} objects")
    out = []
    for i, item in enumerate(data):
        try:
            coeffs = np.array(item["coeffs"], dtype=np.float64).ravel()
            target = float(item["target"])
        except (KeyError, TypeError, ValueError):
            raise FormatError(f"{path}: constraint {i} needs numeric 'coeffs' and 'target'") from None
        out.append((coeffs, target))
    return out


def read_hypotheses(path):
    """``(models, priors)`` from a JSON list of ``{prior, probs}``."""
    data = load_json(path)
    if not isinstance(data, list) or not data:
        raise FormatError(f"{path}: expected a nonempty array of {{prior, probs}} objects")
    try:
        models = [np.array(h["probs"], dtype=np.float64) for h in data]
        priors = [float(h.get("prior", 1.0)) for h in data]
    except (KeyError, TypeError, ValueError, AttributeError):
        raise FormatError(f"{path}: each hypothesis needs numeric 'probs' (and optional 'prior')") from None
    return models, priors


def read_em_problem(path):
    data = load_json(path)
    try:
        components = np.array(data["components"], dtype=np.float64)
        observed = np.array(data["observed"], dtype=np.float64)
    except (KeyError, TypeError, ValueError):
        raise FormatError(f"{path}: expected {{components: [[...]], observed: [...]}}") from None
    if components.ndim != 2 or observed.ndim != 1:
        raise FormatError(f"{path}: components must be a matrix and observed a vector")
    return components, observed


def read_corpus(path):
    return _read_text(path)


def jsonable(obj):
    """Recursively convert numpy values and non-finite floats for strict JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(obj):
    return json.dumps(jsonable(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_atomic(text, path):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

"""JSON and CSV formats. Floats are always written with 17 significant digits."""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .constructions.families import BasisFamily
from .errors import ParseError
from .measurement import Povm


def fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        # JSON has no literal for these
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON text; floats at 17 significant digits.

    Flat lists of numbers (matrix entries, ``[re, im]`` pairs) stay on one line.
    """
    pad = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 2)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 2) for v in seq) + "\n" + " " * indent + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.ravel(values)]


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"rows": a.shape[0], "cols": a.shape[1], "entries": _pairs(a)}


def _field(obj, key, where):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    return obj[key]


def _complex_array(entries, where) -> np.ndarray:
    if not isinstance(entries, list):
        raise ParseError(f"{where}: expected a list of [re, im] pairs")
    out = np.empty(len(entries), dtype=complex)
    for i, e in enumerate(entries):
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in e)):
            raise ParseError(f"{where}[{i}]: expected [re, im] numbers, got {e!r}")
        out[i] = complex(e[0], e[1])
    return out


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    rows = _field(obj, "rows", where)
    cols = _field(obj, "cols", where)
    if not all(isinstance(v, int) and v >= 0 for v in (rows, cols)):
        raise ParseError(f"{where}: rows and cols must be non-negative integers")
    flat = _complex_array(_field(obj, "entries", where), f"{where}.entries")
    if flat.size != rows * cols:
        raise ParseError(f"{where}: {flat.size} entries for a {rows}x{cols} matrix")
    return flat.reshape(rows, cols)


def povm_to_json(povm: Povm, embedding: dict | None = None) -> dict:
    out = {"dim": povm.dim, "complete": bool(povm.complete),
           "effects": [matrix_to_json(e) for e in povm.effects]}
    if embedding is not None:
        out["embedding"] = embedding
    return out


def povm_from_json(obj, where: str = "povm") -> Povm:
    dim = _field(obj, "dim", where)
    complete = _field(obj, "complete", where)
    if not isinstance(complete, bool):
        raise ParseError(f"{where}.complete: expected true or false")
    effects = _field(obj, "effects", where)
    if not isinstance(effects, list) or not effects:
        raise ParseError(f"{where}.effects: expected a non-empty list")
    mats = [matrix_from_json(e, f"{where}.effects[{i}]") for i, e in enumerate(effects)]
    for i, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise ParseError(f"{where}.effects[{i}]: shape {m.shape} does not match dim {dim}")
    return Povm(np.array(mats), complete=complete)


def family_to_json(fam: BasisFamily) -> dict:
    return {"dim": fam.dim, "bases": [[_pairs(ket) for ket in basis] for basis in fam.bases]}


def family_from_json(obj, where: str = "family") -> BasisFamily:
    dim = _field(obj, "dim", where)
    bases = _field(obj, "bases", where)
    if not isinstance(bases, list) or not bases:
        raise ParseError(f"{where}.bases: expected a non-empty list")
    arr = []
    for b, basis in enumerate(bases):
        if not isinstance(basis, list) or len(basis) != dim:
            raise ParseError(f"{where}.bases[{b}]: expected {dim} kets")
        kets = [_complex_array(k, f"{where}.bases[{b}][{j}]") for j, k in enumerate(basis)]
        if any(k.size != dim for k in kets):
            raise ParseError(f"{where}.bases[{b}]: every ket needs {dim} entries")
        arr.append(kets)
    return BasisFamily(np.array(arr))


def loads(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def read_json(path) -> object:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return loads(text, str(path))


def complex_cell(z: complex) -> str:
    z = complex(z)
    return f"{fmt(z.real)}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{fmt(abs(z.imag))}j"


def matrix_to_csv(a) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(a, dtype=complex):
        writer.writerow(complex_cell(z) for z in row)
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = []
    for r, row in enumerate(csv.reader(io.StringIO(text))):
        try:
            rows.append([complex(cell.strip()) for cell in row])
        except ValueError as exc:
            raise ParseError(f"csv row {r + 1}: {exc}") from exc
    if len({len(r) for r in rows}) > 1:
        raise ParseError("csv rows have different lengths")
    return np.array(rows, dtype=complex)


def table_to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(fmt(v) if isinstance(v, (float, np.floating)) else
                        ("true" if v is True else "false" if v is False else ("" if v is None else v))
                        for v in row)
    return buf.getvalue()


def distribution_to_csv(probs) -> str:
    return table_to_csv(["index", "probability"], [(i, float(p)) for i, p in enumerate(probs)])

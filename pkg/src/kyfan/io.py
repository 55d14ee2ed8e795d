"""Text file format for states, operators, Kraus lists, POVMs and vectors.

Files are JSON documents with a ``kind`` tag, dimensions, and separate
real/imaginary arrays.  Numbers are written with 17 significant digits so
that parsing and re-emitting a file is lossless; a file produced by
:func:`emit` is *canonical* and ``emit(parse(text)) == text`` holds byte for
byte.

Example state file::

    {
      "kind": "state",
      "dim": 2,
      "re": [
        [0.5, 0],
        [0, 0.5]
      ],
      "im": [
        [0, 0],
        [0, 0]
      ]
    }
"""
from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .channels import build_channel
from .errors import ParseError
from .measurements import validate_povm
from .states import validate_density

KINDS = ("state", "operator", "kraus_list", "povm", "vector")


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _is_scalar(x) -> bool:
    return x is None or isinstance(x, (bool, int, float, str, np.number, np.bool_))


def dumps(obj, level: int = 0) -> str:
    """Deterministic JSON rendering; flat lists stay on one line."""
    pad = "  " * (level + 1)
    end = "  " * level
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if all(_is_scalar(v) for v in obj):
            return "[" + ", ".join(dumps(v, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, level + 1) for v in obj) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, int, float, np.number, np.bool_)):
        return format_number(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def matrix_fields(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


@dataclass
class MatrixFile:
    """Parsed file contents.

    ``matrices`` holds one matrix for ``state``/``operator``, several for
    ``kraus_list``/``povm``; ``vector`` holds the values of a ``vector`` file.
    """

    kind: str
    matrices: list[np.ndarray]
    vector: np.ndarray | None = None

    def to_obj(self) -> dict:
        if self.kind == "vector":
            return {"kind": "vector", "length": int(self.vector.size), "values": self.vector.tolist()}
        if self.kind == "state":
            return {"kind": "state", "dim": self.matrices[0].shape[0], **matrix_fields(self.matrices[0])}
        if self.kind == "operator":
            rows, cols = self.matrices[0].shape
            return {"kind": "operator", "rows": rows, "cols": cols, **matrix_fields(self.matrices[0])}
        if self.kind == "kraus_list":
            dim_out, dim_in = self.matrices[0].shape
            return {"kind": "kraus_list", "dim_in": dim_in, "dim_out": dim_out,
                    "operators": [matrix_fields(m) for m in self.matrices]}
        if self.kind == "povm":
            return {"kind": "povm", "dim": self.matrices[0].shape[0],
                    "elements": [matrix_fields(m) for m in self.matrices]}
        raise ValueError(f"unknown kind {self.kind!r}")


def emit(f: MatrixFile) -> str:
    return dumps(f.to_obj()) + "\n"


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(where, f"missing field {key!r}")
    return obj[key]


def _int_field(obj: dict, key: str, where: str) -> int:
    v = _require(obj, key, where)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ParseError(f"{where}.{key}", f"expected a positive integer, got {v!r}")
    return v


def _real_grid(value, rows: int, cols: int, where: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != rows:
        raise ParseError(where, f"expected {rows} rows")
    out = np.empty((rows, cols))
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != cols:
            raise ParseError(f"{where}[{i}]", f"expected {cols} entries")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise ParseError(f"{where}[{i}][{j}]", f"expected a finite number, got {x!r}")
            out[i, j] = x
    return out


def _complex_grid(obj, rows: int, cols: int, where: str) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError(where, "expected an object with 're' and 'im'")
    re = _real_grid(_require(obj, "re", where), rows, cols, f"{where}.re")
    im = _real_grid(_require(obj, "im", where), rows, cols, f"{where}.im")
    out = np.empty((rows, cols), dtype=np.complex128)
    out.real, out.imag = re, im  # keeps signed zeros, unlike re + 1j * im
    return out


def parse(text: str) -> MatrixFile:
    try:
        # "-0" must stay a float so that negative zeros round-trip
        obj = json.loads(text, parse_int=lambda t: -0.0 if t == "-0" else int(t))
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    if not isinstance(obj, dict):
        raise ParseError("document", "expected a JSON object")
    kind = _require(obj, "kind", "document")
    if kind not in KINDS:
        raise ParseError("kind", f"expected one of {KINDS}, got {kind!r}")
    if kind == "vector":
        n = _int_field(obj, "length", "document")
        values = _real_grid([_require(obj, "values", "document")], 1, n, "values")[0]
        return MatrixFile("vector", [], values)
    if kind == "state":
        d = _int_field(obj, "dim", "document")
        return MatrixFile("state", [_complex_grid(obj, d, d, "document")])
    if kind == "operator":
        rows, cols = _int_field(obj, "rows", "document"), _int_field(obj, "cols", "document")
        return MatrixFile("operator", [_complex_grid(obj, rows, cols, "document")])
    if kind == "kraus_list":
        dim_in, dim_out = _int_field(obj, "dim_in", "document"), _int_field(obj, "dim_out", "document")
        ops = _require(obj, "operators", "document")
        if not isinstance(ops, list) or not ops:
            raise ParseError("operators", "expected a non-empty list")
        return MatrixFile("kraus_list", [_complex_grid(o, dim_out, dim_in, f"operators[{i}]") for i, o in enumerate(ops)])
    d = _int_field(obj, "dim", "document")
    elements = _require(obj, "elements", "document")
    if not isinstance(elements, list) or not elements:
        raise ParseError("elements", "expected a non-empty list")
    return MatrixFile("povm", [_complex_grid(e, d, d, f"elements[{i}]") for i, e in enumerate(elements)])


def parse_kind(text: str, kind: str) -> MatrixFile:
    f = parse(text)
    if f.kind != kind:
        raise ParseError("kind", f"expected a {kind!r} file, got {f.kind!r}")
    return f


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_state(path: str, tol: float = 1e-10):
    return validate_density(parse_kind(read_text(path), "state").matrices[0], tol)


def load_channel(path: str, tol: float = 1e-9):
    return build_channel(parse_kind(read_text(path), "kraus_list").matrices, tol)


def load_povm(path: str):
    return validate_povm(parse_kind(read_text(path), "povm").matrices)


def load_vector(path: str) -> np.ndarray:
    return parse_kind(read_text(path), "vector").vector


def state_text(rho) -> str:
    m = rho.matrix if hasattr(rho, "matrix") else np.asarray(rho)
    return emit(MatrixFile("state", [m]))


def povm_text(povm) -> str:
    return emit(MatrixFile("povm", list(povm.elements)))


def kraus_text(channel) -> str:
    return emit(MatrixFile("kraus_list", list(channel.kraus)))


def vector_text(values) -> str:
    return emit(MatrixFile("vector", [], np.asarray(values, dtype=float)))

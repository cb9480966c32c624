"""Schema-versioned JSON for distributions, morphisms and quadratic forms.

Floats are written with 17 significant digits, so canonical values survive
an export/import/export cycle bit for bit.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .category import GaussExMorphism
from .errors import GaussExError
from .extgauss import ExtendedGaussian
from .linalg import Subspace
from .quadratic import PartialQuadratic

__all__ = ["SCHEMA", "to_jsonable", "from_jsonable", "dumps", "export_json", "import_json"]

SCHEMA = "gaussex/1"


class SchemaError(GaussExError):
    pass


def _mat(a: np.ndarray) -> list:
    return np.asarray(a, dtype=float).tolist()


def to_jsonable(obj):
    """Plain dict/list form of a library value (no schema tag)."""
    if isinstance(obj, ExtendedGaussian):
        return {
            "type": "extended_gaussian",
            "dim": obj.dim,
            "fibre_dim": obj.fibre_dim,
            "fibre_basis": _mat(obj.fibre.canonical_basis()),
            "mean": _mat(obj.mean),
            "cov": _mat(obj.cov),
        }
    if isinstance(obj, GaussExMorphism):
        return {
            "type": "morphism",
            "dom": obj.dom_dim,
            "cod": obj.cod_dim,
            "matrix": _mat(obj.matrix),
            "noise": to_jsonable(obj.noise),
        }
    if isinstance(obj, PartialQuadratic):
        return {
            "type": "partial_quadratic",
            "dim": obj.dim,
            "A": _mat(obj.A),
            "lin": _mat(obj.lin),
            "offset": float(obj.offset),
            "domain_basis": _mat(obj.domain.canonical_basis()),
            "shift": _mat(obj.shift),
        }
    if isinstance(obj, np.ndarray):
        return _mat(obj)
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _array(rows, shape) -> np.ndarray:
    a = np.array(rows, dtype=float)
    return a.reshape(shape)


def from_jsonable(data):
    kind = data.get("type") if isinstance(data, dict) else None
    if kind == "extended_gaussian":
        n = int(data["dim"])
        d = int(data["fibre_dim"])
        basis = np.array(data["fibre_basis"], dtype=float).reshape(n, d)
        return ExtendedGaussian(
            Subspace(basis, _canonical=True),
            _array(data["mean"], (n,)),
            _array(data["cov"], (n, n)),
        )
    if kind == "morphism":
        m, n = int(data["dom"]), int(data["cod"])
        return GaussExMorphism(_array(data["matrix"], (n, m)), from_jsonable(data["noise"]))
    if kind == "partial_quadratic":
        n = int(data["dim"])
        basis = np.array(data["domain_basis"], dtype=float).reshape(n, -1) if n else np.zeros((0, 0))
        return PartialQuadratic(
            _array(data["A"], (n, n)),
            _array(data["lin"], (n,)),
            float(data["offset"]),
            Subspace(basis, _canonical=True),
            _array(data["shift"], (n,)),
        )
    raise SchemaError(f"unknown value type {kind!r}")


def _number(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0.0:
        return "-0.0" if math.copysign(1.0, x) < 0 else "0.0"
    return "%.17g" % x


def _emit(v, indent, level, out):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if isinstance(v, bool) or v is None:
        out.append(json.dumps(v))
    elif isinstance(v, int):
        out.append(str(v))
    elif isinstance(v, float):
        out.append(_number(v))
    elif isinstance(v, str):
        out.append(json.dumps(v, ensure_ascii=False))
    elif isinstance(v, dict):
        if not v:
            out.append("{}")
            return
        out.append("{")
        for i, (k, item) in enumerate(v.items()):
            out.append((sep if i else "") + pad + json.dumps(str(k)) + ": ")
            _emit(item, indent, level + 1, out)
        out.append(end + "}")
    elif isinstance(v, (list, tuple)):
        # numeric rows stay on one line
        flat = all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
        if not v or flat or indent is None:
            out.append("[")
            for i, item in enumerate(v):
                out.append(", " if i else "")
                _emit(item, None, 0, out)
            out.append("]")
            return
        out.append("[")
        for i, item in enumerate(v):
            out.append((sep if i else "") + pad)
            _emit(item, indent, level + 1, out)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(value, indent: int | None = 2) -> str:
    out: list[str] = []
    _emit(to_jsonable(value), indent, 0, out)
    return "".join(out)


def export_json(obj, indent: int | None = 2, **extra) -> str:
    """JSON text for ``obj`` tagged with the schema version."""
    body = to_jsonable(obj)
    doc = {"schema": SCHEMA}
    doc.update(body if isinstance(body, dict) else {"value": body})
    doc.update(extra)
    return dumps(doc, indent)


def import_json(text: str):
    data = json.loads(text)
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise SchemaError(f"expected a {SCHEMA} document")
    return from_jsonable(data)

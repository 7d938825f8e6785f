"""JSON interchange documents.

Every document is an object with a ``kind`` field.  Complex numbers are
two-element ``[re, im]`` arrays, matrices are lists of rows of those, and
all indices and symbols are 1-based.  :func:`dumps` is canonical: keys are
sorted, floats are written with 17 significant digits and ``-0`` is written
as ``0``, so equal values serialize to identical bytes.

Kinds: ``qms``, ``qls``, ``latin``, ``basis``, ``povm``, ``decomposition``,
``combination``, ``isometries``, ``bundle``, ``report``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .construct import CounterexampleBundle
from .errors import MagicSquareError
from .mconv import MatrixConvexCombination
from .squares import LatinSquare, QuantumLatinSquare, QuantumMagicSquare, SemiclassicalDecomposition


class DocumentError(MagicSquareError):
    pass


# -- canonical text ---------------------------------------------------------

def _number(x: float) -> str:
    if not math.isfinite(x):
        raise DocumentError(f"cannot serialize non-finite number {x!r}")
    if x == 0:
        return "0"
    return format(x, ".17g")


def _emit(x, depth: int) -> str:
    pad = "  " * depth
    if isinstance(x, dict):
        if not x:
            return "{}"
        body = ",\n".join(
            f"{pad}  {json.dumps(str(k))}: {_emit(x[k], depth + 1)}" for k in sorted(x)
        )
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(x, (list, tuple)):
        if any(isinstance(e, dict) for e in x):
            body = ",\n".join(pad + "  " + _emit(e, depth + 1) for e in x)
            return "[\n" + body + "\n" + pad + "]"
        return "[" + ",".join(_emit(e, depth) for e in x) + "]"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return _number(float(x))
    if isinstance(x, str):
        return json.dumps(x)
    raise DocumentError(f"cannot serialize {type(x).__name__}")


def dumps(doc: dict) -> str:
    return _emit(doc, 0) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "kind" not in doc:
        raise DocumentError("document must be an object with a 'kind' field")
    return doc


def read(path) -> dict:
    """Load a document; ``file.json#member`` selects a member of a bundle."""
    path = str(path)
    member = None
    if "#" in path:
        path, member = path.rsplit("#", 1)
    try:
        doc = loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    if member is not None:
        if doc.get("kind") != "bundle" or member not in doc.get("documents", {}):
            raise DocumentError(f"{path} has no bundle member {member!r}")
        doc = doc["documents"][member]
    return doc


def write(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


# -- numbers and matrices ---------------------------------------------------

def encode_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode_array(x) for x in a]


def decode_array(data, ndim: int, what: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{what}: ragged or non-numeric data") from exc
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise DocumentError(f"{what}: expected {ndim}-D array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _field(doc: dict, key: str):
    if key not in doc:
        raise DocumentError(f"{doc.get('kind')} document is missing field {key!r}")
    return doc[key]


def _decode_grid(doc: dict) -> np.ndarray:
    """Decode ``entries`` cell by cell so errors can name the offending cell."""
    n = int(_field(doc, "n"))
    s = int(_field(doc, "s"))
    rows = _field(doc, "entries")
    if not isinstance(rows, list) or len(rows) != n:
        raise DocumentError(f"entries must have {n} rows")
    out = np.empty((n, n, s, s), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise DocumentError(f"row {i + 1} has {len(row) if isinstance(row, list) else 'no'} cells, expected {n}")
        for j, cell in enumerate(row):
            m = decode_array(cell, 2, f"cell ({i + 1}, {j + 1})")
            if m.shape != (s, s):
                raise DocumentError(f"cell ({i + 1}, {j + 1}) has shape {m.shape}, expected {(s, s)}")
            out[i, j] = m
    return out


# -- objects <-> documents --------------------------------------------------

def qms_doc(a: QuantumMagicSquare) -> dict:
    return {"kind": "qms", "n": a.n, "s": a.s, "entries": encode_array(a.entries)}


def qls_doc(q: QuantumLatinSquare) -> dict:
    return {"kind": "qls", "n": q.n, "cells": encode_array(q.cells)}


def latin_doc(latin: LatinSquare) -> dict:
    return {"kind": "latin", "n": latin.n, "cells": latin.cells.tolist()}


def basis_doc(basis) -> dict:
    basis = np.asarray(basis, dtype=complex)
    return {"kind": "basis", "n": basis.shape[0], "vectors": encode_array(basis)}


def povm_doc(elements) -> dict:
    elements = np.asarray(elements, dtype=complex)
    return {"kind": "povm", "s": elements.shape[1], "elements": encode_array(elements)}


def decomposition_doc(d: SemiclassicalDecomposition) -> dict:
    return {
        "kind": "decomposition", "n": d.n, "s": d.s,
        "terms": [{"perm": list(p.images), "q": encode_array(q)} for p, q in d.terms],
    }


def combination_doc(c: MatrixConvexCombination) -> dict:
    return {
        "kind": "combination", "n": c.n, "t": c.t,
        "terms": [{"source": qms_doc(src), "v": encode_array(v)} for src, v in c.terms],
    }


def isometries_doc(vs, t: int) -> dict:
    return {"kind": "isometries", "t": t, "matrices": [encode_array(v) for v in vs]}


def bundle_doc(b: CounterexampleBundle) -> dict:
    return {
        "kind": "bundle",
        "m": b.m,
        "n": b.n,
        "documents": {
            "a": qms_doc(b.a),
            "b": qms_doc(b.b),
            "direct_sum": qms_doc(b.direct_sum),
            "dilation": qms_doc(b.dilation),
            "contraction": isometries_doc([b.contraction], b.m),
        },
    }


def report_doc(command: str, **fields) -> dict:
    return {"kind": "report", "command": command, **fields}


def _expect(doc: dict, *kinds: str) -> None:
    if doc.get("kind") not in kinds:
        raise DocumentError(f"expected a {' or '.join(kinds)} document, got {doc.get('kind')!r}")


def to_qms(doc: dict) -> QuantumMagicSquare:
    """Read a ``qms`` document, or a ``qls`` one via its projector grid."""
    from .squares import qls_to_qms

    _expect(doc, "qms", "qls")
    if doc["kind"] == "qls":
        return qls_to_qms(to_qls(doc))
    return QuantumMagicSquare(_decode_grid(doc))


def to_qls(doc: dict) -> QuantumLatinSquare:
    _expect(doc, "qls")
    n = int(_field(doc, "n"))
    cells = decode_array(_field(doc, "cells"), 3, "cells")
    if cells.shape != (n, n, n):
        raise DocumentError(f"cells have shape {cells.shape}, expected {(n, n, n)}")
    return QuantumLatinSquare(cells)


def to_latin(doc: dict) -> LatinSquare:
    _expect(doc, "latin")
    return LatinSquare(np.asarray(_field(doc, "cells")))


def to_basis(doc: dict) -> np.ndarray:
    _expect(doc, "basis")
    vs = decode_array(_field(doc, "vectors"), 2, "vectors")
    if vs.shape[0] != int(_field(doc, "n")):
        raise DocumentError("basis size does not match n")
    return vs


def to_povm(doc: dict) -> np.ndarray:
    _expect(doc, "povm")
    return decode_array(_field(doc, "elements"), 3, "elements")


def to_decomposition(doc: dict) -> SemiclassicalDecomposition:
    _expect(doc, "decomposition")
    n, s = int(_field(doc, "n")), int(_field(doc, "s"))
    terms = []
    for k, term in enumerate(_field(doc, "terms")):
        terms.append((tuple(term["perm"]), decode_array(term["q"], 2, f"term {k + 1}")))
    return SemiclassicalDecomposition(n, s, tuple(terms))


def to_combination(doc: dict) -> MatrixConvexCombination:
    _expect(doc, "combination")
    t = int(_field(doc, "t"))
    terms = []
    for k, term in enumerate(_field(doc, "terms")):
        terms.append((to_qms(term["source"]), decode_array(term["v"], 2, f"term {k + 1}")))
    return MatrixConvexCombination(t, tuple(terms))


def to_isometries(doc: dict) -> tuple[int, list[np.ndarray]]:
    _expect(doc, "isometries")
    t = int(_field(doc, "t"))
    return t, [decode_array(v, 2, f"matrix {k + 1}") for k, v in enumerate(_field(doc, "matrices"))]


def to_object(doc: dict):
    """Decode any non-report document into its library object."""
    kind = doc.get("kind")
    decoders = {
        "qms": to_qms, "qls": to_qls, "latin": to_latin, "basis": to_basis, "povm": to_povm,
        "decomposition": to_decomposition, "combination": to_combination, "isometries": to_isometries,
    }
    if kind not in decoders:
        raise DocumentError(f"no decoder for kind {kind!r}")
    return decoders[kind](doc)


def to_doc(obj) -> dict:
    if isinstance(obj, QuantumMagicSquare):
        return qms_doc(obj)
    if isinstance(obj, QuantumLatinSquare):
        return qls_doc(obj)
    if isinstance(obj, LatinSquare):
        return latin_doc(obj)
    if isinstance(obj, SemiclassicalDecomposition):
        return decomposition_doc(obj)
    if isinstance(obj, MatrixConvexCombination):
        return combination_doc(obj)
    if isinstance(obj, CounterexampleBundle):
        return bundle_doc(obj)
    raise DocumentError(f"no document kind for {type(obj).__name__}")

"""JSON encodings. Complex numbers are ``[re, im]`` pairs everywhere."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np

from .bicomplex import Bicomplex
from .errors import InputError
from .flatcw import DualPair, FlatCellComplex, Incidence, Representation
from .torsion import GradedBasisChoice


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(obj, where: str = "value") -> complex:
    if isinstance(obj, bool):
        raise InputError(f"{where}: expected a number or [re, im], got {obj!r}")
    if isinstance(obj, (int, float)):
        return complex(obj)
    if (isinstance(obj, list) and len(obj) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)):
        return complex(obj[0], obj[1])
    raise InputError(f"{where}: expected a number or [re, im], got {obj!r}")


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[encode_complex(z) for z in row] for row in m]


def decode_matrix(obj, rows: int | None = None, cols: int | None = None,
                  where: str = "matrix") -> np.ndarray:
    """Nested rows of entries; an empty list is the ``rows x cols`` zero-size matrix."""
    if not isinstance(obj, list):
        raise InputError(f"{where}: expected a list of rows")
    if not obj or all(isinstance(r, list) and not r for r in obj):
        r = len(obj) if rows is None else rows
        c = 0 if cols is None else cols
        if r * c:
            raise InputError(f"{where}: expected a {r} x {c} matrix, got no entries")
        return np.zeros((r, c), dtype=complex)
    out = []
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise InputError(f"{where}: row {i} is not a list")
        out.append([decode_complex(z, f"{where}[{i}][{j}]") for j, z in enumerate(row)])
    if len({len(r) for r in out}) != 1:
        raise InputError(f"{where}: rows have different lengths")
    m = np.array(out, dtype=complex)
    if (rows is not None and m.shape[0] != rows) or (cols is not None and m.shape[1] != cols):
        raise InputError(f"{where}: expected shape {rows} x {cols}, got {m.shape[0]} x {m.shape[1]}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{where}: non-finite entry")
    return m


def jsonable(obj: Any) -> Any:
    """Convert results (complex, numpy, tuples) into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return jsonable(obj.tolist())
        return obj.tolist()
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if np.isnan(x) or np.isinf(x):
            return None if np.isnan(x) else ("inf" if x > 0 else "-inf")
        return x
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2)


def digest(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()


def parse_json(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: malformed JSON at line {exc.lineno}, "
                         f"column {exc.colno}: {exc.msg}") from None


def read_json(path: str | Path) -> tuple[Any, bytes]:
    """Parsed content and raw bytes of a JSON file."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(f"{path}: not UTF-8 text") from None
    return parse_json(text, str(path)), raw


def _require(obj: dict, key: str, kind, where: str):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected a JSON object")
    if key not in obj:
        raise InputError(f"{where}: missing key {key!r}")
    if not isinstance(obj[key], kind):
        raise InputError(f"{where}: {key!r} has the wrong type")
    return obj[key]


# ----------------------------------------------------------------- bicomplex

def _decode_basis(obj, dims, where: str) -> tuple[np.ndarray, ...]:
    if not isinstance(obj, list) or len(obj) != len(dims):
        raise InputError(f"{where}: expected one list of vectors per degree ({len(dims)})")
    out = []
    for q, vectors in enumerate(obj):
        if not isinstance(vectors, list):
            raise InputError(f"{where}[{q}]: expected a list of vectors")
        cols = [[decode_complex(z, f"{where}[{q}][{i}][{j}]") for j, z in enumerate(v)]
                if isinstance(v, list) else None for i, v in enumerate(vectors)]
        if any(c is None or len(c) != dims[q] for c in cols):
            raise InputError(f"{where}[{q}]: every vector needs {dims[q]} coordinates")
        out.append(np.array(cols, dtype=complex).T.reshape(dims[q], len(cols)))
    return tuple(out)


def _encode_basis(reps) -> list:
    return [[[encode_complex(z) for z in col] for col in np.asarray(r, complex).T] for r in reps]


def bicomplex_from_json(obj) -> tuple[Bicomplex, GradedBasisChoice | None]:
    where = "bicomplex"
    dims = _require(obj, "dims", list, where)
    if not dims or not all(isinstance(n, int) and not isinstance(n, bool) and n >= 0 for n in dims):
        raise InputError(f"{where}: dims must be non-negative integers")
    n = len(dims) - 1
    if "length" in obj and obj["length"] != n:
        raise InputError(f"{where}: length {obj['length']} does not match {len(dims)} dims")
    d = _require(obj, "d", list, where)
    ds = _require(obj, "dstar", list, where)
    if len(d) != n or len(ds) != n:
        raise InputError(f"{where}: expected {n} matrices in 'd' and 'dstar'")
    d = [decode_matrix(m, dims[q + 1], dims[q], f"d[{q}]") for q, m in enumerate(d)]
    ds = [decode_matrix(m, dims[q], dims[q + 1], f"dstar[{q}]") for q, m in enumerate(ds)]
    bc = Bicomplex(tuple(dims), tuple(d), tuple(ds))
    has_co, has_ho = "cohomology_basis" in obj, "homology_basis" in obj
    if has_co != has_ho:
        raise InputError(f"{where}: give both cohomology_basis and homology_basis, or neither")
    if not has_co:
        return bc, None
    return bc, GradedBasisChoice(_decode_basis(obj["cohomology_basis"], dims, "cohomology_basis"),
                                 _decode_basis(obj["homology_basis"], dims, "homology_basis"))


def bicomplex_to_json(bc: Bicomplex, basis: GradedBasisChoice | None = None) -> dict:
    out = {"length": bc.length, "dims": list(bc.dims),
           "d": [encode_matrix(m) for m in bc.d],
           "dstar": [encode_matrix(m) for m in bc.dstar]}
    if basis is not None:
        out["cohomology_basis"] = _encode_basis(basis.cohomology)
        out["homology_basis"] = _encode_basis(basis.homology)
    return out


# ------------------------------------------------------------ cell complexes

def flat_complex_from_json(obj, where: str = "complex") -> FlatCellComplex:
    n = _require(obj, "dim", int, where)
    cells = _require(obj, "cells", list, where)
    inc = _require(obj, "incidences", list, where)
    gens = obj.get("generators", [])
    if not isinstance(gens, list) or not all(isinstance(g, str) for g in gens):
        raise InputError(f"{where}: generators must be a list of names")
    parsed = []
    for k, per_cell in enumerate(inc):
        if not isinstance(per_cell, list):
            raise InputError(f"{where}: incidences[{k}] must be a list")
        rows = []
        for j, entries in enumerate(per_cell):
            if not isinstance(entries, list):
                raise InputError(f"{where}: incidences[{k}][{j}] must be a list")
            row = []
            for e in entries:
                if (not isinstance(e, list) or len(e) != 3 or not isinstance(e[0], int)
                        or not isinstance(e[1], int) or not isinstance(e[2], list)):
                    raise InputError(f"{where}: incidence {e!r} must be [cell, sign, [words]]")
                row.append(Incidence(e[0], e[1], tuple(e[2])))
            rows.append(tuple(row))
        parsed.append(tuple(rows))
    try:
        return FlatCellComplex(n, tuple(cells), tuple(parsed), tuple(gens))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from None


def flat_complex_to_json(cw: FlatCellComplex) -> dict:
    return {"dim": cw.dim, "cells": list(cw.cells),
            "incidences": [[[[e.cell, e.sign, list(e.word)] for e in row] for row in rows]
                           for rows in cw.incidences],
            "generators": list(cw.generators)}


def dual_pair_from_json(obj) -> DualPair:
    primal = flat_complex_from_json(obj, "primal")
    dual = flat_complex_from_json(_require(obj, "dual", dict, "pair"), "dual")
    pairing = _require(obj, "pairing", list, "pair")
    if not all(isinstance(p, list) and all(isinstance(i, int) for i in p) for p in pairing):
        raise InputError("pair: pairing must be a list of integer lists")
    meta = obj.get("metadata", {})
    return DualPair(primal, dual, tuple(tuple(p) for p in pairing),
                    meta if isinstance(meta, dict) else {})


def dual_pair_to_json(pair: DualPair) -> dict:
    out = flat_complex_to_json(pair.primal)
    out["dual"] = flat_complex_to_json(pair.dual)
    out["pairing"] = [list(p) for p in pair.pairing]
    if pair.metadata:
        out["metadata"] = dict(pair.metadata)
    return out


def representation_from_json(obj) -> Representation:
    if not isinstance(obj, dict) or not obj:
        raise InputError("representation: expected an object mapping generators to matrices")
    return Representation({k: decode_matrix(v, where=f"representation[{k!r}]")
                           for k, v in obj.items()})


def representation_to_json(rho: Representation) -> dict:
    return {k: encode_matrix(m) for k, m in rho.matrices.items()}

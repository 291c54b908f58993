"""File formats: JSON for structured values, CSV for signals and samples.

Complex scalars are always serialized as ``[re, im]`` pairs of IEEE-754
doubles; Python's float formatting is shortest-round-trip, so JSON kinds
reload bit-exactly and CSV kinds within one ulp.  Writes go through a
temporary file and an atomic rename.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .cascade import SampledFunction
from .filters import FilterBank, FilterCoeffs
from .loops import PolyLoop, SpinFactorization
from .transform import CoeffTree

__all__ = ["StorageError", "KINDS", "save", "load", "atomic_write"]

KINDS = ("bank", "loop", "spins", "signal", "tree", "samples")


class StorageError(ValueError):
    """A file does not match the schema for its kind."""


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _pairs(values) -> list[list[float]]:
    return [_pair(z) for z in np.asarray(values, dtype=np.complex128)]


def _unpair(v, where: str) -> complex:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise StorageError(f"{where}: expected a [re, im] pair, got {v!r}")
    try:
        return complex(float(v[0]), float(v[1]))
    except (TypeError, ValueError):
        raise StorageError(f"{where}: non-numeric entry in {v!r}") from None


def _unpairs(vs, where: str) -> np.ndarray:
    if not isinstance(vs, list) or not vs:
        raise StorageError(f"{where}: expected a nonempty list of [re, im] pairs")
    return np.array([_unpair(v, f"{where}[{i}]") for i, v in enumerate(vs)])


def _get(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise StorageError(f"{where}: expected a JSON object")
    if key not in d:
        raise StorageError(f"{where}: missing field {key!r}")
    return d[key]


def _matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise StorageError(f"{where}: expected a nonempty list of rows")
    return np.stack([_unpairs(row, f"{where}[{i}]") for i, row in enumerate(rows)])


# JSON encoders / decoders per kind

def bank_to_dict(bank: FilterBank) -> dict:
    return {
        "N": bank.N,
        "g": bank.g,
        "filters": [{"offset": f.offset, "taps": _pairs(f.taps)} for f in bank.filters],
        "meta": {"name": bank.name, "lowpass_normalized": bank.lowpass_normalized},
    }


def bank_from_dict(d: dict) -> FilterBank:
    filters = []
    raw = _get(d, "filters", "bank")
    if not isinstance(raw, list):
        raise StorageError("bank.filters: expected a list")
    for j, entry in enumerate(raw):
        taps = _unpairs(_get(entry, "taps", f"bank.filters[{j}]"), f"bank.filters[{j}].taps")
        offset = int(_get(entry, "offset", f"bank.filters[{j}]"))
        unpruned = bool(taps[0] == 0 or taps[-1] == 0)
        filters.append(FilterCoeffs(taps, offset=offset, unpruned=unpruned))
    meta = d.get("meta", {})
    try:
        return FilterBank(
            int(_get(d, "N", "bank")),
            int(_get(d, "g", "bank")),
            tuple(filters),
            lowpass_normalized=bool(meta.get("lowpass_normalized", True)),
            name=str(meta.get("name", "")),
        )
    except ValueError as exc:
        raise StorageError(f"bank: {exc}") from None


def loop_to_dict(loop: PolyLoop) -> dict:
    return {
        "N": loop.N,
        "coeffs": [[_pairs(row) for row in coeff] for coeff in loop.coeffs],
    }


def loop_from_dict(d: dict) -> PolyLoop:
    raw = _get(d, "coeffs", "loop")
    if not isinstance(raw, list) or not raw:
        raise StorageError("loop.coeffs: expected a nonempty list")
    coeffs = np.stack([_matrix(c, f"loop.coeffs[{i}]") for i, c in enumerate(raw)])
    try:
        return PolyLoop(int(_get(d, "N", "loop")), coeffs)
    except ValueError as exc:
        raise StorageError(f"loop: {exc}") from None


def spins_to_dict(sf: SpinFactorization) -> dict:
    return {
        "N": sf.N,
        "V": [_pairs(row) for row in sf.V],
        "factors": [{"vectors": [_pairs(v) for v in vecs]} for vecs in sf.factors],
    }


def spins_from_dict(d: dict) -> SpinFactorization:
    V = _matrix(_get(d, "V", "spins"), "spins.V")
    raw = _get(d, "factors", "spins")
    if not isinstance(raw, list):
        raise StorageError("spins.factors: expected a list")
    factors = []
    for i, entry in enumerate(raw):
        vecs = _get(entry, "vectors", f"spins.factors[{i}]")
        factors.append(_matrix(vecs, f"spins.factors[{i}].vectors"))
    try:
        return SpinFactorization(int(_get(d, "N", "spins")), V, tuple(factors))
    except ValueError as exc:
        raise StorageError(f"spins: {exc}") from None


def tree_to_dict(tree: CoeffTree) -> dict:
    return {
        "N": tree.N,
        "levels": tree.levels,
        "approx": _pairs(tree.approx),
        "details": [[_pairs(c) for c in channels] for channels in tree.details],
    }


def tree_from_dict(d: dict) -> CoeffTree:
    raw = _get(d, "details", "tree")
    if not isinstance(raw, list):
        raise StorageError("tree.details: expected a list")
    details = []
    for n, channels in enumerate(raw, start=1):
        if not isinstance(channels, list):
            raise StorageError(f"tree.details[{n - 1}]: expected a list of channels")
        details.append(
            tuple(
                _unpairs(c, f"tree.details[{n - 1}][{j}]") for j, c in enumerate(channels)
            )
        )
    try:
        return CoeffTree(
            int(_get(d, "N", "tree")),
            int(_get(d, "levels", "tree")),
            _unpairs(_get(d, "approx", "tree"), "tree.approx"),
            tuple(details),
        )
    except ValueError as exc:
        raise StorageError(f"tree: {exc}") from None


# CSV kinds

def _signal_lines(values: np.ndarray) -> list[str]:
    lines = ["index,re,im"]
    for i, z in enumerate(values):
        lines.append(f"{i},{float(z.real)!r},{float(z.imag)!r}")
    return lines


def _signal_parse(text: str, path: str) -> np.ndarray:
    lines = text.strip().splitlines()
    if not lines or lines[0].strip() != "index,re,im":
        raise StorageError(f"{path}:1: expected header 'index,re,im'")
    values = []
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 3:
            raise StorageError(f"{path}:{ln}: expected 3 comma-separated fields")
        try:
            idx, re, im = int(parts[0]), float(parts[1]), float(parts[2])
        except ValueError:
            raise StorageError(f"{path}:{ln}: non-numeric field") from None
        if idx != ln - 2:
            raise StorageError(f"{path}:{ln}: index {idx} out of order")
        values.append(complex(re, im))
    if not values:
        raise StorageError(f"{path}: signal holds no rows")
    return np.array(values)


def _samples_lines(f: SampledFunction) -> list[str]:
    lines = ["x,re,im"]
    for x, z in zip(f.grid(), f.values):
        lines.append(f"{float(x)!r},{float(z.real)!r},{float(z.imag)!r}")
    return lines


def _samples_parse(text: str, path: str) -> tuple[np.ndarray, np.ndarray]:
    lines = text.strip().splitlines()
    if not lines or lines[0].strip() != "x,re,im":
        raise StorageError(f"{path}:1: expected header 'x,re,im'")
    xs, values = [], []
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 3:
            raise StorageError(f"{path}:{ln}: expected 3 comma-separated fields")
        try:
            xs.append(float(parts[0]))
            values.append(complex(float(parts[1]), float(parts[2])))
        except ValueError:
            raise StorageError(f"{path}:{ln}: non-numeric field") from None
    if not xs:
        raise StorageError(f"{path}: sample file holds no rows")
    return np.array(xs), np.array(values)


def atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


_ENCODERS = {
    "bank": (FilterBank, bank_to_dict),
    "loop": (PolyLoop, loop_to_dict),
    "spins": (SpinFactorization, spins_to_dict),
    "tree": (CoeffTree, tree_to_dict),
}


def save(obj, path: str) -> None:
    """Write a value in the format of its kind (dispatch on type)."""
    for _, (cls, encode) in _ENCODERS.items():
        if isinstance(obj, cls):
            atomic_write(path, json.dumps(encode(obj), indent=2, sort_keys=True) + "\n")
            return
    if isinstance(obj, SampledFunction):
        atomic_write(path, "\n".join(_samples_lines(obj)) + "\n")
        return
    if isinstance(obj, np.ndarray) or isinstance(obj, (list, tuple)):
        values = np.asarray(obj, dtype=np.complex128)
        if values.ndim != 1:
            raise StorageError("signals must be one-dimensional")
        atomic_write(path, "\n".join(_signal_lines(values)) + "\n")
        return
    raise StorageError(f"no storage kind for object of type {type(obj).__name__}")


def load(path: str, kind: str):
    """Read a value of the given kind; raises StorageError with context on mismatch."""
    if kind not in KINDS:
        raise StorageError(f"unknown kind {kind!r}; expected one of {KINDS}")
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if kind == "signal":
        return _signal_parse(text, path)
    if kind == "samples":
        return _samples_parse(text, path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StorageError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    decoder = {
        "bank": bank_from_dict,
        "loop": loop_from_dict,
        "spins": spins_from_dict,
        "tree": tree_from_dict,
    }[kind]
    try:
        return decoder(data)
    except StorageError as exc:
        raise StorageError(f"{path}: {exc}") from None

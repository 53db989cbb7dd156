"""Matrix and scale files.

Matrices are JSON objects ``{"n": n, "re": [[...]], "im": [[...]]}`` (``im``
optional) or, for real symmetric matrices, plain CSV. Scales are JSON
``{"steps": [[width, value], ...]}`` or the id of a named analytic scale.
"""
import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ParseError
from .gauges import psd_scale
from .spectral import NAMED_SCALES, SpectralScale, named_scale

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "read_matrix",
    "write_matrix",
    "scale_from_json",
    "read_scale",
]


def matrix_to_json(x):
    x = np.asarray(x)
    out = {"n": int(x.shape[0]), "re": np.real(x).tolist()}
    if np.iscomplexobj(x):
        out["im"] = np.imag(x).tolist()
    return out


def matrix_from_json(obj):
    if not isinstance(obj, dict) or "re" not in obj:
        raise ParseError("matrix JSON needs an 're' field")
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.ndim != 2 or re.shape[0] != re.shape[1] or im.shape != re.shape:
        raise ParseError(f"matrix parts must be square and of equal shape, got {re.shape} and {im.shape}")
    n = obj.get("n", re.shape[0])
    if n != re.shape[0]:
        raise ParseError(f"declared n={n} but the matrix is {re.shape[0]}x{re.shape[0]}")
    return re + 1j * im if np.any(im) else re


def _parse_json(text, path):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from None


def _read_csv(text, path):
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            rows.append([float(cell) for cell in row])
        except ValueError:
            bad = next(k for k, cell in enumerate(row) if not _is_float(cell))
            raise ParseError(f"{path}: not a number: {row[bad]!r}", lineno, bad + 1) from None
    x = np.asarray(rows, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ParseError(f"{path}: CSV matrix must be square")
    if not np.allclose(x, x.T, rtol=0, atol=1e-12 * (1 + np.max(np.abs(x)))):
        raise ParseError(f"{path}: CSV matrices must be symmetric")
    return x


def _is_float(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_matrix(path):
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return _read_csv(text, path)
    return matrix_from_json(_parse_json(text, path))


def write_matrix(path, x):
    Path(path).write_text(json.dumps(matrix_to_json(x)) + "\n")


def scale_from_json(obj):
    if not isinstance(obj, dict) or "steps" not in obj:
        raise ParseError("scale JSON needs a 'steps' field")
    steps = []
    for k, step in enumerate(obj["steps"]):
        if not isinstance(step, (list, tuple)) or len(step) != 2:
            raise ParseError(f"step {k} must be a [width, value] pair")
        width, value = step
        width = Fraction(width) if isinstance(width, str) else float(width)
        steps.append((width, float(value)))
    try:
        return SpectralScale(steps, dim=obj.get("dim"))
    except ValueError as exc:
        raise ParseError(f"invalid scale: {exc}") from None


def read_scale(source):
    """A named analytic scale id, or a path to a scale (or matrix) JSON file."""
    if str(source) in NAMED_SCALES:
        return named_scale(str(source))
    path = Path(source)
    obj = _parse_json(path.read_text(), path)
    if isinstance(obj, dict) and "re" in obj:
        return psd_scale(matrix_from_json(obj))
    return scale_from_json(obj)

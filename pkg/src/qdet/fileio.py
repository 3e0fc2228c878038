"""JSON file formats for detectors, ensembles, cost matrices and group actions.

Complex matrices are nested lists of rows; each entry is either a real number
or a ``[re, im]`` pair. Outcome and message indices in files are 1-based.

Detector  ``{"dim": d, "elements": [matrix, ...]}``
Ensemble  ``{"dim": d, "priors": [...], "states": [matrix, ...]}``
Cost      ``{"cost": [[...], ...]}``
Group     ``{"unitaries": [...], "conjugate": [...], "permutation": [[...]], "identity": g}``
"""
import json

import numpy as np

from .capacity import GroupAction
from .errors import ValidationError
from .povm import make_ensemble, validate_povm


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _write(path, obj):
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if path in (None, "-"):
        return text
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def _entry(x, where):
    if isinstance(x, bool):
        raise ValidationError(f"{where}: expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise ValidationError(f"{where}: expected a number or [re, im] pair, got {x!r}")


def parse_matrix(rows, where, dim=None):
    """Complex square matrix from the nested-list file representation."""
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValidationError(f"{where}: expected a list of rows")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValidationError(f"{where}: matrix is not square")
    if dim is not None and n != dim:
        raise ValidationError(f"{where}: is {n}x{n}, expected {dim}x{dim}")
    out = np.array([[_entry(x, f"{where}[{i + 1}][{j + 1}]") for j, x in enumerate(r)] for i, r in enumerate(rows)])
    if not np.all(np.isfinite(out)):
        raise ValidationError(f"{where}: non-finite entry")
    return out


def matrix_to_json(a):
    a = np.asarray(a, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _key(obj, key, path):
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationError(f"{path}: missing field {key!r}")
    return obj[key]


def _dim(obj, path):
    d = obj.get("dim") if isinstance(obj, dict) else None
    if d is not None and (not isinstance(d, int) or d < 1):
        raise ValidationError(f"{path}: 'dim' must be a positive integer")
    return d


def _matrices(obj, key, path, dim):
    items = _key(obj, key, path)
    if not isinstance(items, list) or not items:
        raise ValidationError(f"{path}: {key!r} must be a non-empty list")
    mats = [parse_matrix(m, f"{path}: {key}[{k + 1}]", dim) for k, m in enumerate(items)]
    if len({m.shape for m in mats}) != 1:
        raise ValidationError(f"{path}: {key!r} matrices differ in size")
    return mats


def load_povm(path):
    obj = _read(path)
    elements = _matrices(obj, "elements", path, _dim(obj, path))
    try:
        return validate_povm(elements)
    except ValidationError as exc:
        # keep the specific error class, prefix the file name
        exc.args = (f"{path}: {exc}",)
        raise


def save_povm(path, elements):
    elements = np.asarray(elements)
    return _write(path, {"dim": int(elements.shape[1]), "elements": [matrix_to_json(e) for e in elements]})


def load_ensemble(path):
    obj = _read(path)
    states = _matrices(obj, "states", path, _dim(obj, path))
    priors = _key(obj, "priors", path)
    try:
        return make_ensemble(np.asarray(priors, dtype=float), np.array(states))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def save_ensemble(path, ensemble):
    return _write(path, {
        "dim": int(ensemble.dim),
        "priors": [float(p) for p in ensemble.priors],
        "states": [matrix_to_json(s) for s in ensemble.states],
    })


def load_cost(path):
    obj = _read(path)
    cost = _key(obj, "cost", path)
    try:
        cost = np.array(cost, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: 'cost' must be a numeric matrix") from exc
    if cost.ndim != 2:
        raise ValidationError(f"{path}: 'cost' must be a matrix")
    return cost


def load_group(path):
    obj = _read(path)
    unitaries = _matrices(obj, "unitaries", path, None)
    conj = _key(obj, "conjugate", path)
    perms = _key(obj, "permutation", path)
    ident = _key(obj, "identity", path)
    try:
        perms = np.array(perms, dtype=np.int64) - 1
        conj = np.array(conj, dtype=bool)
        ident = int(ident) - 1
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: malformed group data ({exc})") from exc
    return GroupAction(np.array(unitaries), conj, perms, ident)


def save_group(path, group):
    return _write(path, {
        "unitaries": [matrix_to_json(u) for u in group.unitaries],
        "conjugate": [bool(c) for c in group.conjugate],
        "permutation": (group.permutations + 1).tolist(),
        "identity": int(group.identity) + 1,
    })


def write_json(path, obj):
    return _write(path, obj)

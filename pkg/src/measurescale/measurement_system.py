"""Finite measurement systems: families ``F_0 .. F_{N-1}`` of d x d matrices
with ``sum_i F_i* F_i = I`` (a column isometry, i.e. Kraus operators)."""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, UnknownSystemError, ValidationError
from .filter_bank import highpass_taps, require_qmf, slanted_matrix
from .matrix_core import adjoint, as_cmatrix, as_cvector, opnorm

ISOMETRY_TOL = 1e-10


@dataclass(frozen=True)
class MeasurementSystem:
    operators: tuple
    label: str = ""
    validated: bool = False

    def __post_init__(self):
        ops = tuple(as_cmatrix(op, square=True) for op in self.operators)
        if not ops:
            raise DimensionError("a measurement system needs at least one operator")
        d = ops[0].shape[0]
        if any(op.shape != (d, d) for op in ops):
            raise DimensionError("all operators must share one square shape")
        for op in ops:
            op.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def N(self):
        return len(self.operators)

    @property
    def dim(self):
        return self.operators[0].shape[0]

    def stacked(self):
        """Operators as one ``(N, d, d)`` array."""
        return np.stack(self.operators)

    def to_json(self):
        return {
            "N": self.N,
            "dim": self.dim,
            "label": self.label,
            "operators": [
                [[float(z.real), float(z.imag)] for z in op.reshape(-1)] for op in self.operators
            ],
        }

    def dumps(self, **kw):
        return json.dumps(self.to_json(), **kw)


def make_system(operators, label="", validate=True, tol=ISOMETRY_TOL):
    """Build a system; with ``validate`` the column-isometry residual must be
    at most ``tol`` or ``ValidationError`` is raised."""
    sys = MeasurementSystem(tuple(operators), label=label)
    if not validate:
        return sys
    res = column_isometry_residual(sys)
    if res > tol:
        raise ValidationError(
            f"system {label!r} is not a column isometry: residual {res:.3e} > {tol:.1e}", res
        )
    return MeasurementSystem(sys.operators, label=label, validated=True)


def column_isometry_residual(sys):
    """``|| sum_i F_i* F_i - I ||`` in operator norm."""
    total = sum(adjoint(f) @ f for f in sys.operators)
    return opnorm(total - np.eye(sys.dim))


def cuntz_residual(sys):
    """``max_{i,j} || F_i F_j* - delta_ij I ||``."""
    eye = np.eye(sys.dim)
    worst = 0.0
    for i, fi in enumerate(sys.operators):
        for j, fj in enumerate(sys.operators):
            worst = max(worst, opnorm(fi @ adjoint(fj) - (eye if i == j else 0.0)))
    return worst


def _lebesgue2():
    r = 1.0 / math.sqrt(2.0)
    return [r * np.eye(2), r * np.diag([1.0, -1.0])]


def _cantor3():
    r = 1.0 / math.sqrt(2.0)
    f1 = np.zeros((3, 3))
    f1[1, 2] = 1.0
    return [r * np.diag([1.0, 1.0, 0.0]), f1, r * np.diag([1.0, -1.0, 0.0])]


BUILTINS = {"lebesgue2": _lebesgue2, "cantor3": _cantor3}


def builtin_system(name):
    """``lebesgue2`` (dyadic Lebesgue measure) or ``cantor3`` (middle-third
    Cantor measure), both seen from ``e_0``."""
    try:
        ops = BUILTINS[name]()
    except KeyError:
        raise UnknownSystemError(
            f"unknown builtin system {name!r}; choose from {sorted(BUILTINS)}"
        ) from None
    return make_system(ops, label=name)


def from_filter_bank(fb, tol=ISOMETRY_TOL):
    """Two-channel system from the slanted matrices of ``a`` and ``b``.

    Real QMF taps always give a column isometry.  Complex taps are accepted
    only if the isometry residual happens to be within ``tol``.
    """
    require_qmf(fb)
    ops = [slanted_matrix(fb.taps), slanted_matrix(highpass_taps(fb))]
    label = f"beta={fb.beta!r}" if fb.beta is not None else f"taps(2D={fb.taps.size})"
    return make_system(ops, label=label, validate=True, tol=tol)


def system_from_json(obj, validate=True, tol=ISOMETRY_TOL):
    """Load ``{"N", "dim", "label", "operators"}``.

    Each operator is a row-major list of ``[re, im]`` pairs; nested
    row lists are accepted as well.
    """
    try:
        n, dim = int(obj["N"]), int(obj["dim"])
        raw_ops = obj["operators"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionError(f"malformed system JSON: {exc}") from exc
    if len(raw_ops) != n:
        raise DimensionError(f"N={n} but {len(raw_ops)} operators given")
    ops = []
    for op in raw_ops:
        arr = np.asarray(op, dtype=float)
        if arr.shape[-1] != 2:
            raise DimensionError("operator entries must be [re, im] pairs")
        z = arr[..., 0] + 1j * arr[..., 1]
        if z.size != dim * dim:
            raise DimensionError(f"operator has {z.size} entries, expected {dim * dim}")
        ops.append(z.reshape(dim, dim))
    return make_system(ops, label=str(obj.get("label", "")), validate=validate, tol=tol)


def load_system(path, validate=True, tol=ISOMETRY_TOL):
    with open(path, encoding="utf-8") as fh:
        return system_from_json(json.load(fh), validate=validate, tol=tol)


def basis_state(dim, index=0):
    e = np.zeros(dim, dtype=np.complex128)
    e[index] = 1.0
    return e


def pure_state(vector, tol=1e-12):
    """Check that ``vector`` is a unit vector and return it as complex array."""
    v = as_cvector(vector)
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"state norm {nrm!r} differs from 1 by more than {tol:g}")
    return v

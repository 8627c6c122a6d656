"""Dense complex linear algebra for the small matrices used throughout.

Everything here is a thin, checked layer over numpy/scipy.  Matrices are
plain ``numpy.ndarray`` objects of dtype ``complex128``; helpers only add the
shape/finiteness checks and the ordering conventions downstream code relies on.
"""

import warnings

import numpy as np
import scipy.linalg

from .errors import DimensionError, NumericError, SingularMatrixError

MAX_DIM = 64


def as_cmatrix(m, square=False):
    """Return ``m`` as a finite 2-D complex array, raising on bad shape."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if arr.size == 0:
        raise DimensionError("empty matrix")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("matrix has non-finite entries")
    return arr


def as_cvector(v):
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("vector has non-finite entries")
    return arr


def adjoint(m):
    return np.conj(np.asarray(m)).T


def opnorm(m):
    """Operator (spectral) norm: the largest singular value."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def sort_spectrum(values):
    """Sort by descending modulus, ties broken by descending real part."""
    values = np.asarray(values, dtype=np.complex128)
    order = np.lexsort((-values.real, -np.abs(values)))
    return values[order]


def eigenvalues(m):
    """All eigenvalues of a square matrix, with algebraic multiplicity.

    Returned sorted by descending modulus, ties broken by descending real
    part.

    Raises
    ------
    DimensionError
        If ``m`` is not square.
    NumericError
        If LAPACK's QR iteration fails to converge.
    """
    m = as_cmatrix(m, square=True)
    try:
        vals = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(f"eigenvalue iteration did not converge: {exc}") from exc
    return sort_spectrum(vals)


def solve(a, b, pivot_tol=1e-14):
    """Solve ``a x = b`` by LU with partial pivoting.

    A pivot smaller than ``pivot_tol * ||a||`` is treated as singular.
    """
    a = as_cmatrix(a, square=True)
    b = as_cvector(b)
    if b.shape[0] != a.shape[0]:
        raise DimensionError(f"rhs length {b.shape[0]} != matrix size {a.shape[0]}")
    scale = opnorm(a)
    if scale == 0.0:
        raise SingularMatrixError("zero matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)  # reported below
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    min_pivot = float(np.min(np.abs(np.diag(lu))))
    if min_pivot < pivot_tol * scale:
        raise SingularMatrixError(
            f"pivot {min_pivot:.3e} below {pivot_tol:.1e} * ||A|| = {pivot_tol * scale:.3e}"
        )
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def psd_residual(m):
    """Return ``(||M - M*||, smallest eigenvalue of (M + M*)/2)``."""
    m = as_cmatrix(m, square=True)
    defect = opnorm(m - adjoint(m))
    herm = 0.5 * (m + adjoint(m))
    min_eig = float(np.linalg.eigvalsh(herm)[0])
    return defect, min_eig

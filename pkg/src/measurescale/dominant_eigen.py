"""Normalised power limits for a simple dominant eigenvalue.

Given ``F``, a simple eigenvalue ``a`` strictly dominant in modulus, and a
unit ``w`` with ``F* w = conj(a) w``, there is a unique ``xi`` with
``<w, xi> = 1`` and ``F xi = a xi``, and ``a^-n F^n x -> <w, x> xi``.  No
positivity is assumed; entries may be complex.

``xi`` is built from the block form of ``F`` over ``C w (+) w^perp``:
``F = [[a, 0], [eta, G]]`` and ``xi = w + (a - G)^-1 eta``.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSpectrumError,
    HypothesisError,
    MultiplicityError,
    SingularMatrixError,
    SlowConvergenceWarning,
)
from .filter_bank import slanted_matrix
from .matrix_core import adjoint, as_cmatrix, as_cvector, eigenvalues, solve

LEFT_EIG_TOL = 1e-10
GAP_TOL = 1e-9


def split_spectrum(F, a, tol=GAP_TOL):
    """Return ``(multiplicity of a, the other eigenvalues)``.

    Eigenvalues within ``tol * |a|`` of ``a`` (``tol`` if ``a = 0``) count
    towards its multiplicity; the closest one is removed from the returned
    remainder.
    """
    vals = eigenvalues(F)
    dist = np.abs(vals - a)
    scale = tol * abs(a) if a != 0 else tol
    mult = int(np.sum(dist <= scale))
    rest = np.delete(vals, int(np.argmin(dist)))
    return mult, rest


@dataclass(frozen=True)
class DominantTriple:
    F: np.ndarray
    a: complex
    w: np.ndarray

    def __post_init__(self):
        F = as_cmatrix(self.F, square=True)
        w = as_cvector(self.w)
        a = complex(self.a)
        if w.shape[0] != F.shape[0]:
            raise HypothesisError("w has the wrong dimension")
        nw = np.linalg.norm(w)
        if abs(nw - 1.0) > 1e-12:
            raise HypothesisError(f"w must be a unit vector (norm {nw!r})")
        left = np.linalg.norm(adjoint(F) @ w - np.conj(a) * w)
        if left > LEFT_EIG_TOL:
            raise HypothesisError(f"F* w != conj(a) w: residual {left:.3e}")
        mult, rest = split_spectrum(F, a)
        if mult != 1:
            raise MultiplicityError(f"eigenvalue {a} has numerical multiplicity {mult}")
        if rest.size and abs(a) - np.max(np.abs(rest)) <= GAP_TOL * abs(a):
            raise HypothesisError(f"|a| = {abs(a)} is not strictly dominant")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "a", a)

    @property
    def dim(self):
        return self.F.shape[0]

    def gap(self):
        """``max |s / a|`` over the rest of the spectrum (0 for 1x1)."""
        _, rest = split_spectrum(self.F, self.a)
        return float(np.max(np.abs(rest)) / abs(self.a)) if rest.size else 0.0


@dataclass(frozen=True)
class PrincipalVector:
    xi: np.ndarray
    eta: np.ndarray
    G: np.ndarray


def _complete_basis(w):
    """Unitary ``U`` with first column exactly ``w``."""
    d = w.shape[0]
    q, _ = np.linalg.qr(np.column_stack([w, np.eye(d, dtype=np.complex128)]))
    q = q[:, :d]
    q[:, 0] = w
    return q


def principal_right_vector(t):
    """``xi = w + (a - G)^-1 eta`` from the block decomposition."""
    U = _complete_basis(t.w)
    Ft = adjoint(U) @ t.F @ U
    eta = Ft[1:, 0]
    G = Ft[1:, 1:]
    if G.size == 0:
        return PrincipalVector(t.w.copy(), eta, G)
    lhs = t.a * np.eye(G.shape[0]) - G
    if np.min(np.abs(eigenvalues(G) - t.a)) <= GAP_TOL * abs(t.a):
        raise DegenerateSpectrumError("a lies in the spectrum of the compression G")
    try:
        y = solve(lhs, eta)
    except SingularMatrixError as exc:
        raise DegenerateSpectrumError(str(exc)) from exc
    xi = t.w + U[:, 1:] @ y
    return PrincipalVector(xi, U[:, 1:] @ eta, G)


def filter_principal_vector(fb):
    """``v = e0 + (a0 I - G)^-1 (a2, a4, ..., a_{2D-2}, 0, ...)``.

    ``G`` is the slanted low-pass matrix with its first row and column
    deleted.  Requires the two-sided scale hypotheses on the taps.
    """
    F0 = slanted_matrix(fb.taps)
    a0 = fb.taps[0]
    if a0 * fb.taps[-1] == 0:
        raise HypothesisError("end taps must be non-zero")
    mult, rest = split_spectrum(F0, a0)
    if mult != 1:
        raise MultiplicityError(f"a0 has numerical multiplicity {mult} in spec(F0)")
    if rest.size and abs(a0) - np.max(np.abs(rest)) <= GAP_TOL * abs(a0):
        raise HypothesisError("a0 is not strictly dominant in spec(F0)")
    G = F0[1:, 1:]
    rhs = F0[1:, 0]  # (a2, a4, ..., a_{2D-2}, 0, ..., 0)
    lhs = a0 * np.eye(G.shape[0]) - G
    if abs(np.linalg.det(lhs)) < 1e-12:
        raise MultiplicityError("det(a0 I - G) vanishes: a0 is repeated")
    return np.concatenate([[1.0 + 0j], solve(lhs, rhs)])


def closed_form_principal_vector_d2(fb):
    """Four-tap closed form ``(1, (a0 - a2) a2 / p, a3 a2 / p)`` with
    ``p = a0^2 - (a1 + a2) a0 + a1 a2 - a0 a3``."""
    if fb.taps.size != 4:
        raise ValueError("closed form only for four taps")
    a0, a1, a2, a3 = fb.taps
    p = a0 * a0 - (a1 + a2) * a0 + a1 * a2 - a0 * a3
    return np.array([1.0, (a0 - a2) * a2 / p, a3 * a2 / p], dtype=np.complex128)


def _normalized_powers(t, x, n_max):
    """Yield ``a^-n F^n x`` for ``n = 0..n_max``, via unit-norm iterates with
    a separately accumulated log-magnitude and exact phase division."""
    for log_scale, u in _log_powers(t.F, t.a, as_cvector(x), n_max):
        yield (math.exp(log_scale) if log_scale > -math.inf else 0.0) * u


def _log_powers(F, a, x, n_max, project=None):
    """Yield ``(log_scale, u)`` with ``exp(log_scale) * u = (F / a)^n x``.

    ``project`` (optional) is applied after every step; it must commute
    with ``F``.
    """
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        for _ in range(n_max + 1):
            yield -math.inf, np.zeros_like(x)
        return
    u = x / nrm
    log_scale = math.log(nrm)
    phase = a / abs(a)
    scaled = F / abs(a)  # keeps iterates O(1) for tiny or huge |a|
    yield log_scale, u
    for _ in range(n_max):
        u = (scaled @ u) / phase
        if project is not None:
            u = project(u)
        m = np.linalg.norm(u)
        if m == 0.0 or log_scale == -math.inf:
            u = np.zeros_like(u)
            log_scale = -math.inf
        else:
            u = u / m
            log_scale += math.log(m)
        yield log_scale, u


def power_limit_log_errors(t, x, n_max, xi=None):
    """Natural log of ``||a^-n F^n x - <w, x> xi||`` for ``n = 0..n_max``.

    Since ``F^n xi = a^n xi``, the error equals ``||a^-n F^n r||`` with
    ``r = x - <w, x> xi``.  The residual is iterated directly, with the
    spectral projector ``I - xi w*`` (which commutes with ``F``) reapplied
    every step, so rounding never leaks back into the dominant direction and
    errors far below machine epsilon stay accurate.
    """
    if xi is None:
        xi = principal_right_vector(t).xi
    x = as_cvector(x)
    w = t.w

    def project(u):
        return u - np.vdot(w, u) * xi

    r = project(x)
    return np.array([ls + math.log(np.linalg.norm(u)) if ls > -math.inf else -math.inf
                     for ls, u in _log_powers(t.F, t.a, r, n_max, project)])


def power_limit_errors(t, x, n_max, xi=None):
    """``||a^-n F^n x - <w, x> xi||`` for ``n = 0..n_max`` as an array."""
    return np.exp(power_limit_log_errors(t, x, n_max, xi))


def power_limit_error(t, x, n):
    return float(power_limit_errors(t, x, n)[-1])


def rate_envelope_check(t, x, n_max, polynomial=True, slack=0.10):
    """Check ``err(n) <= C n^(d-1) gap^n`` on ``1 <= n <= n_max``.

    ``C`` is fitted at ``n = 1``.  With ``polynomial=False`` the ``n^(d-1)``
    factor is dropped, which is enough for diagonalisable ``F`` but fails for
    defective ones.  Returns ``(passed, C)``; comparisons are in log space.
    """
    logs = power_limit_log_errors(t, x, n_max)
    gap = t.gap()
    power = t.dim - 1 if polynomial else 0
    if logs[1] == -math.inf:
        return bool(np.all(logs[1:] == -math.inf)), 0.0
    if gap == 0.0:
        return False, math.inf
    log_c = logs[1] - math.log(gap)
    ok = True
    for n in range(1, n_max + 1):
        bound = math.log1p(slack) + log_c + power * math.log(n) + n * math.log(gap)
        if logs[n] > bound:
            ok = False
            break
    return ok, float(math.exp(log_c))


def random_dominant_triple(rng, d, gap_range=(0.6, 0.9), complex_entries=True):
    """Random ``F = V diag(a, s_2, ...) V^-1`` with ``|s_i| <= gap |a|`` and
    one ``|s_i|`` equal to ``gap |a|`` (``d >= 2``)."""

    def cnormal(*shape):
        z = rng.standard_normal(shape)
        if complex_entries:
            z = z + 1j * rng.standard_normal(shape)
        return z

    gap = rng.uniform(*gap_range)
    unit = cnormal(d)
    unit = unit / np.abs(unit)
    radius = rng.uniform(0.5, 2.0)
    moduli = radius * gap * rng.uniform(0.0, 1.0, d - 1)
    moduli[0] = radius * gap
    a = unit[0] * radius
    others = unit[1:] * moduli
    V = cnormal(d, d) + 2.0 * np.eye(d)
    Vinv = np.linalg.inv(V)
    F = V @ np.diag(np.concatenate([[a], others])) @ Vinv
    w = np.conj(Vinv[0])
    w = w / np.linalg.norm(w)
    return DominantTriple(F, a, w)


def warn_slow(gap, threshold=0.95):
    if gap >= threshold:
        warnings.warn(
            f"spectral gap ratio {gap:.4f} >= {threshold}: convergence ~ n^(d-1) * {gap:.4f}^n",
            SlowConvergenceWarning,
            stacklevel=3,
        )


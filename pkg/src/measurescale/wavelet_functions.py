"""Scaling function, wavelet and wavelet packets sampled on a dyadic grid.

All functions live on ``x_m = m 2^-J`` for ``m = 0 .. (2D-1) 2^J``.  The
two-scale operator ``T f(x) = sqrt2 sum_k c_k f(2x - k)`` maps grid samples to
grid samples exactly (``2 x_m - k`` is again a grid point), so the cascade
runs on one fixed array.

Integrals use ``h * sum(f)`` with ``h = 2^-J``.  That is the exact integral
of the step function the samples represent, and it coincides with the
trapezoid rule whenever ``f`` vanishes at both ends of the support.
"""

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DivergenceWarning
from .filter_bank import FilterBank, classify_beta, BOUNDARY, highpass_taps

SQRT2 = math.sqrt(2.0)
MAX_DEPTH = 24


@dataclass(frozen=True)
class DyadicFunction:
    depth: int
    samples: np.ndarray
    taps: FilterBank
    converged: bool = True

    @property
    def h(self):
        return 2.0**-self.depth

    @property
    def support_length(self):
        return self.taps.taps.size - 1

    @property
    def x(self):
        return np.arange(self.samples.size) * self.h

    def integral(self):
        return _fsum(self.samples) * self.h


def _fsum(arr):
    """Compensated sum of the real part."""
    return math.fsum(np.asarray(arr).real.tolist())


def _grid_size(fb, depth):
    return (fb.taps.size - 1) * 2**depth + 1


def refine(coeffs, f, depth):
    """One application of ``f -> sqrt2 sum_k c_k f(2x - k)`` on the grid."""
    n = f.size
    m = np.arange(n)
    out = np.zeros(n, dtype=np.result_type(f, coeffs))
    step = 2**depth
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        idx = 2 * m - k * step
        ok = (idx >= 0) & (idx < n)
        out[ok] += SQRT2 * c * f[idx[ok]]
    return out


def _maybe_real(arr, fb):
    return arr.real.copy() if fb.is_real else arr


def cascade_phi(fb, depth, tol=1e-14, max_iterations=None):
    """Scaling function by iterating the refinement operator on a fixed grid.

    Starts from the indicator of [0, 1) and runs at least ``depth``
    iterations, then keeps iterating until the sup change drops below
    ``tol * sup|f|`` or ``max_iterations`` (default ``depth + 200``) is
    reached.  The result is scaled to unit integral.  A
    ``DivergenceWarning`` is issued if the iterates did not settle and the
    sup changes were not decreasing over the last four iterations; the
    samples are returned regardless.
    """
    if not 0 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must be in 0..{MAX_DEPTH}")
    if max_iterations is None:
        max_iterations = depth + 200
    a = fb.taps if not fb.is_real else fb.taps.real
    n = _grid_size(fb, depth)
    f = np.zeros(n, dtype=a.dtype)
    f[: 2**depth] = 1.0
    diffs = []
    converged = False
    for it in range(max(max_iterations, depth)):
        g = refine(a, f, depth)
        scale = float(np.max(np.abs(g)))
        diffs.append(float(np.max(np.abs(g - f))))
        f = g
        if not np.isfinite(scale) or scale > 1e8:
            break
        if it + 1 >= depth:
            if diffs[-1] <= tol * max(scale, 1e-300):
                converged = True
                break
            tail = diffs[-5:]
            if len(tail) == 5 and all(x < y for x, y in zip(tail, tail[1:])):
                break  # growing steadily: more iterations only amplify
    if not converged:
        tail = diffs[-5:]
        decreasing = len(tail) == 5 and all(x > y for x, y in zip(tail, tail[1:]))
        if not decreasing:
            warnings.warn(
                f"cascade did not converge after {len(diffs)} iterations "
                f"(last sup changes {', '.join(f'{d:.3g}' for d in tail)})",
                DivergenceWarning,
                stacklevel=2,
            )
    for _ in range(2):  # second pass mops up cancellation in the sum
        mass = (2.0**-depth) * _fsum(f)
        if mass != 0:
            f = f / mass
    return DyadicFunction(depth, _maybe_real(f, fb), fb, converged)


def wavelet_psi(fb, phi):
    """``psi(x) = sqrt2 sum_k b_k phi(2x - k)`` with the high-pass taps."""
    if phi.samples.size != _grid_size(fb, phi.depth):
        raise DimensionError("phi grid does not match the filter bank")
    b = highpass_taps(fb)
    samples = refine(b if not fb.is_real else b.real, phi.samples, phi.depth)
    return DyadicFunction(phi.depth, _maybe_real(samples, fb), fb, phi.converged)


def packet(fb, n, depth, phi=None):
    """Wavelet packet ``phi_n``: ``phi_0 = phi``, ``phi_1 = psi``,
    ``phi_2n`` / ``phi_2n+1`` apply the low / high recursion to ``phi_n``."""
    if not 0 <= n < 2**16:
        raise ValueError("packet index must be in 0 .. 2^16 - 1")
    if phi is None:
        phi = cascade_phi(fb, depth)
    a = fb.taps.real if fb.is_real else fb.taps
    b = highpass_taps(fb)
    b = b.real if fb.is_real else b
    bits = bin(n)[3:] if n > 1 else ""
    if n == 0:
        return phi
    f = wavelet_psi(fb, phi)
    for bit in bits:
        f = DyadicFunction(depth, refine(b if bit == "1" else a, f.samples, depth), fb, f.converged)
    return f


def packet_table(fb, levels, depth):
    """Samples of ``phi_n`` for ``n < 2^levels`` as a ``(2^levels, grid)`` array."""
    phi = cascade_phi(fb, depth)
    return np.stack([packet(fb, n, depth, phi).samples for n in range(2**levels)])


def shift_inner(f, k):
    """``integral f(x) conj(f(x - k)) dx`` on the grid."""
    step = k * 2**f.depth
    s = f.samples
    if abs(step) >= s.size:
        return 0.0
    if step >= 0:
        v = np.vdot(s[: s.size - step], s[step:])
    else:
        v = np.vdot(s[-step:], s[: s.size + step])
    return complex(f.h * v)


def orthonormality_and_moments(f, max_shift):
    """``(shift_residual, moment)``: worst of ``|int f^2 - 1|`` and
    ``|int f(x) f(x-k)|`` for ``1 <= |k| <= max_shift``, and ``int f``."""
    if f.depth < 8:
        raise ValueError("need a grid of depth >= 8")
    worst = abs(shift_inner(f, 0) - 1.0)
    for k in range(1, max_shift + 1):
        worst = max(worst, abs(shift_inner(f, k)), abs(shift_inner(f, -k)))
    return float(worst), f.integral()


def partition_of_unity_defect(phi, interior_only=True):
    """Max of ``|sum_m phi(x - m) - 1|`` over ``x`` in one unit cell."""
    step = 2**phi.depth
    s = phi.samples
    total = np.zeros(step)
    for m in range(phi.support_length + 1):
        chunk = s[m * step : (m + 1) * step]
        total[: chunk.size] += chunk.real
    cells = total[1:] if interior_only else total
    return float(np.max(np.abs(cells - 1.0)))


def refinement_defect(phi):
    """``sup |phi - T phi|`` on the grid."""
    a = phi.taps.taps.real if phi.taps.is_real else phi.taps.taps
    return float(np.max(np.abs(refine(a, phi.samples, phi.depth) - phi.samples)))


def excluded_beta(beta):
    """True at the four angles where the orthonormality statement is excluded."""
    return classify_beta(beta) == BOUNDARY


def write_csv(fh, phi, psi, header_comment=None):
    if header_comment:
        fh.write(f"# {header_comment}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["x", "phi", "psi"])
    for x, p, q in zip(phi.x, phi.samples.real, psi.samples.real):
        writer.writerow([f"{x:.17g}", f"{p:.17g}", f"{q:.17g}"])

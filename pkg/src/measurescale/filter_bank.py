"""Quadrature-mirror tap sequences and the operators built from them.

Two families of objects live here:

* finite ``(2D-1) x (2D-1)`` slanted Toeplitz matrices (``slanted_matrix``),
  which are what the measures and scales are computed from;
* the downsampled convolution operators on finitely supported sequences in
  l^2(Z) (``ell2_apply`` / ``ell2_adjoint_apply``), which satisfy the full
  Cuntz relations.

The high-pass taps used for matrices, ``b_k = (-1)^k conj(a_{2D-1-k})``, and
the index convention of the l^2 high channel, ``(-1)^k conj(a_{1-2j+k})``,
differ by a shift.  Both are kept as they are; neither is rewritten in terms
of the other.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ValidationError
from .matrix_core import eigenvalues

SQRT2 = math.sqrt(2.0)
INV_2SQRT2 = 1.0 / (2.0 * SQRT2)
QMF_TOL = 1e-10


@dataclass(frozen=True)
class FilterBank:
    """Low-pass taps ``a_0 .. a_{2D-1}``, optionally generated from ``beta``."""

    taps: np.ndarray
    beta: float | None = None

    def __post_init__(self):
        arr = np.array(self.taps, dtype=np.complex128).reshape(-1)
        if arr.size < 2 or arr.size % 2:
            raise DimensionError(
                f"tap count must be even and >= 2 (got {arr.size}); "
                "a finite QMF sequence has an even number of terms"
            )
        if not np.all(np.isfinite(arr)):
            raise DimensionError("taps must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "taps", arr)

    @property
    def D(self):
        return self.taps.size // 2

    @property
    def is_real(self):
        return bool(np.all(self.taps.imag == 0.0))

    @property
    def a0(self):
        return self.taps[0]

    @property
    def a_last(self):
        return self.taps[-1]

    def to_json(self):
        if self.beta is not None:
            return {"beta": float(self.beta)}
        return [[float(t.real), float(t.imag)] for t in self.taps]

    def dumps(self):
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj):
        """Inverse of ``to_json``; also accepts plain real numbers as taps."""
        if isinstance(obj, dict):
            if "beta" not in obj:
                raise ValueError("filter bank object must carry a 'beta' key")
            return taps_from_beta(float(obj["beta"]))
        taps = []
        for t in obj:
            if isinstance(t, (list, tuple)):
                if len(t) != 2:
                    raise ValueError(f"tap entry {t!r} is not an [re, im] pair")
                taps.append(complex(float(t[0]), float(t[1])))
            else:
                taps.append(complex(float(t)))
        return cls(np.array(taps))

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))


def haar():
    """The two-tap Haar bank ``(1/sqrt2, 1/sqrt2)``."""
    return FilterBank(np.array([1.0, 1.0]) / SQRT2)


def daubechies4():
    """Daubechies' four-tap bank, written from its closed form."""
    s3 = math.sqrt(3.0)
    return FilterBank(np.array([1 + s3, 3 + s3, 3 - s3, 1 - s3]) / (4.0 * SQRT2))


def taps_from_beta(beta):
    """Real four-tap QMF with unit DC gain sqrt2, parametrised by an angle.

    ``beta = pi/4`` gives padded Haar, ``beta = 5*pi/12`` gives Daubechies-4.
    """
    beta = float(beta)
    c, s = math.cos(beta), math.sin(beta)
    taps = np.array(
        [
            (1.0 + SQRT2 * c) * INV_2SQRT2,
            (1.0 + SQRT2 * s) * INV_2SQRT2,
            (1.0 - SQRT2 * c) * INV_2SQRT2,
            (1.0 - SQRT2 * s) * INV_2SQRT2,
        ]
    )
    return FilterBank(taps, beta=beta)


def validate_taps(fb):
    """Return ``(qmf_residual, sum_residual)``.

    ``qmf_residual`` is ``max_k |sum_j conj(a_j) a_{j+2k} - delta_{0,k}|`` over
    all shifts with overlapping support; ``sum_residual`` is
    ``|sum_j a_j - sqrt2|``.
    """
    a = fb.taps
    n = a.size
    qmf = 0.0
    for k in range(0, (n + 1) // 2):
        c = np.vdot(a[: n - 2 * k], a[2 * k :])
        qmf = max(qmf, abs(c - (1.0 if k == 0 else 0.0)))
    return float(qmf), float(abs(a.sum() - SQRT2))


def require_qmf(fb, tol=QMF_TOL):
    qmf, _ = validate_taps(fb)
    if qmf > tol:
        raise ValidationError(f"taps violate the QMF condition: residual {qmf:.3e}", qmf)
    return fb


def highpass_taps(fb):
    """``b_k = (-1)^k conj(a_{2D-1-k})`` as a complex array."""
    a = fb.taps
    signs = np.where(np.arange(a.size) % 2 == 0, 1.0, -1.0)
    return signs * np.conj(a[::-1])


def slanted_matrix(taps):
    """The ``(2D-1) x (2D-1)`` slanted Toeplitz matrix of a tap sequence.

    Entry ``(m, n)`` (1-based) is ``taps[2m - n - 1]`` when that index is in
    range and zero otherwise.
    """
    taps = np.asarray(taps, dtype=np.complex128).reshape(-1)
    if taps.size < 2 or taps.size % 2:
        raise DimensionError(f"tap count must be even and >= 2 (got {taps.size})")
    size = taps.size - 1
    m = np.arange(1, size + 1)[:, None]
    n = np.arange(1, size + 1)[None, :]
    idx = 2 * m - n - 1
    ok = (idx >= 0) & (idx < taps.size)
    out = np.zeros((size, size), dtype=np.complex128)
    out[ok] = taps[idx[ok]]
    return out


def normalize_angle(beta):
    """Map ``beta`` into ``(-pi, pi]``."""
    b = math.remainder(float(beta), 2.0 * math.pi)
    if b == -math.pi:
        b = math.pi
    return b


REGION_I = "i"
REGION_II = "ii"
BOUNDARY = "boundary"
NEITHER = "neither"

_BOUNDARIES = (math.pi / 4, -math.pi / 4, 3 * math.pi / 4, -3 * math.pi / 4)


def classify_beta(beta, tol=1e-12):
    """Region label for the four-tap family (angle normalised first)."""
    b = normalize_angle(beta)
    if any(abs(b - edge) <= tol for edge in _BOUNDARIES):
        return BOUNDARY
    if abs(b) < math.pi / 4:
        return REGION_I
    if -3 * math.pi / 4 < b < -math.pi / 4:
        return REGION_II
    return NEITHER


def circle_residuals(fb):
    """Distance from the circle of radius 1/2 about (1/(2sqrt2), 1/(2sqrt2))
    for the tap pairs (a0, a3), (a0, a1) and (a1, a2)."""
    a = fb.taps.real
    if fb.taps.size != 4:
        raise DimensionError("circle identity is defined for four taps")

    def res(x, y):
        return abs((x - INV_2SQRT2) ** 2 + (y - INV_2SQRT2) ** 2 - 0.25)

    return {"a0_a3": res(a[0], a[3]), "a0_a1": res(a[0], a[1]), "a1_a2": res(a[1], a[2])}


@dataclass(frozen=True)
class BetaDiagnostics:
    beta: float
    taps: FilterBank
    alpha: float
    circle_residual: float
    region: str
    closed_form_spectrum: tuple
    dominance_ok: bool
    lam: float = field(default=float("nan"))

    def numeric_spectrum(self):
        return eigenvalues(slanted_matrix(self.taps.taps))


def closed_form_spectrum(beta):
    """``(a0(beta), 1/sqrt2, (sin beta - cos beta)/2)`` for the four-tap family."""
    a0 = (1.0 + SQRT2 * math.cos(beta)) * INV_2SQRT2
    lam = 0.5 * (math.sin(beta) - math.cos(beta))
    return (a0, 1.0 / SQRT2, lam)


def beta_diagnostics(beta):
    fb = taps_from_beta(beta)
    a = fb.taps.real
    a0, mid, lam = closed_form_spectrum(beta)
    return BetaDiagnostics(
        beta=float(beta),
        taps=fb,
        alpha=float(max(a[0] ** 2, a[3] ** 2)),
        circle_residual=circle_residuals(fb)["a0_a3"],
        region=classify_beta(beta),
        closed_form_spectrum=(a0, mid, lam),
        dominance_ok=bool(a0 > mid > abs(lam)),
        lam=lam,
    )


# --- finitely supported sequences on Z -------------------------------------


@dataclass(frozen=True)
class FiniteSequence:
    """A sequence on Z that vanishes outside ``start .. start+len(values)-1``."""

    start: int
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.complex128).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start", int(self.start))

    @classmethod
    def zero(cls):
        return cls(0, np.zeros(0))

    @classmethod
    def delta(cls, m, scale=1.0):
        return cls(m, np.array([scale]))

    @classmethod
    def from_dict(cls, d):
        d = {int(k): v for k, v in d.items() if v != 0}
        if not d:
            return cls.zero()
        lo, hi = min(d), max(d)
        vals = np.zeros(hi - lo + 1, dtype=np.complex128)
        for k, v in d.items():
            vals[k - lo] = v
        return cls(lo, vals)

    def to_dict(self, tol=0.0):
        return {self.start + i: complex(v) for i, v in enumerate(self.values) if abs(v) > tol}

    def __getitem__(self, j):
        i = j - self.start
        if 0 <= i < self.values.size:
            return complex(self.values[i])
        return 0j

    def indices(self):
        return range(self.start, self.start + self.values.size)

    def trimmed(self, tol=0.0):
        nz = np.flatnonzero(np.abs(self.values) > tol)
        if nz.size == 0:
            return FiniteSequence.zero()
        return FiniteSequence(self.start + int(nz[0]), self.values[nz[0] : nz[-1] + 1])

    def __add__(self, other):
        return FiniteSequence.from_dict(_merge(self.to_dict(), other.to_dict(), 1.0))

    def __sub__(self, other):
        return FiniteSequence.from_dict(_merge(self.to_dict(), other.to_dict(), -1.0))

    def norm(self):
        return float(np.linalg.norm(self.values))

    def inner(self, other):
        """``<self, other>``, conjugate-linear in the first slot."""
        return sum(np.conj(v) * other[k] for k, v in self.to_dict().items())


def _merge(x, y, sign):
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0j) + sign * v
    return out


LOW = "low"
HIGH = "high"


def _kernel(channel, a):
    """Return ``(K, jrange)``: ``K(j, k)`` is the matrix entry of the channel
    operator and ``jrange(k)`` the output indices that can be non-zero."""
    L = a.size
    if channel == LOW:

        def K(j, k):
            i = 2 * j - k
            return a[i] if 0 <= i < L else 0j

        def jrange(k):
            return range(-((-k) // 2), (k + L - 1) // 2 + 1)

    elif channel == HIGH:

        def K(j, k):
            i = 1 - 2 * j + k
            return ((-1) ** (k % 2)) * np.conj(a[i]) if 0 <= i < L else 0j

        def jrange(k):
            return range(-((-(k + 2 - L)) // 2), (k + 1) // 2 + 1)

    else:
        raise ValueError(f"unknown channel {channel!r}; expected 'low' or 'high'")
    return K, jrange


def ell2_apply(channel, fb, x):
    """Apply the low (``(F0 x)_j = sum_k a_{2j-k} x_k``) or high channel to a
    finitely supported sequence."""
    K, jrange = _kernel(channel, fb.taps)
    out = {}
    for k, xk in x.to_dict().items():
        for j in jrange(k):
            out[j] = out.get(j, 0j) + K(j, k) * xk
    return FiniteSequence.from_dict(out)


def ell2_adjoint_apply(channel, fb, y):
    """Adjoint of ``ell2_apply``: ``(F* y)_k = sum_j conj(K(j, k)) y_j``."""
    K, _ = _kernel(channel, fb.taps)
    L = fb.taps.size
    out = {}
    for j, yj in y.to_dict().items():
        # K(j, k) != 0 needs 2j-k in [0, L) (low) or 1-2j+k in [0, L) (high)
        ks = range(2 * j - L + 1, 2 * j + 1) if channel == LOW else range(2 * j - 1, 2 * j + L - 1)
        for k in ks:
            out[k] = out.get(k, 0j) + np.conj(K(j, k)) * yj
    return FiniteSequence.from_dict(out)

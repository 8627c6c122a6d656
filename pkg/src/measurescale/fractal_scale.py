"""Fractal scales of the measures ``mu_psi``.

For a measure on [0, 1), ``s`` is a lower scale if ``mu(J) / |J|^s`` stays
bounded away from 0 along shrinking intervals of positive mass, and an upper
scale if it stays bounded.  Limits are not computable, so the empirical side
reports per-level envelopes of the exponent ``log mu(J) / log |J|`` plus the
ratios along single branches, and the theoretical side evaluates the closed
forms coming from the end taps of a filter bank.
"""

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .cylinder_measure import Word, _expand, batched_log_measures, log_scalar_measure
from .dominant_eigen import GAP_TOL, filter_principal_vector, split_spectrum, warn_slow
from .errors import HypothesisError, ResourceError
from .filter_bank import slanted_matrix
from .measurement_system import basis_state, from_filter_bank

LN2 = math.log(2.0)


def ifs_dimension(replicas, magnification):
    """``log(replicas) / log(magnification)``."""
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    if magnification <= 1:
        raise ValueError("magnification must exceed 1")
    return math.log(replicas) / math.log(magnification)


def theoretical_scale(fb):
    """Return ``(alpha, s)`` with ``alpha = max(|a_0|^2, |a_{2D-1}|^2)`` and
    ``s = -ln(alpha) / ln 2``."""
    a0, last = fb.taps[0], fb.taps[-1]
    if a0 * last == 0:
        raise HypothesisError("scale formula needs a_0 * a_{2D-1} != 0")
    alpha = float(max(abs(a0) ** 2, abs(last) ** 2))
    return alpha, -math.log(alpha) / LN2


@dataclass(frozen=True)
class TwoSidedHypotheses:
    nonvanishing_ok: bool
    dominance_ok: bool
    multiplicity_ok: bool
    spectral_gap: float

    @property
    def all_ok(self):
        return self.nonvanishing_ok and self.dominance_ok and self.multiplicity_ok


def check_two_sided_hypotheses(fb, tol=GAP_TOL):
    """Flags for: non-vanishing end taps, ``|a0|`` strictly dominant in
    ``spec(F0)``, and ``a0`` a simple eigenvalue.  ``spectral_gap`` is
    ``|second| / |a0|``."""
    a0 = fb.taps[0]
    F0 = slanted_matrix(fb.taps)
    mult, rest = split_spectrum(F0, a0, tol)
    second = float(np.max(np.abs(rest))) if rest.size else 0.0
    gap = second / abs(a0) if a0 != 0 else math.inf
    return TwoSidedHypotheses(
        nonvanishing_ok=bool(a0 * fb.taps[-1] != 0),
        dominance_ok=bool(a0 != 0 and abs(a0) - second > tol * abs(a0)),
        multiplicity_ok=bool(mult == 1),
        spectral_gap=float(gap),
    )


# --- empirical envelopes ----------------------------------------------------


@dataclass
class LevelEnvelope:
    level: int
    min_exponent: float
    max_exponent: float
    positive_words: int
    sampled: bool = False


@dataclass
class ScaleReport:
    theoretical_s: float | None
    levels: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self):
        return {
            "theoretical_s": self.theoretical_s,
            "levels": [asdict(lv) for lv in self.levels],
            "notes": list(self.notes),
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=2)

    def write_csv(self, fh, header_comment=None):
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["level", "min_exponent", "max_exponent", "positive_words"])
        for lv in self.levels:
            writer.writerow(
                [lv.level, f"{lv.min_exponent:.17g}", f"{lv.max_exponent:.17g}", lv.positive_words]
            )


def _envelope(level, logs, N, threshold, sampled=False):
    live = logs[logs > threshold]
    if live.size == 0:
        return LevelEnvelope(level, math.nan, math.nan, 0, sampled)
    exps = live / (-level * math.log(N))
    return LevelEnvelope(level, float(exps.min()), float(exps.max()), int(live.size), sampled)


def empirical_scale_profile(
    sys,
    psi,
    max_level,
    budget=2**18,
    sample_branches=2**14,
    allow_sampling=True,
    log_threshold=-700.0,
    seed=0,
    theoretical_s=None,
):
    """Per-level min/max of ``log mu(J) / log |J|`` over words of positive mass.

    Levels are enumerated exhaustively while the live frontier times ``N``
    fits in ``budget``; words whose log-mass drops below ``log_threshold``
    are pruned (their descendants have no more mass).  Past the budget,
    ``sample_branches`` uniformly random words per level are used instead.
    """
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    report = ScaleReport(theoretical_s)
    ops = sys.stacked()
    psi = np.asarray(psi, dtype=np.complex128)
    nrm = np.linalg.norm(psi)
    states = (psi / nrm)[None, :]
    logs = np.array([2.0 * math.log(nrm)])
    rng = np.random.default_rng(seed)
    exhaustive = True
    for level in range(1, max_level + 1):
        if exhaustive and states.shape[0] * sys.N > budget:
            if not allow_sampling:
                raise ResourceError(
                    f"level {level} needs {states.shape[0] * sys.N} words, budget is {budget}"
                )
            exhaustive = False
            report.notes.append(f"levels >= {level} use {sample_branches} random branches")
        if exhaustive:
            states, logs = _expand(ops, states, logs)
            keep = logs > log_threshold
            states, logs = states[keep], logs[keep]
            report.levels.append(_envelope(level, logs, sys.N, log_threshold))
        else:
            digits = rng.integers(0, sys.N, size=(sample_branches, level))
            sample_logs = batched_log_measures(sys, psi, digits)
            report.levels.append(_envelope(level, sample_logs, sys.N, log_threshold, sampled=True))
    return report


def branch_exponents(sys, psi, digit, max_level, base=None):
    """``log mu(base digit^n) / log |J|`` for ``n = 1..max_level``."""
    base = base if base is not None else Word(sys.N)
    out = []
    w = base
    for _ in range(max_level):
        w = w.extend(digit)
        lg = log_scalar_measure(sys, psi, w)
        out.append(lg / (-len(w) * math.log(sys.N)))
    return np.array(out)


def branch_ratios(sys, psi, base, digit, s, n_max):
    """``mu(base digit^n) / |J|^s`` for ``n = 0..n_max``, in log space."""
    out = []
    w = base
    k = len(base)
    for n in range(n_max + 1):
        if n:
            w = w.extend(digit)
        lg = log_scalar_measure(sys, psi, w)
        out.append(math.exp(lg + s * (k + n) * math.log(sys.N)))
    return np.array(out)


def lower_scale_ratios(fb, base, n_max):
    """Ratios ``mu_0(J_n) / |J_n|^s`` with ``s`` from ``theoretical_scale``.

    ``J_n`` shrinks towards the left end of the base interval (all-zeros
    extension) when ``alpha = |a_0|^2`` and towards its right end (all-ones
    extension) otherwise.  The sequence should stay bounded below.
    """
    alpha, s = theoretical_scale(fb)
    sys = from_filter_bank(fb)
    digit = 0 if alpha == abs(fb.taps[0]) ** 2 else 1
    return branch_ratios(sys, basis_state(sys.dim), base, digit, s, n_max)


def two_sided_limit_check(fb, base, n_max, slow_gap=0.95):
    """Return ``(r, predicted_limit)`` with
    ``r_n = |a0|^(-2n) mu_0(base 0^n)`` for ``n = 0..n_max`` and
    ``predicted_limit = |a0|^(2 #0) |a_{2D-1}|^(2 #1) ||v||^2``.

    Warns with ``SlowConvergenceWarning`` if the spectral gap ratio is at
    least ``slow_gap``.
    """
    hyp = check_two_sided_hypotheses(fb)
    if not hyp.all_ok:
        raise HypothesisError(f"taps fail the two-sided scale hypotheses: {hyp}")
    warn_slow(hyp.spectral_gap, slow_gap)
    v = filter_principal_vector(fb)
    a0, last = abs(fb.taps[0]), abs(fb.taps[-1])
    predicted = (
        a0 ** (2 * base.count(0)) * last ** (2 * base.count(1)) * float(np.vdot(v, v).real)
    )
    sys = from_filter_bank(fb)
    e0 = basis_state(sys.dim)
    r = []
    w = base
    for n in range(n_max + 1):
        if n:
            w = w.extend(0)
        r.append(math.exp(log_scalar_measure(sys, e0, w) - 2 * n * math.log(a0)))
    return np.array(r), predicted


__all__ = [
    "LevelEnvelope",
    "ScaleReport",
    "TwoSidedHypotheses",
    "branch_exponents",
    "branch_ratios",
    "check_two_sided_hypotheses",
    "empirical_scale_profile",
    "ifs_dimension",
    "theoretical_scale",
    "lower_scale_ratios",
    "two_sided_limit_check",
]

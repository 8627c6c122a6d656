"""Operator-valued and scalar measures of N-adic cylinder sets.

A word ``w = (i_1, ..., i_k)`` names the cylinder of sequences starting with
those digits and, geometrically, the interval ``[xi, xi + N^-k)`` with
``xi = sum_j i_j N^-j``.  Its operator measure is
``P(w) = F_{i_1}* ... F_{i_k}* F_{i_k} ... F_{i_1}``: the first digit is
applied to the state first.  The scalar measure seen from a unit vector
``psi`` is ``<psi, P(w) psi> = ||F_{i_k} ... F_{i_1} psi||^2``.
"""

import csv
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DeadStateError, DimensionError, ResourceError
from .matrix_core import adjoint, as_cvector, opnorm
from .measurement_system import builtin_system, basis_state

LOG_ZERO_NORM = 1e-300
MAX_PARTITION_WORDS = 2**20


@dataclass(frozen=True)
class Word:
    N: int
    digits: tuple = ()

    def __post_init__(self):
        digits = tuple(int(d) for d in self.digits)
        if self.N < 1:
            raise ValueError("alphabet size must be >= 1")
        bad = [d for d in digits if not 0 <= d < self.N]
        if bad:
            raise ValueError(f"digits {bad} out of range for N={self.N}")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def parse(cls, text, N):
        """``"0212"`` -> ``Word(N, (0, 2, 1, 2))``; digits must be < N."""
        text = text.strip()
        if text in ("", "-"):
            return cls(N, ())
        if not text.isdigit():
            raise ValueError(f"word {text!r} must be a string of decimal digits")
        return cls(N, tuple(int(c) for c in text))

    def __len__(self):
        return len(self.digits)

    def __str__(self):
        return "".join(map(str, self.digits)) if self.N <= 10 else ",".join(map(str, self.digits))

    def extend(self, *digits):
        return Word(self.N, self.digits + tuple(digits))

    def count(self, digit):
        return self.digits.count(digit)


def all_words(N, k):
    """All words of length ``k`` in lexicographic (= interval) order."""
    for digits in itertools.product(range(N), repeat=k):
        yield Word(N, digits)


@dataclass(frozen=True)
class NAdicInterval:
    """``[num / N^level, (num + 1) / N^level)`` with exact integer data."""

    num: int
    level: int
    N: int

    def __post_init__(self):
        if not 0 <= self.num < self.N**self.level:
            raise ValueError("numerator out of range for level")

    @property
    def xi(self):
        return Fraction(self.num, self.N**self.level)

    @property
    def left(self):
        return self.xi

    @property
    def right(self):
        return Fraction(self.num + 1, self.N**self.level)

    @property
    def length(self):
        return Fraction(1, self.N**self.level)


def word_to_interval(w):
    num = 0
    for d in w.digits:
        num = num * w.N + d
    return NAdicInterval(num, len(w), w.N)


def interval_to_word(iv):
    digits = []
    num = iv.num
    for _ in range(iv.level):
        num, d = divmod(num, iv.N)
        digits.append(d)
    return Word(iv.N, tuple(reversed(digits)))


def _check(sys, w):
    if w.N != sys.N:
        raise DimensionError(f"word alphabet N={w.N} does not match system N={sys.N}")


def _check_state(sys, psi):
    psi = as_cvector(psi)
    if psi.shape[0] != sys.dim:
        raise DimensionError(f"state has dim {psi.shape[0]}, system has dim {sys.dim}")
    return psi


def word_operator(sys, w):
    """``F_{i_k} ... F_{i_1}``."""
    _check(sys, w)
    m = np.eye(sys.dim, dtype=np.complex128)
    for d in w.digits:
        m = sys.operators[d] @ m
    return m


def operator_measure(sys, w):
    """``P(C(w))``; the identity for the empty word."""
    m = word_operator(sys, w)
    return adjoint(m) @ m


def scalar_measure(sys, psi, w):
    """``||F_{i_k} ... F_{i_1} psi||^2`` (raw, not clamped)."""
    _check(sys, w)
    x = _check_state(sys, psi)
    for d in w.digits:
        x = sys.operators[d] @ x
    return float(np.vdot(x, x).real)


def log_scalar_measure(sys, psi, w):
    """Natural log of the scalar measure, computed with renormalisation so
    deep words do not underflow.  ``-inf`` once the state is annihilated."""
    _check(sys, w)
    x = _check_state(sys, psi)
    nrm = np.linalg.norm(x)
    if nrm < LOG_ZERO_NORM:
        return -math.inf
    total = 2.0 * math.log(nrm)
    x = x / nrm
    for d in w.digits:
        x = sys.operators[d] @ x
        nrm = np.linalg.norm(x)
        if nrm < LOG_ZERO_NORM:
            return -math.inf
        total += 2.0 * math.log(nrm)
        x = x / nrm
    return total


def clamp_probability(p):
    return min(1.0, max(0.0, p))


def consistency_residual(sys, w):
    """``|| P(w) - sum_j P(w j) ||``."""
    parent = operator_measure(sys, w)
    children = sum(operator_measure(sys, w.extend(j)) for j in range(sys.N))
    return opnorm(parent - children)


def transfer_map(sys, x):
    """``X -> sum_i F_i* X F_i``; summing ``P`` over all words of length k
    equals ``k`` applications of this map to the identity."""
    return sum(adjoint(f) @ x @ f for f in sys.operators)


def partition_identity_residual(sys, k, max_words=MAX_PARTITION_WORDS):
    """``|| sum_{|w| = k} P(C(w)) - I ||``."""
    if sys.N**k > max_words:
        raise ResourceError(f"N^k = {sys.N}^{k} exceeds the {max_words}-word guard")
    total = np.eye(sys.dim, dtype=np.complex128)
    for _ in range(k):
        total = transfer_map(sys, total)
    return opnorm(total - np.eye(sys.dim))


# --- batched level sweeps ---------------------------------------------------


def _expand(ops, states, logs):
    """Apply every operator to every (normalised) state.

    Returns children in word order (parent-major), with their log-measures.
    Annihilated branches get ``-inf`` and a zero state.
    """
    n_ops = ops.shape[0]
    child = np.einsum("nij,mj->mni", ops, states).reshape(-1, ops.shape[1])
    nrm = np.linalg.norm(child, axis=1)
    dead = nrm < LOG_ZERO_NORM
    safe = np.where(dead, 1.0, nrm)
    child = child / safe[:, None]
    child[dead] = 0.0
    with np.errstate(divide="ignore"):
        step = np.where(dead, -np.inf, 2.0 * np.log(safe))
    new_logs = np.repeat(logs, n_ops) + step
    return child, new_logs


def level_log_measures(sys, psi, k, max_words=2**22):
    """Natural-log measures of all ``N^k`` words, in interval order."""
    if sys.N**k > max_words:
        raise ResourceError(f"N^k = {sys.N}^{k} exceeds the {max_words}-word budget")
    psi = _check_state(sys, psi)
    nrm = np.linalg.norm(psi)
    states = (psi / nrm)[None, :]
    logs = np.array([2.0 * math.log(nrm)])
    ops = sys.stacked()
    for _ in range(k):
        states, logs = _expand(ops, states, logs)
    return logs


def level_measures(sys, psi, k, max_words=2**22):
    return np.exp(level_log_measures(sys, psi, k, max_words))


def batched_log_measures(sys, psi, digits):
    """Log-measures of many words of equal length; ``digits`` is ``(M, k)``."""
    digits = np.asarray(digits, dtype=np.int64)
    psi = _check_state(sys, psi)
    nrm = np.linalg.norm(psi)
    m = digits.shape[0]
    states = np.tile(psi / nrm, (m, 1))
    logs = np.full(m, 2.0 * math.log(nrm))
    ops = sys.stacked()
    rows = np.arange(m)
    for col in range(digits.shape[1]):
        nxt = np.einsum("mij,mj->mi", ops[digits[:, col]], states)
        n = np.linalg.norm(nxt, axis=1)
        dead = n < LOG_ZERO_NORM
        safe = np.where(dead, 1.0, n)
        with np.errstate(divide="ignore"):
            logs = logs + np.where(dead, -np.inf, 2.0 * np.log(safe))
        states = nxt / safe[:, None]
        states[rows[dead]] = 0.0
    return logs


def write_level_csv(path_or_file, sys, psi, k, header_comment=None):
    """CSV rows ``word, xi_num, level, measure, log2_measure`` for level ``k``."""
    logs = level_log_measures(sys, psi, k)
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
    try:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["word", "xi_num", "level", "measure", "log2_measure"])
        for num, lg in enumerate(logs):
            w = interval_to_word(NAdicInterval(num, k, sys.N))
            writer.writerow([str(w), num, k, f"{math.exp(lg):.17g}", f"{lg / math.log(2):.17g}"])
    finally:
        if own:
            fh.close()


# --- trajectory sampling ----------------------------------------------------


class TrajectorySampler:
    """Draws digit sequences with law ``mu_psi`` via sequential measurement.

    Each step picks digit ``i`` with probability ``||F_i phi||^2`` for the
    current normalised state ``phi`` and moves to ``F_i phi / ||F_i phi||``.
    Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64).
    One instance owns its generator; do not share it between threads.
    """

    DEAD_TOL = 1e-28

    def __init__(self, sys, psi, seed=0):
        self.sys = sys
        self.psi = _check_state(sys, psi)
        self.rng = np.random.default_rng(seed)
        self._ops = sys.stacked()

    def sample_many(self, length, count):
        """``(count, length)`` integer array of digits."""
        ops = self._ops
        states = np.tile(self.psi / np.linalg.norm(self.psi), (count, 1))
        out = np.empty((count, length), dtype=np.int64)
        rows = np.arange(count)
        for step in range(length):
            images = np.einsum("nij,mj->mni", ops, states)  # (count, N, d)
            probs = np.sum(np.abs(images) ** 2, axis=2)
            total = probs.sum(axis=1)
            if np.any(total < self.DEAD_TOL):
                raise DeadStateError(f"all channels annihilate the state at step {step}")
            cdf = np.cumsum(probs / total[:, None], axis=1)
            u = self.rng.random(count)
            choice = np.minimum((u[:, None] >= cdf).sum(axis=1), ops.shape[0] - 1)
            # guard against rounding picking a zero-probability channel
            zero = probs[rows, choice] <= 0.0
            if np.any(zero):
                choice[zero] = np.argmax(probs[zero], axis=1)
            out[:, step] = choice
            chosen = images[rows, choice]
            states = chosen / np.linalg.norm(chosen, axis=1)[:, None]
        return out

    def sample(self, length):
        return Word(self.sys.N, tuple(self.sample_many(length, 1)[0]))


def sample_trajectory(sys, psi, length, seed=0):
    return TrajectorySampler(sys, psi, seed).sample(length)


# --- Cantor self-similarity -------------------------------------------------


def cantor_self_similarity_residual(level):
    """Worst defect of ``mu(J) = (mu(3J) + mu(3J - 2)) / 2`` over triadic
    intervals ``J`` of the given level, with ``mu`` from ``cantor3``.

    Both images are intersected with ``[0, 1)`` exactly in units of
    ``3^-level``; measures of unions of level-``k`` cells come from prefix sums.
    """
    if not 0 <= level <= 12:
        raise ValueError("level must be in 0..12")
    sys = builtin_system("cantor3")
    mu = level_measures(sys, basis_state(3), level)
    cells = 3**level
    prefix = np.concatenate([[0.0], np.cumsum(mu)])

    def mass(lo, hi):
        lo, hi = max(lo, 0), min(hi, cells)
        return prefix[hi] - prefix[lo] if hi > lo else 0.0

    worst = 0.0
    for num in range(cells):
        # J = [num, num+1) in cell units; 3J = [3num, 3num+3); 3J-2 shifts by 2*cells
        rhs = 0.5 * (mass(3 * num, 3 * num + 3) + mass(3 * num - 2 * cells, 3 * num + 3 - 2 * cells))
        worst = max(worst, abs(mu[num] - rhs))
    return float(worst)

"""Command-line front end: ``measurescale <verb> [options]``.

Exit codes: 0 success, 1 usage error, 2 a checked residual exceeded its
tolerance (or the scale hypotheses failed).
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .cylinder_measure import (
    TrajectorySampler,
    Word,
    consistency_residual,
    log_scalar_measure,
    operator_measure,
    partition_identity_residual,
    scalar_measure,
    word_to_interval,
    write_level_csv,
)
from .dominant_eigen import (
    DominantTriple,
    closed_form_principal_vector_d2,
    filter_principal_vector,
    principal_right_vector,
    rate_envelope_check,
)
from .errors import HypothesisError, MeasureScaleError, ValidationError
from .filter_bank import (
    FilterBank,
    beta_diagnostics,
    circle_residuals,
    slanted_matrix,
)
from .fractal_scale import (
    check_two_sided_hypotheses,
    empirical_scale_profile,
    theoretical_scale,
    two_sided_limit_check,
)
from .matrix_core import eigenvalues
from .filter_bank import taps_from_beta
from .measurement_system import (
    BUILTINS,
    basis_state,
    builtin_system,
    column_isometry_residual,
    cuntz_residual,
    from_filter_bank,
    load_system,
)
from .wavelet_functions import cascade_phi, orthonormality_and_moments, wavelet_psi, write_csv

OUT_DIR_ENV = "MEASURESCALE_OUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2
VERBS = ("verify", "measure", "partition", "scale", "spectrum", "beta-scan", "sample", "power", "cascade")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass
class RunConfig:
    command: str
    builtin: str | None = None
    system: str | None = None
    beta: float | None = None
    taps: str | None = None
    tol: float = 1e-10
    out: str | None = None
    seed: int = 0
    state: int = 0
    options: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, ns):
        known = {"command", "builtin", "system", "beta", "taps", "tol", "out", "seed", "state"}
        cfg = cls(**{k: getattr(ns, k) for k in known if hasattr(ns, k)})
        cfg.options = {k: v for k, v in vars(ns).items() if k not in known}
        return cfg

    @property
    def has_source(self):
        return any(x is not None for x in (self.builtin, self.system, self.beta, self.taps))

    def filter_bank(self):
        if self.beta is not None:
            return taps_from_beta(self.beta)
        if self.taps is not None:
            with open(self.taps, encoding="utf-8") as fh:
                return FilterBank.from_json(json.load(fh))
        raise UsageError(f"'{self.command}' needs a filter bank: use --beta or --taps")

    def measurement_system(self, validate=True):
        if self.builtin is not None:
            return builtin_system(self.builtin)
        if self.system is not None:
            return load_system(self.system, validate=validate, tol=self.tol)
        return from_filter_bank(self.filter_bank())


def _fmt(x):
    return f"{x:.17g}"


def _fmt_c(z):
    z = complex(z)
    if z.imag == 0:
        return _fmt(z.real)
    return f"{_fmt(z.real)}{'+' if z.imag >= 0 else '-'}{_fmt(abs(z.imag))}j"


def _matrix_lines(m):
    return ["  [" + ", ".join(_fmt_c(z) for z in row) + "]" for row in np.asarray(m)]


def _add_source(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--builtin", choices=sorted(BUILTINS), help="builtin measurement system")
    g.add_argument("--system", metavar="FILE", help="system JSON file")
    g.add_argument("--beta", type=float, help="four-tap filter bank angle (radians)")
    g.add_argument("--taps", metavar="FILE", help="tap JSON file ([[re, im], ...] or {\"beta\": x})")


def _add_common(p):
    p.add_argument("--tol", type=float, default=1e-10, help="violation tolerance (default 1e-10)")
    p.add_argument("--out", help="output file (default: stdout, or $%s/<verb>.csv)" % OUT_DIR_ENV)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--state", type=int, default=0, help="index of the basis state psi = e_i")


def build_parser():
    parser = _Parser(prog="measurescale", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"measurescale {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="column isometry, Cuntz and consistency residuals")
    _add_source(p)
    _add_common(p)
    p.add_argument("--level", type=int, default=4, help="partition identity level")

    p = sub.add_parser("measure", help="operator and scalar measure of one cylinder word")
    _add_source(p)
    _add_common(p)
    p.add_argument("--word", required=True, help="digit string, e.g. 0212")

    p = sub.add_parser("partition", help="partition identity residual and level CSV")
    _add_source(p)
    _add_common(p)
    p.add_argument("--level", type=int, required=True)

    p = sub.add_parser("scale", help="empirical exponent envelopes per level")
    _add_source(p)
    _add_common(p)
    p.add_argument("--max-level", type=int, default=10)
    p.add_argument("--budget", type=int, default=2**18)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("spectrum", help="spectrum of F0 and scale hypotheses")
    _add_source(p)
    _add_common(p)

    p = sub.add_parser("beta-scan", help="CSV scan over the four-tap family")
    _add_common(p)
    p.add_argument("--from", dest="start", type=float, default=-math.pi)
    p.add_argument("--to", dest="stop", type=float, default=math.pi)
    p.add_argument("--steps", type=int, default=629)

    p = sub.add_parser("sample", help="Monte-Carlo trajectories")
    _add_source(p)
    _add_common(p)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--count", type=int, default=1)

    p = sub.add_parser("power", help="dominant eigenvector and power-limit diagnostics")
    _add_source(p)
    _add_common(p)
    p.add_argument("--n-max", type=int, default=80)
    p.add_argument("--base", default="", help="base word for the limit check")

    p = sub.add_parser("cascade", help="sample scaling function and wavelet")
    _add_source(p)
    _add_common(p)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--max-shift", type=int, default=3)
    return parser


class _Output:
    """Text sink: ``--out`` file, ``$MEASURESCALE_OUT_DIR/<verb>.csv``, or stdout."""

    def __init__(self, cfg, stdout, default_name):
        self.path = cfg.out
        if self.path is None and os.environ.get(OUT_DIR_ENV):
            self.path = os.path.join(os.environ[OUT_DIR_ENV], default_name)
        self.stdout = stdout
        self.buf = io.StringIO()

    def close(self):
        if self.path is None:
            self.stdout.write(self.buf.getvalue())
        else:
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(self.buf.getvalue())


def _header(argv):
    return f"measurescale {__version__} argv: {' '.join(argv)}"


def _parse_word(text, N):
    if text.strip() and not text.strip().isdigit():
        raise UsageError(f"word {text!r} must be a string of decimal digits")
    digits = tuple(int(c) for c in text.strip())
    if any(d >= N for d in digits):
        raise UsageError(f"word {text!r} has a digit >= N = {N}")
    return Word(N, digits)


def cmd_verify(cfg, argv, out):
    sys_ = cfg.measurement_system(validate=False)
    iso = column_isometry_residual(sys_)
    print(f"system: {sys_.label or '(unnamed)'}  N={sys_.N}  dim={sys_.dim}", file=out)
    print(f"column_isometry_residual: {_fmt(iso)}", file=out)
    print(f"cuntz_residual: {_fmt(cuntz_residual(sys_))}", file=out)
    print(f"consistency_residual(empty word): {_fmt(consistency_residual(sys_, Word(sys_.N)))}", file=out)
    level = cfg.options["level"]
    if sys_.N**level <= 2**20:
        print(f"partition_identity_residual(k={level}): {_fmt(partition_identity_residual(sys_, level))}", file=out)
    if iso > cfg.tol:
        print(f"FAIL: isometry residual {_fmt(iso)} exceeds tolerance {cfg.tol:g}", file=out)
        return EXIT_VIOLATION
    print("OK", file=out)
    return EXIT_OK


def cmd_measure(cfg, argv, out):
    sys_ = cfg.measurement_system()
    w = _parse_word(cfg.options["word"], sys_.N)
    psi = basis_state(sys_.dim, cfg.state)
    iv = word_to_interval(w)
    lg = log_scalar_measure(sys_, psi, w)
    print(f"word: {w}  interval: [{iv.left}, {iv.right})", file=out)
    print(f"measure: {_fmt(scalar_measure(sys_, psi, w))}", file=out)
    print(f"log2_measure: {_fmt(lg / math.log(2)) if lg > -math.inf else '-inf'}", file=out)
    print("operator:", file=out)
    for line in _matrix_lines(operator_measure(sys_, w)):
        print(line, file=out)
    return EXIT_OK


def cmd_partition(cfg, argv, out):
    sys_ = cfg.measurement_system()
    k = cfg.options["level"]
    res = partition_identity_residual(sys_, k)
    print(f"partition_identity_residual(k={k}): {_fmt(res)}", file=sys.stderr if cfg.out else out)
    if cfg.out or os.environ.get(OUT_DIR_ENV):
        sink = _Output(cfg, out, "partition.csv")
        write_level_csv(sink.buf, sys_, basis_state(sys_.dim, cfg.state), k, _header(argv))
        sink.close()
    return EXIT_VIOLATION if res > cfg.tol else EXIT_OK


def cmd_scale(cfg, argv, out):
    sys_ = cfg.measurement_system()
    s = None
    if cfg.beta is not None or cfg.taps is not None:
        try:
            s = theoretical_scale(cfg.filter_bank())[1]
        except HypothesisError:
            s = None
    report = empirical_scale_profile(
        sys_,
        basis_state(sys_.dim, cfg.state),
        cfg.options["max_level"],
        budget=cfg.options["budget"],
        seed=cfg.seed,
        theoretical_s=s,
    )
    sink = _Output(cfg, out, "scale." + cfg.options["format"])
    if cfg.options["format"] == "json":
        sink.buf.write(report.dumps() + "\n")
    else:
        report.write_csv(sink.buf, _header(argv))
    sink.close()
    return EXIT_OK


def cmd_spectrum(cfg, argv, out):
    if cfg.beta is not None or cfg.taps is not None:
        fb = cfg.filter_bank()
        vals = eigenvalues(slanted_matrix(fb.taps))
        print("spec(F0): " + ", ".join(_fmt_c(v) for v in vals), file=out)
        if fb.beta is not None:
            diag = beta_diagnostics(fb.beta)
            print("closed_form: " + ", ".join(_fmt(v) for v in diag.closed_form_spectrum), file=out)
            print(f"region: {diag.region}  dominance_ok: {diag.dominance_ok}  alpha: {_fmt(diag.alpha)}", file=out)
        hyp = check_two_sided_hypotheses(fb)
        print(
            f"hypotheses: nonvanishing={hyp.nonvanishing_ok} dominance={hyp.dominance_ok} "
            f"multiplicity={hyp.multiplicity_ok} spectral_gap={_fmt(hyp.spectral_gap)}",
            file=out,
        )
        return EXIT_OK
    sys_ = cfg.measurement_system()
    for i, op in enumerate(sys_.operators):
        print(f"spec(F{i}): " + ", ".join(_fmt_c(v) for v in eigenvalues(op)), file=out)
    return EXIT_OK


BETA_SCAN_COLUMNS = [
    "beta", "a0", "a1", "a2", "a3", "alpha", "s", "lambda", "region", "dominance_ok", "circle_residual",
]


def beta_scan_rows(start, stop, steps):
    if steps < 2:
        raise UsageError("beta-scan needs --steps >= 2")
    for i in range(steps):
        beta = start + i * (stop - start) / (steps - 1)
        d = beta_diagnostics(beta)
        a = d.taps.taps.real
        circle = max(circle_residuals(d.taps).values())
        yield [
            _fmt(beta), *(_fmt(x) for x in a), _fmt(d.alpha), _fmt(-math.log(d.alpha) / math.log(2)),
            _fmt(d.lam), d.region, str(d.dominance_ok).lower(), _fmt(circle),
        ]


def cmd_beta_scan(cfg, argv, out):
    o = cfg.options
    rows = list(beta_scan_rows(o["start"], o["stop"], o["steps"]))
    sink = _Output(cfg, out, "beta-scan.csv")
    sink.buf.write(f"# {_header(argv)}\n")
    writer = csv.writer(sink.buf, lineterminator="\n")
    writer.writerow(BETA_SCAN_COLUMNS)
    writer.writerows(rows)
    sink.close()
    return EXIT_OK


def cmd_sample(cfg, argv, out):
    sys_ = cfg.measurement_system()
    sampler = TrajectorySampler(sys_, basis_state(sys_.dim, cfg.state), cfg.seed)
    digits = sampler.sample_many(cfg.options["length"], cfg.options["count"])
    sink = _Output(cfg, out, "sample.csv")
    sink.buf.write(f"# {_header(argv)} rng=PCG64\n")
    writer = csv.writer(sink.buf, lineterminator="\n")
    writer.writerow(["trajectory", "word"])
    sep = "" if sys_.N <= 10 else ","
    for i, row in enumerate(digits):
        writer.writerow([i, sep.join(map(str, row))])
    sink.close()
    return EXIT_OK


def cmd_power(cfg, argv, out):
    fb = cfg.filter_bank()
    hyp = check_two_sided_hypotheses(fb)
    if not hyp.all_ok:
        print(f"FAIL: hypotheses not met: {hyp}", file=out)
        return EXIT_VIOLATION
    v = filter_principal_vector(fb)
    F0 = slanted_matrix(fb.taps)
    e0 = basis_state(F0.shape[0])
    triple = DominantTriple(F0, fb.taps[0], e0)
    xi = principal_right_vector(triple).xi
    print("v (deflation): " + ", ".join(_fmt_c(z) for z in v), file=out)
    print("xi (block form): " + ", ".join(_fmt_c(z) for z in xi), file=out)
    if fb.taps.size == 4:
        print("v (closed form): " + ", ".join(_fmt_c(z) for z in closed_form_principal_vector_d2(fb)), file=out)
    print(f"|v|^2: {_fmt(float(np.vdot(v, v).real))}  spectral_gap: {_fmt(hyp.spectral_gap)}", file=out)
    base = _parse_word(cfg.options["base"], 2)
    n_max = cfg.options["n_max"]
    r, predicted = two_sided_limit_check(fb, base, n_max)
    print(f"predicted_limit: {_fmt(predicted)}", file=out)
    for n in sorted({0, 1, 10, 20, 40, 60, n_max} & set(range(n_max + 1))):
        print(f"r[{n}] = {_fmt(r[n])}  rel_err = {_fmt(r[n] / predicted - 1)}", file=out)
    passed, C = rate_envelope_check(triple, e0, n_max)
    print(f"rate_envelope: passed={passed} C={_fmt(C)}", file=out)
    return EXIT_OK


def cmd_cascade(cfg, argv, out):
    fb = cfg.filter_bank()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        phi = cascade_phi(fb, cfg.options["depth"])
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    psi = wavelet_psi(fb, phi)
    shift_res, moment = orthonormality_and_moments(phi, cfg.options["max_shift"]) if phi.depth >= 8 else (math.nan, phi.integral())
    print(
        f"integral_phi: {_fmt(moment)}  integral_psi: {_fmt(psi.integral())}  "
        f"shift_residual: {_fmt(shift_res)}  converged: {phi.converged}",
        file=sys.stderr if (cfg.out or os.environ.get(OUT_DIR_ENV)) else out,
    )
    sink = _Output(cfg, out, "cascade.csv")
    write_csv(sink.buf, phi, psi, _header(argv))
    sink.close()
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "measure": cmd_measure,
    "partition": cmd_partition,
    "scale": cmd_scale,
    "spectrum": cmd_spectrum,
    "beta-scan": cmd_beta_scan,
    "sample": cmd_sample,
    "power": cmd_power,
    "cascade": cmd_cascade,
}


def execute(argv=None, stdout=None):
    """Run one command; returns the exit code instead of exiting."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout if stdout is not None else sys.stdout
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else EXIT_USAGE
    cfg = RunConfig.from_args(ns)
    try:
        return COMMANDS[cfg.command](cfg, argv, stdout)
    except ValidationError as exc:
        print(f"FAIL: {exc}", file=stdout)
        print(f"residual: {_fmt(exc.residual)}", file=stdout)
        return EXIT_VIOLATION
    except HypothesisError as exc:
        print(f"FAIL: {exc}", file=stdout)
        return EXIT_VIOLATION
    except (UsageError, ValueError, OSError, MeasureScaleError) as exc:
        print(f"measurescale: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(execute())


if __name__ == "__main__":
    main()

"""Empirical scale envelopes against the closed-form scale.

For the two builtin systems the envelopes are flat at 1 and log_3 2.  For a
four-tap bank the all-zeros branch exponent approaches ``s`` only like
``ln ||v||^2 / (n ln 2)``, which the last column makes explicit.
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from measurescale.filter_bank import taps_from_beta
from measurescale.dominant_eigen import filter_principal_vector
from measurescale.fractal_scale import branch_exponents, empirical_scale_profile, theoretical_scale
from measurescale.measurement_system import basis_state, builtin_system, from_filter_bank


@dataclass
class ScaleConfig:
    beta: float = 0.3
    envelope_levels: int = 14
    branch_levels: int = 200
    builtin_levels: int = 8


def run(cfg):
    for name in ("lebesgue2", "cantor3"):
        sys_ = builtin_system(name)
        rep = empirical_scale_profile(sys_, basis_state(sys_.dim), cfg.builtin_levels)
        lo = min(lv.min_exponent for lv in rep.levels)
        hi = max(lv.max_exponent for lv in rep.levels)
        print(f"{name}: exponents in [{lo:.15f}, {hi:.15f}] through level {cfg.builtin_levels}")

    fb = taps_from_beta(cfg.beta)
    alpha, s = theoretical_scale(fb)
    sys_ = from_filter_bank(fb)
    e0 = basis_state(sys_.dim)
    rep = empirical_scale_profile(sys_, e0, cfg.envelope_levels, theoretical_s=s)
    print(f"\nbeta={cfg.beta}: alpha={alpha:.12f}  s={s:.12f}")
    print("level  min_exp   max_exp   words")
    for lv in rep.levels:
        print(f"{lv.level:5d}  {lv.min_exponent:.6f}  {lv.max_exponent:.6f}  {lv.positive_words}")

    v = filter_principal_vector(fb)
    log_v2 = math.log(float(np.vdot(v, v).real))
    exps = branch_exponents(sys_, e0, 0, cfg.branch_levels)
    print("\n    n   exponent   exponent-s   -ln|v|^2/(n ln2)")
    for n in (10, 20, 40, 60, 78, 100, 150, 200):
        if n <= cfg.branch_levels:
            e = exps[n - 1]
            print(f"{n:5d}  {e:.8f}  {e - s:+.6f}    {-log_v2 / (n * math.log(2)):+.6f}")
    first = int(np.argmax(np.abs(exps - s) < 0.01)) + 1
    print(f"\nfirst level with |exponent - s| < 0.01: {first}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--beta", type=float, default=ScaleConfig.beta)
    p.add_argument("--levels", type=int, default=ScaleConfig.envelope_levels)
    ns = p.parse_args()
    run(ScaleConfig(beta=ns.beta, envelope_levels=ns.levels))


if __name__ == "__main__":
    main()

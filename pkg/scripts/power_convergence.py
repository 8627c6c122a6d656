"""Convergence of normalised powers: the branch ratio r_n towards ||v||^2,
and the fitted rate envelope over seeded random matrices."""

import argparse
from dataclasses import dataclass

import numpy as np

from measurescale.cylinder_measure import Word
from measurescale.dominant_eigen import power_limit_errors, random_dominant_triple, rate_envelope_check
from measurescale.filter_bank import taps_from_beta
from measurescale.fractal_scale import check_two_sided_hypotheses, two_sided_limit_check


@dataclass
class PowerConfig:
    beta: float = 0.3
    n_max: int = 120
    trials: int = 100
    trial_n: int = 60
    max_dim: int = 8
    seed0: int = 0


def run(cfg):
    fb = taps_from_beta(cfg.beta)
    gap = check_two_sided_hypotheses(fb).spectral_gap
    r, limit = two_sided_limit_check(fb, Word(2), cfg.n_max)
    rel = np.abs(r / limit - 1)
    print(f"beta={cfg.beta}: |v|^2 = {limit:.15f}, spectral gap ratio {gap:.6f}")
    print("    n   r_n               rel_err     rel_err / gap^n")
    for n in (0, 10, 20, 40, 60, 80, 100, cfg.n_max):
        if n <= cfg.n_max:
            print(f"{n:5d}  {r[n]:.14f}  {rel[n]:.3e}   {rel[n] / gap**n:.4f}")
    hit = np.nonzero(rel < 1e-6)[0]
    print(f"first n with rel_err < 1e-6: {hit[0] if hit.size else 'none'}")

    ratios = []
    fails = 0
    for seed in range(cfg.seed0, cfg.seed0 + cfg.trials):
        rng = np.random.default_rng(seed)
        t = random_dominant_triple(rng, int(rng.integers(2, cfg.max_dim + 1)))
        x = rng.standard_normal(t.dim) + 1j * rng.standard_normal(t.dim)
        ok, C = rate_envelope_check(t, x, cfg.trial_n)
        fails += not ok
        err = power_limit_errors(t, x, cfg.trial_n)[-1]
        ratios.append(err / (C * cfg.trial_n ** (t.dim - 1) * t.gap() ** cfg.trial_n))
    ratios = np.array(ratios)
    print(f"\n{cfg.trials} random triples: {fails} envelope failures; "
          f"err/envelope at n={cfg.trial_n}: median {np.median(ratios):.2e}, max {ratios.max():.2e}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--beta", type=float, default=PowerConfig.beta)
    p.add_argument("--n-max", type=int, default=PowerConfig.n_max)
    p.add_argument("--trials", type=int, default=PowerConfig.trials)
    ns = p.parse_args()
    run(PowerConfig(beta=ns.beta, n_max=ns.n_max, trials=ns.trials))


if __name__ == "__main__":
    main()

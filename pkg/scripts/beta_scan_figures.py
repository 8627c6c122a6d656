"""Data for the four-tap family plots: tap-pair circles, end taps against
beta with the two dominance regions, and the third eigenvalue of F0.

Writes three CSV files into ``--out-dir``; plotting is left to the reader.
"""

import argparse
import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from measurescale.filter_bank import beta_diagnostics, circle_residuals


@dataclass
class ScanConfig:
    start: float = -math.pi
    stop: float = math.pi
    steps: int = 629
    out_dir: Path = Path("out/beta_scan")


def run(cfg):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    betas = np.linspace(cfg.start, cfg.stop, cfg.steps)
    diags = [beta_diagnostics(b) for b in betas]
    worst = 0.0
    with open(cfg.out_dir / "circle.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta", "a0", "a1", "a2", "a3", "max_residual"])
        for b, d in zip(betas, diags):
            res = max(circle_residuals(d.taps).values())
            worst = max(worst, res)
            w.writerow([f"{b:.17g}", *(f"{x:.17g}" for x in d.taps.taps.real), f"{res:.3e}"])
    with open(cfg.out_dir / "end_taps.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta", "a0", "a3", "alpha", "s", "region"])
        for b, d in zip(betas, diags):
            a = d.taps.taps.real
            w.writerow([f"{b:.17g}", f"{a[0]:.17g}", f"{a[3]:.17g}", f"{d.alpha:.17g}",
                        f"{-math.log(d.alpha) / math.log(2):.17g}", d.region])
    with open(cfg.out_dir / "dominance.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta", "a0", "inv_sqrt2", "lambda", "dominance_ok"])
        for b, d in zip(betas, diags):
            w.writerow([f"{b:.17g}", f"{d.taps.taps[0].real:.17g}", f"{1 / math.sqrt(2):.17g}",
                        f"{d.lam:.17g}", d.dominance_ok])
    regions = {}
    for d in diags:
        regions[d.region] = regions.get(d.region, 0) + 1
    dom = sum(d.dominance_ok for d in diags)
    print(f"{cfg.steps} angles, max circle residual {worst:.2e}")
    print(f"region counts {regions}, dominance holds at {dom} angles")
    print(f"files written to {cfg.out_dir}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=ScanConfig.steps)
    p.add_argument("--out-dir", type=Path, default=ScanConfig.out_dir)
    ns = p.parse_args()
    run(ScanConfig(steps=ns.steps, out_dir=ns.out_dir))


if __name__ == "__main__":
    main()

"""Write dispersion-relation curve data (omega and mu against k) as CSV.

Produces one file per (sigma, ell) case: KP-I at ell = 0.3 and 0.8, KP-II at
ell = 0.8.  Plot omega and mu against k with any external tool; the two
curves share their zeros.
"""
import argparse
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from kpb.cli import DISPERSION_COLUMNS, render_csv
from kpb.scanner import dispersion_curve


@dataclass
class FigureConfig:
    cases: tuple = ((1, 0.3), (1, 0.8), (-1, 0.8))
    k_max: float = 2.0
    k_min: float = 0.05
    samples: int = 401
    out_dir: Path = field(default_factory=lambda: Path("out/dispersion"))


def curves(cfg, sigma, ell):
    left = dispersion_curve(sigma, ell, (-cfg.k_max, -cfg.k_min), cfg.samples)
    right = dispersion_curve(sigma, ell, (cfg.k_min, cfg.k_max), cfg.samples)
    return np.vstack([left, right])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=FigureConfig().out_dir)
    ap.add_argument("--samples", type=int, default=FigureConfig.samples)
    args = ap.parse_args()
    cfg = FigureConfig(samples=args.samples, out_dir=args.out_dir)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for sigma, ell in cfg.cases:
        rows = curves(cfg, sigma, ell)
        name = f"{'kp1' if sigma == 1 else 'kp2'}_ell{ell:g}.csv"
        (cfg.out_dir / name).write_text(render_csv(DISPERSION_COLUMNS, rows))
        zeros = rows[np.flatnonzero(np.diff(np.sign(rows[:, 2])) != 0), 0]
        where = ", ".join(f"{z:.3f}" for z in zeros) or "none"
        print(f"{name}: {len(rows)} rows, mu sign changes near k = {where}")


if __name__ == "__main__":
    main()

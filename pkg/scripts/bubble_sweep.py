"""Bloch instability bubbles over Floquet exponent and amplitude.

For each (a, gamma) the unstable ell^2 interval is located and compared
with the leading-order center 3 g^2 (1-g)^2 and half-width (g(1-g))^{3/2}|a|.
Writes a CSV table and prints a summary.
"""
import argparse
from dataclasses import dataclass
from pathlib import Path

from kpb.cli import render_csv
from kpb.errors import BubbleNotFound
from kpb.scanner import find_bubble
from kpb.waves import solve_wave

COLUMNS = ("a", "gamma", "center", "center_pred", "half_width", "half_width_pred",
           "center_gap", "half_width_gap", "asymmetry")


@dataclass
class BubbleConfig:
    amplitudes: tuple = (0.025, 0.05, 0.1)
    gammas: tuple = (0.1, 0.2, 0.25, 0.3, 0.4, 0.5)
    coarse_step: float = 5e-4
    out: Path = Path("out/bubbles.csv")


def sweep(cfg):
    for a in cfg.amplitudes:
        w = solve_wave(a)
        for g in cfg.gammas:
            try:
                b = find_bubble(w, g, cfg.coarse_step)
            except BubbleNotFound as exc:
                print(f"a={a} gamma={g}: {exc}")
                continue
            p = b.prediction
            yield (a, g, b.center_ell_sq, p.center_ell_sq, b.half_width_ell_sq,
                   p.half_width_ell_sq, b.center_gap, b.half_width_gap, b.asymmetry)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=BubbleConfig.out)
    ap.add_argument("--coarse-step", type=float, default=BubbleConfig.coarse_step)
    args = ap.parse_args()
    cfg = BubbleConfig(coarse_step=args.coarse_step, out=args.out)
    rows = list(sweep(cfg))
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text(render_csv(COLUMNS, rows))
    for a, g, c, _, h, _, cg, hg, _ in rows:
        print(f"a={a:<6g} gamma={g:<5g} center {c:.6f} ({cg:.2%})  "
              f"half-width {h:.3e} ({hg:.2%})")
    print(f"wrote {cfg.out}")


if __name__ == "__main__":
    main()

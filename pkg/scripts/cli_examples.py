"""Regenerate the example output file for every CLI command."""
import sys
from pathlib import Path

from kpb import cli

EXAMPLES = {
    "wave.json": ["wave", "--a", "0.1"],
    "spectrum.json": ["spectrum", "--a", "0.1", "--ell", "0.02", "--n-trunc", "8"],
    "scan.csv": ["scan", "--a", "0.05", "--gamma", "0.25", "--ell-range", "0.31:0.34:8"],
    "boundary.json": ["boundary", "--a", "0.1", "--bracket", "0.005:0.1"],
    "bubble.json": ["bubble", "--a", "0.05", "--gamma", "0.25"],
    "collisions.json": ["collisions", "--sigma", "-1"],
    "dispersion.csv": ["dispersion", "--sigma", "-1", "--ell", "0.8",
                       "--k-range", "0.5:2", "--samples", "7"],
    "verify.json": ["verify", "--quick"],
}


def main(out_dir="docs/cli_examples"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, argv in EXAMPLES.items():
        code = cli.main(argv + ["--out", str(out / name)])
        print(f"{name}: exit {code}")


if __name__ == "__main__":
    main(*sys.argv[1:])

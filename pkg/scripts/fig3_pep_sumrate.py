#!/usr/bin/env python3
"""Average worst-case PEP and sum-rate sweep: MW (Z=5, Z=10) and the
two-way baselines under perfect CSI. Writes results/fig3.csv."""

import argparse
import pathlib
import sys

from mwmaxlink.cli import main as cli_main


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paper-scale", action="store_true")
    parser.add_argument("--outdir", default="results")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)

    packets = 10_000 if args.paper_scale else 500
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    out = outdir / "fig3.csv"
    rows = []
    for scheme, z in (("mw-max-link", 5), ("mw-max-link", 10), ("tw-max-link", 1), ("tw-max-min", 1)):
        part = outdir / f"_fig3_{scheme}_{z}.csv"
        code = cli_main(
            f"run --scheme {scheme} --Z {z} --N 10 --M 2 --J 6 --snr 0:2:10 "
            f"--packets {packets} --seed {args.seed} --out {part}".split()
        )
        if code != 0:
            return code
        lines = part.read_text().splitlines()
        if not rows:
            rows.append(lines[0])
        rows.extend(lines[1:])
        part.unlink()
    out.write_text("\n".join(rows) + "\n")
    print(f"wrote {out}")
    print(f"next: plot --in {out} --metric pep --out fig3_pep.svg")
    print(f"      plot --in {out} --metric sum_rate --out fig3_rate.svg --linear")
    return 0


if __name__ == "__main__":
    sys.exit(run())

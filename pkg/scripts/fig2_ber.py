#!/usr/bin/env python3
"""BER-versus-SNR sweep over the three schemes, perfect and imperfect CSI.

Writes results/fig2_perfect.csv and results/fig2_imperfect.csv. Desk scale
by default; pass --paper-scale for the 10000*M-packet configuration
(slow on one core).
"""

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
    common = (
        f"run --scheme mw-max-link,tw-max-link,tw-max-min --Z 5 --N 10 --M 2 --J 6 "
        f"--snr 0:2:10 --packets {packets} --seed {args.seed}"
    )
    for label, csi in (("perfect", "0,0"), ("imperfect", "0.5,1")):
        out = outdir / f"fig2_{label}.csv"
        code = cli_main(f"{common} --csi {csi} --out {out}".split())
        if code != 0:
            return code
    print(f"next: plot --in {outdir}/fig2_perfect.csv --metric ber --out fig2.svg")
    return 0


if __name__ == "__main__":
    sys.exit(run())

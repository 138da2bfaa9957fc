"""Command-line front end: SNR sweeps to CSV, complexity and calibration tools.

CSV rows are written in grid order with fixed 6-significant-digit number
formatting so identical invocations reproduce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import CsiErrorModel
from .phy import constellation_by_name
from .selection import calibration_samples, complexity_counts
from .sim import (
    ConfigurationError,
    RunResult,
    Scheme,
    SimConfig,
    config_for_snr,
    make_streams,
    run_simulation,
)

CSV_HEADER = (
    "scheme,Z,N,M,J,snr_db,csi_beta,csi_alpha,seed,packets,ber,pep_wc_avg,sum_rate_avg,"
    "ma_fraction,calibrated_c,additions,multiplications,avg_occupancy,max_occupancy"
)

_SCHEME_ALIASES = {
    "mw": Scheme.MW_MAX_LINK,
    "mw-max-link": Scheme.MW_MAX_LINK,
    "tw-max-link": Scheme.TW_MAX_LINK,
    "tw-max-min": Scheme.TW_MAX_MIN,
    "twmaxmin": Scheme.TW_MAX_MIN,
}


def _parse_scheme(name: str) -> Scheme:
    try:
        return _SCHEME_ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown scheme {name!r}; choose from {sorted(_SCHEME_ALIASES)}") from None


def _parse_snr_grid(spec: str) -> list[float]:
    """min:step:max in dB, endpoints inclusive."""
    try:
        lo, step, hi = (float(tok) for tok in spec.split(":"))
    except ValueError:
        raise ValueError(f"bad SNR grid {spec!r}, expected min:step:max") from None
    if step <= 0 or hi < lo:
        raise ValueError(f"bad SNR grid {spec!r}: need step > 0 and max >= min")
    grid = []
    value = lo
    while value <= hi + 1e-9:
        grid.append(round(value, 9))
        value += step
    return grid


def _parse_csi(spec: str) -> CsiErrorModel:
    try:
        beta, alpha = (float(tok) for tok in spec.split(","))
    except ValueError:
        raise ValueError(f"bad CSI spec {spec!r}, expected beta,alpha") from None
    return CsiErrorModel(beta=beta, alpha=alpha)


def fmt(value) -> str:
    """Fixed 6-significant-digit decimal formatting for CSV cells."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".6g")


def csv_row(cfg: SimConfig, snr_db: float, packets_flag: int, result: RunResult) -> str:
    cells = [
        cfg.scheme.value,
        cfg.Z,
        cfg.N,
        cfg.M,
        cfg.J,
        snr_db,
        cfg.csi.beta,
        cfg.csi.alpha,
        cfg.seed,
        packets_flag,
        result.ber,
        result.avg_pep_wc,
        result.avg_sum_rate,
        result.ma_fraction,
        result.calibrated_c,
        result.op_counter.additions,
        result.op_counter.multiplications,
        result.avg_occupancy,
        result.max_occupancy,
    ]
    return ",".join(fmt(c) for c in cells)


_RUN_DEFAULTS = {
    "scheme": "mw-max-link",
    "Z": 1,
    "N": 10,
    "M": 2,
    "J": 6,
    "snr": "0:2:10",
    "packets": 500,
    "seed": 1,
    "mod": "bpsk",
    "csi": "0,0",
    "n0": 1.0,
    "symbols": 100,
    "ncal": 10_000,
    "jobs": 1,
    "out": "results.csv",
    "noise_off": False,
}


def _merged(args: argparse.Namespace) -> dict:
    """Effective run settings: flags > config file > built-in defaults."""
    merged = dict(_RUN_DEFAULTS)
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            file_values = json.load(fh)
        unknown = set(file_values) - set(_RUN_DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config file keys: {sorted(unknown)}")
        merged.update(file_values)
    for key in _RUN_DEFAULTS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    return merged


def _build_cells(settings: dict) -> list[tuple[SimConfig, float, int]]:
    schemes = [_parse_scheme(tok) for tok in str(settings["scheme"]).split(",")]
    grid = _parse_snr_grid(str(settings["snr"]))
    packets = int(settings["packets"])
    z_flag = int(settings["Z"])
    if z_flag != 1 and all(s is not Scheme.MW_MAX_LINK for s in schemes):
        # In mixed lists Z applies to the MW cells only; TW schemes run Z=1.
        raise ConfigurationError(f"two-way schemes require Z=1, got Z={z_flag}")
    cells = []
    for scheme in schemes:
        base = SimConfig(
            scheme=scheme,
            Z=z_flag if scheme is Scheme.MW_MAX_LINK else 1,
            N=int(settings["N"]),
            M=int(settings["M"]),
            J=int(settings["J"]),
            n0=float(settings["n0"]),
            constellation=constellation_by_name(str(settings["mod"])),
            csi=_parse_csi(str(settings["csi"])),
            symbols_per_packet=int(settings["symbols"]),
            total_packets=packets * int(settings["M"]),
            seed=int(settings["seed"]),
            n_cal=int(settings["ncal"]),
            noise_off=bool(settings["noise_off"]),
        )
        for snr_db in grid:
            cells.append((config_for_snr(base, snr_db), snr_db, packets))
    return cells


def run_command(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        settings = _merged(args)
        cells = _build_cells(settings)
    except (ValueError, ConfigurationError) as exc:
        parser.error(str(exc))
    jobs = int(settings["jobs"])
    configs = [cfg for cfg, _, _ in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_simulation, configs))
    else:
        results = [run_simulation(cfg) for cfg in configs]

    lines = [CSV_HEADER]
    lines += [csv_row(cfg, snr, packets, res) for (cfg, snr, packets), res in zip(cells, results)]
    with open(settings["out"], "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")

    print(f"{'scheme':<14}{'Z':>3}{'snr_db':>8}{'ber':>12}{'pep_wc':>12}{'sum_rate':>10}{'ma_frac':>9}")
    for (cfg, snr, _), res in zip(cells, results):
        print(
            f"{cfg.scheme.value:<14}{cfg.Z:>3}{snr:>8.3g}{res.ber:>12.3e}"
            f"{res.avg_pep_wc:>12.3e}{res.avg_sum_rate:>10.4g}{res.ma_fraction:>9.3f}"
        )
    print(f"wrote {len(cells)} rows to {settings['out']}")
    return 0


def complexity_command(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        scheme = _parse_scheme(args.scheme)
        c = constellation_by_name(args.mod)
    except ValueError as exc:
        parser.error(str(exc))
    name = "tw-max-min" if scheme is Scheme.TW_MAX_MIN else "mw"
    z = 1 if scheme is not Scheme.MW_MAX_LINK else args.Z
    counts = complexity_counts(z, args.N, args.M, c, name)
    print(f"scheme={scheme.value} Z={z} N={args.N} M={args.M} mod={c.name}")
    print(f"additions {counts.additions}")
    print(f"multiplications {counts.multiplications}")
    return 0


def calibrate_command(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        c = constellation_by_name(args.mod)
        csi = _parse_csi(args.csi)
        cfg = SimConfig(
            scheme=Scheme.MW_MAX_LINK,
            Z=args.Z,
            N=args.N,
            M=args.M,
            csi=csi,
            constellation=c,
            seed=args.seed,
            n_cal=args.ncal,
        )
        cfg = config_for_snr(cfg, args.snr_db)
    except (ValueError, ConfigurationError) as exc:
        parser.error(str(exc))
    ur, ru = calibration_samples(
        cfg.topology, cfg.energy, cfg.constellation, cfg.csi, cfg.n_cal, make_streams(cfg.seed).cal
    )
    ratio = float(np.mean(ur) / np.mean(ru))
    stderr = _ratio_stderr(ur, ru)
    print(f"Z={cfg.Z} N={cfg.N} M={cfg.M} mod={cfg.constellation.name} snr_db={fmt(args.snr_db)} n_cal={cfg.n_cal}")
    print(f"C {fmt(ratio)}")
    print(f"stderr {fmt(stderr)}")
    return 0


def _ratio_stderr(ur: np.ndarray, ru: np.ndarray) -> float:
    """Delta-method standard error of mean(ur)/mean(ru)."""
    n = len(ur)
    mu, mr = float(np.mean(ur)), float(np.mean(ru))
    cov = np.cov(ur, ru, ddof=1)
    var = (cov[0, 0] / mu**2 - 2 * cov[0, 1] / (mu * mr) + cov[1, 1] / mr**2) * (mu / mr) ** 2 / n
    return float(np.sqrt(max(var, 0.0)))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mwmaxlink",
        description="Buffer-aided multi-way relay selection: Monte Carlo sweeps and analysis tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an SNR sweep and write one CSV row per (scheme, SNR)")
    run_p.add_argument("--scheme", help="comma-separated: mw-max-link, tw-max-link, tw-max-min")
    run_p.add_argument("--Z", type=int, help="number of user clusters")
    run_p.add_argument("--N", type=int, help="number of relays")
    run_p.add_argument("--M", type=int, help="antennas per user (relays have 2M)")
    run_p.add_argument("--J", type=int, help="buffer capacity in packets")
    run_p.add_argument("--snr", help="SNR grid min:step:max in dB")
    run_p.add_argument("--packets", type=int, help="delivered packets per point, in units of M")
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--mod", help="constellation: bpsk or qpsk")
    run_p.add_argument("--csi", help="imperfect CSI as beta,alpha (default 0,0 = perfect)")
    run_p.add_argument("--n0", type=float, help="noise spectral density (default 1)")
    run_p.add_argument("--symbols", type=int, help="symbols per packet (default 100)")
    run_p.add_argument("--ncal", type=int, help="channel draws for calibrating C")
    run_p.add_argument("--jobs", type=int, help="worker processes for independent cells")
    run_p.add_argument("--out", help="output CSV path")
    run_p.add_argument("--noise-off", dest="noise_off", action="store_const", const=True,
                       help="diagnostic: disable AWGN")
    run_p.add_argument("--config", help="JSON file with flag-for-flag keys; flags override")
    run_p.set_defaults(func=run_command)

    cpx_p = sub.add_parser("complexity", help="selection-stage addition/multiplication counts")
    cpx_p.add_argument("--scheme", required=True, help="mw, tw-max-link, or tw-max-min")
    cpx_p.add_argument("--Z", type=int, default=1)
    cpx_p.add_argument("--N", type=int, required=True)
    cpx_p.add_argument("--M", type=int, required=True)
    cpx_p.add_argument("--mod", default="bpsk")
    cpx_p.set_defaults(func=complexity_command)

    cal_p = sub.add_parser("calibrate", help="Monte Carlo estimate of the mode threshold C")
    cal_p.add_argument("--Z", type=int, default=1)
    cal_p.add_argument("--N", type=int, required=True)
    cal_p.add_argument("--M", type=int, required=True)
    cal_p.add_argument("--mod", default="bpsk")
    cal_p.add_argument("--csi", default="0,0")
    cal_p.add_argument("--snr-db", type=float, default=0.0)
    cal_p.add_argument("--ncal", type=int, default=10_000)
    cal_p.add_argument("--seed", type=int, default=1)
    cal_p.set_defaults(func=calibrate_command)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except SystemExit:
        raise
    except Exception as exc:  # runtime failure -> diagnostic + exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""``qskr`` command line: ``sweep`` writes CSV/curve files, ``point`` prints one breakdown.

Exit codes: 0 success, 1 configuration or parameter error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time

from .noise_channel import ChannelUse, HybridNoiseParams, TransmittedSignal, snr_db, var_x_for_snr_db
from .skr import DetectorParams, secret_key_rate
from .sweep import PRESETS, ConfigError, SweepSpec, emit_outputs, load_config, preset_spec, run_sweep

log = logging.getLogger("qskr")

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qskr", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("sweep", help="run a parameter sweep and write results.csv + curve files")
    s.add_argument("--config", help="key = value config file (omit for defaults)")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--preset", choices=sorted(PRESETS), default=None)

    pt = sub.add_parser("point", help="evaluate a single parameter point")
    pt.add_argument("--sigma_x2", type=float, default=None, help="modulation variance (SNU)")
    pt.add_argument("--snr_db", type=float, default=None, help="alternative to --sigma_x2")
    pt.add_argument("--T", type=float, default=None, help="transmission coefficient")
    pt.add_argument("--tau", type=float, default=None, help="transmission efficiency, T = sqrt(tau)")
    pt.add_argument("--lambda", dest="lam", type=float, default=2.0)
    pt.add_argument("--mu_thermal", type=float, default=0.0)
    pt.add_argument("--var_thermal", type=float, default=0.25)
    pt.add_argument("--truncation_r", type=int, default=None)
    pt.add_argument("--beta", type=float, default=0.95)
    pt.add_argument("--eta", type=float, default=0.606)
    pt.add_argument("--nu_ele", type=float, default=0.041)
    pt.add_argument("--epsilon", type=float, default=0.005)
    pt.add_argument("--covariance_form", choices=("standard", "printed"), default="standard")
    return p


def _cmd_sweep(args) -> int:
    try:
        if args.config:
            spec = load_config(args.config, preset=args.preset, seed=args.seed)
        elif args.preset:
            spec = preset_spec(args.preset)
            if args.seed is not None:
                spec = SweepSpec(**{**spec.__dict__, "seed": args.seed})
        else:
            spec = SweepSpec() if args.seed is None else SweepSpec(seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    start = time.perf_counter()
    rows = run_sweep(spec)
    n_err = sum(1 for r in rows if r.error)
    log.info("%d rows (%d error rows) in %.2f s", len(rows), n_err, time.perf_counter() - start)
    for r in rows:
        if r.error:
            log.warning("%s=%g at %s=%g: %s", r.varied_param, r.varied_value, r.axis, getattr(r, r.axis), r.error)
    try:
        paths = emit_outputs(rows, args.out)
    except OSError as exc:
        print(f"cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("wrote %d files to %s", len(paths), args.out)
    return EXIT_OK


def _cmd_point(args) -> int:
    try:
        if args.T is not None and args.tau is not None:
            raise ValueError("give --T or --tau, not both")
        t = math.sqrt(args.tau) if args.tau is not None else (1.0 if args.T is None else args.T)
        noise = HybridNoiseParams(args.lam, args.mu_thermal, args.var_thermal, args.truncation_r)
        ch = ChannelUse(t)
        if args.sigma_x2 is not None and args.snr_db is not None:
            raise ValueError("give --sigma_x2 or --snr_db, not both")
        if args.snr_db is not None:
            var_x = var_x_for_snr_db(args.snr_db, t, noise)
        else:
            var_x = 1.0 if args.sigma_x2 is None else args.sigma_x2
        sig = TransmittedSignal(var_x)
        det = DetectorParams(args.eta, args.nu_ele, args.epsilon, args.beta)
        res = secret_key_rate(sig, ch, noise, det, printed=args.covariance_form == "printed")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = {
        "sigma_x2": var_x,
        "snr_db": snr_db(sig, ch, noise),
        "T": t,
        "capacity_bits": res.capacity,
        "i_ab_bits": res.i_ab,
        "chi_be_bits": res.chi_be,
        "skr_bits": res.skr,
    }
    for key, val in out.items():
        print(f"{key}={val:.12g}")
    for i, lam in enumerate(res.spectrum.values(), start=1):
        print(f"lambda{i}={lam:.12g}")
    print(f"secure={'true' if res.secure else 'false'}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.cmd == "sweep":
        return _cmd_sweep(args)
    return _cmd_point(args)


if __name__ == "__main__":
    sys.exit(main())

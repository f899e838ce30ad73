"""Command line: ``ncsimo design|kl|ber|baseline``."""
import argparse
import logging
import sys

from .errors import ConfigError, ProfileParseError
from .harness.config import SimConfig, config_from_dict, load_config
from .harness.engine import run_ber_sweep
from .harness.outputs import emit_outputs, records_to_csv
from .harness.report import design_report, kl_table


def _m_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"--m-list expects comma-separated integers, got {text!r}")


def _add_sim_flags(p):
    p.add_argument("--config", help="JSON file with SimConfig keys")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output directory for CSV, manifest and plot script")
    p.add_argument("--scheme")
    p.add_argument("--m-list", type=_m_list)
    p.add_argument("--radius-m", type=float)
    p.add_argument("--distance-m", type=float)
    p.add_argument("--users", type=int, help="number of users K")
    p.add_argument("--p-dbm", type=float)
    p.add_argument("--trials", type=int, help="cap on coherence blocks per antenna count")
    p.add_argument("--error-target", type=int)
    p.add_argument("--batch-size", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="ncsimo", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="closed-form design report for a profile file")
    p.add_argument("profile", help="file with one 'P_dBm beta_dB' line per user")
    p.add_argument("--sigma2", type=float, help="noise power in watts (default: thermal noise)")
    p.add_argument("--m", type=int, help="also report the KL distance scaled to M antennas")

    p = sub.add_parser("kl", help="smallest pairwise KL distances of the designed codebook")
    p.add_argument("profile")
    p.add_argument("--sigma2", type=float)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--limit", type=int, default=20)

    p = sub.add_parser("ber", help="BER sweep over antenna counts")
    _add_sim_flags(p)
    p = sub.add_parser("baseline", help="BER sweep of a comparison scheme (med or zf-train)")
    _add_sim_flags(p)
    return parser


def resolve_config(args, baseline=False):
    data = {}
    if args.config:
        data = load_config(args.config).to_dict()
    overrides = {
        "seed": args.seed, "scheme": args.scheme, "M_list": args.m_list, "K": args.users,
        "P_dBm": args.p_dbm, "trials": args.trials, "error_target": args.error_target,
        "batch_size": args.batch_size, "out": args.out,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.distance_m is not None:
        data["distance_m"] = args.distance_m
    elif args.radius_m is not None:
        data["radius_m"] = args.radius_m
        data["distance_m"] = None
    if baseline:
        data.setdefault("scheme", "med")
        if data["scheme"] == "proposed":
            raise ConfigError("config key 'scheme': baseline runs take med or zf-train")
    return config_from_dict(data) if data else SimConfig()


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "design":
            text, _ = design_report(args.profile, sigma2=args.sigma2, M=args.m)
            print(text)
        elif args.command == "kl":
            print(kl_table(args.profile, sigma2=args.sigma2, M=args.m, limit=args.limit))
        else:
            cfg = resolve_config(args, baseline=args.command == "baseline")
            records = run_ber_sweep(cfg, workers=args.workers)
            if cfg.out:
                for path in emit_outputs(records, cfg.out, configs=[cfg]):
                    print("wrote", path)
            else:
                sys.stdout.write(records_to_csv(records))
    except (ConfigError, ProfileParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

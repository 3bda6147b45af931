"""Command-line interface.

Subcommands:

* ``sweep``      - Monte Carlo fidelity/rate sweep over (d, sigma) cells -> CSV
* ``bounds``     - capacity bound curves and thermal coherent information -> CSV
* ``crossings``  - fidelity crossing points from a sweep CSV
* ``decode-one`` - debug dump (JSON) of a single decode

Options may also be supplied via ``--config FILE`` holding ``key = value``
lines; explicit command-line flags override file values.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import GkpSimError
from .harness import (ExperimentConfig, crossing_point, debug_decode_dump,
                      load_results_csv, run_sweep)
from .rates import capacity_bounds, thermal_coherent_information


def parse_sigma_list(spec: str) -> tuple:
    """Parse '0.55:0.61:0.005' (inclusive) or a comma-separated list."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError("sigma range must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        n = int(round((stop - start) / step))
        values = [start + i * step for i in range(n + 1)]
        values = [v for v in values if v <= stop + 1e-12]
        return tuple(round(v, 12) for v in values)
    return tuple(float(p) for p in spec.split(",") if p)


def parse_int_list(spec: str) -> tuple:
    return tuple(int(p) for p in spec.split(",") if p)


def read_config_file(path: str) -> dict:
    """Parse a key = value configuration file (# starts a comment)."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {raw.rstrip()}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


_CONFIG_PARSERS = {
    "family": str,
    "distances": parse_int_list,
    "sigmas": parse_sigma_list,
    "trials": int,
    "seed": int,
    "decoder": str,
    "pf_backend": str,
    "max_bond": int,
    "nv": int,
    "out": str,
    "workers": int,
    "no_timestamp": lambda v: v.lower() in ("1", "true", "yes"),
}


def _sweep_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if args.config:
        for key, raw in read_config_file(args.config).items():
            if key not in _CONFIG_PARSERS:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _CONFIG_PARSERS[key](raw)
    for key in _CONFIG_PARSERS:
        flag = getattr(args, key, None)
        if flag is not None and flag is not False:
            values[key] = flag
    missing = [k for k in ("family", "distances", "sigmas", "trials", "seed")
               if k not in values]
    if missing:
        raise ValueError(f"missing required options: {', '.join(missing)}")
    return ExperimentConfig(
        family=values["family"],
        distances=values["distances"] if not isinstance(values["distances"], str)
        else parse_int_list(values["distances"]),
        sigmas=values["sigmas"] if not isinstance(values["sigmas"], str)
        else parse_sigma_list(values["sigmas"]),
        trials=values["trials"],
        run_seed=values["seed"],
        decoder=values.get("decoder", "auto"),
        pf_backend=values.get("pf_backend", "transfer"),
        max_bond=values.get("max_bond", 64),
        n_v=values.get("nv", 4),
        output_path=values.get("out"),
        workers=values.get("workers", 0),
        suppress_timestamp=values.get("no_timestamp", False),
    )


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _sweep_config(args)
    result = run_sweep(config)
    if not config.output_path:
        sys.stdout.write(result.to_csv())
    errors = [c for c in result.cells if c.error is not None]
    for c in errors:
        print(f"# cell (d={c.d}, sigma={c.sigma}) failed: {c.error}", file=sys.stderr)
    return 0


def cmd_bounds(args: argparse.Namespace) -> int:
    sigmas = parse_sigma_list(args.sigmas)
    lines = ["sigma,lower,upper,ic_at_nbar"]
    for s in sigmas:
        lo, up = capacity_bounds(s)
        ic = thermal_coherent_information(args.nbar, s, route="closed-form")
        lines.append(f"{s:.6g},{lo:.10g},{up:.10g},{ic:.10g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_crossings(args: argparse.Namespace) -> int:
    result = load_results_csv(args.results)
    distances = sorted({c.d for c in result.cells})
    pairs = ([tuple(int(x) for x in p.split(":")) for p in args.pairs.split(",")]
             if args.pairs else [(d, d2) for d, d2 in zip(distances, distances[1:])])
    for d_low, d_high in pairs:
        try:
            cross, ci = crossing_point(result, d_low, d_high)
            print(f"d={d_low} vs d={d_high}: sigma_cross = {cross:.6f} "
                  f"(ci {ci[0]:.6f} .. {ci[1]:.6f})")
        except GkpSimError as exc:
            print(f"d={d_low} vs d={d_high}: {exc}")
    return 0


def cmd_decode_one(args: argparse.Namespace) -> int:
    dump = debug_decode_dump(args.family, args.d, args.sigma, args.seed, args.trial,
                             decoder=args.decoder, n_v=args.nv,
                             max_bond=args.max_bond, pf_backend=args.pf_backend)
    text = json.dumps(dump, indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gkpsim",
        description="GKP-code Monte Carlo decoding sweeps and channel-rate bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a (distance, sigma) Monte Carlo sweep")
    p.add_argument("--family", type=str, default=None,
                   help="code family (e.g. surface-square, color-hex)")
    p.add_argument("--distances", type=parse_int_list, default=None,
                   help="comma-separated odd distances, e.g. 3,5,7")
    p.add_argument("--sigmas", type=parse_sigma_list, default=None,
                   help="comma list or start:stop:step, e.g. 0.55:0.61:0.005")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="run seed (required)")
    p.add_argument("--decoder", type=str, default=None,
                   choices=("auto", "mld-pf", "mld-bf", "mld-tn", "baseline"))
    p.add_argument("--pf-backend", dest="pf_backend", type=str, default=None,
                   choices=("transfer", "exhaustive", "tn"))
    p.add_argument("--max-bond", dest="max_bond", type=int, default=None,
                   help="bond cutoff for tensor-network decoding (0 = unbounded)")
    p.add_argument("--nv", type=int, default=None, help="per-dimension tau truncation")
    p.add_argument("--out", type=str, default=None, help="output CSV path")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $GKPSIM_WORKERS or 1)")
    p.add_argument("--no-timestamp", dest="no_timestamp", action="store_true",
                   default=False, help="suppress the timestamp header line")
    p.add_argument("--config", type=str, default=None, help="key = value config file")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", help="capacity bounds and thermal coherent information")
    p.add_argument("--sigmas", type=str, default="0.3:0.75:0.01")
    p.add_argument("--nbar", type=float, default=1e4)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("crossings", help="fidelity crossing points from a sweep CSV")
    p.add_argument("results", type=str, help="CSV produced by the sweep subcommand")
    p.add_argument("--pairs", type=str, default=None,
                   help="colon pairs like 3:5,5:7 (default: consecutive distances)")
    p.set_defaults(func=cmd_crossings)

    p = sub.add_parser("decode-one", help="debug dump of a single decode")
    p.add_argument("--family", type=str, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--decoder", type=str, default="auto")
    p.add_argument("--nv", type=int, default=4)
    p.add_argument("--max-bond", dest="max_bond", type=int, default=64)
    p.add_argument("--pf-backend", dest="pf_backend", type=str, default="transfer")
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_decode_one)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GkpSimError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

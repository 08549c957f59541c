"""Command-line entry point: ``pmqkd {keyrate,sweep,simulate,cutoff,optimize-mu}``.

Exit codes: 0 success, 2 configuration error, 3 degenerate channel or no
positive key rate.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import sim
from .channel import ChannelConfig, Convention
from .config import load_config
from .errors import ConfigError, DeadAtZeroDistance, DegenerateChannelError
from .experiment import (
    DEFAULT_FLOOR,
    PROTOCOLS,
    SweepSpec,
    cutoff_distance,
    evaluate,
    optimize_mu,
    sweep,
    write_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _clean(obj):
    """Replace non-finite floats with None so the output is strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _emit_json(payload, out):
    text = json.dumps(_clean(payload), indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _protocols(arg):
    return PROTOCOLS if arg == "both" else (arg,)


def _setup(args):
    run = load_config(args.config)
    convention = Convention.parse(args.convention) if args.convention else run.convention
    params = run.params
    if args.mu is not None:
        if not args.mu > 0:
            raise ConfigError(f"--mu must be > 0 (got {args.mu})", key="intensity")
        params = params.with_(intensity=args.mu)
    header = run.effective()
    header["intensity"] = params.intensity
    header["channel_convention"] = convention.value
    return params, convention, header


def cmd_keyrate(args):
    params, convention, header = _setup(args)
    results = {}
    for proto in _protocols(args.protocol):
        p = params
        if args.optimize_mu:
            opt = optimize_mu(params, args.length, proto, convention)
            if not opt.positive:
                raise _Fail(EXIT_DEGENERATE, f"{proto}: no positive key rate at {args.length} km")
            p = params.with_(intensity=opt.mu)
        try:
            results[proto] = evaluate(p, args.length, proto, convention).as_dict()
        except DegenerateChannelError as exc:
            raise _Fail(EXIT_DEGENERATE, f"{proto}: {exc}") from None
    _emit_json({"params": header, "L_km": args.length, "results": results}, args.out)


def cmd_sweep(args):
    params, convention, header = _setup(args)
    mu = None if (args.optimize_mu or args.mu is None) else params.intensity
    spec = SweepSpec(
        L_start=args.start,
        L_end=args.stop,
        L_step=args.step,
        protocols=_protocols(args.protocol),
        mu=mu,
        convention=convention,
        floor=args.floor,
    )
    rows = sweep(spec, params, workers=args.workers)
    for k, v in header.items():
        print(f"# {k} = {v}", file=sys.stderr)
    print(f"# mu_policy = {'optimized-per-distance' if mu is None else f'fixed({mu})'}", file=sys.stderr)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)


def cmd_simulate(args):
    params, convention, header = _setup(args)
    cfg = sim.ProtocolConfig(
        params=params,
        channel=ChannelConfig(args.length, convention),
        mode=args.mode,
        phase_slices=args.phase_slices,
        n_rounds=args.rounds,
        seed=args.seed,
    )
    tally = sim.simulate(cfg, workers=args.workers)
    payload = tally.as_dict()
    if args.verbose:
        payload = {"tally": payload, "params": header, "backend": sim.BACKEND, "expected": sim.expected_rates(cfg)}
    _emit_json(payload, args.out)


def cmd_cutoff(args):
    params, convention, header = _setup(args)
    mu = None if (args.optimize_mu or args.mu is None) else params.intensity
    out = {}
    for proto in _protocols(args.protocol):
        try:
            out[proto] = cutoff_distance(params, proto, convention, args.floor, mu=mu).as_dict()
        except DeadAtZeroDistance as exc:
            raise _Fail(EXIT_DEGENERATE, str(exc)) from None
    _emit_json({"params": header, "floor": args.floor, "cutoffs": out}, args.out)


def cmd_optimize_mu(args):
    params, convention, header = _setup(args)
    out = {}
    dead = False
    for proto in _protocols(args.protocol):
        opt = optimize_mu(params, args.length, proto, convention)
        out[proto] = {"mu": opt.mu if opt.positive else None, "R": opt.rate, "positive": opt.positive}
        dead = dead or not opt.positive
    _emit_json({"params": header, "L_km": args.length, "optimum": out}, args.out)
    if dead:
        raise _Fail(EXIT_DEGENERATE, "no positive rate")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value parameter file")
    common.add_argument("--protocol", choices=("polarization", "bb84", "both"), default="both")
    common.add_argument("--convention", choices=[c.value for c in Convention], default=None)
    mu = common.add_mutually_exclusive_group()
    mu.add_argument("--mu", type=float, default=None, help="fixed total intensity")
    mu.add_argument("--optimize-mu", action="store_true", help="optimise intensity per distance")
    common.add_argument("--floor", type=float, default=DEFAULT_FLOOR)
    common.add_argument("--out", metavar="PATH")

    parser = argparse.ArgumentParser(prog="pmqkd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keyrate", parents=[common], help="key rate at one distance (JSON)")
    p.add_argument("--length", type=float, default=0.0, metavar="KM")
    p.set_defaults(func=cmd_keyrate)

    p = sub.add_parser("sweep", parents=[common], help="key rate vs distance (CSV)")
    p.add_argument("--start", type=float, default=0.0, metavar="KM")
    p.add_argument("--stop", type=float, default=500.0, metavar="KM")
    p.add_argument("--step", type=float, default=10.0, metavar="KM")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo protocol run (JSON)")
    p.add_argument("--length", type=float, default=0.0, metavar="KM")
    p.add_argument("--mode", choices=("polarization", "phase"), default="polarization")
    p.add_argument("--phase-slices", type=int, default=16)
    p.add_argument("--rounds", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--verbose", action="store_true", help="include params, backend and exact model expectation")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cutoff", parents=[common], help="distance where R falls below the floor (JSON)")
    p.set_defaults(func=cmd_cutoff)

    p = sub.add_parser("optimize-mu", parents=[common], help="best intensity at one distance (JSON)")
    p.add_argument("--length", type=float, default=0.0, metavar="KM")
    p.set_defaults(func=cmd_optimize_mu)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DegenerateChannelError as exc:
        print(f"degenerate channel: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

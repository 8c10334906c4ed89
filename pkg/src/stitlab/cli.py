"""Command line entry point: ``stitlab simulate|chain|cftp|verify|render``.

Exit status: 0 on success, 1 when a verification check fails, 2 for usage
or config errors, 3 when a run exceeds its budget or CFTP does not stop.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .factor import CFTPNonTermination, cftp_sample
from .geometry import format_scalar
from .io import (
    ConfigError,
    load_config,
    read_tessellation,
    trajectory_to_dict,
    write_events,
    write_json,
    write_tessellation,
)
from .render import render_svg
from .renorm import RenormConfig, z_trajectory
from .stit import BudgetExceeded, run
from .streams import RandomnessField, named_stream
from .verify import SUITES, SuiteConfig, run_suite

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


def _meta(cfg, **extra) -> dict:
    return {"seed": cfg.seed, "measure": cfg.measure.to_spec(), "config_hash": cfg.hash, **extra}


def _renorm(cfg) -> RenormConfig:
    return RenormConfig(cfg.a, cfg.window, cfg.measure, cfg.budget)


def cmd_simulate(args, cfg) -> int:
    r = run(cfg.window, cfg.measure, cfg.time, named_stream(cfg.seed, "simulate"), budget=cfg.budget)
    write_tessellation(args.out, r.final, _meta(cfg, time=cfg.time, events=r.event_count))
    if args.events:
        write_events(args.events, r.events)
    print(f"wrote {len(r.final)} cells ({r.event_count} events) to {args.out}")
    return EXIT_OK


def cmd_chain(args, cfg) -> int:
    traj = z_trajectory(_renorm(cfg), cfg.steps, named_stream(cfg.seed, "chain"))
    meta = _meta(cfg, a=format_scalar(cfg.a), steps=cfg.steps)
    write_json(args.out, trajectory_to_dict(traj.values, traj.provenance, meta))
    print(f"wrote Z_0..Z_{cfg.steps} to {args.out}")
    return EXIT_OK


def cmd_cftp(args, cfg) -> int:
    field = RandomnessField(cfg.seed)
    try:
        res = cftp_sample(field, _renorm(cfg), L=cfg.horizon, certify=cfg.certify, max_depth=cfg.max_depth,
                          certificate_range=cfg.certificate_range)
    except CFTPNonTermination as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.report:
            write_json(args.report, {"terminated": False, **exc.report, "config_hash": cfg.hash})
        return EXIT_RUNTIME
    report = {"terminated": True, **res.to_report(), "horizon": cfg.horizon, "config_hash": cfg.hash}
    if args.report:
        write_json(args.report, report)
    meta = _meta(cfg, a=format_scalar(cfg.a), **{k: report[k] for k in ("memory_length", "certified_range")})
    write_json(args.out, {**trajectory_to_dict(res.values, (), meta), "report": report})
    label = "certified" if res.certified else "heuristic (stabilized, not certified)"
    print(f"memory length {res.memory_length}, {label}; wrote n = 0..{cfg.horizon} to {args.out}")
    return EXIT_OK


def cmd_verify(args, cfg) -> int:
    names = list(SUITES) if cfg.suite == "all" else [s.strip() for s in cfg.suite.split(",")]
    for name in names:
        if name not in SUITES:
            raise ConfigError(f"suite: unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    # suites use their pre-registered seed unless one is given on the command line
    seed = None if args.fresh_seed else args.seed
    reports = []
    for name in names:
        rep = run_suite(name, SuiteConfig(seed=seed, scale=cfg.scale, fresh_seed=args.fresh_seed))
        reports.append(rep)
        print(rep.text())
    out = {"config_hash": cfg.hash, "passed": all(r.passed for r in reports),
           "suites": [r.to_dict() for r in reports]}
    Path(args.out).write_text(json.dumps(out, indent=1, sort_keys=True, default=str) + "\n", encoding="utf-8")
    if args.text:
        Path(args.text).write_text("\n\n".join(r.text() for r in reports) + "\n", encoding="utf-8")
    return EXIT_OK if out["passed"] else EXIT_CHECK_FAILED


def cmd_render(args, cfg=None) -> int:
    T, _ = read_tessellation(args.input)
    svg = render_svg(T, size=args.size, origin=not args.no_origin, labels=args.labels)
    Path(args.out).write_bytes(svg.encode("utf-8"))
    print(f"rendered {len(T)} cells to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stitlab", description="STIT tessellations, renormalized chains and CFTP.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file (default: $STITLAB_CONFIG)")
        sp.add_argument("--seed", type=int, help="master seed")
        sp.add_argument("--budget", type=int, help="event budget per simulation")

    sp = sub.add_parser("simulate", help="simulate Y_t restricted to the window")
    common(sp)
    sp.add_argument("--time", type=float)
    sp.add_argument("--out", required=True, help="tessellation file to write")
    sp.add_argument("--events", help="also write the event log (NDJSON)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("chain", help="sample a trajectory of the renormalized chain")
    common(sp)
    sp.add_argument("--steps", type=int)
    sp.add_argument("-a", "--scale-factor", dest="a", help="scale factor a > 1 (rational string)")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_chain)

    sp = sub.add_parser("cftp", help="coupling-from-the-past sample on [0, horizon]")
    common(sp)
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--max-depth", dest="max_depth", type=int)
    sp.add_argument("-a", "--scale-factor", dest="a")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--certify", dest="certify", action="store_true", default=None)
    g.add_argument("--no-certify", dest="certify", action="store_false")
    sp.add_argument("--certificate-range", dest="certificate_range", type=int)
    sp.add_argument("--out", required=True, help="tessellation sequence file")
    sp.add_argument("--report", help="CFTP report file")
    sp.set_defaults(func=cmd_cftp)

    sp = sub.add_parser("verify", help="run verification suites")
    common(sp)
    sp.add_argument("--suite", help=f"all, or comma-separated names from: {', '.join(SUITES)}")
    sp.add_argument("--scale", choices=("full", "quick", "smoke"))
    sp.add_argument("--fresh-seed", action="store_true", help="draw a new seed (recorded in the report)")
    sp.add_argument("--out", default="report.json", help="structured report (JSON)")
    sp.add_argument("--text", help="also write the human-readable report")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("render", help="render a tessellation file as SVG")
    sp.add_argument("input")
    sp.add_argument("--out", required=True)
    sp.add_argument("--size", type=int, default=512)
    sp.add_argument("--labels", action="store_true", help="label cells with their enumeration index")
    sp.add_argument("--no-origin", action="store_true", help="omit the origin marker")
    sp.set_defaults(func=cmd_render)
    return p


_OVERRIDABLE = ("seed", "budget", "time", "steps", "a", "horizon", "max_depth", "certify",
                "certificate_range", "suite", "scale")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "render":
            return cmd_render(args)
        overrides = {k: getattr(args, k, None) for k in _OVERRIDABLE}
        cfg = load_config(args.config, overrides)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

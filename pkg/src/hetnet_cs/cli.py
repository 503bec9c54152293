"""Command line: ``hetnet-cs {simulate,sweep,verify}``."""

import argparse
import json
import logging
import sys

from . import experiments, verify
from .errors import HetNetError
from .metrics import evaluate
from .scenario import build_scenario, draw_channel, load_config

log = logging.getLogger("hetnet_cs")


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _methods(text):
    return [m.strip() for m in text.split(",") if m.strip()]


def _config(args):
    cfg = load_config(args.config)
    overrides = {}
    for arg, key in (("alpha", "alpha"), ("pmin", "p_min_dbm"), ("seed", "seed"),
                     ("users_per_sbs", "users_per_sbs")):
        value = getattr(args, arg, None)
        if value is not None:
            overrides[key] = value
    return cfg.replace(**overrides) if overrides else cfg


def cmd_simulate(args):
    cfg = _config(args)
    scenario = build_scenario(cfg)
    method = experiments.METHODS[args.method]
    records = []
    for step in range(args.steps):
        snapshot = draw_channel(scenario, step=step)
        reference = experiments.METHODS["all-on"](scenario, snapshot)
        decision = method(scenario, snapshot)
        report = evaluate(scenario, decision, reference.total_power_w)
        records.append({
            "step": step,
            "method": args.method,
            "total_power_w": report.total_power_w,
            "savings_pct": report.savings_vs_all_on,
            "served_traffic_qos": report.served_traffic_qos,
            "offered_traffic": report.offered_traffic,
            "outage_count": report.outage_count,
            "lambda_m": report.lambda_m,
            "sbs_off": list(decision.off),
        })
    if args.json:
        json.dump(records, sys.stdout, indent=2)
        print()
    else:
        for r in records:
            print(f"step {r['step']}  {r['method']:<8}  power {r['total_power_w']:.2f} W  "
                  f"savings {r['savings_pct']:.2f}%  served {r['served_traffic_qos']:.4f}/"
                  f"{r['offered_traffic']:.4f}  outages {r['outage_count']}  "
                  f"lambda_M {r['lambda_m']:.4f}  off {len(r['sbs_off'])}/{scenario.n_sbs}")
    return 0


def cmd_sweep(args):
    cfg = _config(args)
    grid = _floats(args.grid) if args.grid else experiments.DEFAULT_GRIDS[args.var]
    spec = experiments.SweepSpec(
        variable=args.var, grid=grid, methods=_methods(args.methods),
        seeds=tuple(range(args.seeds)), fixed=cfg)
    result = experiments.run_sweep(spec, workers=args.workers)
    if args.out == "-":
        sys.stdout.write(experiments.format_csv(result.rows))
    else:
        experiments.emit_csv(result, args.out)
        log.info("wrote %d rows to %s", len(result.rows), args.out)
    if args.summary:
        experiments.emit_summary_csv(result, args.summary)
    return 0


def cmd_verify(args):
    results = verify.run_all()
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail}")
    return 0 if all(r.passed for r in results) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="hetnet-cs", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        p.add_argument("--config", help="scenario JSON (default: $HETNET_CS_CONFIG or built-in)")
        p.add_argument("--alpha", type=float)
        p.add_argument("--pmin", type=float, help="QoS threshold, dBm")
        p.add_argument("--users-per-sbs", type=int)

    sim = sub.add_parser("simulate", help="run one method on one scenario")
    sim.add_argument("--method", choices=experiments.METHOD_NAMES, default="proposed")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--steps", type=int, default=1, help="time steps (fresh shadowing each)")
    sim.add_argument("--json", action="store_true")
    scenario_args(sim)
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="sweep alpha or pmin over seeds, write CSV")
    sw.add_argument("--var", choices=sorted(experiments.VARIABLES), required=True)
    sw.add_argument("--grid", help="comma-separated values (default depends on --var)")
    sw.add_argument("--methods", default=",".join(experiments.METHOD_NAMES))
    sw.add_argument("--seeds", type=int, default=20, help="number of seeds, 0..n-1")
    sw.add_argument("--out", default="-")
    sw.add_argument("--summary", help="also write mean/std per (value, method)")
    sw.add_argument("--workers", type=int, default=1)
    scenario_args(sw)
    sw.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", help="solver-vs-oracle and invariant checks")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except HetNetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

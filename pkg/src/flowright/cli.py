"""Command-line front end.

Subcommands: solve, check, gen, oracle, export.  Instance and schedule
files are JSON (seconds and joules); `--time-unit h` converts harvest times
from hours on ingest and reports completion in hours.

Exit codes: 0 success; 1 I/O or schema problem; 2 infeasible instance (or
oracle size cap); 3 verification failure (check).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .errors import FlowrightError, Infeasible, InvalidInstance, InvalidUnits, TooLarge
from .instance import instance_from_dict, instance_to_dict
from .solver import schedule_from_dict, solve
from .verify import check_structure, generate_instance, oracle_tmin


def _read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _write_json(data: dict, path: str | None):
    text = json.dumps(data, indent=2, sort_keys=True)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _load_instance(path: str, time_unit: str):
    return instance_from_dict(_read_json(path), time_unit=time_unit)


def _fmt_time(seconds: float, unit: str) -> str:
    if unit == "h":
        return f"{seconds / 3600.0:.4f} h"
    return f"{seconds:.6g} s"


def cmd_solve(args) -> int:
    try:
        instance = _load_instance(args.instance, args.time_unit)
    except (OSError, json.JSONDecodeError, InvalidInstance, InvalidUnits, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        schedule, diag = solve(instance, tol=args.tolerance, max_iters=args.max_iters)
    except Infeasible as exc:
        print(f"infeasible: {exc} (deficit {exc.deficit:.6g} J)", file=sys.stderr)
        return 2
    except FlowrightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out = args.output or str(Path(args.instance).with_suffix(".schedule.json"))
    try:
        _write_json(schedule.to_dict(iterations=diag.iterations), out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    unused = ", ".join(str(i) for i in schedule.unused_harvests) or "none"
    print(f"T = {_fmt_time(schedule.completion_time, args.time_unit)}")
    print(f"iterations = {diag.iterations} ({diag.stop_reason})")
    print(f"unused harvests: {unused}")
    print(f"schedule written to {out}")
    return 0


def cmd_check(args) -> int:
    try:
        instance = _load_instance(args.instance, args.time_unit)
        schedule = schedule_from_dict(_read_json(args.schedule))
    except (OSError, json.JSONDecodeError, InvalidInstance, InvalidUnits, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = check_structure(schedule, instance, tol=args.tolerance)
    _write_json(report.to_dict(), args.output)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        print(f"FAILED checks: {names}", file=sys.stderr)
        return 3
    return 0


def cmd_gen(args) -> int:
    try:
        instance = generate_instance(
            args.seed,
            n_harvests=args.n_harvests,
            energy_range=tuple(args.energy_range),
            duration_range=tuple(args.duration_range),
            ratio_range=tuple(args.ratio_range),
        )
    except (RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_json(instance_to_dict(instance), args.output)
    return 0


def cmd_oracle(args) -> int:
    try:
        instance = _load_instance(args.instance, args.time_unit)
    except (OSError, json.JSONDecodeError, InvalidInstance, InvalidUnits, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        t = oracle_tmin(instance, grid_step=args.grid_step)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"T_oracle = {_fmt_time(t, args.time_unit)}")
    return 0


def cmd_export(args) -> int:
    try:
        schedule = schedule_from_dict(_read_json(args.schedule))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    instance = None
    if args.instance:
        try:
            instance = _load_instance(args.instance, args.time_unit)
        except (OSError, json.JSONDecodeError, InvalidInstance, InvalidUnits, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1

    out = Path(args.output or Path(args.schedule).with_suffix(".csv"))
    try:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t_start", "t_end", "power_W", "r1", "r2", "cum_b1", "cum_b2"])
            cum1 = cum2 = 0.0
            for seg in schedule.segments():
                cum1 += seg.r1 * seg.duration
                cum2 += seg.r2 * seg.duration
                writer.writerow(
                    [repr(seg.t_start), repr(seg.t_end), repr(seg.power),
                     repr(seg.r1), repr(seg.r2), repr(cum1), repr(cum2)]
                )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"csv written to {out}")

    if args.plot:
        from .plots import render_schedule

        png = out.with_suffix(".png")
        try:
            render_schedule(schedule, png, instance=instance)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"figure written to {png}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowright",
        description="Minimum-completion-time scheduling for a two-user "
        "energy-harvesting AWGN broadcast link.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance and write its schedule")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("--tolerance", type=float, default=1e-9,
                   help="stop threshold as a fraction of the mean epoch (default 1e-9)")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--time-unit", choices=("s", "h"), default="s")
    p.add_argument("--output", default=None, help="schedule JSON path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="verify a schedule against its instance")
    p.add_argument("schedule", help="schedule JSON file")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--time-unit", choices=("s", "h"), default="s")
    p.add_argument("--output", default=None, help="report JSON path (default stdout)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="generate a random feasible instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-harvests", type=int, default=5)
    p.add_argument("--energy-range", type=float, nargs=2, default=(0.2, 80.0))
    p.add_argument("--duration-range", type=float, nargs=2, default=(0.2, 5.0))
    p.add_argument("--ratio-range", type=float, nargs=2, default=(0.05, 20.0))
    p.add_argument("--output", default=None, help="instance JSON path (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="brute-force completion time (up to 3 harvests)")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.add_argument("--time-unit", choices=("s", "h"), default="s")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export", help="write a schedule as CSV plus a rendered figure")
    p.add_argument("schedule", help="schedule JSON file")
    p.add_argument("--output", default=None, help="CSV path (default: schedule path with .csv)")
    p.add_argument("--instance", default=None, help="overlay harvest arrivals from this instance")
    p.add_argument("--time-unit", choices=("s", "h"), default="s")
    p.add_argument("--no-plot", dest="plot", action="store_false",
                   help="skip the figure, write only the CSV")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

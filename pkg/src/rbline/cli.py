"""Command-line interface.

Subcommands: gen, simulate, solve, bounds t-table, bounds verify-tau,
bounds verify-steps, experiment separation, render.  Exit codes: 0 on
success, 1 when a verifier reports failures, 2 on usage errors.  Rational
flags (delta, eta, epsilon) accept exact "p/q" strings as well as
decimals.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bounds
from .core import IllegalSchedule, replay_schedule, validate_instance
from .experiment import CSV_HEADER, MAX_EXACT_ELL, separation_rows
from .formats import (
    atomic_write_text,
    read_instance,
    read_schedule,
    write_csv,
    write_instance,
    write_schedule,
)
from .genesis import build_instance, instance_from_params, theorem1_params
from .optsolve import ResourceExceeded, SolveLimits, optimal_cost
from .policies import POLICIES, CapacityViolation, simulate
from .render import render_spacetime_svg


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _eta_grid(step: Fraction) -> list[Fraction]:
    if step <= 0:
        raise ValueError(f"--eta-step must be positive, got {step}")
    grid = []
    eta = step
    while eta < 1:
        grid.append(eta)
        eta += step
    return grid


def _emit_json(doc: dict, out_path) -> None:
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if out_path:
        atomic_write_text(out_path, text)
    else:
        sys.stdout.write(text)


def _cmd_gen(args) -> int:
    if args.theorem1:
        if args.k is None or args.n is None or args.delta is None:
            print("gen --theorem1 requires --k, --n and --delta", file=sys.stderr)
            return 2
        params = theorem1_params(args.k, args.n, args.delta)
        if params.degenerate:
            print(
                f"degenerate parameters (k={args.k} below 4/delta): trivial-bound regime, no instance",
                file=sys.stderr,
            )
            return 2
        instance = instance_from_params(params, args.n, phases=args.phases)
    else:
        if args.ell is None:
            print("gen requires --ell (or --theorem1 with --k/--n/--delta)", file=sys.stderr)
            return 2
        try:
            instance = build_instance(args.ell, args.phases, args.beta, args.n_sites)
        except ValueError as exc:
            print(f"gen: {exc}", file=sys.stderr)
            return 2
    write_instance(args.output, instance)
    return 0


def _cmd_simulate(args) -> int:
    instance = read_instance(args.instance)
    try:
        schedule, report = simulate(args.policy, instance, args.capacity)
    except CapacityViolation as exc:
        _emit_json(
            {"feasible": False, "policy": args.policy, "capacity": args.capacity,
             "step": exc.step, "pending": exc.pending},
            args.output,
        )
        return 0
    doc = {
        "feasible": True,
        "policy": args.policy,
        "capacity": args.capacity,
        "cost": report.total_cost,
        "max_pending": report.max_pending,
        "per_phase_cost": None if report.per_phase_cost is None else list(report.per_phase_cost),
    }
    _emit_json(doc, args.output)
    if args.schedule_out:
        write_schedule(args.schedule_out, schedule)
    return 0


def _cmd_solve(args) -> int:
    instance = read_instance(args.instance)
    limits = SolveLimits(max_states=args.max_states, max_seconds=args.max_seconds)
    try:
        report, schedule = optimal_cost(instance, args.capacity, limits=limits, backend=args.backend)
    except ResourceExceeded as exc:
        _emit_json(
            {"optimal": False, "capacity": args.capacity, "reason": exc.reason,
             "best_bound": exc.best_bound, "states": exc.states},
            args.output,
        )
        return 0
    doc = {
        "optimal": True,
        "capacity": args.capacity,
        "cost": report.total_cost,
        "max_pending": report.max_pending,
        "per_phase_cost": None if report.per_phase_cost is None else list(report.per_phase_cost),
    }
    _emit_json(doc, args.output)
    if args.schedule_out:
        write_schedule(args.schedule_out, schedule)
    return 0


def _cmd_bounds_table(args) -> int:
    rows = [
        {"p": p, "q": q, "r": r, "t_hat": bounds.t_hat(p, q, r)}
        for q in range(1, args.q_max + 1)
        for p in range(args.p_max + 1)
        for r in range(args.r_max + 1)
    ]
    write_csv(args.output, ["p", "q", "r", "t_hat"], rows, stream=None if args.output else sys.stdout)
    return 0


def _grid_exit(report, args) -> int:
    print(
        f"{report.check}: {report.points_checked} points, {len(report.failures)} failures, "
        f"min margin {report.min_margin!r}, tolerance {report.tolerance:g}"
    )
    if args.output:
        write_csv(
            args.output,
            ["check", "family", "eta", "p", "q", "r", "lhs", "rhs", "margin"],
            report.rows(),
        )
    return 0 if report.ok else 1


def _cmd_verify_tau(args) -> int:
    grid = args.eta or _eta_grid(args.eta_step)
    report = bounds.verify_tau_dominated(
        args.p_max, args.q_max, args.r_max, grid, tolerance=args.tolerance, tau_factor=args.tau_factor
    )
    return _grid_exit(report, args)


def _cmd_verify_steps(args) -> int:
    grid = args.eta or _eta_grid(args.eta_step)
    report = bounds.verify_induction_steps(
        args.p_max, args.q_max, args.r_max, grid, tolerance=args.tolerance
    )
    return _grid_exit(report, args)


def _cmd_experiment_separation(args) -> int:
    limits = SolveLimits(max_states=args.max_states, max_seconds=args.max_seconds)
    rows = separation_rows(
        args.ell_max,
        args.phases,
        beta=args.beta,
        limits=limits,
        backend=args.backend,
        svg_dir=args.svg_dir,
    )
    write_csv(args.output, CSV_HEADER, rows)
    return 0


def _cmd_render(args) -> int:
    instance = read_instance(args.instance)
    bad = validate_instance(instance)
    if not bad.ok:
        print(f"render: instance invalid: {bad.violations[0].message}", file=sys.stderr)
        return 2
    schedule = None
    if args.schedule:
        schedule = read_schedule(args.schedule)
        replay_schedule(instance, schedule)  # legality check before drawing
    atomic_write_text(args.output, render_spacetime_svg(instance, schedule))
    return 0


def _add_limit_flags(p) -> None:
    p.add_argument("--max-states", type=int, default=SolveLimits().max_states)
    p.add_argument("--max-seconds", type=float, default=SolveLimits().max_seconds)
    p.add_argument("--backend", choices=["auto", "python", "numba"], default="auto")


def _add_grid_flags(p) -> None:
    p.add_argument("--p-max", type=int, default=16)
    p.add_argument("--q-max", type=int, default=16)
    p.add_argument("--r-max", type=int, default=10)
    p.add_argument("--eta", type=_fraction, nargs="*", help="explicit eta grid (rationals)")
    p.add_argument("--eta-step", type=_fraction, default=Fraction(1, 20),
                   help="grid step when --eta is absent (default 1/20)")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("-o", "--output", help="failures CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbline", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--ell", type=int)
    p.add_argument("--phases", type=int, default=1)
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--n-sites", type=int, default=None)
    p.add_argument("--theorem1", action="store_true", help="derive ell/beta/epsilon from k, n, delta")
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=_fraction)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("simulate", help="run a policy on an instance")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--policy", choices=sorted(POLICIES), required=True)
    p.add_argument("--capacity", type=int, required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--schedule-out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("solve", help="exact optimum for an instance")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--capacity", type=int, required=True)
    _add_limit_flags(p)
    p.add_argument("-o", "--output")
    p.add_argument("--schedule-out")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bounds", help="recurrence table and verifiers")
    bsub = p.add_subparsers(dest="bounds_command", required=True)

    bt = bsub.add_parser("t-table", help="dump the t_hat table as CSV")
    bt.add_argument("--p-max", type=int, default=8)
    bt.add_argument("--q-max", type=int, default=8)
    bt.add_argument("--r-max", type=int, default=4)
    bt.add_argument("-o", "--output")
    bt.set_defaults(func=_cmd_bounds_table)

    bv = bsub.add_parser("verify-tau", help="check t_hat dominates the closed form")
    _add_grid_flags(bv)
    bv.add_argument("--tau-factor", type=_fraction, default=Fraction(1),
                    help="mutation hook: scale the closed form (self-test)")
    bv.set_defaults(func=_cmd_verify_tau)

    bs = bsub.add_parser("verify-steps", help="check the closed-form step inequalities")
    _add_grid_flags(bs)
    bs.set_defaults(func=_cmd_verify_steps)

    p = sub.add_parser("experiment", help="orchestrated runs")
    esub = p.add_subparsers(dest="experiment_command", required=True)
    es = esub.add_parser("separation", help="buffer-gap CSV over generated instances")
    es.add_argument("--ell-max", type=int, required=True,
                    help=f"max difficulty (exact solving guard: <= {MAX_EXACT_ELL})")
    es.add_argument("--phases", type=int, nargs="+", default=[1])
    es.add_argument("--beta", type=int, default=1)
    _add_limit_flags(es)
    es.add_argument("--svg-dir")
    es.add_argument("-o", "--output", required=True)
    es.set_defaults(func=_cmd_experiment_separation)

    p = sub.add_parser("render", help="space-time SVG of an instance")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--schedule")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, IllegalSchedule) as exc:
        print(f"rbline: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

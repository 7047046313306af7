"""The buffer-gap experiment: exact optima against the analytic bounds.

For each difficulty ell up to a small guard, each phase count P in the
configured list and each smaller buffer ell' < ell, the experiment emits
CSV rows comparing the basic trajectory at buffer ell, the exact optimum
at buffers ell and ell', and the per-phase analytic floors.  Row schema
(fixed header):

    ell,phases,beta,buffer,method,cost,tau_bound,t_hat_bound,ratio,optimal_flag

``tau_bound``/``t_hat_bound`` are P times the closed-form / recurrence
floor for clearing a full phase with the row's buffer; ``ratio`` divides
the row's cost by the exact buffer-ell optimum of the same instance.
Solver aborts become rows flagged "limit" instead of crashing the run.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from . import bounds
from .genesis import build_instance
from .optsolve import ResourceExceeded, SolveLimits, optimal_cost
from .policies import simulate
from .render import render_spacetime_svg

CSV_HEADER = ["ell", "phases", "beta", "buffer", "method", "cost", "tau_bound", "t_hat_bound", "ratio", "optimal_flag"]
MAX_EXACT_ELL = 3


def _fmt(v) -> str:
    return f"{float(v):.9g}"


def _bound_fields(ell: int, buffer: int, phases: int) -> tuple[str, str]:
    t_hat_bound = phases * bounds.t_hat(buffer, ell, 0)
    if buffer < ell:
        eps = Fraction(ell - buffer, ell)
        tau_val = phases * bounds.tau(buffer, ell, 0, bounds.TauParams.from_eta(eps))
        return _fmt(tau_val), str(t_hat_bound)
    return "", str(t_hat_bound)


def separation_rows(
    ell_max: int,
    phases_list: list[int],
    beta: int = 1,
    limits: Optional[SolveLimits] = None,
    backend: Optional[str] = None,
    svg_dir=None,
) -> list[dict]:
    if not (1 <= ell_max <= MAX_EXACT_ELL):
        raise ValueError(f"ell_max must be in [1, {MAX_EXACT_ELL}] for exact solving, got {ell_max}")
    limits = limits or SolveLimits()
    rows: list[dict] = []

    for ell in range(1, ell_max + 1):
        for phases in phases_list:
            instance = build_instance(ell, phases, beta)
            base = {"ell": ell, "phases": phases, "beta": beta}
            cap_full = beta * ell

            _, bt_report = simulate("basic-trajectory", instance, cap_full)
            rows.append(
                base
                | {
                    "buffer": cap_full,
                    "method": "basic-trajectory",
                    "cost": bt_report.total_cost,
                    "tau_bound": "",
                    "t_hat_bound": "",
                    "ratio": "",
                    "optimal_flag": "",
                }
            )

            full_cost = _opt_row(rows, base, instance, ell, cap_full, ell, phases, limits, backend, None)
            for small in range(ell - 1, 0, -1):
                _opt_row(rows, base, instance, ell, beta * small, small, phases, limits, backend, full_cost)

            if svg_dir is not None:
                from pathlib import Path

                from .formats import atomic_write_text

                sched, _ = simulate("basic-trajectory", instance, cap_full)
                svg = render_spacetime_svg(instance, sched)
                atomic_write_text(Path(svg_dir) / f"separation_ell{ell}_p{phases}.svg", svg)

    return rows


def _opt_row(rows, base, instance, ell, buffer, bound_buffer, phases, limits, backend, full_cost):
    tau_bound, t_hat_bound = _bound_fields(ell, bound_buffer, phases)
    try:
        report, _ = optimal_cost(instance, buffer, limits=limits, backend=backend)
        cost = report.total_cost
        flag = "exact"
    except ResourceExceeded as exc:
        cost = exc.best_bound if exc.best_bound is not None else ""
        flag = "limit"
    ratio = ""
    if full_cost not in (None, "", 0) and cost != "":
        ratio = _fmt(Fraction(cost, full_cost))
    rows.append(
        base
        | {
            "buffer": buffer,
            "method": "opt",
            "cost": cost,
            "tau_bound": tau_bound,
            "t_hat_bound": t_hat_bound,
            "ratio": ratio,
            "optimal_flag": flag,
        }
    )
    return cost if flag == "exact" else None

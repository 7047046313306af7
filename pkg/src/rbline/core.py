"""Data model and replay semantics for a buffer-constrained server on a line.

Sites are the integers ``0 .. n_sites-1`` with unit spacing; moving the
server from site ``i`` to site ``j`` costs ``abs(i - j)``.  A schedule is a
flat list of two action kinds:

* ``("admit",)`` takes the next request from the arrival sequence (admits
  always follow arrival order),
* ``("serve", request_id)`` moves the server to that request's site and
  serves it.

Capacity rule: the number of *stored* requests (admitted, not yet served)
may never exceed the buffer capacity.  An admit that is immediately
followed by the serve of the same request is "serve on arrival": the
request passes straight through without ever occupying a buffer slot, so
such a pair is legal even when the buffer is full.  This is what forces a
small-buffer server to visit the site of a large co-located arrival batch
the moment it arrives, while still allowing it to hold on to far-away
requests.

Steps are ordering metadata only; legality and cost depend on arrival
order and serve order alone.  All values here are immutable and the
functions are pure, so they are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

REGULAR = "regular"
ANCHOR = "anchor"
GENERIC = "generic"
KINDS = (REGULAR, ANCHOR, GENERIC)

# Action constructors.  ADMIT is a singleton tuple; serve(i) builds the pair.
ADMIT = ("admit",)


def serve(request_id: int) -> tuple:
    return ("serve", request_id)


class Request(NamedTuple):
    """One demand at a site.

    ``id`` equals the request's position in arrival order.  ``rank`` is set
    for regular requests, ``anchor_id``/``member`` for anchor members, and
    ``packet_id`` groups the copies created by packet scaling.
    """

    id: int
    site: int
    step: int
    kind: str = GENERIC
    rank: Optional[int] = None
    anchor_id: Optional[int] = None
    member: Optional[int] = None
    packet_id: Optional[int] = None


@dataclass(frozen=True)
class Meta:
    """Construction metadata carried by an instance (ordering-irrelevant)."""

    ell: Optional[int] = None
    phases: Optional[int] = None
    beta: int = 1
    start_site: int = 0
    epsilon: Optional[Fraction] = None


@dataclass(frozen=True)
class Instance:
    n_sites: int
    arrivals: tuple[Request, ...]
    meta: Meta = Meta()

    @property
    def n_requests(self) -> int:
        return len(self.arrivals)


@dataclass(frozen=True)
class Schedule:
    """An admit/serve interleaving for one instance at a fixed capacity."""

    actions: tuple[tuple, ...]
    buffer_capacity: int


@dataclass(frozen=True)
class CostReport:
    """Replay outcome: exact integer cost plus bookkeeping.

    ``trajectory`` lists the start site followed by every site the server
    moved to (consecutive duplicates collapsed), so ``total_cost`` equals
    the sum of absolute differences of consecutive trajectory entries.
    ``per_phase_cost`` is present only when the instance carries phase
    metadata; each move is charged to the phase of the request it moved to.
    """

    total_cost: int
    per_phase_cost: Optional[tuple[int, ...]]
    max_pending: int
    trajectory: tuple[int, ...]


class IllegalSchedule(Exception):
    """Raised by replay_schedule when a schedule breaks a legality rule."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class Violation:
    request_id: Optional[int]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_instance(instance: Instance) -> ValidationReport:
    """Check instance invariants; violations are report entries, not errors."""
    out: list[Violation] = []
    n_sites = instance.n_sites
    if n_sites < 2:
        out.append(Violation(None, f"n_sites must be >= 2, got {n_sites}"))
    if instance.meta.beta < 1:
        out.append(Violation(None, f"beta must be >= 1, got {instance.meta.beta}"))
    if not (0 <= instance.meta.start_site < max(n_sites, 1)):
        out.append(Violation(None, f"start_site {instance.meta.start_site} out of range"))

    anchor_size = None if instance.meta.ell is None else instance.meta.ell + 1
    prev_step = 0
    for pos, req in enumerate(instance.arrivals):
        if req.id != pos:
            out.append(Violation(req.id, f"id {req.id} does not match arrival position {pos}"))
        if not (0 <= req.site < n_sites):
            out.append(Violation(req.id, f"site {req.site} out of range [0, {n_sites})"))
        if req.step < 0:
            out.append(Violation(req.id, f"negative step {req.step}"))
        if req.step < prev_step:
            out.append(Violation(req.id, f"non-monotone steps: {req.step} after {prev_step}"))
        prev_step = max(prev_step, req.step)
        if req.kind not in KINDS:
            out.append(Violation(req.id, f"unknown kind {req.kind!r}"))
        elif req.kind == REGULAR:
            if req.rank is None or req.rank < 0:
                out.append(Violation(req.id, f"regular request needs rank >= 0, got {req.rank}"))
        elif req.kind == ANCHOR:
            if req.anchor_id is None:
                out.append(Violation(req.id, "anchor member missing anchor_id"))
            if req.member is None or req.member < 0:
                out.append(Violation(req.id, f"anchor member index invalid: {req.member}"))
            elif anchor_size is not None and req.member >= anchor_size:
                out.append(Violation(req.id, f"anchor member {req.member} >= anchor size {anchor_size}"))

    # Packet members must be contiguous in arrival order and share a site.
    seen_packets: dict[int, tuple[int, int]] = {}  # packet_id -> (last_pos, site)
    for pos, req in enumerate(instance.arrivals):
        if req.packet_id is None:
            continue
        if req.packet_id in seen_packets:
            last_pos, site = seen_packets[req.packet_id]
            if pos != last_pos + 1:
                out.append(Violation(req.id, f"packet {req.packet_id} not contiguous"))
            if req.site != site:
                out.append(Violation(req.id, f"packet {req.packet_id} spans sites {site} and {req.site}"))
        seen_packets[req.packet_id] = (pos, req.site)

    return ValidationReport(tuple(out))


def replay_schedule(instance: Instance, schedule: Schedule) -> CostReport:
    """Replay a schedule against an instance, return its cost report.

    Raises IllegalSchedule if the schedule admits out of order, serves a
    request that is not stored, exceeds the buffer capacity with stored
    requests, or leaves requests unserved at the end.  Replay is
    deterministic and does not mutate its inputs.
    """
    if schedule.buffer_capacity < 1:
        raise ValueError(f"buffer_capacity must be >= 1, got {schedule.buffer_capacity}")

    arrivals = instance.arrivals
    n = len(arrivals)
    cap = schedule.buffer_capacity
    actions = schedule.actions

    ell = instance.meta.ell
    phases = instance.meta.phases
    per_phase: Optional[list[int]] = None
    phase_len = 0
    if ell is not None and phases is not None:
        per_phase = [0] * phases
        phase_len = 2 ** ell

    server = instance.meta.start_site
    trajectory = [server]
    total = 0
    stored: set[int] = set()
    site_of: dict[int, int] = {}
    step_of: dict[int, int] = {}
    next_arrival = 0
    served: set[int] = set()
    max_pending = 0

    idx = 0
    n_actions = len(actions)
    while idx < n_actions:
        act = actions[idx]
        if act[0] == "admit":
            if next_arrival >= n:
                raise IllegalSchedule("admit past end of input")
            req = arrivals[next_arrival]
            next_arrival += 1
            nxt = actions[idx + 1] if idx + 1 < n_actions else None
            if nxt is not None and nxt[0] == "serve" and nxt[1] == req.id:
                # Serve on arrival: the request never occupies a slot.
                if req.site != server:
                    move = abs(req.site - server)
                    total += move
                    server = req.site
                    trajectory.append(server)
                    if per_phase is not None:
                        per_phase[min(req.step // phase_len, phases - 1)] += move
                served.add(req.id)
                idx += 2
                continue
            stored.add(req.id)
            site_of[req.id] = req.site
            step_of[req.id] = req.step
            if len(stored) > cap:
                raise IllegalSchedule("capacity exceeded")
            max_pending = max(max_pending, len(stored))
            idx += 1
        elif act[0] == "serve":
            rid = act[1]
            if rid not in stored:
                if rid in served:
                    raise IllegalSchedule(f"request {rid} served twice")
                raise IllegalSchedule(f"serve before admit of request {rid}")
            site = site_of.pop(rid)
            step = step_of.pop(rid)
            stored.remove(rid)
            served.add(rid)
            if site != server:
                move = abs(site - server)
                total += move
                server = site
                trajectory.append(server)
                if per_phase is not None:
                    per_phase[min(step // phase_len, phases - 1)] += move
            idx += 1
        else:
            raise IllegalSchedule(f"unknown action {act!r}")

    if next_arrival < n or stored:
        raise IllegalSchedule("unserved requests remain")

    return CostReport(
        total_cost=total,
        per_phase_cost=None if per_phase is None else tuple(per_phase),
        max_pending=max_pending,
        trajectory=tuple(trajectory),
    )

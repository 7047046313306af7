"""Rule-based server policies simulated against the core semantics.

``basic-trajectory`` walks the diagonal of the generated phases: during
step j it sits at the phase-local site j (mirrored on odd phases), serves
whatever it buffered for that site, passes arriving co-located requests
straight through, and stores the rest.  It needs capacity ``ell`` on a
difficulty-``ell`` instance and then costs exactly ``2**ell`` per phase.

``greedy-nearest`` is a baseline that ignores instance structure: fill the
buffer, serve the closest stored request (ties to the lower site), repeat.
"""

from __future__ import annotations

from .core import ADMIT, CostReport, Instance, Schedule, replay_schedule, serve


class CapacityViolation(Exception):
    """The policy would need to store more than the buffer allows.

    This is an expected outcome when a policy is run below its feasible
    capacity, not a bug; ``step`` and ``pending`` describe the moment it
    ran out of room.
    """

    def __init__(self, step: int, pending: int):
        super().__init__(f"capacity exceeded at step {step} (pending {pending})")
        self.step = step
        self.pending = pending


def _basic_trajectory(instance: Instance, buffer_capacity: int) -> Schedule:
    ell = instance.meta.ell
    if ell is None:
        raise ValueError("basic-trajectory needs instance meta.ell")
    span = 2 ** ell

    def position(step: int) -> int:
        t, u = divmod(step, span)
        return u if t % 2 == 0 else span - u

    by_step: dict[int, list] = {}
    last_step = 0
    for req in instance.arrivals:
        by_step.setdefault(req.step, []).append(req)
        last_step = max(last_step, req.step)
    total_steps = max(last_step + 1, (instance.meta.phases or 1) * span)

    actions: list[tuple] = []
    stored_by_site: dict[int, list[int]] = {}
    stored = 0

    def serve_site(site: int) -> None:
        nonlocal stored
        for rid in stored_by_site.pop(site, ()):  # ids ascend: stored in admit order
            actions.append(serve(rid))
            stored -= 1

    for step in range(total_steps):
        here = position(step)
        serve_site(here)
        for req in by_step.get(step, ()):
            if req.site == here:
                actions.append(ADMIT)
                actions.append(serve(req.id))
            else:
                actions.append(ADMIT)
                stored_by_site.setdefault(req.site, []).append(req.id)
                stored += 1
                if stored > buffer_capacity:
                    raise CapacityViolation(step, stored)

    serve_site(position(total_steps))
    # Anything left is off the final position (only possible on inputs not
    # produced by the generator); flush nearest-first for legality.
    here = position(total_steps)
    while stored_by_site:
        site = min(stored_by_site, key=lambda s: (abs(s - here), s))
        serve_site(site)
        here = site

    return Schedule(actions=tuple(actions), buffer_capacity=max(buffer_capacity, 1))


def _greedy_nearest(instance: Instance, buffer_capacity: int) -> Schedule:
    if buffer_capacity < 1:
        raise CapacityViolation(0, 1)
    actions: list[tuple] = []
    stored_by_site: dict[int, list[int]] = {}
    stored = 0
    server = instance.meta.start_site
    n = len(instance.arrivals)
    next_arrival = 0

    while next_arrival < n or stored:
        while next_arrival < n and stored < buffer_capacity:
            req = instance.arrivals[next_arrival]
            actions.append(ADMIT)
            stored_by_site.setdefault(req.site, []).append(req.id)
            stored += 1
            next_arrival += 1
        if not stored:
            break
        site = min(stored_by_site, key=lambda s: (abs(s - server), s))
        rid = stored_by_site[site].pop(0)
        if not stored_by_site[site]:
            del stored_by_site[site]
        actions.append(serve(rid))
        stored -= 1
        server = site

    return Schedule(actions=tuple(actions), buffer_capacity=buffer_capacity)


POLICIES = {
    "basic-trajectory": _basic_trajectory,
    "greedy-nearest": _greedy_nearest,
}


def simulate(policy: str, instance: Instance, buffer_capacity: int) -> tuple[Schedule, CostReport]:
    """Run a named policy; the returned schedule replays legally at capacity.

    Raises CapacityViolation when the policy cannot operate within
    ``buffer_capacity`` (for basic-trajectory this already happens at
    capacity ``ell - 1`` on a difficulty-``ell`` instance).
    """
    try:
        impl = POLICIES[policy]
    except KeyError:
        raise ValueError(f"unknown policy {policy!r}; have {sorted(POLICIES)}") from None
    schedule = impl(instance, buffer_capacity)
    report = replay_schedule(instance, schedule)
    return schedule, report

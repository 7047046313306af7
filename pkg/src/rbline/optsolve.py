"""Exact offline optimum for a buffer-constrained server on the line.

The search space is the canonical form of the replay semantics in core:

* arrivals at the current server site always pass straight through
  (serve on arrival at distance zero is free and never worse),
* storing only happens while there is room; with a full buffer the next
  arrival must be served on arrival (the server moves to it),
* a move to a site serves everything stored there (a later revisit could
  only cost more).

Under these reductions every transition consumes an arrival or serves at
least one request, so the state graph (next arrival, stored count per
site, server) is acyclic and small at desk scale.  Two engines traverse
it:

* ``ucs_cost`` is a uniform-cost best-first search with a duplicate table
  keyed on the state, optionally guided by the admissible
  farthest-stored-request heuristic; it stops at the first goal.
* ``optimal_cost`` computes exact cost-to-go for every reachable state
  (pure Python or the numba kernel, chosen by backend/env flag) and walks
  the table forward to emit a canonical optimal schedule: among
  cost-preserving choices it prefers admitting, then serving on arrival,
  then the stored site holding the smallest request id, which makes the
  action sequence reproducible byte for byte.

``exhaustive_oracle`` is the independent correctness reference: plain
depth-first enumeration of every legal admit/serve interleaving with no
reduction beyond the capacity rule, guarded to at most 12 requests.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from typing import Callable, Optional

from ._accel import HAVE_NUMBA, default_backend
from .core import ADMIT, CostReport, Instance, Schedule, replay_schedule, serve

_INF = 1 << 62
ORACLE_MAX_REQUESTS = 12


@dataclass(frozen=True)
class SolveLimits:
    """Resource guards for a single solve.

    ``max_seconds`` is checked between state expansions by the Python
    engines; the numba kernel bounds its work through ``max_states`` only.
    """

    max_states: int = 2_000_000
    max_seconds: float = 60.0

    def __post_init__(self):
        if self.max_states <= 0 or self.max_seconds <= 0:
            raise ValueError("limits must be positive")


class ResourceExceeded(RuntimeError):
    """Solve aborted by SolveLimits; carries the best bound found so far."""

    def __init__(self, reason: str, best_bound: Optional[int] = None, states: int = 0):
        super().__init__(reason)
        self.reason = reason
        self.best_bound = best_bound
        self.states = states
        self.optimal = False


class TooLarge(ValueError):
    """The exhaustive oracle refuses instances over its request guard."""


def fits_kernel(n_requests: int, n_sites: int, buffer_capacity: int) -> bool:
    """True when the packed int64 state encoding cannot overflow."""
    return (n_requests + 1) * n_sites * (buffer_capacity + 1) ** n_sites < (1 << 61)


def _resolve_backend(backend: Optional[str], instance: Instance, buffer_capacity: int) -> str:
    ok_encoding = fits_kernel(len(instance.arrivals), instance.n_sites, buffer_capacity)
    if backend in (None, "auto"):
        return "numba" if (HAVE_NUMBA and ok_encoding) else "python"
    if backend == "numba":
        if not HAVE_NUMBA:
            raise ValueError("numba backend unavailable (not installed or RBLINE_NO_NUMBA set)")
        if not ok_encoding:
            raise ValueError("instance too large for the packed int64 encoding")
        return backend
    if backend == "python":
        return backend
    raise ValueError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# canonical transition system (pure Python)

def _canon(i: int, server: int, sites: tuple[int, ...], n: int) -> int:
    while i < n and sites[i] == server:
        i += 1
    return i


def _start_state(instance: Instance) -> tuple[int, tuple[int, ...], int]:
    sites = tuple(r.site for r in instance.arrivals)
    start = instance.meta.start_site
    i0 = _canon(0, start, sites, len(sites))
    return (i0, (0,) * instance.n_sites, start)


def _successors(state, sites, n, cap):
    """Yield (move_cost, next_state) in a fixed deterministic order."""
    i, counts, server = state
    total = sum(counts)
    out = []
    if i < n:
        si = sites[i]
        if total < cap:
            counts2 = counts[:si] + (counts[si] + 1,) + counts[si + 1:]
            out.append((0, (_canon(i + 1, server, sites, n), counts2, server)))
        else:
            counts2 = counts[:si] + (0,) + counts[si + 1:]
            out.append((abs(si - server), (_canon(i + 1, si, sites, n), counts2, si)))
    for s, c in enumerate(counts):
        if c > 0:
            counts2 = counts[:s] + (0,) + counts[s + 1:]
            out.append((abs(s - server), (_canon(i, s, sites, n), counts2, s)))
    return out


def _is_goal(state, n) -> bool:
    i, counts, _ = state
    return i == n and not any(counts)


# ---------------------------------------------------------------------------
# engine 1: uniform-cost search by accumulated cost

def ucs_cost(
    instance: Instance,
    buffer_capacity: int,
    limits: Optional[SolveLimits] = None,
    use_heuristic: bool = False,
) -> int:
    """Optimal total cost via best-first search; cost only, Python-side.

    The duplicate table keeps the minimal accumulated cost per state; ties
    pop in insertion order, so the result is deterministic.  With
    ``use_heuristic`` the priority adds the distance to the farthest
    stored request, which is admissible and consistent here.
    """
    if buffer_capacity < 1:
        raise ValueError(f"buffer_capacity must be >= 1, got {buffer_capacity}")
    limits = limits or SolveLimits()
    sites = tuple(r.site for r in instance.arrivals)
    n = len(sites)
    start = _start_state(instance)

    def h(state) -> int:
        if not use_heuristic:
            return 0
        _, counts, server = state
        best = 0
        for s, c in enumerate(counts):
            if c > 0:
                d = abs(s - server)
                if d > best:
                    best = d
        return best

    heap: list = [(h(start), 0, 0, start)]
    best_g = {start: 0}
    settled: set = set()
    tie = 0
    expansions = 0
    t0 = time.perf_counter()

    while heap:
        f, _, g, state = heapq.heappop(heap)
        if state in settled:
            continue
        if _is_goal(state, n):
            return g
        settled.add(state)
        expansions += 1
        if expansions > limits.max_states:
            raise ResourceExceeded("max_states exceeded", best_bound=f, states=expansions)
        if expansions % 4096 == 0 and time.perf_counter() - t0 > limits.max_seconds:
            raise ResourceExceeded("max_seconds exceeded", best_bound=f, states=expansions)
        for w, nxt in _successors(state, sites, n, buffer_capacity):
            g2 = g + w
            old = best_g.get(nxt)
            if old is None or g2 < old:
                best_g[nxt] = g2
                tie += 1
                heapq.heappush(heap, (g2 + h(nxt), tie, g2, nxt))

    raise RuntimeError("search space exhausted without reaching a goal")


# ---------------------------------------------------------------------------
# engine 2: exact cost-to-go over the full reachable state graph

def _dp_python(instance: Instance, buffer_capacity: int, limits: SolveLimits):
    sites = tuple(r.site for r in instance.arrivals)
    n = len(sites)
    cap = buffer_capacity
    start = _start_state(instance)
    memo: dict = {}
    stack: list = [(start, False)]
    t0 = time.perf_counter()

    while stack:
        state, expand = stack.pop()
        if state in memo:
            continue
        if _is_goal(state, n):
            memo[state] = 0
            continue
        succs = _successors(state, sites, n, cap)
        if not expand:
            stack.append((state, True))
            for _, nxt in succs:
                if nxt not in memo:
                    stack.append((nxt, False))
        else:
            memo[state] = min(w + memo[nxt] for w, nxt in succs)
            if len(memo) > limits.max_states:
                raise ResourceExceeded("max_states exceeded", states=len(memo))
            if len(memo) % 4096 == 0 and time.perf_counter() - t0 > limits.max_seconds:
                raise ResourceExceeded("max_seconds exceeded", states=len(memo))

    return memo, start


def _dp_numba(instance: Instance, buffer_capacity: int, limits: SolveLimits):
    import numpy as np

    from ._kernels import dp_kernel

    sites_arr = np.asarray([r.site for r in instance.arrivals], dtype=np.int64)
    status, memo, _ = dp_kernel(
        sites_arr,
        instance.n_sites,
        buffer_capacity,
        instance.meta.start_site,
        limits.max_states,
    )
    if status != 0:
        raise ResourceExceeded("max_states exceeded", states=len(memo))

    n_sites = instance.n_sites
    radix = buffer_capacity + 1
    pows = [radix ** s for s in range(n_sites)]
    big_r = radix ** n_sites

    def lookup(state) -> int:
        i, counts, server = state
        pcode = 0
        for s, c in enumerate(counts):
            if c:
                pcode += c * pows[s]
        return memo[(i * n_sites + server) * big_r + pcode]

    return lookup


def _extract_schedule(instance: Instance, buffer_capacity: int, hstar: Callable) -> list[tuple]:
    """Forward walk over the cost-to-go table emitting the canonical schedule."""
    arrivals = instance.arrivals
    sites = tuple(r.site for r in arrivals)
    n = len(sites)
    cap = buffer_capacity
    actions: list[tuple] = []
    stored_ids: dict[int, list[int]] = {}

    i, counts, server = 0, [0] * instance.n_sites, instance.meta.start_site

    def pass_through(j: int, at: int) -> int:
        while j < n and sites[j] == at:
            actions.append(ADMIT)
            actions.append(serve(arrivals[j].id))
            j += 1
        return j

    def serve_stored(s: int) -> None:
        for rid in stored_ids.pop(s, ()):
            actions.append(serve(rid))
        counts[s] = 0

    i = pass_through(i, server)

    while True:
        state = (i, tuple(counts), server)
        if _is_goal(state, n):
            break
        here = hstar(state)
        total = sum(counts)

        if i < n and total < cap:
            si = sites[i]
            counts[si] += 1
            nxt = (_canon(i + 1, server, sites, n), tuple(counts), server)
            counts[si] -= 1
            if hstar(nxt) == here:
                actions.append(ADMIT)
                stored_ids.setdefault(si, []).append(arrivals[i].id)
                counts[si] += 1
                i = pass_through(i + 1, server)
                continue

        if i < n and total == cap:
            ns = sites[i]
            saved = counts[ns]
            counts[ns] = 0
            nxt = (_canon(i + 1, ns, sites, n), tuple(counts), ns)
            counts[ns] = saved
            if abs(ns - server) + hstar(nxt) == here:
                actions.append(ADMIT)
                actions.append(serve(arrivals[i].id))
                serve_stored(ns)
                server = ns
                i = pass_through(i + 1, ns)
                continue

        candidates = sorted((s for s, c in enumerate(counts) if c > 0), key=lambda s: stored_ids[s][0])
        chosen = None
        for s in candidates:
            saved = counts[s]
            counts[s] = 0
            nxt = (_canon(i, s, sites, n), tuple(counts), s)
            counts[s] = saved
            if abs(s - server) + hstar(nxt) == here:
                chosen = s
                break
        if chosen is None:
            raise RuntimeError("cost-to-go table inconsistent with transitions")
        serve_stored(chosen)
        server = chosen
        i = pass_through(i, chosen)

    return actions


def optimal_cost(
    instance: Instance,
    buffer_capacity: int,
    limits: Optional[SolveLimits] = None,
    backend: Optional[str] = None,
) -> tuple[CostReport, Schedule]:
    """Exact minimum-cost schedule at the given capacity.

    Returns the replayed cost report and the canonical optimal schedule.
    ``backend`` is "python", "numba", or None/"auto" (env default, falling
    back to Python when the packed encoding would overflow).  Raises
    ResourceExceeded when limits trip.
    """
    if buffer_capacity < 1:
        raise ValueError(f"buffer_capacity must be >= 1, got {buffer_capacity}")
    limits = limits or SolveLimits()
    chosen = _resolve_backend(backend, instance, buffer_capacity)

    if chosen == "numba":
        hstar = _dp_numba(instance, buffer_capacity, limits)
    else:
        memo, _ = _dp_python(instance, buffer_capacity, limits)
        hstar = memo.__getitem__

    actions = _extract_schedule(instance, buffer_capacity, hstar)
    schedule = Schedule(actions=tuple(actions), buffer_capacity=buffer_capacity)
    report = replay_schedule(instance, schedule)
    expected = hstar(_start_state(instance))
    if report.total_cost != expected:
        raise RuntimeError(
            f"schedule replay cost {report.total_cost} != table optimum {expected}"
        )
    return report, schedule


# ---------------------------------------------------------------------------
# independent oracle

def _oracle_python(sites: tuple[int, ...], cap: int, start: int) -> int:
    n = len(sites)

    def go(i: int, mask: int, server: int) -> int:
        if i == n and mask == 0:
            return 0
        best = _INF
        if i < n:
            if bin(mask).count("1") < cap:
                c = go(i + 1, mask | (1 << i), server)
                if c < best:
                    best = c
            else:
                c = abs(sites[i] - server) + go(i + 1, mask, sites[i])
                if c < best:
                    best = c
        m = mask
        while m:
            b = m & -m
            j = b.bit_length() - 1
            m ^= b
            c = abs(sites[j] - server) + go(i, mask ^ b, sites[j])
            if c < best:
                best = c
        return best

    return go(0, 0, start)


def exhaustive_oracle(instance: Instance, buffer_capacity: int, backend: Optional[str] = None) -> int:
    """Exact minimum by unpruned enumeration; the trust anchor for tests.

    Depth-first over every legal admit/serve interleaving: store the next
    arrival when there is room, serve it on arrival when there is not,
    serve any single stored request.  Refuses instances over
    ORACLE_MAX_REQUESTS requests.
    """
    if buffer_capacity < 1:
        raise ValueError(f"buffer_capacity must be >= 1, got {buffer_capacity}")
    n = len(instance.arrivals)
    if n > ORACLE_MAX_REQUESTS:
        raise TooLarge(f"oracle guard: {n} requests > {ORACLE_MAX_REQUESTS}")
    sites = tuple(r.site for r in instance.arrivals)
    if backend in (None, "auto"):
        backend = default_backend()
    if backend == "numba":
        if not HAVE_NUMBA:
            raise ValueError("numba backend unavailable (not installed or RBLINE_NO_NUMBA set)")
        import numpy as np

        from ._kernels import oracle_kernel

        return int(oracle_kernel(np.asarray(sites, dtype=np.int64), buffer_capacity, instance.meta.start_site))
    if backend == "python":
        return _oracle_python(sites, buffer_capacity, instance.meta.start_site)
    raise ValueError(f"unknown backend {backend!r}")

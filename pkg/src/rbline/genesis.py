"""Construction of the adversarial arrival sequences on the line.

One phase of difficulty ``ell`` spans steps ``0 .. 2**ell - 1`` over sites
``0 .. 2**ell``.  It is built from a recursive family of square blocks: the
block of rank ``q`` at offset ``s`` covers steps and sites in
``(2**q * s, 2**q * (s+1)]`` and contributes a single regular request of
rank ``q-1`` at site ``2**q * (s+1)``, step ``2**q * s`` (its top-left
corner, outside both sub-blocks).  Independently, an anchor batch of
``ell + 1`` co-located requests arrives at site ``j`` during step ``j`` for
every ``j < 2**ell``; these are what pin a small-buffer server to the
diagonal.

Multi-phase instances repeat the phase with the site numbering reversed on
odd phases, so the diagonal is continuous.  Packet scaling replaces every
request by ``beta`` consecutive copies at the same spot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import ANCHOR, Instance, Meta, REGULAR, Request


@dataclass(frozen=True)
class SeparationParams:
    """Buffer-gap parameters (ell, beta, epsilon) derived from (k, n, delta).

    ``degenerate`` marks the regime where the ratio target is a constant
    and no useful construction exists (k at least the site exponent but
    smaller than 4/delta); callers should report such rows as trivial.
    """

    ell: Optional[int]
    beta: Optional[int]
    epsilon: Optional[Fraction]
    degenerate: bool = False


def _phase_events(ell: int) -> list[tuple[int, int, str, Optional[int], Optional[int], Optional[int]]]:
    """Raw (step, site, kind, rank, anchor_j, member) tuples of one phase."""
    events = []
    for q in range(1, ell + 1):
        for s in range(2 ** (ell - q)):
            events.append((2 ** q * s, 2 ** q * (s + 1), REGULAR, q - 1, None, None))
    for j in range(2 ** ell):
        for member in range(ell + 1):
            events.append((j, j, ANCHOR, None, j, member))
    return events


def _sort_key(event) -> tuple:
    step, site, kind, rank, anchor_j, member = event
    # Within a step: increasing site, anchor members before co-sited
    # regulars, members in index order.
    return (step, site, 0 if kind == ANCHOR else 1, member if member is not None else rank)


def build_phase(ell: int) -> list[Request]:
    """Arrival list of a single phase over sites 0 .. 2**ell."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    events = sorted(_phase_events(ell), key=_sort_key)
    return [
        Request(id=i, site=site, step=step, kind=kind, rank=rank, anchor_id=anchor_j, member=member)
        for i, (step, site, kind, rank, anchor_j, member) in enumerate(events)
    ]


def build_instance(ell: int, phases: int, beta: int, n_sites: Optional[int] = None) -> Instance:
    """Full instance: ``phases`` mirrored phases, then packet scaling by beta.

    Phase t occupies steps ``[t * 2**ell, (t+1) * 2**ell)``; odd phases map
    site x to ``2**ell - x``.  Requests only ever use sites
    ``0 .. 2**ell``; a larger ``n_sites`` just leaves the rest idle.
    """
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    if phases < 1:
        raise ValueError(f"phases must be >= 1, got {phases}")
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    span = 2 ** ell
    if n_sites is None:
        n_sites = span + 1
    if n_sites < span + 1:
        raise ValueError(f"n_sites must be >= 2**ell + 1 = {span + 1}, got {n_sites}")

    base_events = _phase_events(ell)
    arrivals: list[Request] = []
    for t in range(phases):
        phase_events = []
        for step, site, kind, rank, anchor_j, member in base_events:
            if t % 2 == 1:
                site = span - site
            phase_events.append((step + t * span, site, kind, rank, anchor_j, member))
        phase_events.sort(key=_sort_key)
        for step, site, kind, rank, anchor_j, member in phase_events:
            anchor_id = None if anchor_j is None else t * span + anchor_j
            arrivals.append(
                Request(
                    id=len(arrivals),
                    site=site,
                    step=step,
                    kind=kind,
                    rank=rank,
                    anchor_id=anchor_id,
                    member=member,
                )
            )

    instance = Instance(
        n_sites=n_sites,
        arrivals=tuple(arrivals),
        meta=Meta(ell=ell, phases=phases, beta=1, start_site=0),
    )
    if beta > 1:
        instance = scale_packets(instance, beta)
    return instance


def scale_packets(instance: Instance, beta: int) -> Instance:
    """Replace every request by ``beta`` consecutive copies at its site.

    The copies of base request i share ``packet_id = i`` and keep the base
    arrival order between packets.  ``beta = 1`` is the identity apart from
    the meta field.
    """
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    if instance.meta.beta != 1:
        raise ValueError("instance is already packet-scaled")
    if beta == 1:
        return instance
    arrivals: list[Request] = []
    for base in instance.arrivals:
        for _ in range(beta):
            arrivals.append(base._replace(id=len(arrivals), packet_id=base.id))
    meta = Meta(
        ell=instance.meta.ell,
        phases=instance.meta.phases,
        beta=beta,
        start_site=instance.meta.start_site,
        epsilon=instance.meta.epsilon,
    )
    return Instance(n_sites=instance.n_sites, arrivals=tuple(arrivals), meta=meta)


def theorem1_params(k: int, n: int, delta: Fraction) -> SeparationParams:
    """Derive (ell, beta, epsilon) for a buffer-k vs buffer-(1-delta)k gap.

    ``m`` is the largest integer with ``2**m + 1 <= n``.  For ``k < m`` the
    construction fits directly (ell = k, beta = 1, epsilon = delta).
    Otherwise, when ``k >= 4/delta``, packets of size ``floor(k / ell)``
    with ``ell = ceil(m * delta / 4)`` and ``epsilon = delta / 2`` realize
    the gap; smaller k makes the target ratio a constant and is flagged
    degenerate.  All arithmetic is exact.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    delta = Fraction(delta)
    if not (0 < delta < 1):
        raise ValueError(f"delta must be in (0, 1), got {delta}")

    m = (n - 1).bit_length() - 1
    if k < m:
        return SeparationParams(ell=k, beta=1, epsilon=delta, degenerate=False)
    if Fraction(k) * delta >= 4:
        ell = math.ceil(Fraction(m) * delta / 4)
        beta = k // ell
        return SeparationParams(ell=ell, beta=beta, epsilon=delta / 2, degenerate=False)
    return SeparationParams(ell=None, beta=None, epsilon=None, degenerate=True)


def instance_from_params(params: SeparationParams, n: int, phases: int = 1) -> Instance:
    """Build the instance realizing a non-degenerate parameter triple."""
    if params.degenerate:
        raise ValueError("degenerate parameters define no instance")
    instance = build_instance(params.ell, phases, params.beta, n_sites=n)
    meta = Meta(
        ell=instance.meta.ell,
        phases=instance.meta.phases,
        beta=instance.meta.beta,
        start_site=instance.meta.start_site,
        epsilon=params.epsilon,
    )
    return Instance(n_sites=instance.n_sites, arrivals=instance.arrivals, meta=meta)

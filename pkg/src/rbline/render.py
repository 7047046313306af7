"""Space-time SVG diagrams: steps left to right, sites bottom to top.

Anchors are drawn as one square per anchor group, regular requests as
disks annotated with their rank (one per packet when packet-scaled), and
an optional schedule's trajectory as a polyline whose x axis counts the
server's moves.  The output is a plain static SVG string and is byte
deterministic for fixed inputs.
"""

from __future__ import annotations

from typing import Optional

from .core import ANCHOR, REGULAR, Instance, Schedule, replay_schedule

CELL = 28
MARGIN = 34


def _xml_escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_spacetime_svg(instance: Instance, schedule: Optional[Schedule] = None) -> str:
    n_sites = instance.n_sites
    max_site = n_sites - 1
    last_step = max((r.step for r in instance.arrivals), default=0)
    meta = instance.meta
    if meta.ell is not None and meta.phases is not None:
        total_steps = max(last_step + 1, meta.phases * 2 ** meta.ell)
    else:
        total_steps = last_step + 1

    def x(t) -> float:
        return MARGIN + t * CELL

    def y(site) -> float:
        return MARGIN + (max_site - site) * CELL

    width = 2 * MARGIN + total_steps * CELL
    height = 2 * MARGIN + max_site * CELL
    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    out.append(
        "<style>"
        ".grid{stroke:#bbb;stroke-width:0.6;stroke-dasharray:2 3}"
        ".phase{stroke:#444;stroke-width:1;stroke-dasharray:6 4}"
        ".anchor{fill:#1f4e79}"
        ".regular{fill:#c0392b}"
        ".generic{fill:#7f8c8d}"
        ".rank{font:9px sans-serif;fill:#fff;text-anchor:middle}"
        ".axis{font:10px sans-serif;fill:#333}"
        ".trajectory{fill:none;stroke:#111;stroke-width:2.4}"
        "</style>"
    )

    for site in range(n_sites):
        out.append(
            f'<line class="grid" x1="{x(0)}" y1="{y(site)}" x2="{x(total_steps)}" y2="{y(site)}"/>'
        )
        out.append(f'<text class="axis" x="4" y="{y(site) + 3}">{site}</text>')
    for t in range(total_steps + 1):
        out.append(
            f'<line class="grid" x1="{x(t)}" y1="{y(max_site)}" x2="{x(t)}" y2="{y(0)}"/>'
        )
        out.append(f'<text class="axis" x="{x(t) - 3}" y="{height - 8}">{t}</text>')
    if meta.ell is not None and meta.phases is not None:
        span = 2 ** meta.ell
        for t in range(0, total_steps + 1, span):
            out.append(
                f'<line class="phase" x1="{x(t)}" y1="{y(max_site)}" x2="{x(t)}" y2="{y(0)}"/>'
            )

    # one glyph per anchor group / per packet
    seen_anchor = set()
    seen_packet = set()
    side = CELL * 0.42
    for r in instance.arrivals:
        if r.kind == ANCHOR:
            key = r.anchor_id if r.anchor_id is not None else ("pos", r.site, r.step)
            if key in seen_anchor:
                continue
            seen_anchor.add(key)
            cx, cy = x(r.step) + CELL * 0.5, y(r.site)
            out.append(
                f'<rect class="anchor" x="{cx - side / 2:.1f}" y="{cy - side / 2:.1f}" '
                f'width="{side:.1f}" height="{side:.1f}"/>'
            )
        else:
            if r.packet_id is not None:
                if r.packet_id in seen_packet:
                    continue
                seen_packet.add(r.packet_id)
            cx, cy = x(r.step) + CELL * 0.5, y(r.site)
            if r.kind == REGULAR:
                out.append(f'<circle class="regular" cx="{cx:.1f}" cy="{cy:.1f}" r="{CELL * 0.24:.1f}"/>')
                out.append(f'<text class="rank" x="{cx:.1f}" y="{cy + 3:.1f}">{r.rank}</text>')
            else:
                out.append(f'<circle class="generic" cx="{cx:.1f}" cy="{cy:.1f}" r="{CELL * 0.16:.1f}"/>')

    if schedule is not None:
        report = replay_schedule(instance, schedule)
        points = " ".join(f"{x(i):.1f},{y(site):.1f}" for i, site in enumerate(report.trajectory))
        out.append(f'<polyline class="trajectory" points="{points}"/>')

    out.append("</svg>")
    return "\n".join(out) + "\n"

"""Instance / schedule JSON documents and CSV output.

One instance per JSON file:

    {"format_version": 1,
     "n_sites": 5,
     "meta": {"ell": 2, "phases": 1, "beta": 1, "start_site": 0},
     "arrivals": [{"id": 0, "step": 0, "site": 0, "kind": "anchor",
                   "anchor_id": 0, "member": 0}, ...]}

The arrivals array is the canonical order; unknown fields are rejected.
``meta.epsilon`` is optional (exact rational as a "p/q" string, written by
theorem-1 derived generation).  Writes are atomic: temp file in the target
directory, then rename.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .core import KINDS, Instance, Meta, Request, Schedule

FORMAT_VERSION = 1

_META_KEYS = {"ell", "phases", "beta", "start_site", "epsilon"}
_ARRIVAL_KEYS = {"id", "step", "site", "kind", "rank", "anchor_id", "member", "packet_id"}
_TOP_KEYS = {"format_version", "n_sites", "meta", "arrivals"}


class FormatError(ValueError):
    pass


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def instance_to_dict(instance: Instance) -> dict:
    meta: dict = {
        "ell": instance.meta.ell,
        "phases": instance.meta.phases,
        "beta": instance.meta.beta,
        "start_site": instance.meta.start_site,
    }
    if instance.meta.epsilon is not None:
        eps = Fraction(instance.meta.epsilon)
        meta["epsilon"] = f"{eps.numerator}/{eps.denominator}"
    arrivals = []
    for r in instance.arrivals:
        row = {"id": r.id, "step": r.step, "site": r.site, "kind": r.kind}
        for key in ("rank", "anchor_id", "member", "packet_id"):
            val = getattr(r, key)
            if val is not None:
                row[key] = val
        arrivals.append(row)
    return {
        "format_version": FORMAT_VERSION,
        "n_sites": instance.n_sites,
        "meta": meta,
        "arrivals": arrivals,
    }


def instance_from_dict(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise FormatError("instance document must be an object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise FormatError(f"unknown top-level fields: {sorted(unknown)}")
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {doc.get('format_version')!r}")
    meta_doc = doc.get("meta", {})
    unknown = set(meta_doc) - _META_KEYS
    if unknown:
        raise FormatError(f"unknown meta fields: {sorted(unknown)}")
    epsilon = meta_doc.get("epsilon")
    meta = Meta(
        ell=meta_doc.get("ell"),
        phases=meta_doc.get("phases"),
        beta=meta_doc.get("beta", 1),
        start_site=meta_doc.get("start_site", 0),
        epsilon=None if epsilon is None else Fraction(epsilon),
    )
    arrivals = []
    for row in doc.get("arrivals", []):
        unknown = set(row) - _ARRIVAL_KEYS
        if unknown:
            raise FormatError(f"unknown arrival fields: {sorted(unknown)}")
        try:
            kind = row["kind"]
            if kind not in KINDS:
                raise FormatError(f"unknown request kind {kind!r}")
            arrivals.append(
                Request(
                    id=row["id"],
                    site=row["site"],
                    step=row["step"],
                    kind=kind,
                    rank=row.get("rank"),
                    anchor_id=row.get("anchor_id"),
                    member=row.get("member"),
                    packet_id=row.get("packet_id"),
                )
            )
        except KeyError as exc:
            raise FormatError(f"arrival missing field {exc}") from None
    return Instance(n_sites=doc["n_sites"], arrivals=tuple(arrivals), meta=meta)


def write_instance(path, instance: Instance) -> None:
    atomic_write_text(path, json.dumps(instance_to_dict(instance), indent=1) + "\n")


def read_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def schedule_to_dict(schedule: Schedule) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "buffer_capacity": schedule.buffer_capacity,
        "actions": [list(a) for a in schedule.actions],
    }


def schedule_from_dict(doc: dict) -> Schedule:
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {doc.get('format_version')!r}")
    unknown = set(doc) - {"format_version", "buffer_capacity", "actions"}
    if unknown:
        raise FormatError(f"unknown schedule fields: {sorted(unknown)}")
    actions = []
    for item in doc["actions"]:
        if item == ["admit"]:
            actions.append(("admit",))
        elif len(item) == 2 and item[0] == "serve":
            actions.append(("serve", item[1]))
        else:
            raise FormatError(f"unknown action {item!r}")
    return Schedule(actions=tuple(actions), buffer_capacity=doc["buffer_capacity"])


def write_schedule(path, schedule: Schedule) -> None:
    atomic_write_text(path, json.dumps(schedule_to_dict(schedule)) + "\n")


def read_schedule(path) -> Schedule:
    with open(path, encoding="utf-8") as fh:
        return schedule_from_dict(json.load(fh))


def write_csv(path, header: list[str], rows: Iterable[dict], stream=None) -> None:
    """Write rows (dicts keyed by header) deterministically; atomic on disk."""
    import io

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    if stream is not None:
        stream.write(buf.getvalue())
    else:
        atomic_write_text(path, buf.getvalue())

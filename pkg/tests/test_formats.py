import json
from fractions import Fraction

import pytest

from rbline.core import ADMIT, Schedule, serve
from rbline.formats import (
    FormatError,
    instance_from_dict,
    instance_to_dict,
    read_instance,
    read_schedule,
    schedule_from_dict,
    write_csv,
    write_instance,
    write_schedule,
)
from rbline.genesis import build_instance, instance_from_params, theorem1_params

from conftest import make_instance


def test_instance_round_trip(tmp_path):
    for inst in (
        build_instance(2, 2, 1),
        build_instance(1, 1, 3),
        make_instance([4, 0, 2], start=3),
        instance_from_params(theorem1_params(8, 17, Fraction(1, 2)), 17),
    ):
        path = tmp_path / "inst.json"
        write_instance(path, inst)
        assert read_instance(path) == inst


def test_write_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    write_instance(a, build_instance(2, 1, 1))
    write_instance(b, build_instance(2, 1, 1))
    assert a.read_bytes() == b.read_bytes()


def test_epsilon_serialized_as_rational_string():
    inst = instance_from_params(theorem1_params(8, 17, Fraction(1, 2)), 17)
    doc = instance_to_dict(inst)
    assert doc["meta"]["epsilon"] == "1/4"
    assert instance_from_dict(doc).meta.epsilon == Fraction(1, 4)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(extra=1),
        lambda d: d["meta"].update(color="red"),
        lambda d: d["arrivals"][0].update(priority=3),
        lambda d: d.update(format_version=2),
        lambda d: d["arrivals"][0].update(kind="mystery"),
        lambda d: d["arrivals"][0].pop("site"),
    ],
)
def test_reader_rejects_malformed_documents(mutate):
    doc = instance_to_dict(build_instance(1, 1, 1))
    mutate(doc)
    with pytest.raises(FormatError):
        instance_from_dict(doc)


def test_schedule_round_trip(tmp_path):
    sched = Schedule((ADMIT, ADMIT, serve(1), serve(0)), 2)
    path = tmp_path / "sched.json"
    write_schedule(path, sched)
    assert read_schedule(path) == sched
    raw = json.loads(path.read_text())
    assert raw["actions"] == [["admit"], ["admit"], ["serve", 1], ["serve", 0]]


def test_schedule_rejects_unknown_action():
    with pytest.raises(FormatError):
        schedule_from_dict({"format_version": 1, "buffer_capacity": 1, "actions": [["move", 3]]})


def test_csv_deterministic_bytes(tmp_path):
    rows = [{"a": 1, "b": "x"}, {"a": 2, "b": "y"}]
    p1, p2 = tmp_path / "1.csv", tmp_path / "2.csv"
    write_csv(p1, ["a", "b"], rows)
    write_csv(p2, ["a", "b"], rows)
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text() == "a,b\n1,x\n2,y\n"


def test_no_temp_files_left(tmp_path):
    write_instance(tmp_path / "x.json", build_instance(1, 1, 1))
    assert [p.name for p in tmp_path.iterdir()] == ["x.json"]

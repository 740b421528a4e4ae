import json
from math import ceil

import pytest

from gapfield.counting import ModInstance
from gapfield.errors import UsageError
from gapfield.exact import primes_between
from gapfield.gap import Gap
from gapfield.io import (
    digest,
    dumps,
    format_set,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    load_system,
    parse_set_text,
)
from gapfield.sweep import SweepJob, run_sweep, sweep_prime


def test_canonical_json():
    assert dumps({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert digest({"a": 1, "b": 2}) == digest({"b": 2, "a": 1})


def test_instance_roundtrip(tmp_path):
    inst = ModInstance(Gap(0, (1,), ((1, 4),), 101), Gap(2, (3, 5), ((0, 1), (-1, 1)), 101), 4, "kloosterman")
    d = instance_to_dict(inst)
    assert instance_from_dict(d) == inst
    f = tmp_path / "i.json"
    f.write_text(json.dumps(d))
    assert load_instance(f) == inst
    for bad in ({"p": 101}, {**d, "kind": "nope"}, {**d, "p": 103}):
        with pytest.raises(UsageError):
            instance_from_dict(bad)
    f.write_text("[1, 2]")
    with pytest.raises(UsageError):
        load_instance(f)


def test_system_file(tmp_path):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"d": 1, "e": 1, "H": 3, "anchor": {"h0": [1], "j0": [1]}, "K": [{"h": [2], "j": [3]}]}))
    s = load_system(f)
    assert s.rows == ((-2, -1, -5),)
    f.write_text(json.dumps({"d": 1, "e": 1, "anchor": {"h0": [1]}, "K": []}))
    with pytest.raises(UsageError):
        load_system(f)


def test_set_file():
    s = parse_set_text("p=11\n# comment\n1\n12\n3\n\n")
    assert s.p == 11 and s.elements == (1, 3)
    assert parse_set_text(format_set(s)) == s
    for bad in ("1\n2\n", "p=11\nx\n"):
        with pytest.raises(UsageError):
            parse_set_text(bad)


def job(**kw):
    base = {"primes": {"lo": 40, "hi": 100}, "A": "F{p}:0|1|-10..10"}
    return SweepJob.from_dict({**base, **kw})


def test_sweep_rows_match_pigeonhole_bound():
    j = job()
    rows, summary = run_sweep(j)
    assert [r["p"] for r in rows] == primes_between(40, 100)
    for r in rows:
        assert r["nonzero_pairs"] == 400
        assert r["count"] >= ceil(400 / (r["p"] - 1)) >= 400 / r["p"] - 1
    assert summary["primes"] == len(rows)
    assert sum(summary["count_histogram"].values()) == len(rows)


def test_sweep_policies_and_validation():
    j = job(**{"lambda": 4})
    assert all(r["lambda"] == 4 for r in run_sweep(j)[0])
    r1 = run_sweep(job(**{"lambda": "random"}, seed=5))[0]
    r2 = run_sweep(job(**{"lambda": "random"}, seed=5))[0]
    assert r1 == r2
    assert sweep_prime(53, job(kind="kloosterman"))["count"] >= 1
    rows, summary = run_sweep(job(primes=[]))
    assert rows == [] and summary["exceedance_fraction"] is None
    assert job(primes=[97, 89, 97]).primes == (89, 97)
    for bad in ({"primes": [91]}, {"A": "F101:0|1|1..3"}, {"kind": "x"}, {"lambda": "best"}, {"primes": "1..9"}):
        with pytest.raises(UsageError):
            job(**bad)


def test_sweep_width_independent():
    j = job()
    assert run_sweep(j, 1) == run_sweep(j, 3)

import json
import subprocess
import sys

import pytest

from gapfield.bilinear.moduli import z_de
from gapfield.bilinear.variety import exceptional_report
from gapfield.cli import main
from gapfield.counting import count_modp
from gapfield.gap import parse_gap
from gapfield.io import load_instance, load_system
from gapfield.reduction import reduce_chain, reduce_once
from gapfield.sumproduct import analyze

COUNT = ["count", "--p", "101", "--lambda", "4", "--kind", "product", "--gap-a", "F101:0|1|1..4", "--gap-b", "F101:0|1|1..4"]


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, [json.loads(line) for line in out.splitlines() if line.startswith("{")], err


def test_count_example(capsys):
    code, recs, _ = run(capsys, COUNT)
    assert code == 0 and recs[0]["result"]["count"] == 3
    assert recs[0]["op"] == "count" and recs[0]["schema"] == 1 and recs[0]["elapsed"] is None
    _, naive, _ = run(capsys, COUNT + ["--algo", "naive"])
    assert naive[0]["result"]["count"] == 3


def test_count_usage_errors(capsys):
    code, recs, err = run(capsys, COUNT[:5])
    assert code == 1 and not recs and "usage" in err
    code, _, err = run(capsys, ["count", "--bogus"])
    assert code == 1 and "usage" in err
    code, _, _ = run(capsys, COUNT[:-1] + ["F101:0|1|1..4..5"])
    assert code == 1
    code, _, _ = run(capsys, [])
    assert code == 1


def test_count_via_reduction(capsys):
    args = ["count", "--p", "103", "--lambda", "4", "--kind", "squares", "--gap-a", "F103:0|1|1..4", "--gap-b", "F103:0|1|1..4"]
    code, _, err = run(capsys, args + ["--via-reduction"])
    assert code == 2 and "unsupported" in err
    code, recs, _ = run(capsys, args)
    assert code == 0
    args = ["count", "--p", "7", "--lambda", "1", "--kind", "kloosterman", "--gap-a", "F7:0|1|1..6", "--gap-b", "F7:0|1|1..6"]
    _, recs, _ = run(capsys, args + ["--via-reduction"])
    assert recs[0]["result"]["count"] == 5


def test_instance_file_and_thin_driver(capsys, tmp_path):
    f = tmp_path / "i.json"
    f.write_text(json.dumps({"p": 10007, "lambda": 15, "kind": "product", "A": "F10007:0|1,2|1..4,1..4", "B": "F10007:0|1|1..6"}))
    inst = load_instance(f)
    _, recs, _ = run(capsys, ["count", "--instance", str(f)])
    assert recs[0]["result"] == count_modp(inst).payload()
    _, recs, _ = run(capsys, ["reduce", "--instance", str(f)])
    assert recs[0]["result"] == json.loads(json.dumps(reduce_once(inst).payload()))
    _, recs, _ = run(capsys, ["chain", "--instance", str(f)])
    assert recs[0]["result"] == json.loads(json.dumps(reduce_chain(inst).payload()))


def test_bounds(capsys):
    _, recs, _ = run(capsys, ["bounds", "--what", "gamma", "--s", "3"])
    assert recs[0]["result"]["value"] == "1/786432"
    _, recs, _ = run(capsys, ["bounds", "--what", "delta", "--K", "2"])
    assert recs[0]["result"]["value"] == "1/489626271744"
    main(["bounds", "--what", "gamma", "--s", "3", "--plain"])
    assert capsys.readouterr().out == "1/786432\n"
    code, _, err = run(capsys, ["bounds", "--what", "doss", "--n", "1"])
    assert code == 1 and "--r" in err
    _, recs, _ = run(capsys, ["bounds", "--what", "doss", "--n", "1", "--r", "2", "--count", "1", "--h", "0"])
    assert recs[0]["result"]["value"].startswith("13014.247")
    _, recs, _ = run(capsys, ["bounds", "--what", "regime", "--size", "100", "--K", "2", "--p", "10007"])
    assert recs[0]["result"]["value"]["exception_exponent"] == 80


def test_zde(capsys):
    code, recs, _ = run(capsys, ["zde", "--d", "1", "--e", "1", "--H", "1", "--full"])
    res = recs[0]["result"]
    assert code == 0 and res["all_small_primes_divide"] is True
    assert res == json.loads(json.dumps(z_de(1, 1, 1).payload()))
    code, _, _ = run(capsys, ["zde", "--d", "1", "--e", "2", "--H", "1", "--full"])
    assert code == 2
    cfg = {"caps": {"triples": 50}}
    code, recs, err = run(capsys, ["zde", "--d", "1", "--e", "1", "--H", "1"] + ["--config", _write(cfg)])
    assert code == 2 and recs[0]["result"]["z1"]["truncated"] is True and "capped" in err


def _write(obj):
    import tempfile

    fh = tempfile.NamedTemporaryFile("w", suffix=".json", delete=False)
    json.dump(obj, fh)
    fh.close()
    return fh.name


def test_exceptional(capsys):
    path = _write({"d": 1, "e": 1, "H": 5, "anchor": {"h0": [1], "j0": [1]}, "K": [{"h": [2], "j": [3]}, {"h": [2], "j": [5]}]})
    code, recs, _ = run(capsys, ["exceptional", "--system", path, "--limit", "1000", "--sweep", "--witness"])
    res = recs[0]["result"]
    assert code == 0 and res["exceptional_primes"] == [2] and res["sweep_agrees"] and res["within_bound"]
    assert res["witness"] == {"rho": ["-2", "1"], "tau": ["-1", "1"]}
    expected = exceptional_report(load_system(path), 1000, True).payload()
    assert {k: v for k, v in res.items() if k != "witness"} == json.loads(json.dumps(expected))


def test_sumproduct(capsys, tmp_path):
    f = tmp_path / "s.txt"
    f.write_text("p=10007\n" + "\n".join(map(str, range(1, 17))) + "\n")
    _, recs, _ = run(capsys, ["sumproduct", "--set", str(f), "--K", "2"])
    assert recs[0]["result"]["max_r"] == 6 and recs[0]["result"]["regime"]["exception_exponent"] == 80
    _, recs, _ = run(capsys, ["sumproduct", "--gap", "F10007:0|1|1..16"])
    assert recs[0]["result"] == json.loads(json.dumps(analyze(parse_gap("F10007:0|1|1..16").enumerate()).payload()))
    code, recs, _ = run(capsys, ["sumproduct", "--generate", "ap", "--size", "50", "--p", "10007", "--seed", "2"])
    assert code == 0 and recs[0]["seed"] == 2
    code, _, _ = run(capsys, ["sumproduct"])
    assert code == 1


def test_pigeonhole(capsys):
    _, recs, _ = run(capsys, ["pigeonhole", "--H", "10", "--p", "23"])
    assert recs[0]["result"]["count"] >= 19
    _, recs, _ = run(capsys, ["pigeonhole", "--H", "10", "--p-range", "40:60"])
    assert [r["params"]["p"] for r in recs] == [41, 43, 47, 53, 59]


def test_sweep_cli(capsys, tmp_path):
    argv = ["sweep", "--primes", "100:150", "--template-a", "F{p}:0|1|-10..10"]
    code, recs, _ = run(capsys, argv + ["--csv", str(tmp_path / "t.csv")])
    assert code == 0 and recs[-1]["op"] == "sweep.summary" and len(recs) == 11
    assert (tmp_path / "t.csv").read_text().splitlines()[0].startswith("p,size_a")
    code, recs, _ = run(capsys, ["sweep", "--primes", "10:10", "--template-a", "F{p}:0|1|1..3"])
    assert code == 0 and len(recs) == 1 and recs[0]["result"]["primes"] == 0
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, _ = run(capsys, ["sweep", "--job", str(bad)])
    assert code == 1


def test_timing_flag(capsys):
    _, recs, _ = run(capsys, COUNT + ["--timing"])
    assert isinstance(recs[0]["elapsed"], float)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "gapfield", "bounds", "--what", "cs-rank", "--K", "2", "--plain"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout == "4\n"


@pytest.mark.parametrize("code_env", ["1", "4"])
def test_sweep_env_width(capsys, monkeypatch, code_env):
    monkeypatch.setenv("GAPFIELD_THREADS", code_env)
    argv = ["sweep", "--primes", "40:100", "--template-a", "F{p}:0|1|-10..10"]
    main(argv)
    a = capsys.readouterr().out
    monkeypatch.delenv("GAPFIELD_THREADS")
    main(argv)
    assert capsys.readouterr().out == a

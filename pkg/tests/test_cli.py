import json
import subprocess
import sys

import pytest

from ergodic_lab.cli import main
from ergodic_lab.measure import from_json, to_json
from ergodic_lab.operators import operator_from_json

SHIFT = '{"op":"shift","h":"1"}'
CHI = '{"pieces":[["0","1","1"]],"tail":"0"}'
SWAP = '{"op":"kernel","matrix":[["0","1"],["1","0"]]}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_diverge_continuous(capsys):
    code, out, _ = run(capsys, "diverge", "--kind", "continuous", "--n", "1,2,4")
    lines = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and len(lines) == 3
    assert all(l["l1_difference"] == "1" for l in lines)


def test_diverge_sequence(capsys):
    code, out, _ = run(capsys, "diverge", "--kind", "sequence", "--n", "1,32")
    assert code == 0 and [json.loads(l)["l1_difference"] for l in out.splitlines()] == ["1", "1"]


def test_norm_unit_indicator(capsys):
    code, out, _ = run(capsys, "norm", "--space", '{"space":"l1plusLinf"}', "--f",
                       '{"pieces":[[0,"1","1"]],"tail":"0"}')
    assert code == 0 and out.strip() == "1"


def test_norm_json_decimal(capsys):
    code, out, _ = run(capsys, "norm", "--json", "--space", '{"space":"lp","p":"2"}',
                       "--f", '{"pieces":[[0,"2","1"]]}')
    d = json.loads(out)
    assert d["exact"] is False and d["decimal"] == "1.41421356237"


def test_met(capsys):
    code, out, _ = run(capsys, "met", "--space", '{"space":"lp","p":"3/2"}')
    d = json.loads(out)
    assert code == 0 and d["met"] is True and d["alpha"] == "0" and d["order_continuous"] is True
    code, _, _ = run(capsys, "met", "--space", '{"space":"l1"}')
    assert code == 2
    code, out, _ = run(capsys, "met", "--space",
                       '{"space":"orlicz","Phi":{"family":"shifted_power","u0":"1","p":"2"}}')
    assert code in (2, 3) and json.loads(out)["contains_one"] is True


def test_rearrange_round_trip(capsys):
    f = '{"pieces":[["1","3","2"],["5","6","1"]],"tail":"0"}'
    code, out, _ = run(capsys, "rearrange", "--f", f)
    g = json.loads(out)
    assert code == 0 and g == {"pieces": [["0", "2", "2"], ["2", "3", "1"]], "tail": "0"}
    assert to_json(from_json(g)) == g


def test_average_and_maximal(capsys):
    code, out, _ = run(capsys, "average", "--op", SHIFT, "--f", CHI, "--n", "4")
    assert json.loads(out) == {"pieces": [["0", "4", "1/4"]], "tail": "0"}
    code, out, _ = run(capsys, "maximal", "--op", SHIFT, "--f", CHI, "--N", "2")
    assert json.loads(out) == {"pieces": [["0", "1", "1"], ["1", "2", "1/2"]], "tail": "0"}


def test_ds_check(capsys):
    code, out, _ = run(capsys, "ds-check", "--op", SWAP)
    cert = json.loads(out)
    assert code == 0 and cert["verdict"] == "pass"
    assert operator_from_json(cert["inputs"]["operator"]).to_json() == cert["inputs"]["operator"]
    code, out, _ = run(capsys, "ds-check", "--op", '{"op":"kernel","matrix":[["3/2"]]}')
    assert code == 2 and json.loads(out)["measured"]["witness_row"] == 0


def test_hopf_and_maxineq(capsys):
    code, _, _ = run(capsys, "hopf", "--op", SWAP, "--f", '{"entries":["1","-2"]}')
    assert code == 0
    code, _, _ = run(capsys, "hopf", "--count", "5", "--seed", "3")
    assert code == 0
    code, _, _ = run(capsys, "maxineq", "--op", SHIFT, "--f", CHI, "--lambdas", "1/4,1/2")
    assert code == 0


def test_egorov(capsys):
    code, out, _ = run(capsys, "egorov", "--op", SHIFT, "--f", CHI, "--eps", "1/8")
    assert code == 0 and json.loads(out)["measured"]["exceptional_set"] == []


def test_decay_contrast_and_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "decay", "--op", SHIFT, "--f", CHI,
                       "--space", '{"space":"l1plusLinf"}', "--out", str(tmp_path))
    assert code == 0
    csv = (tmp_path / "decay.csv").read_text().splitlines()
    assert csv[0] == "n,d_n" and csv[-1] == "1024,1/1024"
    code, _, _ = run(capsys, "decay", "--op", SHIFT, "--f", CHI, "--space", '{"space":"l1"}')
    assert code == 2


def test_decay_unconverged(capsys):
    K = '{"op":"kernel","matrix":[["1/2","1/4"],["1/4","1/2"]]}'
    code, _, _ = run(capsys, "decay", "--op", K, "--f", '{"entries":["1","1"]}',
                     "--space", '{"space":"l1"}')
    assert code == 3


def test_errors(capsys):
    code, _, err = run(capsys, "norm", "--space", '{"space":', "--f", CHI)
    assert code == 1 and "line 1 column" in err
    code, _, err = run(capsys, "hopf", "--op", '{"op":"kernel","matrix":[["1/2","-1/2"],["0","1"]]}',
                       "--f", '{"entries":["1","1"]}')
    assert code == 1 and "precondition" in err
    code, _, err = run(capsys, "norm", "--space", '{"space":"lp","p":"2","q":1}', "--f", CHI)
    assert code == 1 and "q" in err
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 1


SUITE = {
    "seed": 5,
    "jobs": [
        {"id": "b-hopf", "experiment": "hopf", "count": 8},
        {"id": "a-div", "experiment": "diverge", "kind": "sequence", "n": [1, 2]},
        {"id": "c-decay", "experiment": "decay", "operator": {"op": "shift", "h": "1"},
         "f": {"pieces": [["0", "1", "1"]]}, "space": {"space": "l1plusLinf"}, "n": [1, 2, 4],
         "tol": "1/2"},
        {"id": "d-max", "experiment": "maxineq", "count": 4, "N": 8},
    ],
}


def test_suite_ordering_and_determinism(capsys, tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text(json.dumps(SUITE))
    outs = []
    for jobs in ("1", "4"):
        d = tmp_path / f"out{jobs}"
        code, out, _ = run(capsys, "suite", "--config", str(cfg), "--jobs", jobs, "--out", str(d))
        assert code == 0
        outs.append((d / "certificates.jsonl").read_bytes())
        assert (d / "decay_c-decay.csv").read_text().startswith("n,d_n\n1,1\n")
    assert outs[0] == outs[1]
    ids = [json.loads(l)["inputs"]["job_id"] for l in outs[0].decode().splitlines()]
    assert ids == ["a-div", "b-hopf", "c-decay", "d-max"]


def test_suite_rejects_unknown_fields(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"jobs": [{"experiment": "hopf", "colour": 1}]}))
    code, _, err = run(capsys, "suite", "--config", str(cfg))
    assert code == 1 and "colour" in err


def test_certificate_lines_round_trip(capsys):
    code, out, _ = run(capsys, "hopf", "--count", "3", "--seed", "1")
    line = out.strip()
    assert json.dumps(json.loads(line), sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False) == line


def test_env_seed_fallback():
    def go(env):
        r = subprocess.run([sys.executable, "-m", "ergodic_lab", "hopf", "--count", "3"],
                           capture_output=True, text=True, env=env)
        assert r.returncode == 0, r.stderr
        return json.loads(r.stdout)

    import os
    base = dict(os.environ)
    a = go(dict(base, ERGODIC_LAB_SEED="42"))
    b = go(dict(base, ERGODIC_LAB_SEED="42"))
    assert a == b and a["seed"] == 42

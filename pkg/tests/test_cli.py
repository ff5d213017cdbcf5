import io
import json

import pytest

from smoothrep.cli import run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, [json.loads(line) for line in out.getvalue().splitlines() if line.startswith("{")], out.getvalue()


def test_represent_exceptional_class():
    code, lines, _ = call("represent", "-p", "5", "-a", "4")
    assert code == 1
    assert lines[0]["error"] == "NotRepresentable"


def test_represent_ok():
    code, lines, _ = call("represent", "-p", "11", "-a", "4")
    assert code == 0
    assert lines[0] == {"p": "11", "a": "4", "primes": ["3", "5"], "value": "15"}
    code, lines, _ = call("represent", "-p", "10007", "-a", "4", "--method", "chain")
    assert code == 0 and int(lines[0]["value"]) % 10007 == 4


def test_gen_d1():
    code, lines, _ = call("gen", "d1", "--steps", "10")
    assert code == 0
    assert [int(x["prime"]) for x in lines] == [2, 3, 7, 5, 11, 13, 17, 19, 23, 29]


def test_gen_checkpoint_resume(tmp_path):
    ck = tmp_path / "run.jsonl"
    assert call("gen", "dnd", "--steps", "6", "--checkpoint", str(ck))[0] == 0
    code, lines, _ = call("gen", "dnd", "--steps", "9", "--checkpoint", str(ck))
    assert code == 0
    assert [x["index"] for x in lines] == ["7", "8", "9"]
    assert len(ck.read_text().splitlines()) == 9
    full = call("gen", "dnd", "--steps", "9")[1]
    assert [x["prime"] for x in full[6:]] == [x["prime"] for x in lines]


def test_gen_corrupt_checkpoint(tmp_path):
    ck = tmp_path / "bad.jsonl"
    ck.write_text('{"rule":"d_plus_one","prime":"11","certificate":{"d":"1","subset":[],"mode":"literal"}}\n')
    assert call("gen", "d1", "--steps", "3", "--checkpoint", str(ck))[0] == 1


def test_gen_budget_exit_code(monkeypatch):
    import smoothrep.generators as gen
    from smoothrep.errors import FactorBudgetExceeded

    def stall(*a, **k):
        raise FactorBudgetExceeded(None, 91)

    monkeypatch.setattr(gen, "_mullin_record", stall)
    code, lines, _ = call("gen", "mullin", "--steps", "3")
    assert code == 3 and lines[-1]["error"] == "FactorBudgetExceeded"


def test_verify_small():
    code, lines, _ = call("verify", "--from", "2", "--to", "10", "--threads", "1")
    assert code == 0
    assert [(x["p"], x["status"]) for x in lines] == [("2", "pass"), ("3", "pass"), ("5", "exception"), ("7", "exception")]


def test_verify_thread_independent():
    a = call("verify", "--from", "9900", "--to", "10100", "--threads", "1")[2]
    b = call("verify", "--from", "9900", "--to", "10100", "--threads", "2")[2]
    assert a == b


def test_deterministic_output():
    a = call("gen", "mullin", "--steps", "9", "--seed", "4")[2]
    b = call("gen", "mullin", "--steps", "9", "--seed", "4")[2]
    assert a == b


def test_chain_command():
    code, lines, _ = call("chain", "-p", "10007")
    assert code == 0 and lines[0]["valid"] is True and len(lines[0]["pairs"]) == 14
    assert call("chain", "-p", "11")[0] == 3


def test_mp_yp_csv():
    _, _, text = call("mp", "--from", "2", "--to", "13", "--csv")
    assert text.splitlines() == ["p,M(p),M(p)/p", "2,2,1.000000", "3,3,1.000000", "11,42,3.818182", "13,77,5.923077"]
    _, _, text = call("yp", "--from", "3", "--to", "11", "--csv")
    assert text.splitlines() == ["p,y(p)", "3,2", "5,7", "7,11", "11,7"]
    code, lines, _ = call("mp", "-p", "11")
    assert code == 0 and lines == [{"p": "11", "M": "42", "ratio": "3.818182"}]


def test_check_commands():
    code, lines, _ = call("check", "density", "--limit", "1000")
    assert code == 0 and lines[0]["ok"]
    code, lines, _ = call("check", "omega", "--limit", "1000")
    assert code == 0 and lines[0]["ok"]
    code, lines, _ = call("check", "pv", "-p", "101", "-d", "4")
    assert code == 0 and lines[0]["ok"]


def test_usage_errors(capsys):
    assert run(["bogus"]) == 2
    assert run(["represent", "-p", "5"]) == 2
    assert run(["verify", "--from", "10", "--to", "5"]) == 2
    assert run(["mp"]) == 2
    assert "usage" in capsys.readouterr().err

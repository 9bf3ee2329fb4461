import json

import pytest

from psi.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(autouse=True)
def _no_color(monkeypatch):
    monkeypatch.setenv("PSI_COLOR", "0")


def test_parse_prints_canonical_form(capsys):
    code, out, _ = run(capsys, "parse", "a!b.0|0")
    assert code == 0 and out.strip() == "a!b.0 | 0"


def test_syntax_error_exits_2(capsys):
    code, _, err = run(capsys, "parse", "a!b.")
    assert code == 2 and "agent expected" in err


def test_bad_argument_exits_2(capsys):
    code, _, _ = run(capsys, "step", "--max-depth", "0", "0")
    assert code == 2


def test_step_under_fusion(capsys):
    code, out, _ = run(capsys, "step", "--instance", "fusion", "(new a)(a!n.0 | (|{a=b}|))")
    assert code == 0 and "b!n" in out and "a!n" not in out


def test_step_json(capsys):
    code, out, _ = run(capsys, "step", "--format", "json", r"a!b.0 | a?(\x)x.0")
    data = json.loads(out)
    assert code == 0 and {"tau", "a!b"} <= {t["label"] for t in data}


def test_step_strict_hits_bound(capsys):
    code, _, _ = run(capsys, "step", "--strict", "--rep-bound", "1", "!a!b.0")
    assert code == 3


def test_trace(capsys):
    code, out, _ = run(capsys, "trace", r"a!b.0 | a?(\x)x.x!c.0")
    assert code == 0 and "--tau-->" in out


def test_lts_dot_and_truncation(capsys):
    code, out, _ = run(capsys, "lts", "--format", "dot", r"a!b.0 | a?(\x)x.0")
    assert code == 0 and out.startswith("digraph")
    code, _, _ = run(capsys, "lts", "--max-states", "3", "--rep-bound", "4", "!tau.0")
    assert code == 3


def test_bisim_verdicts(capsys):
    code, out, _ = run(capsys, "bisim", "a!b.0|0", "a!b.0")
    assert code == 0 and "BisimilarUpToBasis" in out
    code, out, _ = run(capsys, "bisim", "a!b.0", "a!c.0")
    assert code == 1 and "NotBisimilar" in out


def test_bisim_with_placeholders(capsys):
    code, out, _ = run(capsys, "bisim", "--samples", "3", "P | 0", "P")
    assert code == 0


def test_bisim_contextual(capsys):
    code, out, _ = run(capsys, "bisim", "--instance", "fusion", "--contextual", "(|{a=b}|)", "0")
    assert code == 1


def test_agent_from_file(capsys, tmp_path):
    path = tmp_path / "agent.psi"
    path.write_text("# a sender\na!b.0\n")
    code, out, _ = run(capsys, "parse", f"@{path}")
    assert code == 0 and out.strip() == "a!b.0"
    code, _, err = run(capsys, "parse", f"@{tmp_path / 'missing'}")
    assert code == 2


def test_candidate_policy(capsys, tmp_path):
    path = tmp_path / "objects"
    path.write_text("hash(m)\n")
    code, out, _ = run(capsys, "step", "--instance", "crypto", "--policy", f"candidates={path}", r"a?(\x)x.0")
    assert code == 0 and "a?hash(m)" in out


def test_conform(capsys):
    code, out, _ = run(capsys, "conform", "--instance", "pool", "--trials", "50")
    assert code == 0


def test_encode(capsys):
    code, out, _ = run(capsys, "encode", "pi", "[a=b]b!c.0")
    assert code == 0 and out.strip() == "case a=b : b!c.0"
    code, out, _ = run(capsys, "encode", "pif", "a!.(new c)<c>.0")
    assert code == 2
    code, out, _ = run(capsys, "encode", "pif", "--prenormalise", "a!.(new c)<c>.0")
    assert code == 0 and out.strip() == "(new c)a!c.0"


def test_demo(capsys):
    code, out, _ = run(capsys, "demo", "dh")
    assert code == 0 and "kP=kQ" in out.replace(" ", "")
    code, _, _ = run(capsys, "demo", "nope")
    assert code == 2


def test_unknown_instance(capsys):
    code, _, err = run(capsys, "parse", "--instance", "nope", "0")
    assert code == 2 and "choose from" in err

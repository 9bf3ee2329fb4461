import json

import pytest

from psi.demos import DEMOS, Step, replay_golden, run_demo
from psi.errors import GoldenMismatch
from psi.instances import get_instance
from psi.instances.names import ask, tell_atomic, tell_eventual
from psi.semantics import run_trace, transitions
from psi.syntax import NIL, Assert, Output, Par, parse_agent
from psi.terms import Eq, Neq


@pytest.mark.parametrize("name", sorted(DEMOS))
def test_demo_reproduces_its_golden_trace(name):
    report = run_demo(name)
    assert report.passed and report.checks
    assert json.loads(report.to_json())["passed"]
    assert report.show().startswith(f"demo {name}")


def test_unknown_demo():
    with pytest.raises(KeyError):
        run_demo("nope")


def test_golden_mismatch_names_the_step(pi):
    agent = parse_agent(r"a!b.0 | a?(\x)x.x!c.0", pi)
    replay_golden(pi.unit, agent, pi, [Step("tau"), Step("b!c", "0 | 0")])
    with pytest.raises(GoldenMismatch) as info:
        replay_golden(pi.unit, agent, pi, [Step("tau"), Step("c!b")])
    assert info.value.step == 2


def test_golden_compares_derivatives(pi):
    agent = parse_agent(r"a!b.0 | a?(\x)x.x!c.0", pi)
    with pytest.raises(GoldenMismatch):
        replay_golden(pi.unit, agent, pi, [Step("tau", "b!d.0")])


def silent_steps(inst, agent):
    return len(run_trace(inst.unit, agent, inst, 10).steps)


def test_tell_then_ask():
    ci = get_instance("constraint")
    body = Output("c", "d", NIL)
    system = Par(tell_eventual({Eq.of("a", "b")}, NIL), ask(Eq.of("a", "b"), body))
    trace = run_trace(ci.unit, system, ci, 10)
    assert [t.action.kind for t in trace.steps] == ["tau", "tau"]
    assert [t.label(ci) for t in transitions(ci.unit, trace.final, ci)] == ["c!d"]


def test_ask_waits_for_the_store():
    ci = get_instance("constraint")
    assert silent_steps(ci, ask(Eq.of("a", "b"), NIL)) == 0


def test_atomic_tell_refuses_inconsistency():
    ci = get_instance("constraint")
    store = Assert(frozenset({Neq.of("a", "b")}))
    blocked = Par(store, tell_atomic({Eq.of("a", "b")}, NIL))
    allowed = Par(store, tell_atomic({Eq.of("a", "c")}, NIL))
    assert silent_steps(ci, blocked) == 0
    assert silent_steps(ci, allowed) == 1
    eventual = Par(store, tell_eventual({Eq.of("a", "b")}, NIL))
    assert silent_steps(ci, eventual) == 1

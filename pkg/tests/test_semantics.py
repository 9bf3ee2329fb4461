import random

import pytest

from psi.errors import DepthExceeded
from psi.semantics import (
    CandidateObjects,
    NameInstantiation,
    SymbolicOnly,
    build_lts,
    follow_labels,
    run_trace,
    transitions,
)
from psi.syntax import parse_agent, print_agent
from psi.terms import Eq

from oracles import brute_force_transitions, engine_transitions, micro_corpus


def labels(env, agent, inst, policy=None, rep_bound=2):
    return sorted(t.label(inst) for t in transitions(env, agent, inst, policy, rep_bound))


def test_output_input_and_communication(pi):
    p = parse_agent(r"a!b.0 | a?(\x)x.x!c.0", pi)
    assert labels(pi.unit, p, pi, SymbolicOnly()) == sorted(["a!b", r"a?(\x)x", "tau"])
    (tau,) = [t for t in transitions(pi.unit, p, pi) if t.action.kind == "tau"]
    assert labels(pi.unit, tau.derivative, pi) == ["b!c"]


def test_closed_policy_hides_inputs(pi):
    assert labels(pi.unit, parse_agent(r"a?(\x)x.0", pi), pi) == []


def test_name_instantiation_enumerates_objects(pi):
    p = parse_agent(r"a?(\x)x.0", pi)
    assert labels(pi.unit, p, pi, NameInstantiation(("a", "b"))) == ["a?a", "a?b"]


def test_candidate_objects(crypto):
    p = parse_agent(r"a?(\x)x.0", crypto)
    policy = CandidateObjects((crypto.parse_term("hash(m)"),))
    assert labels(crypto.unit, p, crypto, policy) == ["a?hash(m)"]


def test_scope_extrusion(pi):
    p = parse_agent(r"(new c)a!c.0 | a?(\x)x.x!d.0", pi)
    assert "a!(new c)c" in labels(pi.unit, p, pi)
    (tau,) = [t for t in transitions(pi.unit, p, pi) if t.action.kind == "tau"]
    # the received name stays private to the two parties
    assert print_agent(tau.derivative, pi) == "(new c)(0 | c!d.0)"
    assert transitions(pi.unit, tau.derivative, pi) == []


def test_restricted_subject_blocks_action(pi):
    assert labels(pi.unit, parse_agent("(new a)a!b.0", pi), pi) == []


def test_case_guards(fusion):
    p = parse_agent("case a=b : c!d.0", fusion)
    assert labels(fusion.unit, p, fusion) == []
    assert labels(frozenset({Eq.of("a", "b")}), p, fusion) == ["c!d"]


def test_assertions_fuse_channels(fusion):
    p = parse_agent(r"a!n.0 | b?(\x)x.0 | (|{a=b}|)", fusion)
    assert "tau" in labels(fusion.unit, p, fusion)
    assert "tau" not in labels(fusion.unit, parse_agent(r"a!n.0 | b?(\x)x.0", fusion), fusion)


def test_environment_fuses_channels(fusion):
    p = parse_agent("a!n.0", fusion)
    assert labels(frozenset({Eq.of("a", "b")}), p, fusion) == ["a!n", "b!n"]


def test_scope_side_condition_in_channel_pools():
    from psi.instances import get_instance

    pool = get_instance("pool")
    hidden = parse_agent("(new a)(a!n.0 | (|{a,b}|))", pool)
    assert labels(pool.unit, hidden, pool) == ["b!n"]


def test_replication_unfolds_up_to_bound(pi):
    p = parse_agent("!a!b.0", pi)
    assert len(transitions(pi.unit, p, pi, rep_bound=1)) == 1
    assert len(transitions(pi.unit, p, pi, rep_bound=2)) == 2
    with pytest.raises(DepthExceeded):
        transitions(pi.unit, p, pi, rep_bound=1, strict=True)


def test_transitions_are_sorted_and_deterministic(pi):
    p = parse_agent(r"!a!b.0 | a?(\x)x.x!c.0 | (new d)a!d.0", pi)
    first = [t.label(pi) for t in transitions(pi.unit, p, pi, rep_bound=2)]
    second = [t.label(pi) for t in transitions(pi.unit, p, pi, rep_bound=2)]
    assert first == second


def test_trace_stops_when_quiescent(pi):
    trace = run_trace(pi.unit, parse_agent(r"a!b.0 | a?(\x)x.x!c.0", pi), pi, 5)
    assert len(trace.steps) == 1 and trace.quiescent
    assert print_agent(trace.final, pi) == "0 | b!c.0"


def test_random_scheduler_is_seeded(pi):
    p = parse_agent(r"!a!b.0 | !a?(\x)x.0 | !c!d.0 | !c?(\x)x.0", pi)
    one = run_trace(pi.unit, p, pi, 4, scheduler="random", seed=7, rep_bound=8)
    two = run_trace(pi.unit, p, pi, 4, scheduler="random", seed=7, rep_bound=8)
    assert one.show(pi) == two.show(pi)


def test_follow_labels(pi):
    p = parse_agent(r"a!b.0 | a?(\x)x.x!c.0", pi)
    path = follow_labels(pi.unit, p, pi, ["tau", "b!c"])
    assert [t.label(pi) for t in path] == ["tau", "b!c"]


def test_lts_truncation_is_reported(pi):
    lts = build_lts(pi.unit, parse_agent("!tau.0", pi), pi, max_states=5, rep_bound=3)
    assert lts.truncated and len(lts.states) == 5
    assert "digraph" in lts.to_dot(pi)
    full = build_lts(pi.unit, parse_agent(r"a!b.0 | a?(\x)x.0", pi), pi)
    assert not full.truncated and len(full.states) == 3


@pytest.mark.parametrize("name", ["pi", "fusion"])
def test_engine_matches_brute_force(name, request):
    inst = request.getfixturevalue(name)
    for agent in micro_corpus(random.Random(21), inst, 30, assertions=(name == "fusion")):
        names = sorted(agent.free_names | {"a", "b"}) + ["i0"]
        assert engine_transitions(inst.unit, agent, inst, names, 2) == brute_force_transitions(
            inst.unit, agent, inst, names, 2
        ), print_agent(agent, inst)

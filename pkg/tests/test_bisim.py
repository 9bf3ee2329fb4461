import json
import random

import pytest

from psi.bisim import (
    STRUCTURAL_LAWS,
    BisimilarUpToBasis,
    GameConfig,
    Inconclusive,
    NotBisimilar,
    bisimilar,
    check_structural_laws,
    context_bisimilar,
    replay_witness,
    structural_normal_form,
)
from psi.generate import random_agents
from psi.syntax import parse_agent, print_agent


def verdict(inst, left, right, **cfg):
    return bisimilar(inst.unit, parse_agent(left, inst), parse_agent(right, inst), inst, GameConfig(**cfg) if cfg else None)


def test_normal_form_drops_inert_parts(pi):
    p = parse_agent("(new a)(0 | b!c.0) | 0 | (new d)0", pi)
    assert print_agent(structural_normal_form(p), pi) == "b!c.0"


@pytest.mark.parametrize(
    "left, right",
    [
        ("a!b.0 | 0", "a!b.0"),
        ("a!b.0 | c!d.0", "c!d.0 | a!b.0"),
        ("(new x)(new y)x!y.0", "(new y)(new x)x!y.0"),
        ("!a!b.0", "!a!b.0 | !a!b.0"),
        (r"a?(\x)x.0 | 0", r"a?(\x)x.0"),
    ],
)
def test_positive_verdicts(pi, left, right):
    assert isinstance(verdict(pi, left, right), BisimilarUpToBasis)


@pytest.mark.parametrize(
    "left, right",
    [
        ("a!b.0", "a!c.0"),
        ("a!b.0 | c!d.0", "a!b.c!d.0"),
        (r"a?(\x)x.x!c.0", r"a?(\x)x.b!c.0"),
        ("(new b)a!b.0", "a!b.0"),
    ],
)
def test_negative_verdicts_replay(pi, left, right):
    v = verdict(pi, left, right)
    assert isinstance(v, NotBisimilar)
    assert replay_witness(v.witness, pi)


def test_witness_serialises(pi):
    v = verdict(pi, "a!b.0", "a!c.0")
    data = json.loads(v.witness.to_json(pi))
    assert data["action"] == "a!b" and data["responses"] == []


def test_static_equivalence_is_checked(fusion):
    v = verdict(fusion, "(|{a=b}|)", "0")
    assert isinstance(v, NotBisimilar)


def test_state_bound_gives_inconclusive(pi):
    v = verdict(pi, "!tau.a!b.0", "!tau.a!b.0 | !tau.a!b.0", max_states=3)
    assert isinstance(v, Inconclusive) and not v.positive
    assert "state" in v.describe()


def test_config_rejects_non_positive_bounds():
    with pytest.raises(ValueError):
        GameConfig(max_depth=0)


def test_weakening_pair_needs_no_context(fusion):
    r = parse_agent("case a=b : c!c.(case a=b : c!c.0)", fusion)
    s = parse_agent("case a=b : c!c.c!c.0", fusion)
    assert context_bisimilar(r, s, fusion).positive


def test_context_game_sees_what_plain_game_sees(fusion):
    v = context_bisimilar(parse_agent("(|{a=b}|)", fusion), parse_agent("0", fusion), fusion)
    assert isinstance(v, NotBisimilar) and v.contextual
    assert replay_witness(v.witness, fusion, contextual=True)


def test_eleven_laws():
    assert len(STRUCTURAL_LAWS) == 11
    assert len({law.name for law in STRUCTURAL_LAWS}) == 11


@pytest.mark.parametrize("name", ["pi", "fusion"])
def test_structural_laws_on_small_sample(name, request):
    inst = request.getfixturevalue(name)
    samples = random_agents(random.Random(8), inst, 5, size=3)
    report = check_structural_laws(inst, samples, substitutions=2)
    assert report.passed, [r.counterexample for r in report.results if not r.passed]

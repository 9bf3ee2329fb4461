import random

import pytest

from psi.bisim import bisimilar
from psi.encodings import (
    compare_pi_transitions,
    compare_pif,
    correspondence_check,
    encode_pi,
    encode_pif,
    parse_pi,
    parse_pif,
    pi_bisimilar_reference,
    pi_canonical,
    prenormalise_pif,
    print_pi,
    print_pif,
    random_pi_agent,
)
from psi.errors import NotPreNormalised, PsiSyntaxError
from psi.syntax import print_agent

PI_SAMPLES = [
    "a!b.0 | a?(x).x!c.0",
    "(new b)a!b.b!c.0 | a?(x).x?(y).0",
    "a!b.0 + c!d.0",
    "[a=b]b!c.0",
    "[a=a]b!c.0",
    "!a!b.0 | a?(x).0",
]


@pytest.mark.parametrize("text", PI_SAMPLES)
def test_pi_print_parse_round_trip(text):
    p = parse_pi(text)
    assert pi_canonical(parse_pi(print_pi(p))) == pi_canonical(p)


@pytest.mark.parametrize("text", PI_SAMPLES)
def test_encoded_transitions_match_reference(text):
    engine, reference = compare_pi_transitions(parse_pi(text))
    assert engine == reference


def test_encoding_shapes(pi):
    assert print_agent(encode_pi(parse_pi("[a=b]b!c.0")), pi) == "case a=b : b!c.0"
    assert print_agent(encode_pi(parse_pi("a?(x).x!c.0")), pi) == r"a?(\x)x.x!c.0"
    summed = print_agent(encode_pi(parse_pi("a!b.0 + c!d.0")), pi)
    assert summed.startswith("(new ") and "case" in summed


def test_random_pi_corpus_corresponds():
    rng = random.Random(12)
    report = correspondence_check([random_pi_agent(rng, 3) for _ in range(40)], rep_bound=2)
    assert report.passed


def test_reference_bisimulation_agrees_with_game(pi):
    pairs = [("a!b.0 | 0", "a!b.0", True), ("a!b.0 | c!d.0", "a!b.c!d.0 + c!d.a!b.0", True), ("a!b.0", "a!c.0", False)]
    for left, right, expected in pairs:
        p, q = parse_pi(left), parse_pi(right)
        assert pi_bisimilar_reference(p, q) is expected
        assert bisimilar(pi.unit, encode_pi(p), encode_pi(q), pi).positive is expected


def test_pi_syntax_error():
    with pytest.raises(PsiSyntaxError):
        parse_pi("a!b.")


def test_pif_round_trip_and_encoding(fusion):
    p = parse_pif("(new b)(<a=b> | b!<c>.0)")
    assert print_pif(parse_pif(print_pif(p))) == print_pif(p)
    assert print_agent(encode_pif(p), fusion) == "(new b)((|{a=b}|) | b!c.0)"


@pytest.mark.parametrize(
    "text",
    [
        "a?<b>.c!<c>.0 | a!<c>.b?<d>.0",
        "<a=b> | a?<c>.0 | b!<d>.0",
        "(new x)(a!<x>.0) | a?<y>.0",
        "!a!<b>.0 | a?<c>.0",
    ],
)
def test_pif_transitions_match_reference(text):
    engine, reference = compare_pif(parse_pif(text))
    assert engine == reference


def test_restriction_under_prefix_needs_prenormalising():
    p = parse_pif("a!.(new c)<c>.0")
    with pytest.raises(NotPreNormalised):
        encode_pif(p)
    assert print_pif(prenormalise_pif(p)) == "(new c)a!<c>.0"

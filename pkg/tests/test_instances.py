import random

import pytest

from psi.errors import PsiSyntaxError
from psi.instance_api import check_requisites, check_substitution_laws, assertion_equivalent
from psi.instances import REGISTRY, get_instance
from psi.instances.crypto import destructor_identities, normalise
from psi.terms import Eq, Fn

from oracles import normal_form_oracle, redex_rich_term


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_print_parse_round_trip(name):
    inst = get_instance(name)
    rng = random.Random(5)
    pool = ["a", "b", "c"]
    for _ in range(100):
        t = inst.random_term(rng, pool)
        assert inst.parse_term(inst.print_term(t)) == t
        c = inst.random_condition(rng, pool)
        assert inst.parse_condition(inst.print_condition(c)) == c
        a = inst.random_assertion(rng, pool)
        assert inst.parse_assertion(inst.print_assertion(a)) == a


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_conformance_smoke(name):
    inst = get_instance(name)
    assert check_requisites(inst, trials=100).passed
    assert check_substitution_laws(inst, trials=100).passed


def test_unknown_instance_lists_choices():
    with pytest.raises(KeyError, match="fusion"):
        get_instance("nope")


def test_weakening_is_informational_for_constraints():
    ci = get_instance("constraint")
    report = check_requisites(ci, trials=1000)
    weakening = report.result("weakening")
    assert weakening.informational and not weakening.passed
    assert report.passed


def test_fusion_entailment_is_equivalence_closure(fusion):
    psi = fusion.parse_assertion("{a=b, b=c}")
    assert fusion.entails(psi, fusion.parse_condition("a=c"))
    assert fusion.entails(psi, fusion.chan_eq("c", "a"))
    assert not fusion.entails(fusion.unit, fusion.parse_condition("a=c"))
    assert fusion.entails(fusion.unit, fusion.parse_condition("a=a"))


def test_fusion_composition_is_union(fusion):
    left, right = fusion.parse_assertion("{a=b}"), fusion.parse_assertion("{b=c}")
    both = fusion.compose(left, right)
    assert assertion_equivalent(fusion, both, fusion.parse_assertion("{a=c, c=b}"))


def test_pi_terms_are_names_only(pi):
    assert pi.entails(pi.unit, pi.chan_eq("a", "a"))
    assert not pi.entails(pi.unit, pi.chan_eq("a", "b"))
    with pytest.raises(PsiSyntaxError):
        pi.parse_assertion("{a=b}")


def test_pool_channels_need_a_pool():
    pool = get_instance("pool")
    psi = pool.parse_assertion("{a,b}")
    assert pool.entails(psi, pool.chan_eq("a", "b"))
    assert not pool.entails(pool.unit, pool.chan_eq("a", "a"))


def test_constraint_consistency_condition():
    ci = get_instance("constraint")
    store = ci.parse_assertion("{a=b}")
    assert ci.entails(store, ci.parse_condition("cons({b!=c})"))
    assert not ci.entails(store, ci.parse_condition("cons({a!=b})"))


def test_polyadic_pattern_matching():
    pa = get_instance("polyadic")
    t2 = pa.parse_term
    assert pa.match_pattern(["x", "y"], t2("t2(x,y)"), t2("t2(a,b)")) == ("a", "b")
    assert pa.match_pattern(["x"], t2("t2(x,x)"), t2("t2(a,b)")) is None


def test_polysync_always_condition():
    ps = get_instance("polysync")
    assert ps.entails(ps.unit, ps.parse_condition("a<->a"))


def test_crypto_identities_hold_without_assumptions(crypto):
    for lhs, rhs in destructor_identities():
        assert crypto.entails(frozenset(), Eq.of(lhs, rhs))


def test_crypto_hash_is_one_way(crypto):
    psi = crypto.parse_assertion("{hash(s)=x}")
    assert crypto.entails(psi, crypto.parse_condition("hash(s)=x"))
    assert not crypto.entails(psi, crypto.parse_condition("s=x"))


def test_crypto_equality_is_a_congruence(crypto):
    psi = crypto.parse_assertion("{a=b}")
    assert crypto.entails(psi, crypto.parse_condition("hash(a)=hash(b)"))
    assert crypto.entails(psi, crypto.parse_condition("dec(enc(m,a),b)=m"))


def test_wrong_key_does_not_decrypt():
    t = Fn("dec", (Fn("enc", ("m", "k")), "j"))
    assert normalise(t) == t


def test_normal_forms_agree_with_oracle():
    rng = random.Random(2)
    for _ in range(200):
        term = redex_rich_term(rng, ["a", "b", "m"], 4)
        expected = normal_form_oracle(term)
        assert normalise(term) == expected
        assert normalise(term, random.Random(rng.random())) == expected

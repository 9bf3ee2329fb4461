"""Instances with structured terms and the trivial assertion ``1``:
polyadic pi (with located channels) and polyadic synchronisation."""

from __future__ import annotations

import re

from ..errors import PsiSyntaxError
from ..instance_api import Instance
from ..terms import ChanEq, Eq, Fn, parse_binary

_TUPLE = re.compile(r"^t\d+$")


def _is_channel(term) -> bool:
    return isinstance(term, str) or (isinstance(term, Fn) and term.symbol == "loc" and len(term.args) == 2)


class _UnitOnly(Instance):
    unit = frozenset()
    exact_probes = True
    exact_extensions = True

    def compose(self, first, second):
        return self.unit

    def parse_assertion(self, text):
        if text.strip() in ("1", "{}", ""):
            return self.unit
        raise PsiSyntaxError(f"the only {self.name} assertion is 1, got {text!r}")

    def print_assertion(self, psi):
        return "1"

    def equivalent_variant(self, psi, rng, names):
        return self.unit

    def condition_probe_basis(self, names, frames):
        # every frame of this instance is equivalent to 1
        return []


class PolyadicInstance(_UnitOnly):
    """Names, tuples ``tN(...)`` and located channels ``<M,N>``.

    Only names and located channels are channels; conditions are syntactic
    term equality and channel equivalence.
    """

    name = "polyadic"

    def _check_term(self, term):
        if isinstance(term, Fn):
            if not (_TUPLE.match(term.symbol) and int(term.symbol[1:]) == len(term.args)) and not (
                term.symbol == "loc" and len(term.args) == 2
            ):
                raise PsiSyntaxError(f"polyadic terms are names, tN(...) tuples or <M,N>; got {term}")
            for a in term.args:
                self._check_term(a)

    def parse_term(self, text):
        term = self.terms.parse(text)
        self._check_term(term)
        return term

    def parse_condition(self, text):
        cond = parse_binary(text, self.terms)
        self._check_term(cond.left)
        self._check_term(cond.right)
        return cond

    def decide(self, assertion, condition):
        if isinstance(condition, ChanEq):
            return condition.left == condition.right and _is_channel(condition.left)
        if isinstance(condition, Eq):
            return condition.left == condition.right
        return False

    def random_term(self, rng, names):
        roll = rng.random()
        if roll < 0.6:
            return rng.choice(names)
        if roll < 0.85:
            return Fn("t2", (self.random_term(rng, names), rng.choice(names)))
        return Fn("loc", (rng.choice(names), rng.choice(names)))

    def random_condition(self, rng, names):
        m, n = self.random_term(rng, names), self.random_term(rng, names)
        if rng.random() < 0.5:
            return Eq.of(m, n)
        return ChanEq(m, m if rng.random() < 0.5 else n)



class PolySyncInstance(_UnitOnly):
    """Free terms over any function symbol; every term is a channel equivalent only to itself."""

    name = "polysync"

    def parse_condition(self, text):
        cond = parse_binary(text, self.terms)
        if not isinstance(cond, ChanEq):
            raise PsiSyntaxError(f"polysync conditions are M<->N, got {text!r}")
        return cond

    def decide(self, assertion, condition):
        return isinstance(condition, ChanEq) and condition.left == condition.right

    def random_term(self, rng, names, depth: int = 2):
        roll = rng.random()
        if depth == 0 or roll < 0.5:
            return rng.choice(names)
        if roll < 0.75:
            return Fn("nextFreq", (self.random_term(rng, names, depth - 1),))
        return Fn("t2", (self.random_term(rng, names, depth - 1), self.random_term(rng, names, depth - 1)))

    def random_condition(self, rng, names):
        m = self.random_term(rng, names)
        return ChanEq(m, m if rng.random() < 0.5 else self.random_term(rng, names))


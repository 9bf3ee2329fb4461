"""The parameter bundle of a psi-calculus and its conformance suite.

An ``Instance`` supplies terms, conditions and assertions together with
channel equivalence, composition, unit, entailment and substitution.  It
also supplies two finite bases that make the infinite quantifiers of the
theory checkable: probe conditions for deciding assertion and frame
equivalence, and extension assertions for the bisimulation game.  Each basis
carries an exactness flag.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .errors import ArityMismatch, GeneratorExhausted
from .frames import Frame, frame_equivalent
from .nominal import Name, Permutation, apply_permutation, fresh_names, substitute_value, support
from .terms import ChanEq, Eq, Fn, TermParser, parse_binary, print_term


class Instance:
    """Base class; concrete instances override the abstract parts."""

    name: str = "abstract"
    unit: Any = frozenset()
    exact_probes: bool = False
    exact_extensions: bool = False
    has_weakening: bool = True
    # instantiating input patterns with names covers every object
    terms_are_names: bool = False
    constants: frozenset = frozenset()

    def __init__(self) -> None:
        self.terms = TermParser(self.constants)
        self._entail_cache: dict = {}

    # -- the parameters --------------------------------------------------
    def chan_eq(self, left: Any, right: Any) -> Any:
        return ChanEq(left, right)

    def compose(self, first: Any, second: Any) -> Any:
        raise NotImplementedError

    def decide(self, assertion: Any, condition: Any) -> bool:
        raise NotImplementedError

    def entails(self, assertion: Any, condition: Any) -> bool:
        key = (assertion, condition)
        hit = self._entail_cache.get(key)
        if hit is None:
            if len(self._entail_cache) > 200_000:
                self._entail_cache.clear()
            hit = self.decide(assertion, condition)
            self._entail_cache[key] = hit
        return hit

    def entails_all(self, assertion: Any, conditions: Sequence[Any]) -> list[bool]:
        return [self.entails(assertion, c) for c in conditions]

    # -- substitution ----------------------------------------------------
    def _mapping(self, names: Sequence[Name], terms: Sequence[Any]) -> dict:
        if len(names) != len(terms):
            raise ArityMismatch(f"{len(names)} names but {len(terms)} terms")
        if len(set(names)) != len(names):
            raise ArityMismatch("substituted names must be distinct")
        return dict(zip(names, terms))

    def subst_term(self, term: Any, names: Sequence[Name], terms: Sequence[Any]) -> Any:
        return substitute_value(term, self._mapping(names, terms))

    def subst_cond(self, cond: Any, names: Sequence[Name], terms: Sequence[Any]) -> Any:
        return substitute_value(cond, self._mapping(names, terms))

    def subst_assertion(self, psi: Any, names: Sequence[Name], terms: Sequence[Any]) -> Any:
        return substitute_value(psi, self._mapping(names, terms))

    def match_pattern(self, names: Sequence[Name], pattern: Any, candidate: Any) -> tuple | None:
        """``L~`` with ``pattern[names:=L~] == candidate``, or ``None``."""
        binding: dict = {}
        if not _match(pattern, candidate, set(names), binding):
            return None
        if any(n not in binding for n in names):
            return None
        return tuple(binding[n] for n in names)

    # -- finite bases ----------------------------------------------------
    def probe_terms(self, names: frozenset, frames: Sequence[Frame]) -> list:
        return sorted(names)

    def condition_probe_basis(self, names: frozenset, frames: Sequence[Frame]) -> list:
        terms = self.probe_terms(names, frames)
        return [Eq.of(a, b) for a, b in itertools.combinations(terms, 2)]

    def extension_basis(self, assertion: Any, names: Iterable[Name]) -> list:
        return [self.unit]

    def channel_candidates(self, assertion: Any) -> set:
        return set()

    def canonical_assertion(self, assertion: Any) -> Any:
        return assertion

    def restrict_assertion(self, assertion: Any, names: frozenset) -> Any:
        """An assertion that agrees with ``assertion`` on every condition over
        ``names`` and says nothing else; the default keeps it unchanged."""
        return assertion

    # -- concrete syntax -------------------------------------------------
    def parse_term(self, text: str) -> Any:
        return self.terms.parse(text)

    def parse_condition(self, text: str) -> Any:
        return parse_binary(text, self.terms)

    def parse_assertion(self, text: str) -> Any:
        raise NotImplementedError

    def print_term(self, term: Any) -> str:
        return print_term(term)

    def print_condition(self, cond: Any) -> str:
        return str(cond)

    def print_assertion(self, psi: Any) -> str:
        raise NotImplementedError

    # -- random generation for conformance -----------------------------
    def random_term(self, rng: random.Random, names: Sequence[Name]) -> Any:
        return rng.choice(names)

    def random_condition(self, rng: random.Random, names: Sequence[Name]) -> Any:
        return Eq.of(self.random_term(rng, names), self.random_term(rng, names))

    def random_channel_pair(self, rng: random.Random, names: Sequence[Name], start: Any = None) -> tuple:
        """A pair of terms, often channel equivalent; ``start`` fixes the first."""
        first = self.random_term(rng, names) if start is None else start
        return first, (first if rng.random() < 0.4 else self.random_term(rng, names))

    def random_assertion(self, rng: random.Random, names: Sequence[Name]) -> Any:
        return self.unit

    def equivalent_variant(self, psi: Any, rng: random.Random, names: Sequence[Name]) -> Any:
        """Some assertion equivalent to ``psi`` (used to exercise compositionality)."""
        return self.compose(psi, self.unit)

    def __repr__(self) -> str:
        return f"<instance {self.name}>"


def _match(pattern: Any, candidate: Any, variables: set, binding: dict) -> bool:
    if isinstance(pattern, str):
        if pattern in variables:
            if pattern in binding:
                return binding[pattern] == candidate
            binding[pattern] = candidate
            return True
        return pattern == candidate
    if isinstance(pattern, Fn):
        if not isinstance(candidate, Fn) or candidate.symbol != pattern.symbol:
            return False
        if len(candidate.args) != len(pattern.args):
            return False
        return all(_match(p, c, variables, binding) for p, c in zip(pattern.args, candidate.args))
    return pattern == candidate


# ---------------------------------------------------------------- equivalence


def assertion_equivalent(inst: Instance, first: Any, second: Any, probes: Sequence[Any] | None = None) -> bool:
    """``first`` and ``second`` entail the same conditions among ``probes``."""
    if probes is None:
        return frame_equivalent(inst, Frame((), first), Frame((), second))
    return inst.entails_all(first, probes) == inst.entails_all(second, probes)


def assertion_difference(inst: Instance, first: Any, second: Any) -> Any | None:
    names = support(first) | support(second)
    probes = inst.condition_probe_basis(names, [Frame((), first), Frame((), second)])
    for cond, a, b in zip(probes, inst.entails_all(first, probes), inst.entails_all(second, probes)):
        if a != b:
            return cond
    return None


# ---------------------------------------------------------------- conformance


@dataclass
class LawResult:
    law: str
    passed: bool
    trials: int
    vacuous: int = 0
    counterexample: dict | None = None
    informational: bool = False

    def to_dict(self) -> dict:
        return {
            "law": self.law,
            "passed": self.passed,
            "trials": self.trials,
            "vacuous": self.vacuous,
            "counterexample": self.counterexample,
            "informational": self.informational,
        }


@dataclass
class ConformanceReport:
    subject: str
    results: list[LawResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results if not r.informational)

    def result(self, law: str) -> LawResult:
        for r in self.results:
            if r.law == law:
                return r
        raise KeyError(law)

    def merge(self, other: "ConformanceReport") -> "ConformanceReport":
        return ConformanceReport(self.subject, self.results + other.results)

    def to_dict(self) -> dict:
        return {"subject": self.subject, "passed": self.passed, "results": [r.to_dict() for r in self.results]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=str)


@dataclass(frozen=True)
class SubstitutionSeq:
    """An ordered list of simultaneous substitutions ``[x~ := L~]``."""

    steps: tuple[tuple[tuple[Name, ...], tuple], ...] = ()

    def __post_init__(self) -> None:
        for names, terms in self.steps:
            if len(names) != len(terms):
                raise ArityMismatch("substitution step with unequal lengths")
            if len(set(names)) != len(names):
                raise ArityMismatch("substitution step repeats a name")

    def __iter__(self):
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __str__(self) -> str:
        parts = []
        for names, terms in self.steps:
            inner = ",".join(f"{n}:={print_term(t)}" for n, t in zip(names, terms))
            parts.append(f"[{inner}]")
        return "".join(parts) or "[]"


Generator = Callable[[random.Random], Any]


class _Gen:
    """Default value generators derived from the instance's random_* hooks."""

    def __init__(self, inst: Instance, pool: int = 4):
        self.inst = inst
        self.names = tuple(f"{c}" for c in "abcdefgh"[:pool])

    def term(self, rng):
        return self.inst.random_term(rng, self.names)

    def cond(self, rng):
        return self.inst.random_condition(rng, self.names)

    def assertion(self, rng):
        return self.inst.random_assertion(rng, self.names)

    def channel_pair(self, rng, start=None):
        return self.inst.random_channel_pair(rng, self.names, start)

    def variant(self, psi, rng):
        return self.inst.equivalent_variant(psi, rng, self.names)


def _show(inst: Instance, value: Any) -> str:
    if isinstance(value, (str, Fn)):
        return inst.print_term(value)
    if isinstance(value, frozenset):
        return inst.print_assertion(value)
    return str(value)


def check_requisites(inst: Instance, gen: Any = None, trials: int = 1000, seed: int = 0) -> ConformanceReport:
    """Property-test channel symmetry and transitivity, compositionality,
    and the abelian monoid laws up to assertion equivalence.

    Weakening and idempotence are reported but never fail the report.
    """
    gen = gen or _Gen(inst)
    rng = random.Random(seed)
    report = ConformanceReport(f"requisites:{inst.name}")
    equiv = lambda x, y: assertion_equivalent(inst, x, y)

    def run(law: str, body: Callable[[], tuple[bool, bool, dict]], informational: bool = False) -> None:
        vacuous = 0
        for _ in range(trials):
            try:
                relevant, ok, witness = body()
            except GeneratorExhausted:
                raise
            if not relevant:
                vacuous += 1
                continue
            if not ok:
                shown = {k: _show(inst, v) for k, v in witness.items()}
                report.results.append(LawResult(law, False, trials, vacuous, shown, informational))
                return
        report.results.append(LawResult(law, True, trials, vacuous, None, informational))

    def symmetry():
        psi = gen.assertion(rng)
        m, n = gen.channel_pair(rng)
        if not inst.entails(psi, inst.chan_eq(m, n)):
            return False, True, {}
        return True, inst.entails(psi, inst.chan_eq(n, m)), {"Psi": psi, "M": m, "N": n}

    def transitivity():
        psi = gen.assertion(rng)
        m, n = gen.channel_pair(rng)
        _, l = gen.channel_pair(rng, n)
        if not (inst.entails(psi, inst.chan_eq(m, n)) and inst.entails(psi, inst.chan_eq(n, l))):
            return False, True, {}
        return True, inst.entails(psi, inst.chan_eq(m, l)), {"Psi": psi, "M": m, "N": n, "L": l}

    def compositionality():
        psi = gen.assertion(rng)
        other = gen.variant(psi, rng)
        extra = gen.assertion(rng)
        if not equiv(psi, other):
            return False, True, {}
        ok = equiv(inst.compose(psi, extra), inst.compose(other, extra))
        return True, ok, {"Psi": psi, "Psi'": other, "Psi''": extra}

    def identity():
        psi = gen.assertion(rng)
        return True, equiv(inst.compose(psi, inst.unit), psi), {"Psi": psi}

    def associativity():
        a, b, c = gen.assertion(rng), gen.assertion(rng), gen.assertion(rng)
        ok = equiv(inst.compose(inst.compose(a, b), c), inst.compose(a, inst.compose(b, c)))
        return True, ok, {"Psi1": a, "Psi2": b, "Psi3": c}

    def commutativity():
        a, b = gen.assertion(rng), gen.assertion(rng)
        return True, equiv(inst.compose(a, b), inst.compose(b, a)), {"Psi1": a, "Psi2": b}

    def weakening():
        a, b = gen.assertion(rng), gen.assertion(rng)
        phi = gen.cond(rng)
        if not inst.entails(a, phi):
            return False, True, {}
        return True, inst.entails(inst.compose(a, b), phi), {"Psi": a, "Psi'": b, "phi": phi}

    def idempotence():
        a = gen.assertion(rng)
        return True, equiv(inst.compose(a, a), a), {"Psi": a}

    run("channel symmetry", symmetry)
    run("channel transitivity", transitivity)
    run("compositionality", compositionality)
    run("identity", identity)
    run("associativity", associativity)
    run("commutativity", commutativity)
    run("weakening", weakening, informational=True)
    run("idempotence", idempotence, informational=True)
    return report


def check_substitution_laws(inst: Instance, gen: Any = None, trials: int = 1000, seed: int = 1) -> ConformanceReport:
    """Substitution keeps the names it inserts, commutes with renaming through
    fresh names, and is equivariant; checked on terms, conditions and assertions."""
    gen = gen or _Gen(inst)
    rng = random.Random(seed)
    report = ConformanceReport(f"substitution:{inst.name}")
    kinds = [
        ("term", gen.term, inst.subst_term),
        ("condition", gen.cond, inst.subst_cond),
        ("assertion", gen.assertion, inst.subst_assertion),
    ]

    def pick_substitution(value):
        present = sorted(support(value))
        if not present:
            return None
        k = rng.randint(1, min(2, len(present)))
        names = tuple(rng.sample(present, k))
        terms = tuple(gen.term(rng) for _ in names)
        return names, terms

    for kind, make, subst in kinds:
        failures: dict[str, dict] = {}
        vacuous = {"keeps names": 0, "fresh renaming": 0, "equivariance": 0}
        for _ in range(trials):
            value = make(rng)
            picked = pick_substitution(value)
            if picked is None:
                for k in vacuous:
                    vacuous[k] += 1
                continue
            names, terms = picked
            result = subst(value, names, terms)
            # every name of the substituted terms survives
            if "keeps names" not in failures:
                lost = support(terms) - support(result)
                if lost:
                    failures["keeps names"] = {"X": _show(inst, value), "names": names,
                                         "terms": [_show(inst, t) for t in terms], "lost": sorted(lost)}
            # X[a:=T] = ((b a).X)[b:=T] for b fresh
            if "fresh renaming" not in failures:
                avoid = support(value) | frozenset(names) | support(terms)
                fresh = fresh_names(len(names), avoid, prefix="z")
                swapped = apply_permutation(Permutation.pairwise(fresh, names), value)
                other = subst(swapped, fresh, terms)
                if other != result:
                    failures["fresh renaming"] = {"X": _show(inst, value), "names": names, "fresh": fresh,
                                         "left": _show(inst, result), "right": _show(inst, other)}
            # p.(X[x:=T]) = (p.X)[p.x := p.T]
            if "equivariance" not in failures:
                pool = sorted(support(value) | support(terms) | {"a", "b", "w"})
                a, b = rng.sample(pool, 2)
                perm = Permutation.swap(a, b)
                left = apply_permutation(perm, result)
                right = subst(apply_permutation(perm, value), tuple(perm(n) for n in names),
                              tuple(apply_permutation(perm, t) for t in terms))
                if left != right:
                    failures["equivariance"] = {"X": _show(inst, value), "swap": (a, b),
                                                "left": _show(inst, left), "right": _show(inst, right)}
        for law in ("keeps names", "fresh renaming", "equivariance"):
            ce = failures.get(law)
            report.results.append(LawResult(f"{law} ({kind})", ce is None, trials, vacuous[law], ce))
    return report

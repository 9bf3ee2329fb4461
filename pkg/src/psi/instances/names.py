"""Instances whose terms are plain names: pi, fusion, constraints, channel pool."""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Any

from ..errors import PsiSyntaxError
from ..instance_api import Instance
from ..nominal import fresh_names, support
from ..syntax import Assert, Case, Par, tau_prefix
from ..terms import ChanEq, Cons, Eq, Neq, braced_items, parse_binary


class _NameTerms(Instance):
    """Shared plumbing: terms are names only."""

    terms_are_names = True

    def parse_term(self, text: str) -> Any:
        term = self.terms.parse(text)
        if not isinstance(term, str):
            raise PsiSyntaxError(f"{self.name}: terms are names, got {text!r}")
        return term


# ---------------------------------------------------------------- union-find


@lru_cache(maxsize=65536)
def fusion_classes(pairs: frozenset) -> dict:
    """Representative map for the equivalence closure of a set of ``Eq`` atoms."""
    parent: dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for atom in pairs:
        if isinstance(atom, Eq):
            ra, rb = find(atom.left), find(atom.right)
            if ra != rb:
                if rb < ra:
                    ra, rb = rb, ra
                parent[rb] = ra
    return {x: find(x) for x in list(parent)}


def fused(pairs: frozenset, a: Any, b: Any) -> bool:
    if a == b:
        return True
    reps = fusion_classes(pairs)
    return a in reps and b in reps and reps[a] == reps[b]


def partition(pairs: frozenset) -> frozenset:
    reps = fusion_classes(pairs)
    groups: dict = {}
    for x, r in reps.items():
        groups.setdefault(r, set()).add(x)
    return frozenset(frozenset(g) for g in groups.values() if len(g) > 1)


# ---------------------------------------------------------------- pi


class PiInstance(_NameTerms):
    """Names, name equality, and the single assertion ``1``."""

    name = "pi"
    unit = frozenset()
    exact_probes = True
    exact_extensions = True

    def chan_eq(self, left, right):
        return Eq.of(left, right)

    def compose(self, first, second):
        return self.unit

    def decide(self, assertion, condition):
        if isinstance(condition, Eq):
            return condition.left == condition.right
        return False

    def parse_condition(self, text):
        cond = parse_binary(text, self.terms)
        if not isinstance(cond, Eq):
            raise PsiSyntaxError(f"pi conditions are equalities, got {text!r}")
        return cond

    def parse_assertion(self, text):
        if text.strip() in ("1", "{}", ""):
            return self.unit
        raise PsiSyntaxError(f"the only pi assertion is 1, got {text!r}")

    def print_assertion(self, psi):
        return "1"

    def equivalent_variant(self, psi, rng, names):
        return self.unit


# ---------------------------------------------------------------- fusion


def _fusion_atoms(text: str, inst: Instance, allowed=(Eq,)) -> frozenset:
    if text.strip() in ("1", "{}", ""):
        return frozenset()
    atoms = []
    for item in braced_items(text):
        atom = parse_binary(item, inst.terms)
        if not isinstance(atom, allowed) or not all(isinstance(t, str) for t in (atom.left, atom.right)):
            raise PsiSyntaxError(f"{inst.name}: unexpected assertion item {item!r}")
        atoms.append(atom)
    return frozenset(atoms)


def _print_atoms(atoms: frozenset) -> str:
    if not atoms:
        return "{}"
    return "{" + ", ".join(sorted(str(a) for a in atoms)) + "}"


class FusionInstance(_NameTerms):
    """Fusion: assertions are finite sets of name equations, entailment is their equivalence closure."""

    name = "fusion"
    unit = frozenset()
    exact_probes = True
    exact_extensions = True

    def chan_eq(self, left, right):
        return Eq.of(left, right)

    def compose(self, first, second):
        return first | second

    def decide(self, assertion, condition):
        if isinstance(condition, Eq):
            return fused(assertion, condition.left, condition.right)
        return False

    def parse_condition(self, text):
        cond = parse_binary(text, self.terms)
        if not isinstance(cond, Eq):
            raise PsiSyntaxError(f"fusion conditions are equalities, got {text!r}")
        return cond

    def parse_assertion(self, text):
        return _fusion_atoms(text, self)

    def print_assertion(self, psi):
        return _print_atoms(psi)

    def channel_candidates(self, assertion):
        return set(support(assertion))

    def canonical_assertion(self, assertion):
        return partition(assertion)

    def restrict_assertion(self, assertion, names):
        atoms = set()
        for group in partition(assertion):
            kept = sorted(group & names)
            atoms.update(Eq.of(x, y) for x, y in zip(kept, kept[1:]))
        return frozenset(atoms)

    def extension_basis(self, assertion, names):
        pool = sorted(set(names) | support(assertion))
        pool.append(fresh_names(1, pool, prefix="e")[0])
        out = [self.unit]
        for a, b in itertools.combinations(pool, 2):
            if not fused(assertion, a, b):
                out.append(frozenset((Eq.of(a, b),)))
        return out

    def random_assertion(self, rng, names):
        return frozenset(Eq.of(rng.choice(names), rng.choice(names)) for _ in range(rng.randint(0, 3)))

    def equivalent_variant(self, psi, rng, names):
        reps = fusion_classes(psi)
        extra = set(psi)
        members = sorted(reps)
        if members and rng.random() < 0.7:
            a = rng.choice(members)
            same = [b for b in members if reps[b] == reps[a]]
            extra.add(Eq.of(a, rng.choice(same)))
        elif psi and rng.random() < 0.5:
            # drop a redundant atom if there is one
            for atom in sorted(psi, key=str):
                rest = frozenset(psi - {atom})
                if fused(rest, atom.left, atom.right):
                    return rest
        return frozenset(extra)


# ---------------------------------------------------------------- constraints


class ConstraintInstance(FusionInstance):
    """Concurrent constraints over name equations and disequations.

    A store holds fusions ``a=b`` and apartness atoms ``a!=b``; it is
    inconsistent when some apart pair is fused.  An inconsistent store is the
    bottom element and entails every condition.  ``cons(S)`` holds when the
    store composed with ``S`` is consistent.
    """

    name = "constraint"
    exact_probes = True
    exact_extensions = False
    has_weakening = False

    def consistent(self, store: frozenset) -> bool:
        eqs = frozenset(a for a in store if isinstance(a, Eq))
        return not any(isinstance(a, Neq) and fused(eqs, a.left, a.right) for a in store)

    def decide(self, assertion, condition):
        if not self.consistent(assertion):
            return True
        if isinstance(condition, Eq):
            eqs = frozenset(a for a in assertion if isinstance(a, Eq))
            return fused(eqs, condition.left, condition.right)
        if isinstance(condition, Cons):
            return self.consistent(assertion | condition.store)
        return False

    def parse_condition(self, text):
        text = text.strip()
        if text.startswith("cons(") and text.endswith(")"):
            return Cons(self.parse_assertion(text[5:-1]))
        cond = parse_binary(text, self.terms)
        if not isinstance(cond, Eq):
            raise PsiSyntaxError(f"constraint conditions are a=b or cons(...), got {text!r}")
        return cond

    def print_condition(self, cond):
        if isinstance(cond, Cons):
            return f"cons({self.print_assertion(cond.store)})"
        return str(cond)

    def parse_assertion(self, text):
        return _fusion_atoms(text, self, allowed=(Eq, Neq))

    def canonical_assertion(self, assertion):
        if not self.consistent(assertion):
            return "inconsistent"
        eqs = frozenset(a for a in assertion if isinstance(a, Eq))
        reps = fusion_classes(eqs)
        apart = frozenset(
            frozenset((reps.get(a.left, a.left), reps.get(a.right, a.right)))
            for a in assertion if isinstance(a, Neq)
        )
        return partition(eqs), apart

    def restrict_assertion(self, assertion, names):
        return assertion

    def condition_probe_basis(self, names, frames):
        pool = sorted(names)
        out = [Eq.of(a, b) for a, b in itertools.combinations(pool, 2)]
        out += [Cons(frozenset((Eq.of(a, b),))) for a, b in itertools.combinations(pool, 2)]
        # the empty cons probe detects inconsistency of the store itself
        out.append(Cons(frozenset()))
        return out

    def extension_basis(self, assertion, names):
        pool = sorted(set(names) | support(assertion))
        pool.append(fresh_names(1, pool, prefix="e")[0])
        out = [self.unit]
        for a, b in itertools.combinations(pool, 2):
            out.append(frozenset((Eq.of(a, b),)))
            out.append(frozenset((Neq.of(a, b),)))
        return out

    def random_assertion(self, rng, names):
        atoms = set()
        for _ in range(rng.randint(0, 3)):
            a, b = rng.choice(names), rng.choice(names)
            atoms.add(Eq.of(a, b) if rng.random() < 0.7 or a == b else Neq.of(a, b))
        return frozenset(atoms)

    def random_condition(self, rng, names):
        if rng.random() < 0.3:
            return Cons(self.random_assertion(rng, names))
        return Eq.of(rng.choice(names), rng.choice(names))


def ask(condition, body):
    """``ask phi.P``: a silent step to ``P`` once the store entails ``phi``."""
    return Case(((condition, tau_prefix(body)),))


def tell_eventual(store, body):
    """Add ``store`` after a silent step, consistent or not."""
    return tau_prefix(Par(Assert(frozenset(store)), body))


def tell_atomic(store, body):
    """Add ``store`` only when the result stays consistent."""
    store = frozenset(store)
    return Case(((Cons(store), tau_prefix(Par(Assert(store), body))),))


# ---------------------------------------------------------------- channel pool


class PoolInstance(_NameTerms):
    """Assertions are name sets; any two names in the set are channel equivalent."""

    name = "pool"
    unit = frozenset()
    exact_probes = False
    exact_extensions = False
    has_weakening = True

    def compose(self, first, second):
        return first | second

    def decide(self, assertion, condition):
        if isinstance(condition, ChanEq):
            return condition.left in assertion and condition.right in assertion
        return False

    def parse_condition(self, text):
        cond = parse_binary(text, self.terms)
        if not isinstance(cond, ChanEq):
            raise PsiSyntaxError(f"pool conditions are a<->b, got {text!r}")
        return cond

    def parse_assertion(self, text):
        if text.strip() in ("1", "{}", ""):
            return frozenset()
        items = braced_items(text)
        out = []
        for item in items:
            out.append(self.parse_term(item))
        return frozenset(out)

    def print_assertion(self, psi):
        return "{" + ", ".join(sorted(psi)) + "}"

    def restrict_assertion(self, assertion, names):
        return frozenset(assertion) & names

    def condition_probe_basis(self, names, frames):
        pool = sorted(names)
        return [ChanEq(a, b) for a in pool for b in pool]

    def channel_candidates(self, assertion):
        return set(assertion)

    def extension_basis(self, assertion, names):
        pool = sorted(set(names) | set(assertion))
        pool.append(fresh_names(1, pool, prefix="e")[0])
        return [self.unit] + [frozenset((n,)) for n in pool if n not in assertion]

    def random_assertion(self, rng, names):
        return frozenset(rng.sample(list(names), rng.randint(0, min(3, len(names)))))

    def random_condition(self, rng, names):
        return ChanEq(rng.choice(names), rng.choice(names))

    def equivalent_variant(self, psi, rng, names):
        return frozenset(psi)

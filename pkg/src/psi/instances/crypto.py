"""Cryptographic terms: a rewrite normaliser and an equational entailment
decided by congruence closure with saturation.

Equations of the theory:

    dec(enc(x,y), y)              = x
    dec(enc(x,pk(k)), sk(k))      = x
    dec(enc(x,pk(k),z), sk(k))    = x        (salted)
    check(x, sign(x,sk(k)), pk(k)) = ok
    fst(pair(x,y)) = x,  snd(pair(x,y)) = y
    f(x, g(y))     = f(y, g(x))              (Diffie-Hellman)

``hash`` and tuples ``tN`` are free.
"""

from __future__ import annotations

import itertools
import random
from typing import Any, Iterable

from ..errors import PsiSyntaxError
from ..instance_api import Instance
from ..nominal import support
from ..terms import Eq, Fn, braced_items, parse_binary, print_term, subterms, term_key

OK = Fn("ok", ())

SIGNATURE = {
    "enc": (2, 3),
    "dec": (2,),
    "hash": (1,),
    "pair": (2,),
    "fst": (1,),
    "snd": (1,),
    "pk": (1,),
    "sk": (1,),
    "sign": (2,),
    "check": (3,),
    "ok": (0,),
    "f": (2,),
    "g": (1,),
}


def _arity_ok(term: Fn) -> bool:
    if term.symbol in SIGNATURE:
        return len(term.args) in SIGNATURE[term.symbol]
    if term.symbol.startswith("t") and term.symbol[1:].isdigit():
        return int(term.symbol[1:]) == len(term.args)
    return False


# ------------------------------------------------------------------ rewriting


def _root_step(t: Any) -> Any | None:
    """The contractum of the rule applicable at the root of ``t``, if any."""
    if not isinstance(t, Fn):
        return None
    s, a = t.symbol, t.args
    if s == "dec" and len(a) == 2 and isinstance(a[0], Fn) and a[0].symbol == "enc":
        inner = a[0].args
        if len(inner) == 2 and inner[1] == a[1]:
            return inner[0]
        key = inner[1]
        if (
            isinstance(key, Fn) and key.symbol == "pk" and isinstance(a[1], Fn)
            and a[1].symbol == "sk" and key.args == a[1].args
        ):
            return inner[0]
    if s == "check" and len(a) == 3:
        sig, pub = a[1], a[2]
        if (
            isinstance(sig, Fn) and sig.symbol == "sign" and sig.args[0] == a[0]
            and isinstance(sig.args[1], Fn) and sig.args[1].symbol == "sk"
            and isinstance(pub, Fn) and pub.symbol == "pk" and pub.args == sig.args[1].args
        ):
            return OK
    if s in ("fst", "snd") and len(a) == 1 and isinstance(a[0], Fn) and a[0].symbol == "pair":
        return a[0].args[0 if s == "fst" else 1]
    if s == "f" and len(a) == 2 and isinstance(a[1], Fn) and a[1].symbol == "g" and len(a[1].args) == 1:
        m, n = a[0], a[1].args[0]
        if term_key(n) < term_key(m):
            return Fn("f", (n, Fn("g", (m,))))
    return None


def _redexes(t: Any, path: tuple = ()) -> list[tuple]:
    out = []
    if _root_step(t) is not None:
        out.append(path)
    if isinstance(t, Fn):
        for i, arg in enumerate(t.args):
            out.extend(_redexes(arg, path + (i,)))
    return out


def _replace(t: Any, path: tuple, new: Any) -> Any:
    if not path:
        return new
    args = list(t.args)
    args[path[0]] = _replace(args[path[0]], path[1:], new)
    return Fn(t.symbol, tuple(args))


def _at(t: Any, path: tuple) -> Any:
    for i in path:
        t = t.args[i]
    return t


def normalise(term: Any, rng: random.Random | None = None, limit: int = 100_000) -> Any:
    """Rewrite to normal form.  With ``rng`` the redex is chosen at random each
    step; without it the leftmost-innermost redex is used."""
    for _ in range(limit):
        found = _redexes(term)
        if not found:
            return term
        path = rng.choice(found) if rng is not None else max(found, key=len)
        term = _replace(term, path, _root_step(_at(term, path)))
    raise RuntimeError("rewriting did not terminate within the step limit")


# ------------------------------------------------------------------ e-graph


class EGraph:
    """Ground congruence closure over hash-consed nodes, saturated with the theory."""

    def __init__(self) -> None:
        self.parent: list[int] = []
        self.memo: dict[tuple, int] = {}
        self.nodes: list[tuple[tuple, int]] = []

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def _canon(self, key: tuple) -> tuple:
        if key[0] == "$":
            return key
        return (key[0], tuple(self.find(c) for c in key[1]))

    def _add_key(self, key: tuple) -> int:
        key = self._canon(key)
        hit = self.memo.get(key)
        if hit is not None:
            return self.find(hit)
        cls = len(self.parent)
        self.parent.append(cls)
        self.memo[key] = cls
        self.nodes.append((key, cls))
        return cls

    def add(self, term: Any) -> int:
        if isinstance(term, str):
            return self._add_key(("$", term))
        return self._add_key((term.symbol, tuple(self.add(a) for a in term.args)))

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def rebuild(self) -> None:
        changed = True
        while changed:
            changed = False
            memo: dict[tuple, int] = {}
            for key, cls in self.nodes:
                ck = self._canon(key)
                other = memo.get(ck)
                if other is None:
                    memo[ck] = cls
                elif self.union(other, cls):
                    changed = True
            self.memo = memo

    def _by_class(self) -> dict[int, list[tuple]]:
        out: dict[int, list[tuple]] = {}
        for key, cls in self.nodes:
            out.setdefault(self.find(cls), []).append(self._canon(key))
        return out

    def saturate(self, rounds: int = 64) -> None:
        self.rebuild()
        for _ in range(rounds):
            if not self._apply_rules():
                return
            self.rebuild()

    def _apply_rules(self) -> bool:
        classes = self._by_class()
        pending: list[tuple[int, int]] = []
        additions: list[tuple[int, int, int]] = []

        def having(cls: int, symbol: str, arity: int | None = None) -> list[tuple]:
            return [
                k[1] for k in classes.get(self.find(cls), ())
                if k[0] == symbol and (arity is None or len(k[1]) == arity)
            ]

        def same(a: int, b: int) -> bool:
            return self.find(a) == self.find(b)

        def key_pair(pub_cls: int, sec_cls: int) -> bool:
            return any(same(p[0], s[0]) for p in having(pub_cls, "pk", 1) for s in having(sec_cls, "sk", 1))

        for key, cls in list(self.nodes):
            sym, args = key[0], key[1] if key[0] != "$" else ()
            if sym == "dec" and len(args) == 2:
                for enc in having(args[0], "enc"):
                    if len(enc) == 2 and same(enc[1], args[1]):
                        pending.append((cls, enc[0]))
                    elif key_pair(enc[1], args[1]):
                        pending.append((cls, enc[0]))
            elif sym == "check" and len(args) == 3:
                for sig in having(args[1], "sign", 2):
                    if same(sig[0], args[0]) and key_pair(args[2], sig[1]):
                        pending.append((cls, self._add_key(("ok", ()))))
            elif sym in ("fst", "snd") and len(args) == 1:
                for pair in having(args[0], "pair", 2):
                    pending.append((cls, pair[0 if sym == "fst" else 1]))
            elif sym == "f" and len(args) == 2:
                for inner in having(args[1], "g", 1):
                    additions.append((cls, args[0], inner[0]))

        changed = False
        for cls, first, other in additions:
            swapped = self._add_key(("f", (other, self._add_key(("g", (first,))))))
            if self.union(cls, swapped):
                changed = True
        for a, b in pending:
            if self.union(a, b):
                changed = True
        return changed


def _graph_for(assertion: frozenset, extra: Iterable[Any]) -> EGraph:
    graph = EGraph()
    for eq in assertion:
        graph.union(graph.add(eq.left), graph.add(eq.right))
    for t in extra:
        graph.add(t)
    graph.saturate()
    return graph


class CryptoInstance(Instance):
    """Terms over the cryptographic signature; assertions are finite equation sets."""

    name = "crypto"
    unit = frozenset()
    exact_probes = True
    exact_extensions = False
    constants = frozenset({"ok"})

    def chan_eq(self, left, right):
        return Eq.of(left, right)

    def compose(self, first, second):
        return first | second

    def decide(self, assertion, condition):
        return self.entails_all(assertion, [condition])[0]

    def entails_all(self, assertion, conditions):
        todo = [c for c in conditions if (assertion, c) not in self._entail_cache]
        if todo:
            if len(self._entail_cache) > 200_000:
                self._entail_cache.clear()
            terms = [t for c in todo if isinstance(c, Eq) for t in (c.left, c.right)]
            graph = _graph_for(assertion, terms)
            for c in todo:
                ok = isinstance(c, Eq) and graph.find(graph.add(c.left)) == graph.find(graph.add(c.right))
                self._entail_cache[(assertion, c)] = ok
        return [self._entail_cache[(assertion, c)] for c in conditions]

    def entails(self, assertion, condition):
        return self.entails_all(assertion, [condition])[0]

    # -- syntax --------------------------------------------------------
    def _check(self, term):
        if isinstance(term, Fn):
            if not _arity_ok(term):
                raise PsiSyntaxError(f"unknown symbol or wrong arity: {print_term(term)}")
            for a in term.args:
                self._check(a)
        return term

    def parse_term(self, text):
        return self._check(self.terms.parse(text))

    def parse_condition(self, text):
        cond = parse_binary(text, self.terms)
        if not isinstance(cond, Eq):
            raise PsiSyntaxError(f"crypto conditions are equations, got {text!r}")
        self._check(cond.left)
        self._check(cond.right)
        return cond

    def parse_assertion(self, text):
        if text.strip() in ("1", "{}", ""):
            return frozenset()
        return frozenset(self.parse_condition(item) for item in braced_items(text))

    def print_assertion(self, psi):
        if not psi:
            return "{}"
        return "{" + ", ".join(sorted(str(e) for e in psi)) + "}"

    # -- bases -----------------------------------------------------------
    def probe_terms(self, names, frames):
        pool = set(names)
        for fr in frames:
            bound = frozenset(fr.binders)
            for eq in fr.assertion:
                for side in (eq.left, eq.right):
                    for t in subterms(side):
                        if not (support(t) & bound):
                            pool.add(t)
        return sorted(pool, key=term_key)

    def condition_probe_basis(self, names, frames):
        terms = self.probe_terms(names, frames)
        return [Eq.of(a, b) for a, b in itertools.combinations(terms, 2)]

    def channel_candidates(self, assertion):
        return {t for eq in assertion for side in (eq.left, eq.right) for t in subterms(side)}

    def extension_basis(self, assertion, names):
        pool = sorted(set(names))
        out = [self.unit]
        for a, b in itertools.combinations(pool, 2):
            out.append(frozenset((Eq.of(a, b),)))
        return out

    # -- generators ------------------------------------------------------
    def random_term(self, rng, names, depth: int = 3):
        if depth == 0 or rng.random() < 0.35:
            return OK if rng.random() < 0.05 else rng.choice(names)
        symbol = rng.choice(sorted(SIGNATURE))
        arity = rng.choice(SIGNATURE[symbol])
        return Fn(symbol, tuple(self.random_term(rng, names, depth - 1) for _ in range(arity)))

    def random_condition(self, rng, names):
        return Eq.of(self.random_term(rng, names, 2), self.random_term(rng, names, 2))

    def random_assertion(self, rng, names):
        return frozenset(
            Eq.of(rng.choice(names), self.random_term(rng, names, 2)) for _ in range(rng.randint(0, 2))
        )

    def random_channel_pair(self, rng, names, start=None):
        first = self.random_term(rng, names, 2) if start is None else start
        roll = rng.random()
        if roll < 0.3:
            key = rng.choice(names)
            return first, Fn("dec", (Fn("enc", (first, key)), key))
        if roll < 0.5:
            return first, Fn("fst", (Fn("pair", (first, rng.choice(names))),))
        if roll < 0.7:
            return first, normalise(first)
        return first, self.random_term(rng, names, 2)

    def equivalent_variant(self, psi, rng, names):
        t = self.random_term(rng, names, 2)
        return psi | {Eq.of(t, t)}


def destructor_identities() -> list[tuple[Any, Any]]:
    """Instances of every equation of the theory, for sanity checks."""
    m, k, s, z, n_p, n_q = "m", "k", "s", "z", "nP", "nQ"
    return [
        (Fn("dec", (Fn("enc", (m, k)), k)), m),
        (Fn("dec", (Fn("enc", (m, Fn("pk", (s,)))), Fn("sk", (s,)))), m),
        (Fn("dec", (Fn("enc", (m, Fn("pk", (s,)), z)), Fn("sk", (s,)))), m),
        (Fn("check", (m, Fn("sign", (m, Fn("sk", (s,)))), Fn("pk", (s,)))), OK),
        (Fn("fst", (Fn("pair", (m, k)),)), m),
        (Fn("snd", (Fn("pair", (m, k)),)), k),
        (Fn("f", (n_p, Fn("g", (n_q,)))), Fn("f", (n_q, Fn("g", (n_p,))))),
    ]

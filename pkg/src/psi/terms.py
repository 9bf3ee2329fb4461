"""First-order terms, the standard condition shapes, and their concrete syntax.

A term is either a name (a ``str``) or an ``Fn`` node.  Function symbols are
not names: swapping and substitution never touch them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping, Union

from .errors import PsiSyntaxError
from .nominal import Name, Permutation, apply_permutation, substitute_value, support


@dataclass(frozen=True)
class Fn:
    symbol: str
    args: tuple = ()

    def __permute__(self, perm: Permutation) -> "Fn":
        return Fn(self.symbol, tuple(apply_permutation(perm, a) for a in self.args))

    def __support__(self) -> frozenset:
        return self._support

    @cached_property
    def _support(self) -> frozenset:
        return support(self.args)

    def __subst__(self, mapping: Mapping[Name, Any]) -> "Fn":
        return Fn(self.symbol, tuple(substitute_value(a, mapping) for a in self.args))

    def __str__(self) -> str:
        return print_term(self)


Term = Union[str, Fn]


def term_key(term: Any) -> tuple:
    """A total order on terms used for canonical orientation."""
    if isinstance(term, str):
        return (0, term)
    if isinstance(term, Fn):
        return (1, term.symbol, len(term.args), tuple(term_key(a) for a in term.args))
    return (2, repr(term))


def subterms(term: Term) -> Iterable[Term]:
    yield term
    if isinstance(term, Fn):
        for a in term.args:
            yield from subterms(a)


def term_size(term: Term) -> int:
    if isinstance(term, Fn):
        return 1 + sum(term_size(a) for a in term.args)
    return 1


@dataclass(frozen=True)
class Eq:
    """``left = right``; the pair is stored in canonical orientation."""

    left: Any
    right: Any

    @staticmethod
    def of(left: Any, right: Any) -> "Eq":
        if term_key(right) < term_key(left):
            left, right = right, left
        return Eq(left, right)

    def __permute__(self, perm: Permutation) -> "Eq":
        return Eq.of(apply_permutation(perm, self.left), apply_permutation(perm, self.right))

    def __support__(self) -> frozenset:
        return support(self.left) | support(self.right)

    def __subst__(self, mapping) -> "Eq":
        return Eq.of(substitute_value(self.left, mapping), substitute_value(self.right, mapping))

    def __str__(self) -> str:
        return f"{print_term(self.left)}={print_term(self.right)}"


@dataclass(frozen=True)
class Neq:
    """Apartness atom ``left != right`` inside a constraint store."""

    left: Any
    right: Any

    @staticmethod
    def of(left: Any, right: Any) -> "Neq":
        if term_key(right) < term_key(left):
            left, right = right, left
        return Neq(left, right)

    def __permute__(self, perm):
        return Neq.of(apply_permutation(perm, self.left), apply_permutation(perm, self.right))

    def __support__(self):
        return support(self.left) | support(self.right)

    def __subst__(self, mapping):
        return Neq.of(substitute_value(self.left, mapping), substitute_value(self.right, mapping))

    def __str__(self) -> str:
        return f"{print_term(self.left)}!={print_term(self.right)}"


@dataclass(frozen=True)
class ChanEq:
    """Channel equivalence ``left <-> right`` (kept oriented)."""

    left: Any
    right: Any

    def __permute__(self, perm):
        return ChanEq(apply_permutation(perm, self.left), apply_permutation(perm, self.right))

    def __support__(self):
        return support(self.left) | support(self.right)

    def __subst__(self, mapping):
        return ChanEq(substitute_value(self.left, mapping), substitute_value(self.right, mapping))

    def __str__(self) -> str:
        return f"{print_term(self.left)}<->{print_term(self.right)}"


@dataclass(frozen=True)
class Cons:
    """Consistency condition ``cons(store)``."""

    store: frozenset

    def __permute__(self, perm):
        return Cons(apply_permutation(perm, self.store))

    def __support__(self):
        return support(self.store)

    def __subst__(self, mapping):
        return Cons(substitute_value(self.store, mapping))

    def __str__(self) -> str:
        return "cons({" + ", ".join(sorted(str(a) for a in self.store)) + "})"


# ---------------------------------------------------------------- printing


def print_term(term: Any) -> str:
    if isinstance(term, str):
        return term
    if isinstance(term, Fn):
        if term.symbol == "loc" and len(term.args) == 2:
            return f"<{print_term(term.args[0])},{print_term(term.args[1])}>"
        if not term.args:
            return term.symbol
        return f"{term.symbol}({','.join(print_term(a) for a in term.args)})"
    return str(term)


def print_atoms(atoms: Iterable[Any]) -> str:
    items = sorted(atoms, key=lambda a: str(a))
    return "{" + ", ".join(str(a) if not isinstance(a, (str, Fn)) else print_term(a) for a in items) + "}"


# ----------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(<->|!=|[A-Za-z_][A-Za-z0-9_']*|\d+|[(){},<>=])")


def tokenize_fragment(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PsiSyntaxError(f"unexpected character {text[pos]!r}", pos)
        tokens.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


class TermParser:
    """Recursive-descent parser for first-order terms.

    ``constants`` lists zero-ary symbols written without parentheses;
    every other bare identifier is a name.
    """

    def __init__(self, constants: Iterable[str] = ()):
        self.constants = frozenset(constants)

    def parse(self, text: str) -> Term:
        tokens = tokenize_fragment(text)
        term, pos = self._term(tokens, 0)
        if pos != len(tokens):
            raise PsiSyntaxError(f"trailing input in term {text!r}", pos)
        return term

    def parse_tokens(self, tokens: list[str], pos: int) -> tuple[Term, int]:
        return self._term(tokens, pos)

    def _term(self, tokens: list[str], pos: int) -> tuple[Term, int]:
        if pos >= len(tokens):
            raise PsiSyntaxError("term expected", pos)
        tok = tokens[pos]
        if tok == "<":
            left, pos = self._term(tokens, pos + 1)
            pos = _expect(tokens, pos, ",")
            right, pos = self._term(tokens, pos)
            pos = _expect(tokens, pos, ">")
            return Fn("loc", (left, right)), pos
        if not re.match(r"[A-Za-z_]", tok):
            raise PsiSyntaxError(f"term expected, found {tok!r}", pos)
        if pos + 1 < len(tokens) and tokens[pos + 1] == "(":
            args = []
            pos += 2
            if pos < len(tokens) and tokens[pos] == ")":
                return Fn(tok, ()), pos + 1
            while True:
                arg, pos = self._term(tokens, pos)
                args.append(arg)
                if pos < len(tokens) and tokens[pos] == ",":
                    pos += 1
                    continue
                pos = _expect(tokens, pos, ")")
                return Fn(tok, tuple(args)), pos
        if tok in self.constants:
            return Fn(tok, ()), pos + 1
        return tok, pos + 1


def _expect(tokens: list[str], pos: int, want: str) -> int:
    if pos >= len(tokens) or tokens[pos] != want:
        found = tokens[pos] if pos < len(tokens) else "end of input"
        raise PsiSyntaxError(f"expected {want!r}, found {found!r}", pos)
    return pos + 1


def split_top(text: str, sep: str = ",") -> list[str]:
    """Split at ``sep`` occurrences outside brackets."""
    parts, depth, current = [], 0, []
    i = 0
    while i < len(text):
        if text.startswith("<->", i):
            current.append("<->")
            i += 3
            continue
        ch = text[i]
        if ch in "({<":
            depth += 1
        elif ch in ")}>":
            depth -= 1
        if depth == 0 and text.startswith(sep, i):
            parts.append("".join(current))
            current = []
            i += len(sep)
            continue
        current.append(ch)
        i += 1
    parts.append("".join(current))
    return [p.strip() for p in parts if p.strip()]


def parse_binary(text: str, terms: TermParser) -> Any:
    """Parse ``M = N``, ``M != N`` or ``M <-> N``."""
    tokens = tokenize_fragment(text)
    left, pos = terms.parse_tokens(tokens, 0)
    if pos >= len(tokens):
        raise PsiSyntaxError(f"condition expected in {text!r}", pos)
    op = tokens[pos]
    right, end = terms.parse_tokens(tokens, pos + 1)
    if end != len(tokens):
        raise PsiSyntaxError(f"trailing input in {text!r}", end)
    if op == "=":
        return Eq.of(left, right)
    if op == "!=":
        return Neq.of(left, right)
    if op == "<->":
        return ChanEq(left, right)
    raise PsiSyntaxError(f"unknown relation {op!r}", pos)


def braced_items(text: str) -> list[str]:
    """``{a, b}`` -> ``['a', 'b']``; a bare item is a singleton."""
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        return split_top(text[1:-1])
    return [text] if text else []

"""Names, swappings, support and freshness.

Names are plain strings.  Every other value that can mention names is
either a string, a tuple or frozenset of such values, or an object that
implements the small protocol below:

    __permute__(perm)      swap names everywhere, binders included
    __support__()          frozenset of names that swapping can move
    __subst__(mapping)     first-order simultaneous substitution

Values with binders (agents, frames, residuals) override these and handle
their binders themselves.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

Name = str
NameSet = frozenset


@dataclass(frozen=True)
class Permutation:
    """A finite list of swaps ``(a b)``, applied right to left."""

    swaps: tuple[tuple[Name, Name], ...] = ()

    @classmethod
    def swap(cls, a: Name, b: Name) -> "Permutation":
        return cls(((a, b),))

    @classmethod
    def pairwise(cls, left: Sequence[Name], right: Sequence[Name]) -> "Permutation":
        """The permutation ``(l1 r1)(l2 r2)...`` used to rename sequences."""
        if len(left) != len(right):
            raise ValueError("swap sequences must have equal length")
        return cls(tuple(zip(left, right)))

    def __call__(self, name: Name) -> Name:
        for a, b in reversed(self.swaps):
            if name == a:
                name = b
            elif name == b:
                name = a
        return name

    def then(self, other: "Permutation") -> "Permutation":
        """Apply ``self`` first, then ``other``."""
        return Permutation(other.swaps + self.swaps)

    def inverse(self) -> "Permutation":
        return Permutation(tuple(reversed(self.swaps)))

    def is_identity_on(self, names: Iterable[Name]) -> bool:
        return all(self(n) == n for n in names)


def apply_permutation(perm: Permutation, value: Any) -> Any:
    if not perm.swaps:
        return value
    if isinstance(value, str):
        return perm(value)
    if isinstance(value, tuple):
        return tuple(apply_permutation(perm, v) for v in value)
    if isinstance(value, frozenset):
        return frozenset(apply_permutation(perm, v) for v in value)
    method = getattr(value, "__permute__", None)
    if method is not None:
        return method(perm)
    return value


def support(value: Any) -> frozenset:
    if isinstance(value, str):
        return frozenset((value,))
    if isinstance(value, (tuple, frozenset, list)):
        out: set = set()
        for v in value:
            out |= support(v)
        return frozenset(out)
    method = getattr(value, "__support__", None)
    if method is not None:
        return method()
    return frozenset()


def fresh_for(name: Name, value: Any) -> bool:
    """``name # value``."""
    return name not in support(value)


def substitute_value(value: Any, mapping: Mapping[Name, Any]) -> Any:
    """Syntactic simultaneous substitution on first-order values."""
    if not mapping:
        return value
    if isinstance(value, str):
        return mapping.get(value, value)
    if isinstance(value, tuple):
        return tuple(substitute_value(v, mapping) for v in value)
    if isinstance(value, frozenset):
        return frozenset(substitute_value(v, mapping) for v in value)
    method = getattr(value, "__subst__", None)
    if method is not None:
        return method(mapping)
    return value


_NUMBERED = re.compile(r"^(.*?)(\d+)$")


def fresh_names(count: int, avoid: Iterable[Name], prefix: str = "n") -> tuple[Name, ...]:
    """``count`` distinct names ``prefix<i>`` with the lowest indices not in ``avoid``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    taken = set(avoid)
    out = []
    i = 0
    while len(out) < count:
        candidate = f"{prefix}{i}"
        if candidate not in taken:
            out.append(candidate)
            taken.add(candidate)
        i += 1
    return tuple(out)


def fresh_like(name: Name, avoid: Iterable[Name] | set) -> Name:
    """A readable variant of ``name`` not in ``avoid`` (``a`` becomes ``a1``, ``a2``...)."""
    taken = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    if name not in taken:
        return name
    match = _NUMBERED.match(name)
    stem = match.group(1) if match and match.group(1) else name
    i = 1
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


class NameSupply:
    """Deterministic fresh-name source for one workspace.

    The only mutable object in the nominal layer; do not share one
    supply between threads without locking.
    """

    def __init__(self, used: Iterable[Name] = ()):
        self.used: set[Name] = set(used)

    def reserve(self, names: Iterable[Name]) -> None:
        self.used.update(names)

    def like(self, name: Name) -> Name:
        fresh = fresh_like(name, self.used)
        self.used.add(fresh)
        return fresh

    def take(self, count: int, prefix: str = "n") -> tuple[Name, ...]:
        out = fresh_names(count, self.used, prefix)
        self.used.update(out)
        return out


def alpha_equal(x: Any, y: Any) -> bool:
    """Equality up to renaming of bound names.

    Values that have binders expose ``canonical()``; first-order values have
    no binders, so plain equality is alpha-equality for them.
    """
    cx = getattr(x, "canonical", None)
    cy = getattr(y, "canonical", None)
    if cx is not None and cy is not None:
        return cx() == cy()
    return x == y

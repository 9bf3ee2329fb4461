"""Frames ``(nu b~)Psi`` and the operations on them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, TYPE_CHECKING

from .nominal import Name, NameSupply, Permutation, apply_permutation, support

if TYPE_CHECKING:
    from .instance_api import Instance


@dataclass(frozen=True)
class Frame:
    binders: tuple[Name, ...]
    assertion: Any

    def __support__(self) -> frozenset:
        return self._free

    @cached_property
    def _free(self) -> frozenset:
        return support(self.assertion) - frozenset(self.binders)

    def __permute__(self, perm: Permutation) -> "Frame":
        return Frame(tuple(perm(b) for b in self.binders), apply_permutation(perm, self.assertion))

    def renamed_apart(self, avoid: Iterable[Name]) -> "Frame":
        """An alpha-variant whose binders avoid ``avoid`` and each other."""
        used = set(avoid) | set(support(self.assertion)) | set(self.binders)
        supply = NameSupply(used)
        binders = []
        assertion = self.assertion
        avoid = set(avoid)
        seen: set[Name] = set()
        for b in self.binders:
            if b in avoid or b in seen:
                fresh = supply.like(b)
                assertion = apply_permutation(Permutation.swap(b, fresh), assertion)
                b = fresh
            seen.add(b)
            binders.append(b)
        return Frame(tuple(binders), assertion)

    def canonical(self) -> "Frame":
        """Binders renamed ``_0, _1, ...`` in order (alpha-representative)."""
        free = self._free
        used = set(free) | set(self.binders) | set(support(self.assertion))
        names = []
        i = 0
        while len(names) < len(self.binders):
            cand = f"_{i}"
            if cand not in free:
                names.append(cand)
            i += 1
        # rename via a temporary set of untouched names to avoid collisions
        supply = NameSupply(used | set(names))
        temps = [supply.like("_t") for _ in self.binders]
        assertion = self.assertion
        for b, t in zip(self.binders, temps):
            assertion = apply_permutation(Permutation.swap(b, t), assertion)
        for t, n in zip(temps, names):
            assertion = apply_permutation(Permutation.swap(t, n), assertion)
        return Frame(tuple(names), assertion)


def unit_frame(inst: "Instance") -> Frame:
    return Frame((), inst.unit)


def frame_compose(inst: "Instance", first: Frame, second: Frame) -> Frame:
    """``(nu b1)Psi1 (x) (nu b2)Psi2 = (nu b1 b2)(Psi1 (x) Psi2)`` with binders renamed apart."""
    a = first.renamed_apart(support(second) | frozenset(second.binders))
    b = second.renamed_apart(support(a.assertion) | frozenset(a.binders))
    return Frame(a.binders + b.binders, inst.compose(a.assertion, b.assertion))


def frame_extend(inst: "Instance", psi: Any, frame: Frame) -> Frame:
    """``Psi (x) F`` with the binders of ``F`` chosen fresh for ``Psi``."""
    f = frame.renamed_apart(support(psi))
    return Frame(f.binders, inst.compose(psi, f.assertion))


def frame_entails(inst: "Instance", frame: Frame, condition: Any) -> bool:
    f = frame.renamed_apart(support(condition))
    return inst.entails(f.assertion, condition)


def frame_entails_all(inst: "Instance", frame: Frame, conditions: list) -> list[bool]:
    f = frame.renamed_apart(support(tuple(conditions)))
    return inst.entails_all(f.assertion, conditions)


def frame_difference(inst: "Instance", left: Frame, right: Frame) -> tuple[Any, bool, bool] | None:
    """The first probe condition on which the frames disagree, or ``None``."""
    free = support(left) | support(right)
    l = left.renamed_apart(free | frozenset(right.binders))
    r = right.renamed_apart(free | frozenset(l.binders))
    probes = inst.condition_probe_basis(free, [l, r])
    lv = frame_entails_all(inst, l, probes)
    rv = frame_entails_all(inst, r, probes)
    for cond, a, b in zip(probes, lv, rv):
        if a != b:
            return cond, a, b
    return None


def frame_equivalent(inst: "Instance", left: Frame, right: Frame) -> bool:
    return frame_difference(inst, left, right) is None

"""Random well-formed agents for property tests and law sampling."""

from __future__ import annotations

import random
from typing import TYPE_CHECKING, Sequence

from .nominal import Name
from .syntax import NIL, Agent, Assert, Case, Input, Output, Par, Rep, Res, guarded, well_formed

if TYPE_CHECKING:
    from .instance_api import Instance


def random_agent(
    rng: random.Random,
    inst: "Instance",
    names: Sequence[Name] = ("a", "b", "c"),
    size: int = 4,
    replication: bool = True,
    assertions: bool | None = None,
) -> Agent:
    """A well-formed agent with at most ``size`` non-nil nodes.

    Terms come from ``inst.random_term``; assertion components are only
    produced when the instance has assertions other than the unit (or when
    ``assertions`` forces it).
    """
    if assertions is None:
        assertions = inst.random_assertion(random.Random(0), list(names)) != inst.unit or inst.name in (
            "fusion",
            "constraint",
            "pool",
        )
    budget = [size]
    return _gen(rng, inst, list(names), budget, replication, assertions, bound=[])


def _gen(rng, inst, names, budget, replication, assertions, bound) -> Agent:
    if budget[0] <= 0:
        return NIL
    budget[0] -= 1
    scope = names + bound
    kinds = ["out", "in", "par", "res", "nil"]
    if replication:
        kinds.append("rep")
    if assertions:
        kinds.append("assert")
    kinds.append("case")
    kind = rng.choice(kinds)
    if kind == "nil":
        return NIL
    if kind == "out":
        return Output(rng.choice(scope), inst.random_term(rng, scope), _gen(rng, inst, names, budget, replication, assertions, bound))
    if kind == "in":
        x = f"x{len(bound)}"
        cont = _gen(rng, inst, names, budget, replication, assertions, bound + [x])
        return Input(rng.choice(scope), (x,), x, cont)
    if kind == "par":
        left = _gen(rng, inst, names, budget, replication, assertions, bound)
        right = _gen(rng, inst, names, budget, replication, assertions, bound)
        return Par(left, right)
    if kind == "res":
        r = f"r{len(bound)}"
        return Res(r, _gen(rng, inst, names, budget, replication, assertions, bound + [r]))
    if kind == "assert":
        return Assert(inst.random_assertion(rng, scope))
    body = _gen(rng, inst, names, budget, replication, assertions, bound)
    if not guarded(body):
        body = Output(rng.choice(scope), rng.choice(scope), body)
    if kind == "rep":
        return body if isinstance(body, Rep) else Rep(body)
    return Case(((inst.random_condition(rng, scope), body),))


def random_agents(rng: random.Random, inst: "Instance", count: int, **kw) -> list[Agent]:
    out = []
    while len(out) < count:
        p = random_agent(rng, inst, **kw)
        if well_formed(p):
            out.append(p)
    return out

"""Strong bisimulation as a game over (environment, left, right) triples.

Every reachable triple is expanded once: its static check, its extension
children and, for each challenger move, the list of responses.  A greatest
fixpoint is then computed by repeatedly marking triples bad; a triple that
was never expanded (bounds hit) is optimistically assumed good, so a bad
root is a genuine refutation while a good root under truncation is only
inconclusive.

Where the definition quantifies over every added assertion, the game uses
the instance's extension basis, restricted to elements over names already
present in the triple.  When replication is
present the derivatives are put in a structural normal form first, otherwise
each unfolding would create a new state.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Callable, Iterable, Sequence

from .errors import DepthExceeded
from .frames import frame_difference, frame_entails, frame_extend
from .instance_api import ConformanceReport, LawResult, SubstitutionSeq, assertion_equivalent
from .nominal import Name, NameSupply, Permutation, apply_permutation, fresh_names, support
from .semantics import NameInstantiation, OutputAct, print_action, transitions
from .syntax import (
    NIL,
    Agent,
    Assert,
    Case,
    Input,
    Nil,
    Output,
    Par,
    Rep,
    Res,
    frame_of,
    guarded,
    has_replication,
    par_components,
    print_agent,
    substitute_agent,
)
from .terms import Eq

if TYPE_CHECKING:
    from .instance_api import Instance


# ---------------------------------------------------------------- normal form


def structural_normal_form(agent: Agent) -> Agent:
    """A representative modulo some structural laws.

    Parallel components are flattened, sorted and stripped of ``0``; a
    restriction is dropped when vacuous and otherwise pushed onto the
    components that use it; a component that is an idle copy of a
    replicated sibling is absorbed by it; a subagent with no prefixes and no
    assertions (which can never act and has a unit frame) becomes ``0``.
    The result is bisimilar to the input in every psi-calculus.
    """
    return _nf(agent).canonical()


def _inert(p: Agent) -> bool:
    if isinstance(p, Nil):
        return True
    if isinstance(p, (Output, Input, Assert)):
        return False
    if isinstance(p, Case):
        return all(_inert(b) for _, b in p.branches)
    if isinstance(p, (Res, Rep)):
        return _inert(p.body)
    return _inert(p.left) and _inert(p.right)


def _nf(p: Agent) -> Agent:
    if _inert(p):
        return NIL
    if isinstance(p, Assert):
        return p
    if isinstance(p, Output):
        return Output(p.subject, p.obj, _nf(p.cont))
    if isinstance(p, Input):
        return Input(p.subject, p.binders, p.pattern, _nf(p.cont))
    if isinstance(p, Case):
        return Case(tuple((c, _nf(b)) for c, b in p.branches))
    if isinstance(p, Rep):
        return Rep(_nf(p.body))
    if isinstance(p, Par):
        return _rebuild(par_components(_nf(p.left)) + par_components(_nf(p.right)))
    if isinstance(p, Res):
        names = []
        while isinstance(p, Res):
            names.append(p.name)
            p = p.body
        return _scope(names, par_components(_nf(p)))
    raise TypeError(p)


def _scope(names: list, comps: list[Agent]) -> Agent:
    """Place each restriction over the smallest group of components that
    shares it; within a group restrictions follow first occurrence."""
    hidden = [n for n in dict.fromkeys(names) if any(n in c.free_names for c in comps)]
    groups: list[tuple[set, list[Agent]]] = []
    for c in comps:
        mine = {n for n in hidden if n in c.free_names}
        merged_names, merged = set(mine), [c]
        keep = []
        for g_names, g_comps in groups:
            if g_names & merged_names:
                merged_names |= g_names
                merged.extend(g_comps)
            else:
                keep.append((g_names, g_comps))
        groups = keep + [(merged_names, merged)]
    out = []
    for g_names, g_comps in groups:
        if not g_names:
            out.extend(g_comps)
            continue
        g_comps.sort(key=lambda c: print_agent(restrict_all(sorted(g_names & c.free_names), c).canonical()))
        body = _rebuild(g_comps)
        order = [n for n in _occurrences(body) if n in g_names]
        out.append(restrict_all(order, body))
    return _rebuild(out)


def restrict_all(names: Sequence[Name], body: Agent) -> Agent:
    for n in reversed(list(names)):
        body = Res(n, body)
    return body


def _occurrences(p: Agent) -> list:
    """Free names in printing order."""
    seen: dict = {}

    def term(t, bound):
        if isinstance(t, str):
            if t not in bound:
                seen.setdefault(t, None)
        elif hasattr(t, "args") and hasattr(t, "symbol"):
            for a in t.args:
                term(a, bound)
        elif hasattr(t, "left") and hasattr(t, "right"):
            term(t.left, bound)
            term(t.right, bound)
        else:
            for n in sorted(support(t)):
                if n not in bound:
                    seen.setdefault(n, None)

    def go(q, bound):
        if isinstance(q, Output):
            term(q.subject, bound)
            term(q.obj, bound)
            go(q.cont, bound)
        elif isinstance(q, Input):
            term(q.subject, bound)
            inner = bound | set(q.binders)
            term(q.pattern, inner)
            go(q.cont, inner)
        elif isinstance(q, Case):
            for c, b in q.branches:
                term(c, bound)
                go(b, bound)
        elif isinstance(q, Res):
            go(q.body, bound | {q.name})
        elif isinstance(q, Rep):
            go(q.body, bound)
        elif isinstance(q, Par):
            go(q.left, bound)
            go(q.right, bound)
        elif isinstance(q, Assert):
            term(q.assertion, bound)

    go(p, frozenset())
    return list(seen)


def _rebuild(comps: list[Agent]) -> Agent:
    comps = [c for c in comps if not isinstance(c, Nil)]
    keys = [c.canonical() for c in comps]
    alive = [True] * len(comps)
    for i, rep in enumerate(comps):
        if not isinstance(rep, Rep) or not alive[i]:
            continue
        wanted = [b.canonical() for b in par_components(rep.body) if not isinstance(b, Nil)]
        while wanted:
            # absorb one idle copy of the body if all its components are present
            taken = []
            for w in wanted:
                j = next((j for j in range(len(comps)) if j != i and alive[j] and j not in taken and keys[j] == w), None)
                if j is None:
                    break
                taken.append(j)
            if len(taken) < len(wanted):
                break
            for j in taken:
                alive[j] = False
    comps = sorted((c for c, ok in zip(comps, alive) if ok), key=lambda c: print_agent(c.canonical()))
    if not comps:
        return NIL
    out = comps[0]
    for c in comps[1:]:
        out = Par(out, c)
    return out


# ---------------------------------------------------------------- config and verdicts


@dataclass(frozen=True)
class GameConfig:
    """Bounds and bases for one game.

    ``extension_basis(inst, env, names)`` and ``probe_basis`` default to the
    instance's own; ``normalise`` is ``"auto"`` (only when replication occurs),
    ``True`` or ``False``; ``fresh_inputs`` is how many fresh names input
    patterns may receive besides the free names of the triple.
    """

    max_depth: int = 32
    max_states: int = 10_000
    rep_bound: int = 2
    normalise: Any = "auto"
    fresh_inputs: int = 1
    extension_basis: Callable | None = None

    def __post_init__(self) -> None:
        if self.max_depth <= 0 or self.max_states <= 0 or self.rep_bound <= 0:
            raise ValueError("bounds must be positive")


@dataclass
class Witness:
    """One position of a distinguishing play, with the reason it is lost.

    ``clause`` is ``static`` (the frames disagree on ``condition``),
    ``extension`` (the environment is extended by ``extension`` and play
    continues in ``next``) or ``simulation`` (``mover`` does ``action`` to
    ``derivative`` and every answer of the other side loses in its own
    ``next`` play).
    """

    env: Any
    left: Agent
    right: Agent
    clause: str
    condition: Any = None
    left_entails: bool | None = None
    extension: Any = None
    mover: str | None = None
    action: Any = None
    derivative: Agent | None = None
    responses: list = field(default_factory=list)  # (derivative, Witness)
    next: "Witness | None" = None

    def to_dict(self, inst: "Instance") -> dict:
        out: dict = {
            "env": inst.print_assertion(self.env),
            "left": print_agent(self.left, inst),
            "right": print_agent(self.right, inst),
            "clause": self.clause,
        }
        if self.clause == "static":
            out["condition"] = inst.print_condition(self.condition)
            out["left_entails"] = self.left_entails
            out["right_entails"] = not self.left_entails
        elif self.clause == "extension":
            out["extension"] = inst.print_assertion(self.extension)
            out["next"] = self.next.to_dict(inst)
        else:
            out["mover"] = self.mover
            out["action"] = print_action(self.action, inst)
            out["derivative"] = print_agent(self.derivative, inst)
            out["responses"] = [
                {"derivative": print_agent(d, inst), "next": w.to_dict(inst)} for d, w in self.responses
            ]
        return out

    def to_json(self, inst: "Instance") -> str:
        return json.dumps(self.to_dict(inst), indent=2)

    def depth(self) -> int:
        if self.clause == "static":
            return 1
        if self.clause == "extension":
            return 1 + self.next.depth()
        return 1 + max((w.depth() for _, w in self.responses), default=0)


@dataclass
class NotBisimilar:
    witness: Witness
    states: int
    contextual: bool = False
    positive = False

    def describe(self) -> str:
        return f"NotBisimilar (states explored: {self.states})"


@dataclass
class BisimilarUpToBasis:
    exact: bool
    states: int
    positive = True

    def describe(self) -> str:
        return f"BisimilarUpToBasis({'exact' if self.exact else 'inexact'}, states explored: {self.states})"


@dataclass
class Inconclusive:
    reason: DepthExceeded
    states: int
    positive = False

    def describe(self) -> str:
        return f"Inconclusive ({self.reason}; states explored: {self.states})"


# ---------------------------------------------------------------- the arena


@dataclass(frozen=True)
class _Move:
    action: Any
    derivative: Agent


class _Arena:
    """Move generation shared by the game and by witness replay.

    In the contextual variant a triple ``(A, P, Q)`` stands for the agents
    ``(|A|) | P`` and ``(|A|) | Q`` under the unit environment.
    """

    def __init__(self, inst: "Instance", cfg: GameConfig, contextual: bool, normalise: bool):
        self.inst = inst
        self.cfg = cfg
        self.contextual = contextual
        self.normalise = normalise
        self._moves: dict = {}

    def key(self, env: Any, left: Agent, right: Agent) -> tuple:
        return (self.inst.canonical_assertion(env), left.canonical(), right.canonical())

    def names(self, env: Any, left: Agent, right: Agent) -> frozenset:
        return support(env) | left.free_names | right.free_names

    def _agent(self, env: Any, p: Agent) -> tuple[Any, Agent]:
        if self.contextual:
            return self.inst.unit, Par(Assert(env), p)
        return env, p

    def static(self, env: Any, left: Agent, right: Agent):
        inst = self.inst
        if self.contextual:
            fl = frame_of(Par(Assert(env), left), inst)
            fr = frame_of(Par(Assert(env), right), inst)
        else:
            fl = frame_extend(inst, env, frame_of(left, inst))
            fr = frame_extend(inst, env, frame_of(right, inst))
        return frame_difference(inst, fl, fr)

    def extensions(self, env: Any, left: Agent, right: Agent) -> list[tuple[Any, Any]]:
        inst = self.inst
        names = self.names(env, left, right)
        source = self.cfg.extension_basis or (lambda i, e, n: i.extension_basis(e, n))
        out = []
        seen = {inst.canonical_assertion(env)}
        for ext in source(inst, env, names):
            if not support(ext) <= names:
                continue
            new = inst.compose(env, ext)
            key = inst.canonical_assertion(new)
            if key in seen or assertion_equivalent(inst, new, env):
                continue
            seen.add(key)
            out.append((ext, new))
        return out

    def moves(self, env: Any, agent: Agent, names: frozenset) -> list[_Move]:
        """Transitions of ``agent`` with bound names and fresh inputs chosen
        from ``names`` alone, so both sides of a triple agree on them."""
        key = (env, agent, names)
        hit = self._moves.get(key)
        if hit is not None:
            return hit
        inst = self.inst
        fresh_in = fresh_names(self.cfg.fresh_inputs, names, prefix="i")
        policy = NameInstantiation(tuple(sorted(names)) + fresh_in)
        taken = names | frozenset(fresh_in)
        run_env, run_agent = self._agent(env, agent)
        out = []
        seen = set()
        for t in transitions(run_env, run_agent, inst, policy, self.cfg.rep_bound):
            action, deriv = t.action, t.derivative
            if self.contextual:
                assert isinstance(deriv, Par) and isinstance(deriv.left, Assert)
                deriv = deriv.right
            if isinstance(action, OutputAct) and action.bound:
                action, deriv = _rename_bound(action, deriv, taken)
            if self.normalise:
                deriv = structural_normal_form(deriv)
            mv = _Move(action, deriv)
            k = (action, deriv.canonical())
            if k not in seen:
                seen.add(k)
                out.append(mv)
        self._moves[key] = out
        return out


def _rename_bound(action: OutputAct, deriv: Agent, taken: frozenset) -> tuple[OutputAct, Agent]:
    targets = fresh_names(len(action.bound), taken, prefix="o")
    everything = support(action.obj) | support(action.subject) | deriv.free_names | set(taken) | set(targets)
    supply = NameSupply(everything | set(action.bound))
    temps = [supply.take(1, "_tmp")[0] for _ in action.bound]
    value = (action, deriv)
    for b, t in zip(action.bound, temps):
        value = apply_permutation(Permutation.swap(b, t), value)
    for t, n in zip(temps, targets):
        value = apply_permutation(Permutation.swap(t, n), value)
    return value


# ---------------------------------------------------------------- the game


@dataclass
class _Node:
    env: Any
    left: Agent
    right: Agent
    depth: int
    expanded: bool = False
    static: Any = None
    extensions: list = field(default_factory=list)  # (ext, child id)
    challenges: list = field(default_factory=list)  # (mover, _Move, [(deriv, child id | None)])


class _Game:
    def __init__(self, arena: _Arena, env: Any, left: Agent, right: Agent):
        self.arena = arena
        self.cfg = arena.cfg
        self.nodes: list[_Node] = []
        self.index: dict = {}
        self.truncated = False
        self.root = self._node(env, left, right, 0)

    def _node(self, env, left, right, depth) -> int | None:
        env = self.arena.inst.restrict_assertion(env, left.free_names | right.free_names)
        key = self.arena.key(env, left, right)
        hit = self.index.get(key)
        if hit is not None:
            return hit
        if len(self.nodes) >= self.cfg.max_states:
            self.truncated = self.truncated or "states"
            return None
        self.index[key] = len(self.nodes)
        self.nodes.append(_Node(env, left, right, depth))
        return self.index[key]

    def explore(self) -> None:
        queue = deque([self.root])
        while queue:
            nid = queue.popleft()
            node = self.nodes[nid]
            if node.expanded:
                continue
            if node.depth >= self.cfg.max_depth:
                self.truncated = self.truncated or "depth"
                continue
            for child in self._expand(node):
                if child is not None and not self.nodes[child].expanded:
                    queue.append(child)

    def _expand(self, node: _Node) -> list:
        arena = self.arena
        node.expanded = True
        env, left, right = node.env, node.left, node.right
        if left.canonical() == right.canonical():
            return []
        node.static = arena.static(env, left, right)
        if node.static is not None:
            return []
        children = []
        for ext, new in arena.extensions(env, left, right):
            cid = self._node(new, left, right, node.depth + 1)
            node.extensions.append((ext, cid))
            children.append(cid)
        names = arena.names(env, left, right)
        lmoves = arena.moves(env, left, names)
        rmoves = arena.moves(env, right, names)
        for mover, mine, theirs in (("left", lmoves, rmoves), ("right", rmoves, lmoves)):
            by_action: dict = {}
            for mv in theirs:
                by_action.setdefault(mv.action, []).append(mv)
            for mv in mine:
                answers = []
                options = by_action.get(mv.action, [])
                same = [a for a in options if a.derivative.canonical() == mv.derivative.canonical()]
                if same:
                    # answered by the identical derivative, nothing to explore
                    node.challenges.append((mover, mv, [(same[0].derivative, None)]))
                    continue
                for ans in options:
                    pair = (mv.derivative, ans.derivative) if mover == "left" else (ans.derivative, mv.derivative)
                    cid = self._node(env, pair[0], pair[1], node.depth + 1)
                    answers.append((ans.derivative, cid))
                    children.append(cid)
                node.challenges.append((mover, mv, answers))
        return children

    def solve(self) -> dict[int, tuple]:
        """Bad nodes with the reason found first (so witnesses are well-founded)."""
        bad: dict[int, tuple] = {}
        for i, n in enumerate(self.nodes):
            if n.static is not None:
                bad[i] = ("static",)
        changed = True
        while changed:
            changed = False
            newly = {}
            for i, n in enumerate(self.nodes):
                if i in bad or not n.expanded:
                    continue
                reason = self._refute(n, bad)
                if reason is not None:
                    newly[i] = reason
            if newly:
                bad.update(newly)
                changed = True
        return bad

    @staticmethod
    def _refute(n: _Node, bad: dict):
        for idx, (ext, cid) in enumerate(n.extensions):
            if cid is not None and cid in bad:
                return ("extension", idx)
        for idx, (mover, mv, answers) in enumerate(n.challenges):
            if all(cid is not None and cid in bad for _, cid in answers):
                return ("simulation", idx)
        return None

    def witness(self, nid: int, bad: dict) -> Witness:
        n = self.nodes[nid]
        reason = bad[nid]
        if reason[0] == "static":
            cond, lv, _ = n.static
            return Witness(n.env, n.left, n.right, "static", condition=cond, left_entails=lv)
        if reason[0] == "extension":
            ext, cid = n.extensions[reason[1]]
            return Witness(n.env, n.left, n.right, "extension", extension=ext, next=self.witness(cid, bad))
        mover, mv, answers = n.challenges[reason[1]]
        return Witness(
            n.env,
            n.left,
            n.right,
            "simulation",
            mover=mover,
            action=mv.action,
            derivative=mv.derivative,
            responses=[(d, self.witness(cid, bad)) for d, cid in answers],
        )


def _wants_normal_form(cfg: GameConfig, left: Agent, right: Agent) -> bool:
    if cfg.normalise == "auto":
        return has_replication(left) or has_replication(right)
    return bool(cfg.normalise)


def _exact(inst: "Instance") -> bool:
    return bool(inst.exact_probes and inst.exact_extensions and inst.terms_are_names)


def _play(env, left, right, inst, cfg, contextual):
    cfg = cfg or GameConfig()
    arena = _Arena(inst, cfg, contextual, _wants_normal_form(cfg, left, right))
    game = _Game(arena, env, left, right)
    game.explore()
    bad = game.solve()
    states = len(game.nodes)
    if game.root in bad:
        return NotBisimilar(game.witness(game.root, bad), states, contextual)
    if game.truncated:
        if game.truncated == "states":
            return Inconclusive(DepthExceeded(cfg.max_states, "bisimulation state"), states)
        return Inconclusive(DepthExceeded(cfg.max_depth, "bisimulation depth"), states)
    return BisimilarUpToBasis(_exact(inst), states)


def bisimilar(env: Any, left: Agent, right: Agent, inst: "Instance", cfg: GameConfig | None = None):
    """Decide ``left ~_env right`` up to the instance's bases."""
    return _play(env, left, right, inst, cfg, contextual=False)


def context_bisimilar(left: Agent, right: Agent, inst: "Instance", cfg: GameConfig | None = None):
    """The same game with the environment fixed at the unit and extensions
    realised as parallel assertion components."""
    return _play(inst.unit, left, right, inst, cfg, contextual=True)


# ---------------------------------------------------------------- replay


def replay_witness(witness: Witness, inst: "Instance", cfg: GameConfig | None = None, contextual: bool = False) -> bool:
    """Re-check a refutation position by position against fresh calls to the
    transition engine and the static-equivalence test."""
    cfg = cfg or GameConfig()
    arena = _Arena(inst, cfg, contextual, _wants_normal_form(cfg, witness.left, witness.right))
    return _replay(witness, arena)


def _replay(w: Witness, arena: _Arena) -> bool:
    inst = arena.inst
    if w.left.canonical() == w.right.canonical():
        return False
    if w.clause == "static":
        diff = arena.static(w.env, w.left, w.right)
        if diff is None:
            return False
        if arena.contextual:
            fl = frame_of(Par(Assert(w.env), w.left), inst)
            fr = frame_of(Par(Assert(w.env), w.right), inst)
        else:
            fl = frame_extend(inst, w.env, frame_of(w.left, inst))
            fr = frame_extend(inst, w.env, frame_of(w.right, inst))

        return frame_entails(inst, fl, w.condition) == w.left_entails and frame_entails(inst, fr, w.condition) != w.left_entails
    if arena.static(w.env, w.left, w.right) is not None:
        return True
    if w.clause == "extension":
        nxt = w.next
        new = inst.restrict_assertion(inst.compose(w.env, w.extension), nxt.left.free_names | nxt.right.free_names)
        if inst.canonical_assertion(nxt.env) != inst.canonical_assertion(new):
            return False
        if nxt.left.canonical() != w.left.canonical() or nxt.right.canonical() != w.right.canonical():
            return False
        return _replay(nxt, arena)
    names = arena.names(w.env, w.left, w.right)
    mine, theirs = (w.left, w.right) if w.mover == "left" else (w.right, w.left)
    moves = arena.moves(w.env, mine, names)
    if not any(m.action == w.action and m.derivative.canonical() == w.derivative.canonical() for m in moves):
        return False
    claimed = {d.canonical(): sub for d, sub in w.responses}
    for ans in arena.moves(w.env, theirs, names):
        if ans.action != w.action:
            continue
        sub = claimed.get(ans.derivative.canonical())
        if sub is None:
            return False
        want = (w.derivative, ans.derivative) if w.mover == "left" else (ans.derivative, w.derivative)
        if sub.left.canonical() != want[0].canonical() or sub.right.canonical() != want[1].canonical():
            return False
        env = inst.restrict_assertion(w.env, sub.left.free_names | sub.right.free_names)
        if inst.canonical_assertion(sub.env) != inst.canonical_assertion(env):
            return False
        if not _replay(sub, arena):
            return False
    return True


# ---------------------------------------------------------------- structural laws


@dataclass(frozen=True)
class Law:
    name: str
    # builds (lhs, rhs) from three sample agents and a name supply, or None
    build: Callable


def _fresh(supply_avoid: Iterable[Name], stem: str = "a") -> Name:
    return fresh_names(1, supply_avoid, prefix=stem)[0]


def _pick_name(rng: random.Random, pool: Iterable[Name], avoid: Iterable[Name]) -> Name:
    avoid = set(avoid)
    cands = sorted(set(pool) - avoid)
    return rng.choice(cands) if cands else _fresh(avoid | set(pool))


def _guard(p: Agent, subject: Name) -> Agent:
    return p if guarded(p) else Output(subject, subject, p)


def _law_list() -> list[Law]:
    def l_nil(P, Q, R, rng, names):
        return P, Par(P, NIL)

    def l_assoc(P, Q, R, rng, names):
        return Par(P, Par(Q, R)), Par(Par(P, Q), R)

    def l_comm(P, Q, R, rng, names):
        return Par(P, Q), Par(Q, P)

    def l_res_nil(P, Q, R, rng, names):
        return Res(_pick_name(rng, names, ()), NIL), NIL

    def l_scope(P, Q, R, rng, names):
        a = _pick_name(rng, Q.free_names, P.free_names)
        return Par(P, Res(a, Q)), Res(a, Par(P, Q))

    def l_out(P, Q, R, rng, names):
        a = _pick_name(rng, P.free_names, ())
        m = _pick_name(rng, names, {a})
        n = _pick_name(rng, names, {a})
        return Output(m, n, Res(a, P)), Res(a, Output(m, n, P))

    def l_in(P, Q, R, rng, names):
        a = _pick_name(rng, P.free_names, ())
        m = _pick_name(rng, names, {a})
        x = _pick_name(rng, P.free_names | set(names), {a, m})
        return Input(m, (x,), x, Res(a, P)), Res(a, Input(m, (x,), x, P))

    def l_case(P, Q, R, rng, names):
        a = _pick_name(rng, P.free_names | Q.free_names, ())
        pool = sorted(set(names) - {a}) or [_fresh({a})]
        c1 = Eq.of(rng.choice(pool), rng.choice(pool))
        c2 = Eq.of(rng.choice(pool), rng.choice(pool))
        P, Q = _guard(P, pool[0]), _guard(Q, pool[0])
        return Case(((c1, Res(a, P)), (c2, Res(a, Q)))), Res(a, Case(((c1, P), (c2, Q))))

    def l_res_swap(P, Q, R, rng, names):
        fn = sorted(P.free_names)
        a = rng.choice(fn) if fn else _fresh(names)
        b = _pick_name(rng, fn, {a})
        return Res(a, Res(b, P)), Res(b, Res(a, P))

    def l_rep(P, Q, R, rng, names):
        P = _guard(P, sorted(names)[0])
        return Rep(P), Par(P, Rep(P))

    def l_vacuous(P, Q, R, rng, names):
        a = _fresh(set(names) | P.free_names)
        return Res(a, P), P

    return [
        Law("P ~ P|0", l_nil),
        Law("P|(Q|R) ~ (P|Q)|R", l_assoc),
        Law("P|Q ~ Q|P", l_comm),
        Law("(new a)0 ~ 0", l_res_nil),
        Law("P|(new a)Q ~ (new a)(P|Q) if a#P", l_scope),
        Law("M!N.(new a)P ~ (new a)M!N.P if a#M,N", l_out),
        Law("M?(\\x)N.(new a)P ~ (new a)M?(\\x)N.P if a#x,M,N", l_in),
        Law("case phi:(new a)P ~ (new a)case phi:P if a#phi", l_case),
        Law("(new a)(new b)P ~ (new b)(new a)P", l_res_swap),
        Law("!P ~ P|!P", l_rep),
        Law("(new a)P ~ P if a#P", l_vacuous),
    ]


STRUCTURAL_LAWS = _law_list()


def sample_substitutions(rng: random.Random, names: Sequence[Name], count: int = 3) -> list[SubstitutionSeq]:
    """The empty sequence followed by random name-for-name sequences."""
    names = sorted(names)
    out = [SubstitutionSeq()]
    while len(out) < count:
        steps = []
        for _ in range(rng.randint(1, 2)):
            k = rng.randint(1, min(2, len(names)))
            xs = tuple(rng.sample(names, k))
            steps.append((xs, tuple(rng.choice(names) for _ in xs)))
        out.append(SubstitutionSeq(tuple(steps)))
    return out


def apply_substitutions(agent: Agent, seq: SubstitutionSeq, inst: "Instance") -> Agent:
    for xs, terms in seq:
        agent = substitute_agent(agent, xs, terms, inst)
    return agent


def congruent(left: Agent, right: Agent, inst: "Instance", substitutions: Sequence[SubstitutionSeq],
              cfg: GameConfig | None = None):
    """``left ~ right`` tested on the given substitution sequences; returns the
    first failing (sequence, verdict) or ``None``."""
    for seq in substitutions:
        v = bisimilar(inst.unit, apply_substitutions(left, seq, inst), apply_substitutions(right, seq, inst), inst, cfg)
        if not v.positive:
            return seq, v
    return None


def check_structural_laws(
    inst: "Instance",
    samples: Sequence[Agent],
    cfg: GameConfig | None = None,
    substitutions: int = 3,
    seed: int = 0,
    names: Sequence[Name] = ("a", "b", "c"),
    laws: Sequence[Law] | None = None,
) -> ConformanceReport:
    """Every law instantiated on every sample (with two more samples taken
    cyclically for Q and R), each under ``substitutions`` sampled sequences."""
    rng = random.Random(seed)
    report = ConformanceReport(f"structural laws ({inst.name})")
    for law in laws or STRUCTURAL_LAWS:
        result = LawResult(law.name, True, 0)
        for i, P in enumerate(samples):
            Q = samples[(i + 1) % len(samples)]
            R = samples[(i + 2) % len(samples)]
            pool = set(names) | P.free_names | Q.free_names | R.free_names
            lhs, rhs = law.build(P, Q, R, rng, pool)
            seqs = sample_substitutions(rng, sorted(lhs.free_names | rhs.free_names | set(names)), substitutions)
            result.trials += len(seqs)
            failure = congruent(lhs, rhs, inst, seqs, cfg)
            if failure is not None:
                seq, verdict = failure
                result.passed = False
                result.counterexample = {
                    "lhs": print_agent(lhs, inst),
                    "rhs": print_agent(rhs, inst),
                    "substitution": str(seq),
                    "verdict": verdict.describe(),
                }
                break
        report.results.append(result)
    return report

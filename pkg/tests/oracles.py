"""A brute-force applier of the transition rules, kept independent of the engine.

Every rule (In, Out, Case, Com, Par, Scope, Open, Rep) is applied literally
over a finite name universe: subjects range over every name in sight,
inputs receive the names of a fixed object pool, and frames are renamed to
fresh representatives at each use.  Only name terms are supported, which
covers the pi and fusion instances.
"""

from __future__ import annotations

from dataclasses import dataclass

from psi.semantics import InputAct, OutputAct, Residual, TauAct
from psi.syntax import Assert, Case, Input, Nil, Output, Par, Rep, Res


class _Fresh:
    def __init__(self, taken):
        self.taken = set(taken)
        self.n = 0

    def __call__(self, stem="v"):
        while True:
            self.n += 1
            name = f"{stem}__{self.n}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def _names(p) -> set:
    if isinstance(p, Nil):
        return set()
    if isinstance(p, Output):
        return {p.subject, p.obj} | _names(p.cont)
    if isinstance(p, Input):
        return {p.subject} | set(p.binders) | _names(p.cont)
    if isinstance(p, Case):
        out = set()
        for cond, body in p.branches:
            out |= set(cond.__support__()) | _names(body)
        return out
    if isinstance(p, Res):
        return {p.name} | _names(p.body)
    if isinstance(p, Par):
        return _names(p.left) | _names(p.right)
    if isinstance(p, Rep):
        return _names(p.body)
    if isinstance(p, Assert):
        return {n for atom in p.assertion for n in atom.__support__()}
    raise TypeError(p)


def _rename(p, mapping: dict, inst):
    """Apply a name-for-name map to every occurrence, binders included."""
    m = lambda n: mapping.get(n, n)
    if isinstance(p, Nil):
        return p
    if isinstance(p, Output):
        return Output(m(p.subject), m(p.obj), _rename(p.cont, mapping, inst))
    if isinstance(p, Input):
        xs = tuple(m(x) for x in p.binders)
        return Input(m(p.subject), xs, m(p.pattern), _rename(p.cont, mapping, inst))
    if isinstance(p, Case):
        keys = list(mapping)
        vals = [mapping[k] for k in keys]
        return Case(tuple((inst.subst_cond(c, keys, vals), _rename(b, mapping, inst)) for c, b in p.branches))
    if isinstance(p, Res):
        return Res(m(p.name), _rename(p.body, mapping, inst))
    if isinstance(p, Par):
        return Par(_rename(p.left, mapping, inst), _rename(p.right, mapping, inst))
    if isinstance(p, Rep):
        return Rep(_rename(p.body, mapping, inst))
    if isinstance(p, Assert):
        keys = list(mapping)
        return Assert(inst.subst_assertion(p.assertion, keys, [mapping[k] for k in keys]))
    raise TypeError(p)


def _freshen_binders(p, fresh, inst):
    """Give every binder of ``p`` a brand new name."""
    if isinstance(p, (Nil, Output, Assert)):
        if isinstance(p, Output):
            return Output(p.subject, p.obj, _freshen_binders(p.cont, fresh, inst))
        return p
    if isinstance(p, Input):
        new = {x: fresh("x") for x in p.binders}
        body = _rename(p.cont, new, inst)
        return Input(p.subject, tuple(new[x] for x in p.binders), new.get(p.pattern, p.pattern),
                     _freshen_binders(body, fresh, inst))
    if isinstance(p, Case):
        return Case(tuple((c, _freshen_binders(b, fresh, inst)) for c, b in p.branches))
    if isinstance(p, Res):
        b = fresh("r")
        return Res(b, _freshen_binders(_rename(p.body, {p.name: b}, inst), fresh, inst))
    if isinstance(p, Par):
        return Par(_freshen_binders(p.left, fresh, inst), _freshen_binders(p.right, fresh, inst))
    if isinstance(p, Rep):
        return Rep(_freshen_binders(p.body, fresh, inst))
    raise TypeError(p)


def _subst_free(p, x, value, inst):
    """``p[x := value]`` assuming no binder of ``p`` is ``x`` or ``value``."""
    return _rename(p, {x: value}, inst)


def _frame(p, inst, fresh):
    """(binders, assertion) with binders renamed to fresh representatives."""
    if isinstance(p, Assert):
        return [], p.assertion
    if isinstance(p, Par):
        bl, al = _frame(p.left, inst, fresh)
        br, ar = _frame(p.right, inst, fresh)
        return bl + br, inst.compose(al, ar)
    if isinstance(p, Res):
        b = fresh("f")
        binders, assertion = _frame(_rename(p.body, {p.name: b}, inst), inst, fresh)
        return [b] + binders, assertion
    return [], inst.unit


@dataclass(frozen=True)
class _T:
    kind: str          # out | in | tau
    subject: str | None
    bound: tuple
    obj: str | None
    deriv: object


class BruteForce:
    def __init__(self, inst, rep_bound: int):
        self.inst = inst
        self.rep_bound = rep_bound
        self._memo: dict = {}

    def chan(self, env, m, k) -> bool:
        return self.inst.entails(env, self.inst.chan_eq(m, k))

    def derive(self, env, p, universe: frozenset, objects: frozenset, reps: int, fresh) -> list[_T]:
        key = (env, p, universe, objects, reps)
        if key not in self._memo:
            self._memo[key] = self._derive(env, p, universe, objects, reps, fresh)
        return self._memo[key]

    def _derive(self, env, p, universe, objects, reps, fresh) -> list[_T]:
        inst = self.inst
        if isinstance(p, (Nil, Assert)):
            return []
        if isinstance(p, Output):
            return [_T("out", k, (), p.obj, p.cont) for k in universe if self.chan(env, p.subject, k)]
        if isinstance(p, Input):
            out = []
            (x,) = p.binders
            for k in universe:
                if self.chan(env, p.subject, k):
                    for obj in objects:
                        out.append(_T("in", k, (), obj, _subst_free(p.cont, x, obj, inst)))
            return out
        if isinstance(p, Case):
            out = []
            for cond, body in p.branches:
                if inst.entails(env, cond):
                    out += self.derive(env, body, universe, objects, reps, fresh)
            return out
        if isinstance(p, Res):
            b = p.name
            out = []
            for t in self.derive(env, p.body, universe | {b}, objects, reps, fresh):
                mentioned = {t.subject, t.obj} | set(t.bound)
                if t.kind == "tau":
                    out.append(_T("tau", None, (), None, Res(b, t.deriv)))
                elif b not in mentioned:
                    out.append(_T(t.kind, t.subject, t.bound, t.obj, Res(b, t.deriv)))    # Scope
                elif t.kind == "out" and t.obj == b and t.subject != b and b not in t.bound:
                    out.append(_T("out", t.subject, t.bound + (b,), t.obj, t.deriv))     # Open
            return out
        if isinstance(p, Rep):
            if reps >= self.rep_bound:
                return []
            copy = _freshen_binders(p.body, fresh, inst)
            return self.derive(env, Par(copy, p), universe | _names(copy), objects, reps + 1, fresh)
        if isinstance(p, Par):
            return self._par(env, p, universe, objects, reps, fresh)
        raise TypeError(p)

    def _par(self, env, p, universe, objects, reps, fresh) -> list[_T]:
        inst = self.inst
        out = []
        for left, right, flip in ((p.left, p.right, False), (p.right, p.left, True)):
            bq, aq = _frame(right, inst, fresh)
            env_left = inst.compose(aq, env)
            wrap = (lambda d, r=right: Par(r, d)) if flip else (lambda d, r=right: Par(d, r))
            from_left = self.derive(env_left, left, universe, objects, reps, fresh)
            for t in from_left:
                names_right = _names(right)
                if set(t.bound) & names_right:
                    continue
                out.append(_T(t.kind, t.subject, t.bound, t.obj, wrap(t.deriv)))              # Par
            # Com with ``left`` as the sender
            bp, ap = _frame(left, inst, fresh)
            env_right = inst.compose(ap, env)
            both = inst.compose(inst.compose(env, ap), aq)
            for o in from_left:
                if o.kind != "out" or set(o.bound) & _names(right):
                    continue
                for i in self.derive(env_right, right, universe, frozenset({o.obj}), reps, fresh):
                    if i.kind == "in" and i.obj == o.obj and self.chan(both, o.subject, i.subject):
                        body = Par(i.deriv, o.deriv) if flip else Par(o.deriv, i.deriv)
                        for b in reversed(o.bound):
                            body = Res(b, body)
                        out.append(_T("tau", None, (), None, body))
        return out


def brute_force_transitions(env, agent, inst, names, rep_bound: int) -> set:
    """Canonical residuals derivable for ``env |> agent``; inputs receive ``names``."""
    objects = frozenset(names)
    env_names = {n for atom in env for n in atom.__support__()} if env else set()
    fresh = _Fresh(_names(agent) | objects | env_names)
    work = _freshen_binders(agent, fresh, inst)
    universe = frozenset(_free(agent, inst) | env_names | objects)
    found = BruteForce(inst, rep_bound).derive(env, work, universe, objects, 0, fresh)
    out = set()
    for t in found:
        if t.kind == "tau":
            action = TauAct()
        elif t.kind == "out":
            action = OutputAct(t.subject, t.bound, t.obj)
        else:
            action = InputAct(t.subject, t.obj)
        out.add(Residual(action, t.deriv).canonical())
    return out


def _free(agent, inst) -> set:
    return set(agent.free_names)


def engine_transitions(env, agent, inst, names, rep_bound: int) -> set:
    from psi.semantics import NameInstantiation, transitions

    return {t.residual.canonical() for t in transitions(env, agent, inst, NameInstantiation(tuple(names)), rep_bound)}


def micro_agent(rng, inst, budget: int = 6, names=("a", "b"), assertions: bool = False):
    """An agent of at most ``budget`` nodes (``0`` leaves included) over few
    names, biased towards parallel prefixes that can communicate."""
    from psi.syntax import NIL
    from psi.terms import Eq

    def leaf(scope):
        if assertions and rng.random() < 0.4:
            return Assert(frozenset({Eq.of(rng.choice(scope), rng.choice(scope))}))
        return NIL

    def prefix(n, scope):
        if rng.random() < 0.5:
            return Output(rng.choice(scope), rng.choice(scope), gen(n - 1, scope))
        x = f"x{len(scope)}"
        return Input(rng.choice(scope), (x,), x, gen(n - 1, scope + [x]))

    def gen(n, scope, top=False):
        if n <= 1:
            return leaf(scope)
        if top and n >= 5 and rng.random() < 0.8:
            k = rng.randint(2, n - 3)
            return Par(gen(k, scope, True), gen(n - 1 - k, scope, True))
        kinds = ["prefix", "prefix"]
        if n >= 3:
            kinds += ["par", "par", "par", "res", "rep", "case"]
        kind = rng.choice(kinds)
        if kind == "prefix":
            return prefix(n, scope)
        if kind == "par":
            k = rng.randint(1, n - 2)
            return Par(gen(k, scope), gen(n - 1 - k, scope))
        if kind == "res":
            r = f"r{len(scope)}"
            return Res(r, gen(n - 1, scope + [r], top))
        if kind == "rep":
            return Rep(prefix(n - 1, scope))
        cond = Eq.of(rng.choice(scope), rng.choice(scope))
        return Case(((cond, prefix(n - 1, scope)),))

    return gen(rng.randint(min(5, budget), budget), list(names), True)


def micro_corpus(rng, inst, count: int, max_nodes: int = 6, assertions: bool = False) -> list:
    from psi.syntax import count_nodes, well_formed

    out, seen = [], set()
    while len(out) < count:
        p = micro_agent(rng, inst, max_nodes, assertions=assertions)
        key = p.canonical()
        if count_nodes(p) <= max_nodes and well_formed(p) and key not in seen:
            seen.add(key)
            out.append(p)
    return out


# ------------------------------------------------------------------ crypto terms


def _fn(symbol, *args):
    from psi.terms import Fn

    return Fn(symbol, tuple(args))


def redex_rich_term(rng, names, depth: int):
    """A random crypto term in which destructors usually meet their constructors."""
    if depth <= 0 or rng.random() < 0.2:
        return rng.choice(names)
    sub = lambda: redex_rich_term(rng, names, depth - 1)
    roll = rng.randrange(9)
    if roll == 0:
        k = sub()
        return _fn("dec", _fn("enc", sub(), k), k if rng.random() < 0.8 else sub())
    if roll == 1:
        s = sub()
        enc = _fn("enc", sub(), _fn("pk", s), *([sub()] if rng.random() < 0.5 else []))
        return _fn("dec", enc, _fn("sk", s))
    if roll == 2:
        m, s = sub(), sub()
        return _fn("check", m, _fn("sign", m, _fn("sk", s)), _fn("pk", s if rng.random() < 0.8 else sub()))
    if roll == 3:
        return _fn(rng.choice(("fst", "snd")), _fn("pair", sub(), sub()))
    if roll == 4:
        return _fn("f", sub(), _fn("g", sub()))
    if roll == 5:
        return _fn("hash", sub())
    if roll == 6:
        return _fn("pair", sub(), sub())
    if roll == 7:
        return _fn(rng.choice(("fst", "snd", "g", "pk", "sk")), sub())
    return _fn(rng.choice(("enc", "sign", "f")), sub(), sub())


def normal_form_oracle(term):
    """Innermost normalisation written directly from the equations."""
    from psi.terms import Fn, term_key

    if not isinstance(term, Fn):
        return term
    t = Fn(term.symbol, tuple(normal_form_oracle(a) for a in term.args))
    s, a = t.symbol, t.args

    def is_(x, symbol, arity=None):
        return isinstance(x, Fn) and x.symbol == symbol and (arity is None or len(x.args) == arity)

    if s == "dec" and len(a) == 2 and is_(a[0], "enc"):
        msg, key = a[0].args[0], a[0].args[1]
        if len(a[0].args) == 2 and key == a[1]:
            return msg
        if is_(key, "pk", 1) and is_(a[1], "sk", 1) and key.args == a[1].args:
            return msg
    if s == "check" and len(a) == 3 and is_(a[1], "sign", 2) and is_(a[1].args[1], "sk", 1) and is_(a[2], "pk", 1):
        if a[1].args[0] == a[0] and a[1].args[1].args == a[2].args:
            return Fn("ok", ())
    if s in ("fst", "snd") and len(a) == 1 and is_(a[0], "pair", 2):
        return a[0].args[0] if s == "fst" else a[0].args[1]
    if s == "f" and len(a) == 2 and is_(a[1], "g", 1):
        first, second = a[0], a[1].args[0]
        # f(x, g(y)) = f(y, g(x)): keep the smaller exponent first
        if term_key(second) < term_key(first):
            return Fn("f", (second, Fn("g", (first,))))
    return t

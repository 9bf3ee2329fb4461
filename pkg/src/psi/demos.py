"""Worked examples replayed against golden transition sequences.

Each demo drives an agent along a fixed list of labels.  Where a golden
derivative is given, the step must reach it up to structural congruence
(compared via ``structural_normal_form``); output-bound names in a label
are matched up to renaming.  Any divergence raises ``GoldenMismatch``.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Any, Callable

from .bisim import structural_normal_form
from .encodings import encode_pif, parse_pif
from .errors import GoldenMismatch
from .frames import Frame, frame_difference, frame_entails_all
from .instances import get_instance
from .nominal import Permutation, apply_permutation, support
from .semantics import CandidateObjects, OutputAct, print_action, transitions
from .syntax import Agent, frame_of, parse_agent, print_agent
from .terms import Eq, Fn

DEMO_REP_BOUND = 1


@dataclass(frozen=True)
class Step:
    label: str
    expect: str | None = None


@dataclass
class DemoReport:
    name: str
    instance: str
    start: str
    steps: list[tuple[str, str]] = field(default_factory=list)
    checks: list[tuple[str, bool]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def show(self) -> str:
        lines = [f"demo {self.name} (instance {self.instance})", f"  {self.start}"]
        lines += [f"  --{label}--> {deriv}" for label, deriv in self.steps]
        lines += [f"  [{'ok' if ok else 'FAIL'}] {text}" for text, ok in self.checks]
        lines += [f"  {note}" for note in self.notes]
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "instance": self.instance,
            "start": self.start,
            "steps": [{"label": l, "derivative": d} for l, d in self.steps],
            "checks": [{"check": c, "ok": ok} for c, ok in self.checks],
            "notes": self.notes,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


_BOUND = re.compile(r"!\(new ([^)]*)\)")


def _align_bound(action: Any, deriv: Agent, label: str) -> tuple[Any, Agent]:
    """Rename output-bound names to the ones written in ``label``."""
    m = _BOUND.search(label)
    if not (isinstance(action, OutputAct) and action.bound and m):
        return action, deriv
    wanted = [w.strip() for w in m.group(1).split(",")]
    if len(wanted) != len(action.bound):
        return action, deriv
    free = (support(action.obj) | deriv.free_names | support(action.subject)) - set(action.bound)
    if set(wanted) & free:
        return action, deriv
    for b, w in zip(action.bound, wanted):
        perm = Permutation.swap(b, w)
        action, deriv = apply_permutation(perm, action), apply_permutation(perm, deriv)
    return action, deriv


def _same_shape(first: Agent, second: Agent) -> bool:
    return structural_normal_form(first) == structural_normal_form(second)


def replay_golden(env, agent: Agent, inst, golden: list[Step], policy=None,
                  rep_bound: int = DEMO_REP_BOUND) -> list[tuple[str, Agent]]:
    """Follow ``golden`` from ``agent``; returns ``(label, derivative)`` per step."""
    out = []
    current = agent
    for number, step in enumerate(golden, 1):
        found = [_align_bound(t.action, t.derivative, step.label)
                 for t in transitions(env, current, inst, policy, rep_bound)]
        matching = [(a, d) for a, d in found if print_action(a, inst) == step.label]
        if not matching:
            have = ", ".join(sorted({print_action(a, inst) for a, _ in found})) or "nothing"
            raise GoldenMismatch(number, step.label, f"available labels: {have}")
        if step.expect is not None:
            want = parse_agent(step.expect, inst)
            hit = [(a, d) for a, d in matching if _same_shape(d, want)]
            if not hit:
                got = "; ".join(print_agent(structural_normal_form(d), inst) for _, d in matching)
                raise GoldenMismatch(
                    number, f"{step.label} to {print_agent(structural_normal_form(want), inst)}", got
                )
            matching = hit
        current = matching[0][1]
        out.append((step.label, current))
    return out


def _quiescent(env, agent: Agent, inst, policy=None) -> bool:
    return not any(t.action.kind == "tau" for t in transitions(env, agent, inst, policy, DEMO_REP_BOUND))


def _report(name: str, inst, agent: Agent, trail: list[tuple[str, Agent]]) -> DemoReport:
    return DemoReport(
        name, inst.name, print_agent(agent, inst),
        [(label, print_agent(d, inst)) for label, d in trail],
    )


def _require(report: DemoReport, text: str, ok: bool, step: int = 0, detail: str = "") -> None:
    report.checks.append((text, ok))
    if not ok:
        raise GoldenMismatch(step or len(report.steps), text, detail or "check failed")


# ---------------------------------------------------------------- demos


def demo_fusion() -> DemoReport:
    """Two communications in pi-F, run through the encoding into the fusion instance."""

    inst = get_instance("fusion")
    source = "a?<b>.c!<c>.0 | a!<c>.b?<d>.0"
    agent = encode_pif(parse_pif(source))
    golden = [
        Step("tau", print_agent(encode_pif(parse_pif("<b=c> | c!<c>.0 | b?<d>.0")))),
        Step("tau", print_agent(encode_pif(parse_pif("<b=c> | <c=d>")))),
    ]
    trail = replay_golden(inst.unit, agent, inst, golden)
    report = _report("fusion", inst, agent, trail)
    report.notes.append(f"pi-F source: {source}")
    _require(report, "no further tau", _quiescent(inst.unit, trail[-1][1], inst))
    final = frame_of(trail[-1][1], inst)
    b_d = frame_entails_all(inst, final, [Eq.of("b", "d")])[0]
    _require(report, "final fusions entail b=d", b_d)
    return report


FHSS_LOOP = (
    "!fh?(\\freq)freq.(case a<->a : out?(\\y)y.freq!y.fh!nextFreq(freq).0"
    " [] a<->a : freq?(\\y)y.in!y.fh!nextFreq(freq).0)"
)


def _hop(freq: str) -> str:
    nxt = f"nextFreq({freq})"
    return (f"(case a<->a : out?(\\y)y.{freq}!y.fh!{nxt}.0"
            f" [] a<->a : {freq}?(\\y)y.in!y.fh!{nxt}.0)")


def demo_fhss(payload: str = "out!msg.0") -> DemoReport:
    """The receiver side of frequency hopping, ``payload`` standing in for the wrapped agent."""
    inst = get_instance("polysync")
    x, loop = payload, FHSS_LOOP
    initiator = f"ctl!sync.ctl?(\\seed)seed.fh!seed.out!sync.{x} | {loop}"
    receiver = f"ctl?(\\s)s.(new seed)ctl!seed.fh!seed.in?(\\x)x.{x} | {loop}"
    system = f"(new fh,in,out)(case a<->a : ({initiator}) [] a<->a : ({receiver}))"
    agent = parse_agent(system, inst)
    scope = "(new fh,in,out)"
    golden = [
        Step("ctl?sync", f"{scope}((new seed)ctl!seed.fh!seed.in?(\\x)x.{x} | {loop})"),
        Step("ctl!(new seed)seed", f"{scope}(fh!seed.in?(\\x)x.{x} | {loop})"),
        Step("tau", f"{scope}(in?(\\x)x.{x} | {_hop('seed')} | {loop})"),
        Step("seed?sync", f"{scope}(in?(\\x)x.{x} | in!sync.fh!nextFreq(seed).0 | {loop})"),
        Step("tau", f"{scope}({x} | fh!nextFreq(seed).0 | {loop})"),
        Step("tau", f"{scope}({x} | {_hop('nextFreq(seed)')} | {loop})"),
    ]
    trail = replay_golden(inst.unit, agent, inst, golden, CandidateObjects(("sync",)))
    report = _report("fhss", inst, agent, trail)
    last = trail[-1][1]
    labels = {t.label(inst) for t in transitions(inst.unit, last, inst, CandidateObjects(("sync",)), DEMO_REP_BOUND)}
    _require(report, "next hop listens on nextFreq(seed)", "nextFreq(seed)?sync" in labels,
             detail=", ".join(sorted(labels)))
    return report


SERVER = (
    "!server?(\\service,replyc)t2(service,replyc).(new a)(<service,a>!replyc.0"
    " | <finger,a>?(\\r)r.r!UserList.0 | <daytime,a>?(\\r)r.r!Date.0)"
)


def demo_services() -> DemoReport:
    inst = get_instance("polyadic")
    agent = parse_agent(SERVER, inst)
    daytime = "<daytime,a>?(\\r)r.r!Date.0"
    golden = [
        Step("server?t2(finger,c)",
             f"{SERVER} | (new a)(<finger,a>!c.0 | <finger,a>?(\\r)r.r!UserList.0 | {daytime})"),
        Step("tau", f"{SERVER} | (new a)(c!UserList.0 | {daytime})"),
        Step("c!UserList", f"{SERVER} | (new a){daytime}"),
    ]
    policy = CandidateObjects((Fn("t2", ("finger", "c")),))
    trail = replay_golden(inst.unit, agent, inst, golden, policy)
    report = _report("services", inst, agent, trail)
    _require(report, "the daytime daemon is unreachable afterwards",
             not any("Date" in t.label(inst) or t.action.kind == "tau"
                     for t in transitions(inst.unit, trail[-1][1], inst, policy, DEMO_REP_BOUND)))
    return report


def demo_hash() -> DemoReport:
    inst = get_instance("crypto")
    guard = "a?(\\y)y.case hash(pair(s,fst(y)))=snd(y) : b!fst(y).0"
    agent = parse_agent(f"(new s)((|{{hash(pair(s,m))=x}}|) | a!pair(m,x).0 | {guard})", inst)
    golden = [
        Step("tau", "(new s)((|{hash(pair(s,m))=x}|) | "
                    "case hash(pair(s,fst(pair(m,x))))=snd(pair(m,x)) : b!fst(pair(m,x)).0)"),
        Step("b!fst(pair(m,x))", "(new s)(|{hash(pair(s,m))=x}|)"),
    ]
    trail = replay_golden(inst.unit, agent, inst, golden)
    report = _report("hash", inst, agent, trail)
    forged = parse_agent(f"(new s)((|{{hash(pair(s,m))=x}}|) | a!pair(m,w).0 | {guard})", inst)
    after = [t.derivative for t in transitions(inst.unit, forged, inst, None, DEMO_REP_BOUND)
             if t.action.kind == "tau"]
    blocked = bool(after) and all(
        not any(t.label(inst).startswith("b!") for t in transitions(inst.unit, d, inst, None, DEMO_REP_BOUND))
        for d in after
    )
    _require(report, "a message with the wrong hash is not forwarded", blocked)
    return report


def demo_sign() -> DemoReport:
    inst = get_instance("crypto")
    agent = parse_agent(
        "(new s,z)((|{pk(s)=y}|) | (|{sign(m,sk(s))=z}|) | a!pair(m,z).0)"
        " | a?(\\x)x.case check(fst(x),snd(x),y)=ok : b!fst(x).0",
        inst,
    )
    golden = [
        Step("tau", "(new z)((new s)((|{pk(s)=y}|) | (|{sign(m,sk(s))=z}|))"
                    " | case check(fst(pair(m,z)),snd(pair(m,z)),y)=ok : b!fst(pair(m,z)).0)"),
        Step("b!(new z)fst(pair(m,z))", "(new s)((|{pk(s)=y}|) | (|{sign(m,sk(s))=z}|))"),
    ]
    trail = replay_golden(inst.unit, agent, inst, golden)
    report = _report("sign", inst, agent, trail)
    tampered = parse_agent(
        "(new s,z)((|{pk(s)=y}|) | (|{sign(m,sk(s))=z}|) | a!pair(w,z).0)"
        " | a?(\\x)x.case check(fst(x),snd(x),y)=ok : b!fst(x).0",
        inst,
    )
    step = [t.derivative for t in transitions(inst.unit, tampered, inst, None, DEMO_REP_BOUND)
            if t.action.kind == "tau"]
    rejected = bool(step) and all(
        not any(t.label(inst).startswith("b!") for t in transitions(inst.unit, d, inst, None, DEMO_REP_BOUND))
        for d in step
    )
    _require(report, "a signature over a different message is rejected", rejected)
    return report


def _sender(salted: bool, second: str) -> str:
    enc = (lambda msg, r: f"enc({msg},x,{r})") if salted else (lambda msg, r: f"enc({msg},x)")
    return (f"a?(\\x)x.((new r1,y)((|{{{enc('m', 'r1')}=y}}|) | b!y.0)"
            f" | (new r2,z)((|{{{enc(second, 'r2')}=z}}|) | c!z.0))")


def demo_salt() -> DemoReport:
    """Salted encryption hides whether two ciphertexts share a plaintext."""
    inst = get_instance("crypto")
    policy = CandidateObjects(("k",))

    def exposed(salted: bool, second: str) -> Frame:
        agent = parse_agent(_sender(salted, second), inst)
        labels = [Step("a?k"), Step("b!(new y)y"), Step("c!(new z)z")]
        trail = replay_golden(inst.unit, agent, inst, labels, policy)
        # the environment now holds y and z; their defining equations stay private
        return frame_of(trail[-1][1], inst)

    agent = parse_agent(_sender(True, "m"), inst)
    trail = replay_golden(inst.unit, agent, inst, [Step("a?k"), Step("b!(new y)y"), Step("c!(new z)z")], policy)
    report = _report("salt", inst, agent, trail)
    same, other = exposed(True, "m"), exposed(True, "m2")
    _require(report, "salted: same and different plaintexts leave equivalent frames",
             frame_difference(inst, same, other) is None)
    plain_same, plain_other = exposed(False, "m"), exposed(False, "m2")
    diff = frame_difference(inst, plain_same, plain_other)
    _require(report, "unsalted: the frames are told apart", diff is not None)
    report.notes.append(f"unsalted distinguishing condition: {diff[0]}")
    return report


def dh_agent(left: str = "c!enc(m,kP).0", right: str = "d!enc(m,kQ).0") -> str:
    """Both principals in their key-agreement contexts; the channels a01, a10 are public."""
    return (
        f"(new nP,xP)((|{{g(nP)=xP}}|) | a01!xP.0 | a10?(\\z)z.(new kP)((|{{f(nP,z)=kP}}|) | {left}))"
        f" | (new nQ,xQ)((|{{g(nQ)=xQ}}|) | a10!xQ.0 | a01?(\\z)z.(new kQ)((|{{f(nQ,z)=kQ}}|) | {right}))"
    )


DH_EXPOSED = "(new nP)((|{g(nP)=xP}|) | (|{f(nP,xQ)=kP}|)) | (new nQ)((|{g(nQ)=xQ}|) | (|{f(nQ,xP)=kQ}|))"
DH_SHARED = "(new k')((|{k'=kP}|) | (|{k'=kQ}|))"


def dh_probe_conditions(names: list[str]) -> list[Eq]:
    """Equations between names and one application of ``g`` or ``f`` to them."""
    terms: list[Any] = list(names)
    terms += [Fn("g", (n,)) for n in names]
    terms += [Fn("f", (a, Fn("g", (b,)))) for a, b in itertools.permutations(names, 2)]
    return [Eq.of(a, b) for a, b in itertools.combinations(terms, 2)]


def dh_entailed(inst, agent_text: str, probes: list[Eq]) -> list[str]:
    frame = frame_of(parse_agent(agent_text, inst), inst)
    return sorted(str(c) for c, ok in zip(probes, frame_entails_all(inst, frame, probes)) if ok)


def demo_dh() -> DemoReport:
    inst = get_instance("crypto")
    agent = parse_agent(dh_agent(), inst)
    p_after = "(new kP)((|{f(nP,xQ)=kP}|) | c!enc(m,kP).0)"
    q_after = "(new kQ)((|{f(nQ,xP)=kQ}|) | d!enc(m,kQ).0)"
    golden = [
        Step("tau", f"(new xP)((new nP)((|{{g(nP)=xP}}|) | a10?(\\z)z.(new kP)((|{{f(nP,z)=kP}}|) | c!enc(m,kP).0))"
                    f" | (new nQ,xQ)((|{{g(nQ)=xQ}}|) | a10!xQ.0 | {q_after}))"),
        Step("tau", f"(new xP,xQ)((new nP)((|{{g(nP)=xP}}|) | {p_after})"
                    f" | (new nQ)((|{{g(nQ)=xQ}}|) | {q_after}))"),
    ]
    trail = replay_golden(inst.unit, agent, inst, golden)
    report = _report("dh", inst, agent, trail)
    _require(report, "no further tau after two steps", _quiescent(inst.unit, trail[-1][1], inst))
    probes = dh_probe_conditions(["kP", "kQ", "xP", "xQ"])
    valid = set(dh_entailed(inst, "0", probes))
    exposed = [c for c in dh_entailed(inst, DH_EXPOSED, probes) if c not in valid]
    shared = [c for c in dh_entailed(inst, DH_SHARED, probes) if c not in valid]
    from_key = set(dh_entailed(inst, "(|{kP=kQ}|)", probes))
    report.notes.append(f"probe conditions: {len(probes)} ({len(valid)} hold in the bare theory)")
    report.notes.append(f"entailed by the exposed protocol frame: {', '.join(exposed) or 'none'}")
    report.notes.append(f"entailed by the shared-key specification: {', '.join(shared) or 'none'}")
    _require(report, "both sides entail kP=kQ", "kP=kQ" in exposed and "kP=kQ" in shared)
    _require(report, "nothing about xP or xQ is entailed beyond what kP=kQ gives",
             all(c in from_key for c in exposed + shared))
    _require(report, "the frames entail the same probe conditions", exposed == shared)
    return report


DEMOS: dict[str, Callable[[], DemoReport]] = {
    "dh": demo_dh,
    "fhss": demo_fhss,
    "services": demo_services,
    "fusion": demo_fusion,
    "hash": demo_hash,
    "sign": demo_sign,
    "salt": demo_salt,
}


def run_demo(name: str) -> DemoReport:
    try:
        demo = DEMOS[name]
    except KeyError:
        raise KeyError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}") from None
    return demo()

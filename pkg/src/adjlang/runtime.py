"""Execution of configurations by multiset rewriting.

A configuration is a multiset of objects ``proc(S, D, a, P)``: a running
process P providing the channel a, known to its clients by the aliases
in S, and using the channels in D.  Steps rewrite only the objects that
participate in a rule instance; everything else is untouched.

Configurations additionally carry a channel-to-type map.  Object
multisets alone do not determine the session types of interior channels
(messages forget the unselected branches, and type references are equal
by name only), so the map is threaded through every step and consulted
by the configuration checkers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .diagnostics import Diagnostic, error
from .modes import ModeTheory
from . import syntax as S
from . import checker as TC

RULE_ORDER = (
    "id", "cut", "drop", "copy",
    "plusC", "withC", "tensorC", "lolliC", "oneC", "downC", "upC",
    "call",
)

POLICIES = ("demand-driven", "eager-structural", "deterministic")


class StaleInstance(Exception):
    """The chosen instance refers to objects no longer in the configuration."""


class MetatheoryViolation(Exception):
    """A closed well-typed configuration got stuck while not all poised."""


@dataclass(frozen=True)
class ProcObject:
    oid: int
    aliases: frozenset[str]
    uses: frozenset[str]
    chan: str
    body: S.ProcessTerm

    def is_identity(self) -> bool:
        return isinstance(self.body, S.Fwd)


@dataclass(frozen=True)
class Configuration:
    objects: tuple[ProcObject, ...]
    chan_types: dict[str, S.SessionType]
    next_oid: int
    next_name: int
    steps: int = 0

    def by_oid(self) -> dict[int, ProcObject]:
        return {o.oid: o for o in self.objects}

    def provider_of(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for o in self.objects:
            for a in o.aliases:
                out[a] = o.oid
        return out

    def input_channels(self) -> frozenset[str]:
        provided = {a for o in self.objects for a in o.aliases}
        used = {u for o in self.objects for u in o.uses}
        return frozenset(used - provided)

    def is_closed(self) -> bool:
        return not self.input_channels()


@dataclass(frozen=True)
class Instance:
    rule: str
    objects: tuple[int, ...]
    detail: tuple = ()

    def key(self):
        return (RULE_ORDER.index(self.rule), self.objects, self.detail)


@dataclass(frozen=True)
class TraceEvent:
    step: int
    rule: str
    consumed: tuple[int, ...]
    produced: tuple[int, ...]
    channels: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "rule": self.rule,
            "consumed": list(self.consumed),
            "produced": list(self.produced),
            "channels": list(self.channels),
        }


def make_object(oid: int, aliases: Iterable[str], chan: str,
                body: S.ProcessTerm) -> ProcObject:
    uses = frozenset(S.free_channels(body) - {chan})
    return ProcObject(oid, frozenset(aliases), uses, chan, body)


def make_configuration(entries, chan_types: dict[str, S.SessionType],
                       name_seed: int = 0) -> Configuration:
    """Build a configuration from (aliases, chan, body) triples."""
    objects = []
    seen: set[str] = set()
    internals: set[str] = set()
    for i, (aliases, chan, body) in enumerate(entries):
        o = make_object(i, aliases, chan, body)
        dup = set(o.aliases) & seen
        if dup:
            raise ValueError(f"duplicate alias across objects: {sorted(dup)}")
        if chan in internals:
            raise ValueError(f"duplicate internal name: {chan}")
        seen.update(o.aliases)
        internals.add(chan)
        objects.append(o)
    all_names = set(chan_types)
    for o in objects:
        all_names |= o.aliases | o.uses | {o.chan}
    from .frontend import name_counter_floor
    floor = name_counter_floor(all_names, name_seed)
    return Configuration(tuple(objects), dict(chan_types), len(objects), floor)


def initial_configuration(program: S.Program, main: str,
                          root: str = "c0") -> tuple[Configuration, S.Context]:
    """The top-level picture: one process with a single external alias."""
    pd = program.procs[main]
    if pd.params:
        raise ValueError(f"{main} must not use any channels, it uses {len(pd.params)}")
    internal = f"c${program.name_seed}"
    body = S.Call(main, (), internal)
    config = make_configuration(
        [((root,), internal, body)],
        {root: pd.result_type, internal: pd.result_type},
        name_seed=program.name_seed + 1,
    )
    return config, ((root, pd.result_type),)


# ---------------------------------------------------------------------------
# Rule instances


def _message_form(o: ProcObject):
    """Classify a body whose head is a send.

    Returns ("plus"|"tensor"|"one"|"down", payload...) for a message on the
    object's own channel, ("with"|"lolli"|"up", target, payload...) for a
    message sent to a used channel, or None.
    """
    b = o.body
    match b:
        case S.SendLabel(subject, label, cont):
            if subject == o.chan:
                return ("plus", label, cont)
            if cont == o.chan:
                return ("with", subject, label)
        case S.SendPair(subject, first, second):
            if subject == o.chan:
                return ("tensor", first, second)
            if second == o.chan:
                return ("lolli", subject, first)
        case S.SendUnit(subject):
            if subject == o.chan:
                return ("one",)
        case S.SendShift(subject, cont):
            if subject == o.chan:
                return ("down", cont)
            if cont == o.chan:
                return ("up", subject)
    return None


def _head_case_subject(o: ProcObject) -> Optional[str]:
    if isinstance(o.body, S.CASE_FORMS):
        return o.body.subject
    return None


def applicable_rules(config: Configuration) -> list[Instance]:
    """Every rule instance enabled in the configuration, in canonical order.

    Copy instances are enumerated once per alias, splitting the client
    set as ({alias}, rest); iterating these reaches every split.
    """
    out: list[Instance] = []
    objs = config.objects
    provider = config.provider_of()
    users: dict[str, ProcObject] = {}
    for o in objs:
        for u in o.uses:
            users[u] = o

    for o in objs:
        body = o.body
        if isinstance(body, S.Fwd):
            src = body.src
            p = provider.get(src)
            if p is not None and p != o.oid:
                out.append(Instance("id", (p, o.oid), (src,)))
            continue
        if isinstance(body, S.Spawn):
            out.append(Instance("cut", (o.oid,)))
        elif isinstance(body, S.Call):
            out.append(Instance("call", (o.oid,)))
        if len(o.aliases) == 0:
            out.append(Instance("drop", (o.oid,)))
        elif len(o.aliases) >= 2:
            for b in sorted(o.aliases):
                out.append(Instance("copy", (o.oid,), (b,)))

        form = _message_form(o)
        if form is None:
            continue
        if form[0] in ("plus", "tensor", "one", "down") and len(o.aliases) == 1:
            (b,) = o.aliases
            r = users.get(b)
            if r is None or _head_case_subject(r) != b:
                continue
            rb = r.body
            match form[0], rb:
                case "plus", S.CaseLabel() if form[1] in rb.labels():
                    out.append(Instance("plusC", (o.oid, r.oid), (b,)))
                case "tensor", S.CasePair():
                    out.append(Instance("tensorC", (o.oid, r.oid), (b,)))
                case "one", S.CaseUnit():
                    out.append(Instance("oneC", (o.oid, r.oid), (b,)))
                case "down", S.CaseShift():
                    out.append(Instance("downC", (o.oid, r.oid), (b,)))
        elif form[0] in ("with", "lolli", "up") and len(o.aliases) == 1:
            target = form[1]
            p_oid = provider.get(target)
            if p_oid is None:
                continue
            p = next(x for x in objs if x.oid == p_oid)
            if p.aliases != frozenset({target}) or _head_case_subject(p) != p.chan:
                continue
            pb = p.body
            match form[0], pb:
                case "with", S.CaseLabel() if form[2] in pb.labels():
                    out.append(Instance("withC", (p.oid, o.oid), (target,)))
                case "lolli", S.CasePair():
                    out.append(Instance("lolliC", (p.oid, o.oid), (target,)))
                case "up", S.CaseShift():
                    out.append(Instance("upC", (p.oid, o.oid), (target,)))

    out.sort(key=Instance.key)
    return out


# ---------------------------------------------------------------------------
# Stepping


def step(program: S.Program, config: Configuration,
         inst: Instance) -> tuple[Configuration, TraceEvent]:
    """Apply one rule instance; returns the new configuration and the event."""
    by_oid = config.by_oid()
    for oid in inst.objects:
        if oid not in by_oid:
            raise StaleInstance(f"object {oid} is gone")

    types = dict(config.chan_types)
    next_oid = config.next_oid
    next_name = config.next_name

    def fresh(base: str) -> str:
        nonlocal next_name
        name = f"{base.split('$', 1)[0]}${next_name}"
        next_name += 1
        return name

    def new_oid() -> int:
        nonlocal next_oid
        oid = next_oid
        next_oid += 1
        return oid

    removed: set[int] = set(inst.objects)
    added: list[ProcObject] = []
    channels: tuple[str, ...] = inst.detail

    match inst.rule:
        case "id":
            p, f = by_oid[inst.objects[0]], by_oid[inst.objects[1]]
            (c,) = inst.detail
            merged = replace(p, aliases=(p.aliases - {c}) | f.aliases)
            added.append(replace(merged, oid=new_oid()))

        case "cut":
            o = by_oid[inst.objects[0]]
            sp: S.Spawn = o.body
            formula = _cut_formula(program, config, o, sp)
            fresh_aliases = tuple(fresh(a) for a in sp.aliases)
            x2 = fresh(sp.chan)
            body_p = S.rename_channels(sp.body, {sp.chan: x2})
            body_q = S.rename_channels(sp.cont, dict(zip(sp.aliases, fresh_aliases)))
            for name in fresh_aliases + (x2,):
                types[name] = formula
            added.append(make_object(new_oid(), fresh_aliases, x2, body_p))
            added.append(make_object(new_oid(), o.aliases, o.chan, body_q))
            channels = fresh_aliases

        case "call":
            o = by_oid[inst.objects[0]]
            call: S.Call = o.body
            pd = program.procs.get(call.name)
            if pd is None:
                raise StaleInstance(f"unbound process name: {call.name}")
            body = S.rename_apart(pd.body, fresh)
            sub = {c: a for (c, _), a in zip(pd.params, call.args)}
            sub[pd.result_chan] = o.chan
            body = S.rename_channels(body, sub)
            added.append(make_object(new_oid(), o.aliases, o.chan, body))
            channels = call.args

        case "drop":
            o = by_oid[inst.objects[0]]
            names = []
            for b in sorted(o.uses):
                y = fresh("y")
                t = types.get(b)
                if t is not None:
                    types[y] = t
                added.append(make_object(new_oid(), (), y, S.Fwd(y, b)))
                names.append(b)
            channels = tuple(names)

        case "copy":
            o = by_oid[inst.objects[0]]
            (b,) = inst.detail
            s1, s2 = frozenset({b}), o.aliases - {b}
            theory = program.theory
            sub1: dict[str, str] = {}
            sub2: dict[str, str] = {}
            for u in sorted(o.uses):
                t = types.get(u)
                assert t is None or theory.has_contraction(t.mode), \
                    "copy over a channel whose mode lacks contraction"
                u1, u2 = fresh(u), fresh(u)
                y = fresh("y")
                if t is not None:
                    types[u1] = types[u2] = types[y] = t
                added.append(make_object(new_oid(), (u1, u2), y, S.Fwd(y, u)))
                sub1[u] = u1
                sub2[u] = u2
            c1, c2 = fresh(o.chan), fresh(o.chan)
            otype = types.get(next(iter(o.aliases)))
            if otype is not None:
                types[c1] = types[c2] = otype
            sub1[o.chan] = c1
            sub2[o.chan] = c2
            added.append(make_object(new_oid(), s1, c1, S.rename_channels(o.body, sub1)))
            added.append(make_object(new_oid(), s2, c2, S.rename_channels(o.body, sub2)))

        case "plusC":
            m, r = by_oid[inst.objects[0]], by_oid[inst.objects[1]]
            msg: S.SendLabel = m.body
            rb: S.CaseLabel = r.body
            (b,) = inst.detail
            _, var, branch = next(br for br in rb.branches if br[0] == msg.label)
            body = S.rename_channels(branch, {var: msg.cont})
            added.append(make_object(new_oid(), r.aliases, r.chan, body))
            channels = (b, msg.cont)

        case "withC":
            p, m = by_oid[inst.objects[0]], by_oid[inst.objects[1]]
            msg: S.SendLabel = m.body
            pb: S.CaseLabel = p.body
            _, var, branch = next(br for br in pb.branches if br[0] == msg.label)
            body = S.rename_channels(branch, {var: m.chan})
            types.setdefault(m.chan, types[next(iter(m.aliases))])
            added.append(make_object(new_oid(), m.aliases, m.chan, body))
            channels = inst.detail + (m.chan,)

        case "tensorC":
            m, r = by_oid[inst.objects[0]], by_oid[inst.objects[1]]
            msg: S.SendPair = m.body
            rb: S.CasePair = r.body
            body = S.rename_channels(rb.body, {rb.x: msg.first, rb.y: msg.second})
            added.append(make_object(new_oid(), r.aliases, r.chan, body))
            channels = inst.detail + (msg.first, msg.second)

        case "lolliC":
            p, m = by_oid[inst.objects[0]], by_oid[inst.objects[1]]
            msg: S.SendPair = m.body
            pb: S.CasePair = p.body
            body = S.rename_channels(pb.body, {pb.x: msg.first, pb.y: m.chan})
            types.setdefault(m.chan, types[next(iter(m.aliases))])
            added.append(make_object(new_oid(), m.aliases, m.chan, body))
            channels = inst.detail + (msg.first, m.chan)

        case "oneC":
            m, r = by_oid[inst.objects[0]], by_oid[inst.objects[1]]
            rb: S.CaseUnit = r.body
            added.append(make_object(new_oid(), r.aliases, r.chan, rb.body))

        case "downC":
            m, r = by_oid[inst.objects[0]], by_oid[inst.objects[1]]
            msg: S.SendShift = m.body
            rb: S.CaseShift = r.body
            body = S.rename_channels(rb.body, {rb.x: msg.cont})
            added.append(make_object(new_oid(), r.aliases, r.chan, body))
            channels = inst.detail + (msg.cont,)

        case "upC":
            p, m = by_oid[inst.objects[0]], by_oid[inst.objects[1]]
            pb: S.CaseShift = p.body
            body = S.rename_channels(pb.body, {pb.x: m.chan})
            types.setdefault(m.chan, types[next(iter(m.aliases))])
            added.append(make_object(new_oid(), m.aliases, m.chan, body))
            channels = inst.detail + (m.chan,)

        case other:
            raise ValueError(f"unknown rule: {other}")

    objects = tuple(o for o in config.objects if o.oid not in removed) + tuple(added)
    new_config = Configuration(objects, types, next_oid, next_name, config.steps + 1)
    _assert_invariants(new_config)
    event = TraceEvent(config.steps, inst.rule, inst.objects,
                       tuple(o.oid for o in added), channels)
    return new_config, event


def _cut_formula(program: S.Program, config: Configuration, o: ProcObject,
                 sp: S.Spawn) -> S.SessionType:
    if sp.annot is not None:
        return sp.annot
    match sp.body:
        case S.Call(name, _, _):
            return program.procs[name].result_type
        case S.Fwd(_, src):
            return config.chan_types[src]
    raise ValueError("spawn without a derivable type; run the checker first")


def _assert_invariants(config: Configuration):
    if not __debug__:
        return
    seen: set[str] = set()
    for o in config.objects:
        assert o.uses == S.free_channels(o.body) - {o.chan}, \
            f"used-channel set out of sync for object {o.oid}"
        overlap = o.aliases & seen
        assert not overlap, f"alias provided twice: {sorted(overlap)}"
        seen |= o.aliases


# ---------------------------------------------------------------------------
# Runs


def poised(o: ProcObject) -> bool:
    """Blocked sending or receiving on the object's own channel."""
    return o.body.subject == o.chan if isinstance(o.body, S.SEND_FORMS + S.CASE_FORMS) else False


@dataclass
class RunResult:
    verdict: str  # "terminated-poised" | "stuck-open" | "step-limit"
    config: Configuration
    trace: list[TraceEvent]


def select_instance(instances: list[Instance], policy: str,
                    rng: random.Random, config: Configuration) -> Instance:
    """Pick the next instance according to the scheduling policy.

    demand-driven: communication and bookkeeping first; copy only when a
    blocked communication demands the split, or nothing else can move.
    eager-structural: drop and copy as soon as they are enabled.
    deterministic: the least instance in canonical order.
    """
    if policy == "deterministic":
        return instances[0]
    if policy == "eager-structural":
        structural = [i for i in instances if i.rule in ("drop", "copy")]
        pool = structural or instances
        return pool[rng.randrange(len(pool))]
    if policy == "demand-driven":
        plain = [i for i in instances if i.rule != "copy"]
        if plain:
            return plain[rng.randrange(len(plain))]
        demanded = [i for i in instances if _copy_demanded(config, i)]
        pool = demanded or instances
        return pool[rng.randrange(len(pool))]
    raise ValueError(f"unknown policy: {policy}")


def _copy_demanded(config: Configuration, inst: Instance) -> bool:
    if inst.rule != "copy":
        return False
    (b,) = inst.detail
    for o in config.objects:
        if b in o.uses:
            if _head_case_subject(o) == b:
                return True
            form = _message_form(o)
            return form is not None and form[0] in ("with", "lolli", "up") and form[1] == b
    return False


def run(program: S.Program, config: Configuration, policy: str = "demand-driven",
        seed: int = 0, max_steps: int = 1000) -> RunResult:
    """Step repeatedly under a policy until quiescent or out of budget."""
    if max_steps < 1:
        raise ValueError("step limit must be >= 1")
    if policy not in POLICIES:
        raise ValueError(f"unknown policy: {policy}")
    rng = random.Random(seed)
    trace: list[TraceEvent] = []
    for _ in range(max_steps):
        instances = applicable_rules(config)
        if not instances:
            if config.is_closed():
                lazy = [o for o in config.objects if not poised(o)]
                if lazy:
                    raise MetatheoryViolation(
                        "closed configuration is stuck but objects "
                        f"{[o.oid for o in lazy]} are not poised")
                return RunResult("terminated-poised", config, trace)
            return RunResult("stuck-open", config, trace)
        inst = select_instance(instances, policy, rng, config)
        config, event = step(program, config, inst)
        trace.append(event)
    return RunResult("step-limit", config, trace)


# ---------------------------------------------------------------------------
# Configuration typing


def _preflight(theory: ModeTheory, program: S.Program, psi_in: S.Context,
               config: Configuration, psi_out: S.Context):
    """Checks shared by both configuration checkers.

    Returns (diagnostics, type_of, offered) where type_of maps channels to
    types and offered maps oids to the offered type of the object.
    """
    diags: list[Diagnostic] = []
    type_of: dict[str, S.SessionType] = dict(config.chan_types)
    for side, psi in (("input", psi_in), ("output", psi_out)):
        names = [c for c, _ in psi]
        if len(set(names)) != len(names):
            diags.append(error(f"duplicate channel in the {side} interface"))
        for c, t in psi:
            if c in type_of and type_of[c] != t:
                diags.append(error(f"{side} interface disagrees with the "
                                   f"recorded type of {c}"))
            type_of.setdefault(c, t)

    provided: set[str] = set()
    used: set[str] = set()
    for o in config.objects:
        if o.uses != S.free_channels(o.body) - {o.chan}:
            diags.append(error(f"object {o.oid}: used channels do not match its body"))
        dup = o.aliases & provided
        if dup:
            diags.append(error(f"object {o.oid}: alias(es) provided twice: {sorted(dup)}"))
        provided |= o.aliases
        dup_use = o.uses & used
        if dup_use:
            diags.append(error(
                f"object {o.oid}: channel(s) already used elsewhere: {sorted(dup_use)}"))
        used |= o.uses

    in_names = {c for c, _ in psi_in}
    clash = provided & in_names
    if clash:
        diags.append(error(f"input channel(s) also provided inside: {sorted(clash)}"))
    dangling = used - provided - in_names
    if dangling:
        diags.append(error(f"dangling channel(s): {sorted(dangling)}"))

    offered: dict[int, S.SessionType] = {}
    for o in config.objects:
        ts = {type_of[a] for a in o.aliases if a in type_of}
        missing = [a for a in o.aliases if a not in type_of]
        if missing:
            diags.append(error(f"object {o.oid}: untyped alias(es): {sorted(missing)}"))
            continue
        if len(ts) > 1:
            diags.append(error(f"object {o.oid}: aliases disagree on their type"))
            continue
        if ts:
            offered[o.oid] = next(iter(ts))
        elif o.chan in type_of:
            offered[o.oid] = type_of[o.chan]
        else:
            diags.append(error(
                f"object {o.oid} has no clients and no recorded type for {o.chan}"))
        for u in o.uses:
            if u not in type_of:
                diags.append(error(f"object {o.oid}: used channel {u} is untyped"))
    return diags, type_of, offered


def _typecheck_object(theory: ModeTheory, program: S.Program, o: ProcObject,
                      type_of: dict, a_type: S.SessionType) -> Optional[Diagnostic]:
    if not theory.multiplicity_ok(len(o.aliases), a_type.mode):
        return error(
            f"object {o.oid}: {len(o.aliases)} client(s) at mode {a_type.mode} "
            f"(sigma = {set(theory.props(a_type.mode)) or '{}'})")
    ctx = tuple((u, type_of[u]) for u in sorted(o.uses))
    try:
        goal = TC.make_goal(theory, ctx, o.body, o.chan, a_type)
        TC.check(theory, program, goal)
    except TC.TypingError as e:
        return error(f"object {o.oid}: {e.diagnostic.message}")
    return None


def check_configuration(theory: ModeTheory, program: S.Program, psi_in: S.Context,
                        config: Configuration, psi_out: S.Context) -> list[Diagnostic]:
    """Decide the configuration typing judgment, one object at a time.

    Orders the objects by the uses-relation and extends the interface
    object by object; each object's body is checked by the process
    typechecker and its client count against the multiplicity relation.
    """
    diags, type_of, offered = _preflight(theory, program, psi_in, config, psi_out)
    if diags:
        return diags

    provider = config.provider_of()
    by_oid = config.by_oid()
    deps: dict[int, set[int]] = {o.oid: set() for o in config.objects}
    rdeps: dict[int, set[int]] = {o.oid: set() for o in config.objects}
    for o in config.objects:
        for u in o.uses:
            p = provider.get(u)
            if p is not None:
                deps[o.oid].add(p)
                rdeps[p].add(o.oid)
    ready = sorted(oid for oid, ds in deps.items() if not ds)
    order: list[int] = []
    pending = {oid: len(ds) for oid, ds in deps.items()}
    while ready:
        oid = ready.pop(0)
        order.append(oid)
        for client in sorted(rdeps[oid]):
            pending[client] -= 1
            if pending[client] == 0:
                ready.append(client)
        ready.sort()
    if len(order) != len(config.objects):
        stuck = sorted(set(deps) - set(order))
        return [error(f"cyclic dependency among objects {stuck}")]

    available = {c: t for c, t in psi_in}
    for oid in order:
        o = by_oid[oid]
        for u in sorted(o.uses):
            if u not in available:
                return [error(f"object {oid}: channel {u} is not available")]
            del available[u]
        d = _typecheck_object(theory, program, o, type_of, offered[oid])
        if d is not None:
            diags.append(d)
        for a in o.aliases:
            available[a] = offered[oid]
    if diags:
        return diags

    want = dict(psi_out)
    if available != want:
        extra = sorted(set(available) - set(want))
        missing = sorted(set(want) - set(available))
        mismatched = sorted(c for c in set(want) & set(available)
                            if want[c] != available[c])
        parts = []
        if extra:
            parts.append(f"left over: {extra}")
        if missing:
            parts.append(f"missing: {missing}")
        if mismatched:
            parts.append(f"type mismatch: {mismatched}")
        diags.append(error("interface does not match: " + "; ".join(parts)))
    return diags


def check_configuration_comp(theory: ModeTheory, program: S.Program, psi_in: S.Context,
                             config: Configuration, psi_out: S.Context) -> list[Diagnostic]:
    """The compositional checker: search over binary splits.

    Exponential in the number of objects; used as an oracle against
    `check_configuration` on small configurations.
    """
    diags, type_of, offered = _preflight(theory, program, psi_in, config, psi_out)
    if diags:
        return diags

    by_oid = config.by_oid()
    body_ok: dict[int, bool] = {}

    def object_ok(oid: int) -> bool:
        if oid not in body_ok:
            body_ok[oid] = _typecheck_object(
                theory, program, by_oid[oid], type_of, offered[oid]) is None
        return body_ok[oid]

    def interface_after(part: frozenset, avail: frozenset) -> Optional[frozenset]:
        """The unique interface a part can provide, if it is satisfiable."""
        names = {c for c, _ in avail}
        uses: set[str] = set()
        provided: set[str] = set()
        for oid in part:
            uses |= by_oid[oid].uses
            provided |= by_oid[oid].aliases
        if not uses <= (names | provided):
            return None
        kept = {(c, t) for c, t in avail if c not in uses}
        fresh = {(a, offered[oid]) for oid in part
                 for a in by_oid[oid].aliases if a not in uses}
        return frozenset(kept | fresh)

    start = frozenset((c, t) for c, t in psi_in)
    goal = frozenset((c, t) for c, t in psi_out)
    memo: dict[tuple, bool] = {}

    def derivable(remaining: frozenset, avail: frozenset, target: frozenset) -> bool:
        key = (remaining, avail, target)
        if key in memo:
            return memo[key]
        if not remaining:
            result = avail == target
        elif len(remaining) == 1:
            (oid,) = remaining
            o = by_oid[oid]
            names = {c for c, _ in avail}
            if not o.uses <= names:
                result = False
            else:
                kept = {(c, t) for c, t in avail if c not in o.uses}
                nxt = frozenset(kept | {(a, offered[oid]) for a in o.aliases})
                result = nxt == target and object_ok(oid)
        else:
            result = False
            items = sorted(remaining)
            # fix the first object into the left part to halve the splits
            head, rest = items[0], items[1:]
            for mask in range(2 ** len(rest)):
                left = frozenset({head} | {rest[i] for i in range(len(rest))
                                           if mask >> i & 1})
                right = remaining - left
                if not right:
                    continue
                mid = interface_after(left, avail)
                if mid is None:
                    continue
                if derivable(left, avail, mid) and derivable(right, mid, target):
                    result = True
                    break
        memo[key] = result
        return result

    if derivable(frozenset(by_oid), start, goal):
        return []
    return [error("configuration is not derivable from the interface")]


# ---------------------------------------------------------------------------
# Observability


def observable(program: S.Program, config: Configuration,
               psi: S.Context) -> tuple[bool, list[int]]:
    """Decide whether the configuration is entirely messages reachable
    by receiving along psi; returns the peeling order as a witness."""
    for _, t in psi:
        if not S.purely_positive(program, t):
            raise ValueError("observability is defined only at purely positive types")
    remaining = config.by_oid()
    provider = {a: o.oid for o in config.objects for a in o.aliases}
    frontier = {c: t for c, t in psi}
    witness: list[int] = []

    def peel_one() -> bool:
        for c in sorted(frontier):
            oid = provider.get(c)
            if oid is None or oid not in remaining:
                continue
            o = remaining[oid]
            if o.aliases != frozenset({c}):
                continue
            head = S.head_type(program, frontier[c])
            form = _message_form(o)
            if form is None:
                continue
            match head, form:
                case S.One(), ("one",):
                    del frontier[c]
                case S.Plus(), ("plus", label, cont) if label in head.labels():
                    del frontier[c]
                    frontier[cont] = head.branch(label)
                case S.Down(), ("down", cont):
                    del frontier[c]
                    frontier[cont] = head.body
                case S.Tensor(), ("tensor", first, second):
                    del frontier[c]
                    frontier[first] = head.left
                    frontier[second] = head.right
                case _:
                    continue
            del remaining[oid]
            witness.append(oid)
            return True
        return False

    while remaining:
        if not peel_one():
            return False, witness
    return not frontier, witness


# ---------------------------------------------------------------------------
# Dumping


def dump_config(config: Configuration) -> str:
    """Render a configuration in the parse_config input format."""
    from .frontend import print_process, print_type

    relevant: set[str] = set()
    for o in config.objects:
        relevant |= o.aliases | o.uses | {o.chan}
    lines = []
    for c in sorted(relevant):
        t = config.chan_types.get(c)
        if t is not None:
            lines.append(f"chan {c} : {print_type(t)};")
    for o in sorted(config.objects, key=lambda o: o.oid):
        aliases = ", ".join(sorted(o.aliases))
        uses = ", ".join(sorted(o.uses))
        body = print_process(o.body, in_scope=sorted(o.uses | {o.chan}))
        lines.append(f"proc {{{aliases}}} [{uses}] {o.chan} {{ {body} }}")
    return "\n".join(lines) + "\n"

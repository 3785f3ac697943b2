"""The process typechecker.

Checking is syntax-directed: the head constructor of a term together
with the channel it mentions selects exactly one rule.  Rules that send
are axioms and require the context to contain exactly the channels they
consume; there is no implicit weakening or contraction, so an unused
channel is an error until it is explicitly cancelled through a spawn
with an empty alias set.

The produced derivations can be revalidated node by node against the
rule schemas by `validate_derivation`, which is an independent code path
from `check`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .diagnostics import Diagnostic, SourceSpan, error
from .modes import ModeTheory
from . import syntax as S

#: rule names, in the order they appear in the assignment table
RULES = (
    "id", "cut",
    "plusR0", "plusL", "withR", "withL0",
    "tensorR0", "tensorL", "oneR", "oneL",
    "lolliR", "lolliL0",
    "upR", "upL0", "downR0", "downL",
    "call",
)


class TypingError(Exception):
    def __init__(self, message: str, span: Optional[SourceSpan] = None):
        self.diagnostic = error(message, span)
        super().__init__(self.diagnostic.render())


@dataclass(frozen=True)
class TypingGoal:
    context: S.Context
    subject: S.ProcessTerm
    channel: str
    offered: S.SessionType

    @property
    def mode(self) -> str:
        return self.offered.mode


@dataclass(frozen=True)
class TypingDerivation:
    rule: str
    goal: TypingGoal
    premises: tuple["TypingDerivation", ...] = ()
    #: for cut nodes: the alias set and the cut formula
    cut_names: Optional[tuple[str, ...]] = None
    cut_formula: Optional[S.SessionType] = None


def make_goal(theory: ModeTheory, context: S.Context, subject: S.ProcessTerm,
              channel: str, offered: S.SessionType,
              span: Optional[SourceSpan] = None) -> TypingGoal:
    """Construct a goal, enforcing its presuppositions.

    Channels must be pairwise distinct and may not include the offered
    one; every antecedent's mode must be >= the offered mode (the
    declaration of independence).
    """
    names = [c for c, _ in context]
    if len(set(names)) != len(names):
        raise TypingError("channels in a context must be pairwise distinct", span)
    if channel in names:
        raise TypingError(f"offered channel {_b(channel)} also occurs in the context", span)
    k = offered.mode
    for c, t in context:
        if not theory.geq(t.mode, k):
            raise TypingError(
                f"independence violation: {_b(c)} is at mode {t.mode}, "
                f"which is not >= {k}", span)
    return TypingGoal(context, subject, channel, offered)


def check(theory: ModeTheory, program: S.Program, goal: TypingGoal) -> TypingDerivation:
    """Decide the typing judgment for `goal`, or raise TypingError."""
    ctx = dict(goal.context)
    p = goal.subject
    chan = goal.channel
    span = getattr(p, "span", None)

    free = S.free_channels(p)
    unknown = free - set(ctx) - {chan}
    if unknown:
        raise TypingError(f"unbound channel(s): {', '.join(sorted(_b(u) for u in unknown))}", span)

    match p:
        case S.Fwd(dst, src):
            if dst != chan:
                raise TypingError(
                    f"forwarding provides {_b(dst)} but the goal offers {_b(chan)}", span)
            _exact(ctx, [src], span)
            if ctx[src] != goal.offered:
                raise TypingError(
                    f"forwarded channel {_b(src)} has type {_t(ctx[src])}, "
                    f"expected {_t(goal.offered)}", span)
            return TypingDerivation("id", goal)

        case S.Spawn(aliases, x, annot, body, cont):
            formula = _cut_formula(program, ctx, p, span)
            m, k = formula.mode, goal.mode
            body_free = S.free_channels(body) - {x}
            cont_free = S.free_channels(cont) - set(aliases)
            both = body_free & cont_free
            if both:
                raise TypingError(
                    f"channel(s) used by both the new process and the continuation: "
                    f"{', '.join(sorted(_b(b) for b in both))}", span)
            ctx_p = tuple((c, t) for c, t in goal.context if c in body_free)
            ctx_q = tuple((c, t) for c, t in goal.context if c not in body_free)
            for c, t in ctx_p:
                if not theory.geq(t.mode, m):
                    raise TypingError(
                        f"independence violation at spawn: {_b(c)} is at mode {t.mode}, "
                        f"which is not >= {m}", span)
            if not theory.geq(m, k):
                raise TypingError(
                    f"spawn at mode {m} cannot support a process offering at mode {k}", span)
            if not theory.multiplicity_ok(len(aliases), m):
                raise TypingError(
                    f"multiplicity violation: {len(aliases)} alias(es) at mode {m} "
                    f"(sigma({m}) = {set(theory.props(m)) or '{}'})", span)
            d_body = check(theory, program, make_goal(theory, ctx_p, body, x, formula, span))
            ctx_cont = tuple((a, formula) for a in aliases) + ctx_q
            d_cont = check(theory, program,
                           make_goal(theory, ctx_cont, cont, chan, goal.offered, span))
            return TypingDerivation("cut", goal, (d_body, d_cont),
                                    cut_names=aliases, cut_formula=formula)

        case S.SendLabel(subject, label, cont):
            if subject == chan:
                head = S.head_type(program, goal.offered)
                if not isinstance(head, S.Plus):
                    raise TypingError(
                        f"label send on {_b(subject)} needs an internal choice type, "
                        f"found {_t(goal.offered)}", span)
                if label not in head.labels():
                    raise TypingError(f"label {label} is not offered by {_t(goal.offered)}", span)
                _exact(ctx, [cont], span)
                want = head.branch(label)
                if ctx[cont] != want:
                    raise TypingError(
                        f"continuation {_b(cont)} has type {_t(ctx[cont])}, "
                        f"expected {_t(want)}", span)
                return TypingDerivation("plusR0", goal)
            if cont != chan:
                raise TypingError(
                    f"label send mentions neither side of the goal: {_b(subject)}", span)
            _exact(ctx, [subject], span)
            head = S.head_type(program, ctx[subject])
            if not isinstance(head, S.With):
                raise TypingError(
                    f"label send to {_b(subject)} needs an external choice type, "
                    f"found {_t(ctx[subject])}", span)
            if label not in head.labels():
                raise TypingError(f"label {label} is not offered by {_t(ctx[subject])}", span)
            if head.branch(label) != goal.offered:
                raise TypingError(
                    f"selecting {label} from {_b(subject)} offers {_t(head.branch(label))}, "
                    f"not {_t(goal.offered)}", span)
            return TypingDerivation("withL0", goal)

        case S.CaseLabel(subject, branches):
            if subject == chan:
                head = S.head_type(program, goal.offered)
                if not isinstance(head, S.With):
                    raise TypingError(
                        f"receiving a label on the offered channel needs an external "
                        f"choice type, found {_t(goal.offered)}", span)
                _match_labels(head, branches, span)
                premises = []
                by_label = {l: (v, b) for l, v, b in branches}
                for l, t in head.branches:
                    v, b = by_label[l]
                    premises.append(check(theory, program,
                                          make_goal(theory, goal.context, b, v, t, span)))
                return TypingDerivation("withR", goal, tuple(premises))
            if subject not in ctx:
                raise TypingError(f"unbound channel {_b(subject)}", span)
            head = S.head_type(program, ctx[subject])
            if not isinstance(head, S.Plus):
                raise TypingError(
                    f"receiving a label on {_b(subject)} needs an internal choice type, "
                    f"found {_t(ctx[subject])}", span)
            _match_labels(head, branches, span)
            premises = []
            by_label = {l: (v, b) for l, v, b in branches}
            for l, t in head.branches:
                v, b = by_label[l]
                ctx2 = tuple((c, ty) if c != subject else (v, t) for c, ty in goal.context)
                premises.append(check(theory, program,
                                      make_goal(theory, ctx2, b, chan, goal.offered, span)))
            return TypingDerivation("plusL", goal, tuple(premises))

        case S.SendPair(subject, first, second):
            if subject == chan:
                head = S.head_type(program, goal.offered)
                if not isinstance(head, S.Tensor):
                    raise TypingError(
                        f"pair send on {_b(subject)} needs a tensor type, "
                        f"found {_t(goal.offered)}", span)
                _exact(ctx, [first, second], span)
                if ctx[first] != head.left or ctx[second] != head.right:
                    raise TypingError(
                        f"pair components have types {_t(ctx[first])}, {_t(ctx[second])}; "
                        f"expected {_t(head.left)}, {_t(head.right)}", span)
                return TypingDerivation("tensorR0", goal)
            if second != chan:
                raise TypingError(
                    f"pair send mentions neither side of the goal: {_b(subject)}", span)
            _exact(ctx, [first, subject], span)
            head = S.head_type(program, ctx[subject])
            if not isinstance(head, S.Lolli):
                raise TypingError(
                    f"pair send to {_b(subject)} needs a function type, "
                    f"found {_t(ctx[subject])}", span)
            if ctx[first] != head.left:
                raise TypingError(
                    f"argument {_b(first)} has type {_t(ctx[first])}, "
                    f"expected {_t(head.left)}", span)
            if head.right != goal.offered:
                raise TypingError(
                    f"applying {_b(subject)} offers {_t(head.right)}, "
                    f"not {_t(goal.offered)}", span)
            return TypingDerivation("lolliL0", goal)

        case S.CasePair(subject, x, y, body):
            if subject == chan:
                head = S.head_type(program, goal.offered)
                if not isinstance(head, S.Lolli):
                    raise TypingError(
                        f"receiving a pair on the offered channel needs a function type, "
                        f"found {_t(goal.offered)}", span)
                ctx2 = ((x, head.left),) + goal.context
                premise = check(theory, program,
                                make_goal(theory, ctx2, body, y, head.right, span))
                return TypingDerivation("lolliR", goal, (premise,))
            if subject not in ctx:
                raise TypingError(f"unbound channel {_b(subject)}", span)
            head = S.head_type(program, ctx[subject])
            if not isinstance(head, S.Tensor):
                raise TypingError(
                    f"receiving a pair on {_b(subject)} needs a tensor type, "
                    f"found {_t(ctx[subject])}", span)
            ctx2 = tuple((c, t) for c, t in goal.context if c != subject)
            ctx2 += ((x, head.left), (y, head.right))
            premise = check(theory, program,
                            make_goal(theory, ctx2, body, chan, goal.offered, span))
            return TypingDerivation("tensorL", goal, (premise,))

        case S.SendUnit(subject):
            if subject != chan:
                raise TypingError(
                    f"unit send must be on the offered channel, not {_b(subject)}", span)
            head = S.head_type(program, goal.offered)
            if not isinstance(head, S.One):
                raise TypingError(f"unit send needs type 1, found {_t(goal.offered)}", span)
            _exact(ctx, [], span)
            return TypingDerivation("oneR", goal)

        case S.CaseUnit(subject, body):
            if subject == chan:
                raise TypingError(
                    "a provider cannot wait on its own channel of unit type", span)
            if subject not in ctx:
                raise TypingError(f"unbound channel {_b(subject)}", span)
            head = S.head_type(program, ctx[subject])
            if not isinstance(head, S.One):
                raise TypingError(
                    f"waiting for close on {_b(subject)} needs type 1, "
                    f"found {_t(ctx[subject])}", span)
            ctx2 = tuple((c, t) for c, t in goal.context if c != subject)
            premise = check(theory, program,
                            make_goal(theory, ctx2, body, chan, goal.offered, span))
            return TypingDerivation("oneL", goal, (premise,))

        case S.SendShift(subject, cont):
            if subject == chan:
                head = S.head_type(program, goal.offered)
                if not isinstance(head, S.Down):
                    raise TypingError(
                        f"shift send on the offered channel needs a down-shift type, "
                        f"found {_t(goal.offered)}", span)
                _exact(ctx, [cont], span)
                if ctx[cont] != head.body:
                    raise TypingError(
                        f"shift continuation {_b(cont)} has type {_t(ctx[cont])}, "
                        f"expected {_t(head.body)}", span)
                return TypingDerivation("downR0", goal)
            if cont != chan:
                raise TypingError(
                    f"shift send mentions neither side of the goal: {_b(subject)}", span)
            _exact(ctx, [subject], span)
            head = S.head_type(program, ctx[subject])
            if not isinstance(head, S.Up):
                raise TypingError(
                    f"shift send to {_b(subject)} needs an up-shift type, "
                    f"found {_t(ctx[subject])}", span)
            if head.body != goal.offered:
                raise TypingError(
                    f"shifting {_b(subject)} offers {_t(head.body)}, "
                    f"not {_t(goal.offered)}", span)
            return TypingDerivation("upL0", goal)

        case S.CaseShift(subject, x, body):
            if subject == chan:
                head = S.head_type(program, goal.offered)
                if not isinstance(head, S.Up):
                    raise TypingError(
                        f"receiving a shift on the offered channel needs an up-shift type, "
                        f"found {_t(goal.offered)}", span)
                premise = check(theory, program,
                                make_goal(theory, goal.context, body, x, head.body, span))
                return TypingDerivation("upR", goal, (premise,))
            if subject not in ctx:
                raise TypingError(f"unbound channel {_b(subject)}", span)
            head = S.head_type(program, ctx[subject])
            if not isinstance(head, S.Down):
                raise TypingError(
                    f"receiving a shift on {_b(subject)} needs a down-shift type, "
                    f"found {_t(ctx[subject])}", span)
            ctx2 = tuple((c, t) if c != subject else (x, head.body)
                         for c, t in goal.context)
            premise = check(theory, program,
                            make_goal(theory, ctx2, body, chan, goal.offered, span))
            return TypingDerivation("downL", goal, (premise,))

        case S.Call(name, args, result):
            if result != chan:
                raise TypingError(
                    f"call binds {_b(result)} but the goal offers {_b(chan)}", span)
            pd = program.procs.get(name)
            if pd is None:
                raise TypingError(f"unbound process name: {name}", span)
            if pd.result_type != goal.offered:
                raise TypingError(
                    f"{name} offers {_t(pd.result_type)}, the goal needs "
                    f"{_t(goal.offered)}", span)
            if len(args) != len(pd.params):
                raise TypingError(
                    f"{name} takes {len(pd.params)} channel(s), given {len(args)}", span)
            _exact(ctx, args, span)
            for a, (_, want) in zip(args, pd.params):
                if ctx[a] != want:
                    raise TypingError(
                        f"argument {_b(a)} has type {_t(ctx[a])}, expected {_t(want)}", span)
            return TypingDerivation("call", goal)

    raise TypingError(f"unrecognized process term: {p!r}", span)


def _cut_formula(program: S.Program, ctx: dict, p: S.Spawn,
                 span: Optional[SourceSpan]) -> S.SessionType:
    """The type of the channel introduced by a spawn.

    Taken from the annotation when present; otherwise a Call body takes it
    from the signature and a forwarder body from the forwarded channel.
    """
    if p.annot is not None:
        return p.annot
    match p.body:
        case S.Call(name, _, _):
            pd = program.procs.get(name)
            if pd is None:
                raise TypingError(f"unbound process name: {name}", span)
            return pd.result_type
        case S.Fwd(_, src):
            if src not in ctx:
                raise TypingError(f"unbound channel {_b(src)}", span)
            return ctx[src]
        case _:
            raise TypingError("spawn needs a type annotation here", span)


def _exact(ctx: dict, needed: list[str], span):
    """Axioms consume their channels exactly; anything else is left over."""
    needed_set = set(needed)
    if len(needed) != len(needed_set):
        raise TypingError("axiom uses the same channel twice", span)
    missing = needed_set - set(ctx)
    if missing:
        raise TypingError(f"unbound channel(s): {', '.join(sorted(_b(m) for m in missing))}", span)
    leftover = set(ctx) - needed_set
    if leftover:
        raise TypingError(
            "unused channel(s) at an axiom: "
            + ", ".join(sorted(_b(l) for l in leftover))
            + " (cancel explicitly with an empty spawn)", span)


def _match_labels(head, branches, span):
    have = tuple(l for l, _, _ in branches)
    want = tuple(l for l, _ in head.branches)
    if set(have) != set(want):
        missing = set(want) - set(have)
        extra = set(have) - set(want)
        parts = []
        if missing:
            parts.append(f"missing branch(es): {', '.join(sorted(missing))}")
        if extra:
            parts.append(f"extraneous branch(es): {', '.join(sorted(extra))}")
        raise TypingError("; ".join(parts), span)


def _b(name: str) -> str:
    return name.split("$", 1)[0]


def _t(t: S.SessionType) -> str:
    from .frontend import print_type
    return print_type(t)


# ---------------------------------------------------------------------------
# Whole-program checking


def check_program(theory: ModeTheory, program: S.Program) -> list[Diagnostic]:
    """Check every process definition against its signature."""
    diagnostics = list(S.program_wellformed(program))
    if diagnostics:
        return diagnostics
    for pd in program.procs.values():
        try:
            goal = make_goal(theory, pd.params, pd.body, pd.result_chan,
                             pd.result_type, pd.span)
            check(theory, program, goal)
        except TypingError as e:
            d = e.diagnostic
            msg = f"in {pd.name}: {d.message}"
            diagnostics.append(error(msg, d.span or pd.span))
    return diagnostics


def check_definition(theory: ModeTheory, program: S.Program, name: str) -> TypingDerivation:
    pd = program.procs[name]
    goal = make_goal(theory, pd.params, pd.body, pd.result_chan, pd.result_type, pd.span)
    return check(theory, program, goal)


# ---------------------------------------------------------------------------
# Independent derivation validation


def validate_derivation(theory: ModeTheory, program: S.Program,
                        d: TypingDerivation) -> list[str]:
    """Re-verify a derivation node by node against the rule schemas.

    Shares no logic with `check`: each node is matched against the shape
    its rule demands of the conclusion and the premises.  Returns a list
    of problems; empty means the derivation is valid.
    """
    problems: list[str] = []

    def ctx_of(g: TypingGoal) -> dict:
        return dict(g.context)

    def fail(msg: str):
        problems.append(msg)

    def visit(d: TypingDerivation):
        g = d.goal
        ctx = ctx_of(g)
        names = [c for c, _ in g.context]
        if len(set(names)) != len(names) or g.channel in names:
            fail(f"{d.rule}: malformed context")
            return
        for c, t in g.context:
            if not theory.geq(t.mode, g.mode):
                fail(f"{d.rule}: presupposition fails for {c}")
        p = g.subject
        n = len(d.premises)
        match d.rule:
            case "id":
                if not (isinstance(p, S.Fwd) and n == 0 and p.dst == g.channel
                        and set(ctx) == {p.src} and ctx[p.src] == g.offered):
                    fail("id: schema mismatch")
            case "cut":
                if not (isinstance(p, S.Spawn) and n == 2
                        and d.cut_names == p.aliases and d.cut_formula is not None):
                    fail("cut: schema mismatch")
                    return
                a = d.cut_formula
                m, k = a.mode, g.mode
                dp, dq = d.premises
                if not theory.geq(m, k):
                    fail("cut: mode condition m >= k fails")
                if not theory.multiplicity_ok(len(p.aliases), m):
                    fail("cut: multiplicity condition fails")
                if not all(theory.geq(t.mode, m) for _, t in dp.goal.context):
                    fail("cut: independence condition on the spawned context fails")
                if dp.goal.channel != p.chan or dp.goal.offered != a \
                        or dp.goal.subject != p.body:
                    fail("cut: first premise shape mismatch")
                want_q = {c: t for c, t in g.context if c not in dict(dp.goal.context)}
                for al in p.aliases:
                    want_q[al] = a
                if dict(dq.goal.context) != want_q or dq.goal.channel != g.channel \
                        or dq.goal.offered != g.offered or dq.goal.subject != p.cont:
                    fail("cut: second premise shape mismatch")
                if set(dict(dp.goal.context)) | (set(want_q) - set(p.aliases)) != set(ctx) \
                        or set(dict(dp.goal.context)) & (set(want_q) - set(p.aliases)):
                    fail("cut: context split is not a partition")
            case "plusR0":
                head = S.head_type(program, g.offered)
                ok = (isinstance(p, S.SendLabel) and n == 0 and p.subject == g.channel
                      and isinstance(head, S.Plus) and p.label in head.labels()
                      and set(ctx) == {p.cont} and ctx[p.cont] == head.branch(p.label))
                if not ok:
                    fail("plusR0: schema mismatch")
            case "plusL":
                if not (isinstance(p, S.CaseLabel) and p.subject in ctx):
                    fail("plusL: schema mismatch")
                    return
                head = S.head_type(program, ctx[p.subject])
                if not isinstance(head, S.Plus) or set(p.labels()) != set(head.labels()) \
                        or n != len(head.branches):
                    fail("plusL: label sets differ")
                    return
                by_label = {l: (v, b) for l, v, b in p.branches}
                for prem, (l, t) in zip(d.premises, head.branches):
                    v, b = by_label[l]
                    want = {c: ty for c, ty in ctx.items() if c != p.subject}
                    want[v] = t
                    if dict(prem.goal.context) != want or prem.goal.subject != b \
                            or prem.goal.channel != g.channel or prem.goal.offered != g.offered:
                        fail(f"plusL: premise for {l} mismatched")
            case "withR":
                head = S.head_type(program, g.offered)
                if not (isinstance(p, S.CaseLabel) and p.subject == g.channel
                        and isinstance(head, S.With)
                        and set(p.labels()) == set(head.labels())
                        and n == len(head.branches)):
                    fail("withR: schema mismatch")
                    return
                by_label = {l: (v, b) for l, v, b in p.branches}
                for prem, (l, t) in zip(d.premises, head.branches):
                    v, b = by_label[l]
                    if dict(prem.goal.context) != ctx or prem.goal.subject != b \
                            or prem.goal.channel != v or prem.goal.offered != t:
                        fail(f"withR: premise for {l} mismatched")
            case "withL0":
                if not (isinstance(p, S.SendLabel) and n == 0 and p.cont == g.channel
                        and set(ctx) == {p.subject}):
                    fail("withL0: schema mismatch")
                    return
                head = S.head_type(program, ctx[p.subject])
                if not (isinstance(head, S.With) and p.label in head.labels()
                        and head.branch(p.label) == g.offered):
                    fail("withL0: type mismatch")
            case "tensorR0":
                head = S.head_type(program, g.offered)
                ok = (isinstance(p, S.SendPair) and n == 0 and p.subject == g.channel
                      and isinstance(head, S.Tensor)
                      and set(ctx) == {p.first, p.second}
                      and ctx.get(p.first) == head.left and ctx.get(p.second) == head.right)
                if not ok:
                    fail("tensorR0: schema mismatch")
            case "tensorL":
                if not (isinstance(p, S.CasePair) and p.subject in ctx and n == 1):
                    fail("tensorL: schema mismatch")
                    return
                head = S.head_type(program, ctx[p.subject])
                if not isinstance(head, S.Tensor):
                    fail("tensorL: not a tensor")
                    return
                want = {c: t for c, t in ctx.items() if c != p.subject}
                want[p.x] = head.left
                want[p.y] = head.right
                prem = d.premises[0]
                if dict(prem.goal.context) != want or prem.goal.subject != p.body \
                        or prem.goal.channel != g.channel or prem.goal.offered != g.offered:
                    fail("tensorL: premise mismatched")
            case "oneR":
                head = S.head_type(program, g.offered)
                if not (isinstance(p, S.SendUnit) and n == 0 and p.subject == g.channel
                        and isinstance(head, S.One) and not ctx):
                    fail("oneR: schema mismatch")
            case "oneL":
                if not (isinstance(p, S.CaseUnit) and p.subject in ctx and n == 1
                        and isinstance(S.head_type(program, ctx[p.subject]), S.One)):
                    fail("oneL: schema mismatch")
                    return
                want = {c: t for c, t in ctx.items() if c != p.subject}
                prem = d.premises[0]
                if dict(prem.goal.context) != want or prem.goal.subject != p.body \
                        or prem.goal.channel != g.channel or prem.goal.offered != g.offered:
                    fail("oneL: premise mismatched")
            case "lolliR":
                head = S.head_type(program, g.offered)
                if not (isinstance(p, S.CasePair) and p.subject == g.channel and n == 1
                        and isinstance(head, S.Lolli)):
                    fail("lolliR: schema mismatch")
                    return
                want = dict(ctx)
                want[p.x] = head.left
                prem = d.premises[0]
                if dict(prem.goal.context) != want or prem.goal.subject != p.body \
                        or prem.goal.channel != p.y or prem.goal.offered != head.right:
                    fail("lolliR: premise mismatched")
            case "lolliL0":
                if not (isinstance(p, S.SendPair) and n == 0 and p.second == g.channel
                        and set(ctx) == {p.first, p.subject}):
                    fail("lolliL0: schema mismatch")
                    return
                head = S.head_type(program, ctx[p.subject])
                if not (isinstance(head, S.Lolli) and ctx[p.first] == head.left
                        and head.right == g.offered):
                    fail("lolliL0: type mismatch")
            case "upR":
                head = S.head_type(program, g.offered)
                if not (isinstance(p, S.CaseShift) and p.subject == g.channel and n == 1
                        and isinstance(head, S.Up)):
                    fail("upR: schema mismatch")
                    return
                prem = d.premises[0]
                if dict(prem.goal.context) != ctx or prem.goal.subject != p.body \
                        or prem.goal.channel != p.x or prem.goal.offered != head.body:
                    fail("upR: premise mismatched")
            case "upL0":
                if not (isinstance(p, S.SendShift) and n == 0 and p.cont == g.channel
                        and set(ctx) == {p.subject}):
                    fail("upL0: schema mismatch")
                    return
                head = S.head_type(program, ctx[p.subject])
                if not (isinstance(head, S.Up) and head.body == g.offered):
                    fail("upL0: type mismatch")
            case "downR0":
                head = S.head_type(program, g.offered)
                ok = (isinstance(p, S.SendShift) and n == 0 and p.subject == g.channel
                      and isinstance(head, S.Down) and set(ctx) == {p.cont}
                      and ctx[p.cont] == head.body)
                if not ok:
                    fail("downR0: schema mismatch")
            case "downL":
                if not (isinstance(p, S.CaseShift) and p.subject in ctx and n == 1):
                    fail("downL: schema mismatch")
                    return
                head = S.head_type(program, ctx[p.subject])
                if not isinstance(head, S.Down):
                    fail("downL: not a down-shift")
                    return
                want = {c: t for c, t in ctx.items() if c != p.subject}
                want[p.x] = head.body
                prem = d.premises[0]
                if dict(prem.goal.context) != want or prem.goal.subject != p.body \
                        or prem.goal.channel != g.channel or prem.goal.offered != g.offered:
                    fail("downL: premise mismatched")
            case "call":
                pd = program.procs.get(p.name) if isinstance(p, S.Call) else None
                ok = (pd is not None and n == 0 and p.result == g.channel
                      and pd.result_type == g.offered
                      and set(ctx) == set(p.args)
                      and len(p.args) == len(pd.params)
                      and all(ctx[a] == t for a, (_, t) in zip(p.args, pd.params)))
                if not ok:
                    fail("call: schema mismatch")
            case other:
                fail(f"unknown rule: {other}")
        for prem in d.premises:
            visit(prem)

    visit(d)
    return problems

"""Abstract syntax: session types, process terms, contexts, and programs.

Session types are immutable and compared structurally; a reference to a
named (possibly recursive) type is equal only to a reference with the
same name and mode, never to its unfolding.  Process terms carry an
optional source span that is ignored by equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Optional, Union

from .diagnostics import Diagnostic, SourceSpan, error
from .modes import ModeTheory

# ---------------------------------------------------------------------------
# Session types


@dataclass(frozen=True)
class Atom:
    name: str
    mode: str


@dataclass(frozen=True)
class Lolli:
    left: "SessionType"
    right: "SessionType"
    mode: str


@dataclass(frozen=True)
class Tensor:
    left: "SessionType"
    right: "SessionType"
    mode: str


@dataclass(frozen=True)
class One:
    mode: str


@dataclass(frozen=True)
class Plus:
    """Internal choice; the provider selects one of the labels."""

    branches: tuple[tuple[str, "SessionType"], ...]
    mode: str

    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.branches)

    def branch(self, label: str) -> "SessionType":
        for l, t in self.branches:
            if l == label:
                return t
        raise KeyError(label)


@dataclass(frozen=True)
class With:
    """External choice; a client selects one of the labels."""

    branches: tuple[tuple[str, "SessionType"], ...]
    mode: str

    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.branches)

    def branch(self, label: str) -> "SessionType":
        for l, t in self.branches:
            if l == label:
                return t
        raise KeyError(label)


@dataclass(frozen=True)
class Up:
    """A proposition at the higher mode `mode` wrapping a body at `low`."""

    low: str
    mode: str
    body: "SessionType"


@dataclass(frozen=True)
class Down:
    """A proposition at the lower mode `mode` wrapping a body at `high`."""

    high: str
    mode: str
    body: "SessionType"


@dataclass(frozen=True)
class TypeRef:
    """A reference to a named type definition, equal only by name and mode."""

    name: str
    mode: str


SessionType = Union[Atom, Lolli, Tensor, One, Plus, With, Up, Down, TypeRef]


# ---------------------------------------------------------------------------
# Process terms

_span_field = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Fwd:
    dst: str
    src: str
    span: Optional[SourceSpan] = _span_field


@dataclass(frozen=True)
class Spawn:
    """``S <- (nu x [: A]) P ; Q`` spawns P providing x, known as S in Q."""

    aliases: tuple[str, ...]
    chan: str
    annot: Optional[SessionType]
    body: "ProcessTerm"
    cont: "ProcessTerm"
    span: Optional[SourceSpan] = _span_field


@dataclass(frozen=True)
class SendLabel:
    subject: str
    label: str
    cont: str
    span: Optional[SourceSpan] = _span_field


@dataclass(frozen=True)
class CaseLabel:
    subject: str
    branches: tuple[tuple[str, str, "ProcessTerm"], ...]  # (label, var, body)
    span: Optional[SourceSpan] = _span_field

    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _, _ in self.branches)


@dataclass(frozen=True)
class SendPair:
    subject: str
    first: str
    second: str
    span: Optional[SourceSpan] = _span_field


@dataclass(frozen=True)
class CasePair:
    subject: str
    x: str
    y: str
    body: "ProcessTerm"
    span: Optional[SourceSpan] = _span_field


@dataclass(frozen=True)
class SendUnit:
    subject: str
    span: Optional[SourceSpan] = _span_field


@dataclass(frozen=True)
class CaseUnit:
    subject: str
    body: "ProcessTerm"
    span: Optional[SourceSpan] = _span_field


@dataclass(frozen=True)
class SendShift:
    subject: str
    cont: str
    span: Optional[SourceSpan] = _span_field


@dataclass(frozen=True)
class CaseShift:
    subject: str
    x: str
    body: "ProcessTerm"
    span: Optional[SourceSpan] = _span_field


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[str, ...]
    result: str
    span: Optional[SourceSpan] = _span_field


ProcessTerm = Union[
    Fwd, Spawn, SendLabel, CaseLabel, SendPair, CasePair,
    SendUnit, CaseUnit, SendShift, CaseShift, Call,
]

#: Forms that send a message on their subject channel.
SEND_FORMS = (SendLabel, SendPair, SendUnit, SendShift)
#: Forms that wait for a message on their subject channel.
CASE_FORMS = (CaseLabel, CasePair, CaseUnit, CaseShift)


# ---------------------------------------------------------------------------
# Contexts and programs

Context = tuple[tuple[str, SessionType], ...]


def context_channels(ctx: Context) -> tuple[str, ...]:
    return tuple(c for c, _ in ctx)


def context_lookup(ctx: Context, chan: str) -> SessionType:
    for c, t in ctx:
        if c == chan:
            return t
    raise KeyError(chan)


@dataclass(frozen=True)
class TypeDef:
    name: str
    mode: str
    body: SessionType
    span: Optional[SourceSpan] = _span_field


@dataclass(frozen=True)
class ProcDef:
    name: str
    params: Context  # the channels the process uses, with their types
    result_chan: str
    result_type: SessionType
    body: ProcessTerm
    span: Optional[SourceSpan] = _span_field


@dataclass
class Program:
    theory: ModeTheory
    types: dict[str, TypeDef]
    procs: dict[str, ProcDef]
    #: first value safe to use for fresh `$n` name suffixes
    name_seed: int = 0


# ---------------------------------------------------------------------------
# Operations on types


def unfold(program: Program, t: TypeRef) -> SessionType:
    """One-level unfolding of a named type reference."""
    td = program.types.get(t.name)
    if td is None:
        raise KeyError(f"unbound type name: {t.name}")
    return td.body


def head_type(program: Program, t: SessionType) -> SessionType:
    """Unfold named references until a connective (or atom) is exposed."""
    seen = set()
    while isinstance(t, TypeRef):
        if t.name in seen:
            raise ValueError(f"non-contractive type chain at {t.name}")
        seen.add(t.name)
        t = unfold(program, t)
    return t


def purely_positive(program: Program, t: SessionType) -> bool:
    """True iff t mentions only internal choice, tensor, unit, and down-shifts."""

    def go(t: SessionType, visiting: frozenset[str]) -> bool:
        match t:
            case One():
                return True
            case Plus(branches, _):
                return all(go(b, visiting) for _, b in branches)
            case Tensor(a, b, _):
                return go(a, visiting) and go(b, visiting)
            case Down(_, _, body):
                return go(body, visiting)
            case TypeRef(name, _):
                if name in visiting:
                    return True
                return go(unfold(program, t), visiting | {name})
            case _:
                return False

    return go(t, frozenset())


def type_wellformed(theory: ModeTheory, program: Program, t: SessionType) -> list[Diagnostic]:
    """Check the structural invariants of a session type.

    Same-mode combination for the ordinary connectives, the preorder
    conditions on shifts, nonempty label sets, and that named references
    resolve to a definition at the same mode.  Named references are not
    descended into (each definition body is checked once on its own).
    """
    out: list[Diagnostic] = []

    def check(t: SessionType):
        if t.mode not in theory.sigma:
            out.append(error(f"undeclared mode {t.mode} in type"))
            return
        match t:
            case Atom():
                pass
            case TypeRef(name, mode):
                td = program.types.get(name)
                if td is None:
                    out.append(error(f"unbound type name: {name}"))
                elif td.mode != mode:
                    out.append(error(
                        f"type {name} is declared at mode {td.mode}, referenced at {mode}"))
            case One():
                pass
            case Lolli(a, b, mode) | Tensor(a, b, mode):
                for part in (a, b):
                    if part.mode != mode:
                        out.append(error(
                            f"connective at mode {mode} combines a type at mode {part.mode}"))
                    check(part)
            case Plus(branches, mode) | With(branches, mode):
                if not branches:
                    out.append(error("empty label set in choice type"))
                labels = [l for l, _ in branches]
                if len(set(labels)) != len(labels):
                    out.append(error("duplicate label in choice type"))
                for _, part in branches:
                    if part.mode != mode:
                        out.append(error(
                            f"connective at mode {mode} combines a type at mode {part.mode}"))
                    check(part)
            case Up(low, mode, body):
                if not theory.geq(mode, low):
                    out.append(error(f"up-shift to {mode} from {low} requires {mode} >= {low}"))
                if body.mode != low:
                    out.append(error(
                        f"up-shift body is at mode {body.mode}, expected {low}"))
                check(body)
            case Down(high, mode, body):
                if not theory.geq(high, mode):
                    out.append(error(f"down-shift to {mode} from {high} requires {high} >= {mode}"))
                if body.mode != high:
                    out.append(error(
                        f"down-shift body is at mode {body.mode}, expected {high}"))
                check(body)

    check(t)
    return out


def program_wellformed(program: Program) -> list[Diagnostic]:
    """Validate the theory, all type definitions, and all signatures."""
    out = [error(v) for v in program.theory.validate()]
    for td in program.types.values():
        if td.body.mode != td.mode:
            out.append(error(
                f"type {td.name} declared at mode {td.mode} "
                f"but its body is at mode {td.body.mode}", td.span))
        out.extend(_at(type_wellformed(program.theory, program, td.body), td.span))
        # Contractivity: a definition must not unfold to a bare cycle of names.
        seen = {td.name}
        body = td.body
        while isinstance(body, TypeRef):
            if body.name in seen:
                out.append(error(f"non-contractive type definition: {td.name}", td.span))
                break
            seen.add(body.name)
            nxt = program.types.get(body.name)
            if nxt is None:
                break  # reported by type_wellformed
            body = nxt.body
    for pd in program.procs.values():
        chans = [c for c, _ in pd.params] + [pd.result_chan]
        if len(set(chans)) != len(chans):
            out.append(error(f"duplicate channel name in signature of {pd.name}", pd.span))
        for _, t in pd.params:
            out.extend(_at(type_wellformed(program.theory, program, t), pd.span))
        out.extend(_at(type_wellformed(program.theory, program, pd.result_type), pd.span))
        if not any(d.severity == "error" for d in out):
            k = pd.result_type.mode
            for c, t in pd.params:
                if not program.theory.geq(t.mode, k):
                    out.append(error(
                        f"signature of {pd.name} violates independence: "
                        f"{c} is at mode {t.mode}, not >= {k}", pd.span))
    return out


def _at(diags: list[Diagnostic], span) -> list[Diagnostic]:
    return [replace(d, span=d.span or span) for d in diags]


# ---------------------------------------------------------------------------
# Operations on terms


def free_channels(p: ProcessTerm) -> frozenset[str]:
    match p:
        case Fwd(dst, src):
            return frozenset({dst, src})
        case Spawn(aliases, chan, _, body, cont):
            return (free_channels(body) - {chan}) | (free_channels(cont) - set(aliases))
        case SendLabel(subject, _, cont):
            return frozenset({subject, cont})
        case CaseLabel(subject, branches):
            out = {subject}
            for _, var, body in branches:
                out |= free_channels(body) - {var}
            return frozenset(out)
        case SendPair(subject, first, second):
            return frozenset({subject, first, second})
        case CasePair(subject, x, y, body):
            return frozenset({subject}) | (free_channels(body) - {x, y})
        case SendUnit(subject):
            return frozenset({subject})
        case CaseUnit(subject, body):
            return frozenset({subject}) | free_channels(body)
        case SendShift(subject, cont):
            return frozenset({subject, cont})
        case CaseShift(subject, x, body):
            return frozenset({subject}) | (free_channels(body) - {x})
        case Call(_, args, result):
            return frozenset(args) | {result}
    raise TypeError(f"not a process term: {p!r}")


def bound_channels(p: ProcessTerm) -> frozenset[str]:
    out: set[str] = set()

    def go(p: ProcessTerm):
        match p:
            case Spawn(aliases, chan, _, body, cont):
                out.add(chan)
                out.update(aliases)
                go(body)
                go(cont)
            case CaseLabel(_, branches):
                for _, var, body in branches:
                    out.add(var)
                    go(body)
            case CasePair(_, x, y, body):
                out.update((x, y))
                go(body)
            case CaseUnit(_, body):
                go(body)
            case CaseShift(_, x, body):
                out.add(x)
                go(body)
            case _:
                pass

    go(p)
    return frozenset(out)


def rename_channels(p: ProcessTerm, sub: Mapping[str, str]) -> ProcessTerm:
    """Replace free channel occurrences per `sub`; binders shadow as usual."""
    if not sub:
        return p

    def s(name: str) -> str:
        return sub.get(name, name)

    def under(names: Iterable[str]) -> Mapping[str, str]:
        names = set(names)
        return {k: v for k, v in sub.items() if k not in names}

    match p:
        case Fwd(dst, src):
            return replace(p, dst=s(dst), src=s(src))
        case Spawn(aliases, chan, annot, body, cont):
            return replace(
                p,
                body=rename_channels(body, under({chan})),
                cont=rename_channels(cont, under(aliases)),
            )
        case SendLabel(subject, label, cont):
            return replace(p, subject=s(subject), cont=s(cont))
        case CaseLabel(subject, branches):
            return replace(p, subject=s(subject), branches=tuple(
                (l, v, rename_channels(b, under({v}))) for l, v, b in branches))
        case SendPair(subject, first, second):
            return replace(p, subject=s(subject), first=s(first), second=s(second))
        case CasePair(subject, x, y, body):
            return replace(p, subject=s(subject), body=rename_channels(body, under({x, y})))
        case SendUnit(subject):
            return replace(p, subject=s(subject))
        case CaseUnit(subject, body):
            return replace(p, subject=s(subject), body=rename_channels(body, sub))
        case SendShift(subject, cont):
            return replace(p, subject=s(subject), cont=s(cont))
        case CaseShift(subject, x, body):
            return replace(p, subject=s(subject), body=rename_channels(body, under({x})))
        case Call(name, args, result):
            return replace(p, args=tuple(s(a) for a in args), result=s(result))
    raise TypeError(f"not a process term: {p!r}")


def rename_apart(p: ProcessTerm, fresh: Callable[[str], str]) -> ProcessTerm:
    """Give every binder in p a fresh name; free channels are untouched."""

    def go(p: ProcessTerm, env: dict[str, str]) -> ProcessTerm:
        def s(name: str) -> str:
            return env.get(name, name)

        match p:
            case Fwd(dst, src):
                return replace(p, dst=s(dst), src=s(src))
            case Spawn(aliases, chan, annot, body, cont):
                chan2 = fresh(chan)
                aliases2 = tuple(fresh(a) for a in aliases)
                benv = dict(env); benv[chan] = chan2
                cenv = dict(env); cenv.update(zip(aliases, aliases2))
                return replace(p, aliases=aliases2, chan=chan2,
                               body=go(body, benv), cont=go(cont, cenv))
            case SendLabel(subject, label, cont):
                return replace(p, subject=s(subject), cont=s(cont))
            case CaseLabel(subject, branches):
                out = []
                for l, v, b in branches:
                    v2 = fresh(v)
                    benv = dict(env); benv[v] = v2
                    out.append((l, v2, go(b, benv)))
                return replace(p, subject=s(subject), branches=tuple(out))
            case SendPair(subject, first, second):
                return replace(p, subject=s(subject), first=s(first), second=s(second))
            case CasePair(subject, x, y, body):
                x2, y2 = fresh(x), fresh(y)
                benv = dict(env); benv[x] = x2; benv[y] = y2
                return replace(p, subject=s(subject), x=x2, y=y2, body=go(body, benv))
            case SendUnit(subject):
                return replace(p, subject=s(subject))
            case CaseUnit(subject, body):
                return replace(p, subject=s(subject), body=go(body, env))
            case SendShift(subject, cont):
                return replace(p, subject=s(subject), cont=s(cont))
            case CaseShift(subject, x, body):
                x2 = fresh(x)
                benv = dict(env); benv[x] = x2
                return replace(p, subject=s(subject), x=x2, body=go(body, benv))
            case Call(name, args, result):
                return replace(p, args=tuple(s(a) for a in args), result=s(result))
        raise TypeError(f"not a process term: {p!r}")

    return go(p, {})


def alpha_equal(p: ProcessTerm, q: ProcessTerm) -> bool:
    """Structural equality modulo consistent renaming of bound channels."""
    counter = itertools.count()

    def go(p, q, envp: dict[str, int], envq: dict[str, int]) -> bool:
        if type(p) is not type(q):
            return False

        def eq(a: str, b: str) -> bool:
            ia, ib = envp.get(a), envq.get(b)
            if (ia is None) != (ib is None):
                return False
            return a == b if ia is None else ia == ib

        def bind(envp, envq, ps, qs):
            envp, envq = dict(envp), dict(envq)
            for a, b in zip(ps, qs):
                i = next(counter)
                envp[a] = i
                envq[b] = i
            return envp, envq

        match p:
            case Fwd():
                return eq(p.dst, q.dst) and eq(p.src, q.src)
            case Spawn():
                if len(p.aliases) != len(q.aliases) or p.annot != q.annot:
                    return False
                bp, bq = bind(envp, envq, (p.chan,), (q.chan,))
                cp, cq = bind(envp, envq, p.aliases, q.aliases)
                return go(p.body, q.body, bp, bq) and go(p.cont, q.cont, cp, cq)
            case SendLabel():
                return p.label == q.label and eq(p.subject, q.subject) and eq(p.cont, q.cont)
            case CaseLabel():
                if p.labels() != q.labels() or not eq(p.subject, q.subject):
                    return False
                for (_, v1, b1), (_, v2, b2) in zip(p.branches, q.branches):
                    bp, bq = bind(envp, envq, (v1,), (v2,))
                    if not go(b1, b2, bp, bq):
                        return False
                return True
            case SendPair():
                return eq(p.subject, q.subject) and eq(p.first, q.first) and eq(p.second, q.second)
            case CasePair():
                if not eq(p.subject, q.subject):
                    return False
                bp, bq = bind(envp, envq, (p.x, p.y), (q.x, q.y))
                return go(p.body, q.body, bp, bq)
            case SendUnit():
                return eq(p.subject, q.subject)
            case CaseUnit():
                return eq(p.subject, q.subject) and go(p.body, q.body, envp, envq)
            case SendShift():
                return eq(p.subject, q.subject) and eq(p.cont, q.cont)
            case CaseShift():
                if not eq(p.subject, q.subject):
                    return False
                bp, bq = bind(envp, envq, (p.x,), (q.x,))
                return go(p.body, q.body, bp, bq)
            case Call():
                return (p.name == q.name and eq(p.result, q.result)
                        and len(p.args) == len(q.args)
                        and all(eq(a, b) for a, b in zip(p.args, q.args)))
        raise TypeError(f"not a process term: {p!r}")

    return go(p, q, {}, {})

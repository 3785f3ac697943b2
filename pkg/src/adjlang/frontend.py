"""Concrete syntax: lexer, parser, renamer, and pretty-printer.

Programs look like::

    mode U with W, C;
    mode L;
    order U > L;

    type bits[U] = +{ b0 : bits, b1 : bits };

    proc nor (x : bits, y : bits) |- (z : bits) =
      case x { b0(x1) => ... | b1(x1) => ... };

`%` starts a comment.  Modes of connectives are inferred from their
operands; atoms, bare `1`, and shift targets carry explicit `[mode]`
annotations.  Parsed programs are renamed apart: every binder receives a
globally unique name of the form ``base$N`` while surface names are
recovered by the printer.
"""

from __future__ import annotations

import bisect
import itertools
import re
from dataclasses import dataclass, replace
from typing import Optional

from .diagnostics import Diagnostic, SourceError, SourceSpan, error
from .modes import ModeError, make_theory
from . import syntax as S

KEYWORDS = {
    "mode", "order", "with", "type", "proc", "case", "nu",
    "shift", "up", "down", "chan", "at",
}

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_'$]*)
      | (?P<num>\d+)
      | (?P<punct>\|\-|<\-|=>|\-o|[{}()\[\]<>,;:.|*+&=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "num" | "punct" | "kw" | "eof"
    value: str
    span: SourceSpan


def tokenize(text: str, file: str = "<string>") -> list[Token]:
    line_starts = [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            line_starts.append(i + 1)

    def make_span(start: int, end: int) -> SourceSpan:
        line = bisect.bisect_right(line_starts, start)
        col = start - line_starts[line - 1] + 1
        return SourceSpan(file, start, end, line, col)

    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SourceError([error(f"unexpected character {text[pos]!r}",
                                     make_span(pos, pos + 1))])
        pos = m.end()
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            continue
        value = m.group()
        if kind == "ident" and value in KEYWORDS:
            kind = "kw"
        tokens.append(Token(kind, value, make_span(m.start(), m.end())))
    tokens.append(Token("eof", "", make_span(len(text), len(text))))
    return tokens


# ---------------------------------------------------------------------------
# Raw (unresolved) types: modes may still be unknown after parsing.


@dataclass(frozen=True)
class _RName:
    name: str
    mode: Optional[str]
    span: Optional[SourceSpan] = None


@dataclass(frozen=True)
class _ROne:
    mode: Optional[str]
    span: Optional[SourceSpan] = None


@dataclass(frozen=True)
class _RBin:
    op: str  # "tensor" | "lolli"
    left: object
    right: object
    span: Optional[SourceSpan] = None


@dataclass(frozen=True)
class _RChoice:
    op: str  # "plus" | "with"
    branches: tuple[tuple[str, object], ...]
    span: Optional[SourceSpan] = None


@dataclass(frozen=True)
class _RShift:
    direction: str  # "up" | "down"
    target: str     # the mode of the shifted proposition
    body: object
    span: Optional[SourceSpan] = None


class _TypeResolver:
    """Fill in connective modes and split identifiers into refs and atoms."""

    def __init__(self, type_modes: dict[str, str], diagnostics: list[Diagnostic],
                 ambient_atoms: bool = False):
        self.type_modes = type_modes
        self.diagnostics = diagnostics
        # In sequent syntax, bare identifiers are atoms at the ambient mode;
        # in programs an unknown bare identifier is an error.
        self.ambient_atoms = ambient_atoms

    def infer(self, raw) -> Optional[str]:
        match raw:
            case _RName(name, mode, _):
                return mode or self.type_modes.get(name)
            case _ROne(mode, _):
                return mode
            case _RBin(_, left, right, _):
                return self.infer(left) or self.infer(right)
            case _RChoice(_, branches, _):
                for _, b in branches:
                    m = self.infer(b)
                    if m is not None:
                        return m
                return None
            case _RShift(_, target, _, _):
                return target
        raise TypeError(raw)

    def resolve(self, raw, hint: Optional[str]) -> S.SessionType:
        mode = self.infer(raw) or hint
        match raw:
            case _RName(name, ann, span):
                declared = self.type_modes.get(name)
                if declared is not None:
                    if ann is not None and ann != declared:
                        self.diagnostics.append(error(
                            f"type {name} is declared at mode {declared}, not {ann}", span))
                    return S.TypeRef(name, declared)
                if ann is None:
                    if self.ambient_atoms and hint is not None:
                        return S.Atom(name, hint)
                    self.diagnostics.append(error(
                        f"unknown type {name}: atoms need a mode annotation like {name}[m]",
                        span))
                    return S.Atom(name, hint or "?")
                return S.Atom(name, ann)
            case _ROne(_, span):
                if mode is None:
                    self.diagnostics.append(error("cannot infer the mode of 1; annotate as 1[m]", span))
                    mode = "?"
                return S.One(mode)
            case _RBin(op, left, right, span):
                if mode is None:
                    self.diagnostics.append(error("cannot infer the mode of this connective", span))
                    mode = "?"
                l = self.resolve(left, mode)
                r = self.resolve(right, mode)
                cls = S.Tensor if op == "tensor" else S.Lolli
                return cls(l, r, mode)
            case _RChoice(op, branches, span):
                if mode is None:
                    self.diagnostics.append(error("cannot infer the mode of this choice type", span))
                    mode = "?"
                bs = tuple((l, self.resolve(b, mode)) for l, b in branches)
                cls = S.Plus if op == "plus" else S.With
                return cls(bs, mode)
            case _RShift(direction, target, body, span):
                b = self.resolve(body, None)
                if direction == "up":
                    return S.Up(low=b.mode, mode=target, body=b)
                return S.Down(high=b.mode, mode=target, body=b)
        raise TypeError(raw)


# ---------------------------------------------------------------------------
# Parser


@dataclass
class _RawTypeDef:
    name: str
    mode: str
    body: object
    span: SourceSpan


@dataclass
class _RawProcDef:
    name: str
    params: list[tuple[str, object]]
    result_chan: str
    result_type: object
    body: S.ProcessTerm
    span: SourceSpan


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, kind: str, value: Optional[str] = None, offset: int = 0) -> bool:
        t = self.peek(offset)
        return t.kind == kind and (value is None or t.value == value)

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def accept(self, kind: str, value: Optional[str] = None) -> Optional[Token]:
        if self.at(kind, value):
            return self.advance()
        return None

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        if self.at(kind, value):
            return self.advance()
        t = self.peek()
        want = value or kind
        got = t.value or t.kind
        raise SourceError([error(f"expected {want!r}, found {got!r}", t.span)])

    def ident(self) -> Token:
        return self.expect("ident")

    # -- types

    def parse_type(self):
        left = self.parse_choice()
        if self.accept("punct", "-o"):
            right = self.parse_type()
            return _RBin("lolli", left, right, left.span)
        return left

    def parse_choice(self):
        # binary internal/external choice is sugar for the pi1/pi2 label set
        left = self.parse_tensor()
        while (self.at("punct", "+") or self.at("punct", "&")) \
                and not self.at("punct", "{", offset=1):
            t = self.advance()
            right = self.parse_tensor()
            op = "plus" if t.value == "+" else "with"
            left = _RChoice(op, (("pi1", left), ("pi2", right)), left.span)
        return left

    def parse_tensor(self):
        left = self.parse_prefix()
        while self.accept("punct", "*"):
            right = self.parse_prefix()
            left = _RBin("tensor", left, right, left.span)
        return left

    def parse_prefix(self):
        if self.at("kw", "up") or self.at("kw", "down"):
            t = self.advance()
            self.expect("punct", "[")
            target = self.ident().value
            self.expect("punct", "]")
            body = self.parse_prefix()
            return _RShift(t.value, target, body, t.span)
        return self.parse_type_atom()

    def parse_type_atom(self):
        t = self.peek()
        if self.accept("punct", "("):
            inner = self.parse_type()
            self.expect("punct", ")")
            return inner
        if t.kind == "num":
            self.advance()
            if t.value != "1":
                raise SourceError([error(f"unknown type {t.value!r}", t.span)])
            mode = self._opt_mode()
            return _ROne(mode, t.span)
        if t.kind == "punct" and t.value in ("+", "&"):
            self.advance()
            op = "plus" if t.value == "+" else "with"
            self.expect("punct", "{")
            branches = []
            if not self.at("punct", "}"):
                while True:
                    label = self.ident().value
                    self.expect("punct", ":")
                    branches.append((label, self.parse_type()))
                    if not self.accept("punct", ","):
                        break
            self.expect("punct", "}")
            labels = [l for l, _ in branches]
            if len(set(labels)) != len(labels):
                raise SourceError([error("duplicate label in choice type", t.span)])
            return _RChoice(op, tuple(branches), t.span)
        if t.kind == "ident":
            self.advance()
            mode = self._opt_mode()
            return _RName(t.value, mode, t.span)
        raise SourceError([error(f"expected a type, found {t.value or t.kind!r}", t.span)])

    def _opt_mode(self) -> Optional[str]:
        if self.accept("punct", "["):
            m = self.ident().value
            self.expect("punct", "]")
            return m
        return None

    # -- processes

    def parse_process(self) -> S.ProcessTerm:
        t = self.peek()
        if self.at("punct", "{"):
            return self.parse_spawn(self.parse_alias_set())
        if self.at("kw", "case"):
            return self.parse_case()
        if self.at("punct", "("):
            self.advance()
            p = self.parse_process()
            self.expect("punct", ")")
            return p
        if t.kind == "ident":
            name = self.advance()
            if self.at("punct", "."):
                return self.parse_send(name)
            if self.accept("punct", "<-"):
                if self.at("punct", "(") and self.at("kw", "nu", offset=1):
                    return self.parse_spawn((name.value,), name.span)
                second = self.ident()
                if self.accept("punct", "<-"):
                    args = []
                    if self.at("ident"):
                        args.append(self.ident().value)
                        while self.accept("punct", ","):
                            args.append(self.ident().value)
                    return S.Call(second.value, tuple(args), name.value, span=name.span)
                return S.Fwd(name.value, second.value, span=name.span)
            raise SourceError([error("expected '.' or '<-' after channel name", name.span)])
        raise SourceError([error(f"expected a process, found {t.value or t.kind!r}", t.span)])

    def parse_alias_set(self) -> tuple[str, ...]:
        self.expect("punct", "{")
        names: list[str] = []
        if not self.at("punct", "}"):
            while True:
                names.append(self.ident().value)
                if not self.accept("punct", ","):
                    break
        tok = self.expect("punct", "}")
        if len(set(names)) != len(names):
            raise SourceError([error("duplicate alias in spawn", tok.span)])
        self.expect("punct", "<-")
        return tuple(names)

    def parse_spawn(self, aliases: tuple[str, ...], span=None) -> S.Spawn:
        lpar = self.expect("punct", "(")
        self.expect("kw", "nu")
        chan = self.ident().value
        annot = None
        if self.accept("punct", ":"):
            annot = self.parse_type()
        self.expect("punct", ")")
        body = self.parse_process()
        self.expect("punct", ";")
        cont = self.parse_process()
        return S.Spawn(aliases, chan, annot, body, cont, span=span or lpar.span)

    def parse_send(self, subject: Token) -> S.ProcessTerm:
        self.expect("punct", ".")
        if self.accept("kw", "shift"):
            self.expect("punct", "(")
            cont = self.ident().value
            self.expect("punct", ")")
            return S.SendShift(subject.value, cont, span=subject.span)
        if self.accept("punct", "<"):
            if self.accept("punct", ">"):
                return S.SendUnit(subject.value, span=subject.span)
            first = self.ident().value
            self.expect("punct", ",")
            second = self.ident().value
            self.expect("punct", ">")
            return S.SendPair(subject.value, first, second, span=subject.span)
        label = self.ident().value
        self.expect("punct", "(")
        cont = self.ident().value
        self.expect("punct", ")")
        return S.SendLabel(subject.value, label, cont, span=subject.span)

    def parse_case(self) -> S.ProcessTerm:
        kw = self.expect("kw", "case")
        subject = self.ident().value
        self.expect("punct", "{")
        kinds: list[str] = []
        label_branches: list[tuple[str, str, S.ProcessTerm]] = []
        other = None
        while True:
            if self.accept("kw", "shift"):
                self.expect("punct", "(")
                var = self.ident().value
                self.expect("punct", ")")
                self.expect("punct", "=>")
                other = S.CaseShift(subject, var, self.parse_process(), span=kw.span)
                kinds.append("shift")
            elif self.accept("punct", "<"):
                if self.accept("punct", ">"):
                    self.expect("punct", "=>")
                    other = S.CaseUnit(subject, self.parse_process(), span=kw.span)
                    kinds.append("unit")
                else:
                    x = self.ident().value
                    self.expect("punct", ",")
                    y = self.ident().value
                    self.expect("punct", ">")
                    self.expect("punct", "=>")
                    other = S.CasePair(subject, x, y, self.parse_process(), span=kw.span)
                    kinds.append("pair")
            else:
                label = self.ident()
                self.expect("punct", "(")
                var = self.ident().value
                self.expect("punct", ")")
                self.expect("punct", "=>")
                label_branches.append((label.value, var, self.parse_process()))
                kinds.append("label")
            if not self.accept("punct", "|"):
                break
        self.expect("punct", "}")
        if len(set(kinds)) != 1 or (kinds[0] != "label" and len(kinds) > 1):
            raise SourceError([error("mixed or repeated branch forms in case", kw.span)])
        if kinds[0] == "label":
            labels = [l for l, _, _ in label_branches]
            if len(set(labels)) != len(labels):
                raise SourceError([error("duplicate label in case", kw.span)])
            return S.CaseLabel(subject, tuple(label_branches), span=kw.span)
        return other

    # -- program items

    def parse_program_items(self):
        modes: list[tuple[str, list[str]]] = []
        order: list[tuple[str, str]] = []
        typedefs: list[_RawTypeDef] = []
        procdefs: list[_RawProcDef] = []
        while not self.at("eof"):
            if self.accept("kw", "mode"):
                name = self.ident().value
                props: list[str] = []
                if self.accept("kw", "with"):
                    while True:
                        props.append(self.ident().value)
                        if not self.accept("punct", ","):
                            break
                self.expect("punct", ";")
                modes.append((name, props))
            elif self.accept("kw", "order"):
                hi = self.ident().value
                self.expect("punct", ">")
                lo = self.ident().value
                self.expect("punct", ";")
                order.append((hi, lo))
            elif self.at("kw", "type"):
                kw = self.advance()
                name = self.ident().value
                self.expect("punct", "[")
                mode = self.ident().value
                self.expect("punct", "]")
                self.expect("punct", "=")
                body = self.parse_type()
                self.expect("punct", ";")
                typedefs.append(_RawTypeDef(name, mode, body, kw.span))
            elif self.at("kw", "proc"):
                kw = self.advance()
                name = self.ident().value
                self.expect("punct", "(")
                params: list[tuple[str, object]] = []
                if not self.at("punct", ")"):
                    while True:
                        c = self.ident().value
                        self.expect("punct", ":")
                        params.append((c, self.parse_type()))
                        if not self.accept("punct", ","):
                            break
                self.expect("punct", ")")
                self.expect("punct", "|-")
                self.expect("punct", "(")
                rc = self.ident().value
                self.expect("punct", ":")
                rt = self.parse_type()
                self.expect("punct", ")")
                self.expect("punct", "=")
                body = self.parse_process()
                self.expect("punct", ";")
                procdefs.append(_RawProcDef(name, params, rc, rt, body, kw.span))
            else:
                t = self.peek()
                raise SourceError([error(
                    f"expected a declaration, found {t.value or t.kind!r}", t.span)])
        return modes, order, typedefs, procdefs


# ---------------------------------------------------------------------------
# Parsing entry points


def parse_program(text: str, file: str = "<string>") -> S.Program:
    """Parse, resolve, and rename a program.  Raises SourceError on failure."""
    parser = _Parser(tokenize(text, file))
    modes, order, typedefs, procdefs = parser.parse_program_items()
    diagnostics: list[Diagnostic] = []

    try:
        theory = make_theory(modes, order)
    except ModeError as e:
        raise SourceError([error(str(e))]) from None

    type_modes: dict[str, str] = {}
    for td in typedefs:
        if td.name in type_modes:
            diagnostics.append(error(f"duplicate type definition: {td.name}", td.span))
        type_modes[td.name] = td.mode
    resolver = _TypeResolver(type_modes, diagnostics)

    types: dict[str, S.TypeDef] = {}
    for td in typedefs:
        body = resolver.resolve(td.body, td.mode)
        types[td.name] = S.TypeDef(td.name, td.mode, body, span=td.span)

    counter = itertools.count(1)

    def fresh(base: str) -> str:
        return f"{_base(base)}${next(counter)}"

    procs: dict[str, S.ProcDef] = {}
    for pd in procdefs:
        if pd.name in procs:
            diagnostics.append(error(f"duplicate process definition: {pd.name}", pd.span))
            continue
        params = tuple((c, resolver.resolve(t, None)) for c, t in pd.params)
        result_type = resolver.resolve(pd.result_type, None)
        body = _resolve_spawn_annots(pd.body, resolver)
        chans = [c for c, _ in params] + [pd.result_chan]
        if len(set(chans)) != len(chans):
            diagnostics.append(error(f"duplicate channel in signature of {pd.name}", pd.span))
            continue
        unbound = S.free_channels(body) - set(chans)
        if unbound:
            diagnostics.append(error(
                f"unbound channel(s) in {pd.name}: {', '.join(sorted(unbound))}", pd.span))
            continue
        env = {c: fresh(c) for c in chans}
        params = tuple((env[c], t) for c, t in params)
        rc = env[pd.result_chan]
        body = S.rename_apart(S.rename_channels(body, env), fresh)
        procs[pd.name] = S.ProcDef(pd.name, params, rc, result_type, body, span=pd.span)

    if diagnostics:
        raise SourceError(diagnostics)
    return S.Program(theory, types, procs, name_seed=next(counter))


def _resolve_spawn_annots(p: S.ProcessTerm, resolver: _TypeResolver) -> S.ProcessTerm:
    match p:
        case S.Spawn(_, _, annot, body, cont):
            return replace(
                p,
                annot=None if annot is None else resolver.resolve(annot, None),
                body=_resolve_spawn_annots(body, resolver),
                cont=_resolve_spawn_annots(cont, resolver),
            )
        case S.CaseLabel(_, branches):
            return replace(p, branches=tuple(
                (l, v, _resolve_spawn_annots(b, resolver)) for l, v, b in branches))
        case S.CasePair(_, _, _, body) | S.CaseUnit(_, body) | S.CaseShift(_, _, body):
            return replace(p, body=_resolve_spawn_annots(body, resolver))
        case _:
            return p


@dataclass
class ConfigEntry:
    aliases: tuple[str, ...]
    uses: tuple[str, ...]
    chan: str
    body: S.ProcessTerm
    span: Optional[SourceSpan] = None


@dataclass
class ParsedConfig:
    entries: list[ConfigEntry]
    chan_types: dict[str, S.SessionType]


def parse_config(text: str, program: S.Program, file: str = "<config>") -> ParsedConfig:
    """Parse a standalone configuration: `chan` declarations and proc entries.

    Entries look like ``proc {S} [D] a { P }``.  Alias sets must be
    pairwise disjoint; each body is renamed apart (its free channels are
    configuration-level names and stay as written).
    """
    parser = _Parser(tokenize(text, file))
    diagnostics: list[Diagnostic] = []
    resolver = _TypeResolver({n: t.mode for n, t in program.types.items()}, diagnostics)
    counter = itertools.count(program.name_seed)

    def fresh(base: str) -> str:
        return f"{_base(base)}${next(counter)}"

    entries: list[ConfigEntry] = []
    chan_types: dict[str, S.SessionType] = {}
    seen_aliases: set[str] = set()
    while not parser.at("eof"):
        if parser.accept("kw", "chan"):
            name = parser.ident().value
            parser.expect("punct", ":")
            raw = parser.parse_type()
            parser.expect("punct", ";")
            chan_types[name] = resolver.resolve(raw, None)
        elif parser.at("kw", "proc"):
            kw = parser.advance()
            parser.expect("punct", "{")
            aliases: list[str] = []
            if not parser.at("punct", "}"):
                while True:
                    aliases.append(parser.ident().value)
                    if not parser.accept("punct", ","):
                        break
            parser.expect("punct", "}")
            parser.expect("punct", "[")
            uses: list[str] = []
            if not parser.at("punct", "]"):
                while True:
                    uses.append(parser.ident().value)
                    if not parser.accept("punct", ","):
                        break
            parser.expect("punct", "]")
            chan = parser.ident().value
            parser.expect("punct", "{")
            body = _resolve_spawn_annots(parser.parse_process(), resolver)
            parser.expect("punct", "}")
            body = S.rename_apart(body, fresh)
            overlap = set(aliases) & seen_aliases
            if overlap:
                diagnostics.append(error(
                    f"alias set overlaps an earlier entry: {', '.join(sorted(overlap))}",
                    kw.span))
            seen_aliases.update(aliases)
            actual = S.free_channels(body) - {chan}
            if actual != set(uses):
                diagnostics.append(error(
                    f"declared channel set [{', '.join(sorted(uses))}] does not match "
                    f"the free channels of the body [{', '.join(sorted(actual))}]",
                    kw.span))
            entries.append(ConfigEntry(tuple(aliases), tuple(sorted(actual)), chan, body,
                                       span=kw.span))
        else:
            t = parser.peek()
            raise SourceError([error(
                f"expected 'chan' or 'proc', found {t.value or t.kind!r}", t.span)])
    if diagnostics:
        raise SourceError(diagnostics)
    return ParsedConfig(entries, chan_types)


def parse_sequent(text: str, program: S.Program, file: str = "<sequent>"):
    """Parse ``x : A, y : B |- C [at m]`` against a program's type names."""
    parser = _Parser(tokenize(text, file))
    diagnostics: list[Diagnostic] = []
    resolver = _TypeResolver({n: t.mode for n, t in program.types.items()}, diagnostics,
                             ambient_atoms=True)
    raw_ants: list[tuple[str, object]] = []
    if not parser.at("punct", "|-"):
        while True:
            c = parser.ident().value
            parser.expect("punct", ":")
            raw_ants.append((c, parser.parse_type()))
            if not parser.accept("punct", ","):
                break
    parser.expect("punct", "|-")
    raw_succ = parser.parse_type()
    ambient = None
    if parser.accept("kw", "at"):
        ambient = parser.ident().value
    parser.expect("eof")
    ants = tuple((c, resolver.resolve(t, ambient)) for c, t in raw_ants)
    succ = resolver.resolve(raw_succ, ambient)
    names = [c for c, _ in ants]
    if len(set(names)) != len(names):
        diagnostics.append(error("duplicate channel name in sequent"))
    if diagnostics:
        raise SourceError(diagnostics)
    return ants, succ


def _base(name: str) -> str:
    return name.split("$", 1)[0]


def name_counter_floor(names, seed: int = 0) -> int:
    """A counter start that cannot collide with any `$N` suffix in `names`."""
    floor = seed
    for n in names:
        if "$" in n:
            suffix = n.rsplit("$", 1)[1]
            if suffix.isdigit():
                floor = max(floor, int(suffix) + 1)
    return floor


# ---------------------------------------------------------------------------
# Pretty-printing


def print_type(t: S.SessionType) -> str:
    return _ptype(t, 0)


def _ptype(t: S.SessionType, prec: int) -> str:
    # precedence: 0 lolli, 1 tensor, 2 prefix/atoms
    match t:
        case S.Atom(name, mode):
            return f"{name}[{mode}]"
        case S.TypeRef(name, _):
            return name
        case S.One(mode):
            return f"1[{mode}]"
        case S.Lolli(a, b, _):
            s = f"{_ptype(a, 1)} -o {_ptype(b, 0)}"
            return f"({s})" if prec > 0 else s
        case S.Tensor(a, b, _):
            s = f"{_ptype(a, 2)} * {_ptype(b, 2)}"
            return f"({s})" if prec > 1 else s
        case S.Plus(branches, _):
            inner = ", ".join(f"{l} : {_ptype(b, 0)}" for l, b in branches)
            return "+{ " + inner + " }"
        case S.With(branches, _):
            inner = ", ".join(f"{l} : {_ptype(b, 0)}" for l, b in branches)
            return "&{ " + inner + " }"
        case S.Up(_, mode, body):
            s = f"up[{mode}] {_ptype(body, 2)}"
            return f"({s})" if prec > 2 else s
        case S.Down(_, mode, body):
            s = f"down[{mode}] {_ptype(body, 2)}"
            return f"({s})" if prec > 2 else s
    raise TypeError(f"not a session type: {t!r}")


class _Printer:
    """Prints renamed-apart terms with surface names, avoiding capture."""

    def __init__(self, in_scope):
        self.scope: dict[str, str] = {c: c for c in in_scope}
        self.used: set[str] = set(in_scope)

    def bind(self, name: str) -> str:
        want = _base(name)
        candidate = want
        while candidate in self.used:
            candidate += "'"
        self.used.add(candidate)
        self.scope[name] = candidate
        return candidate

    def see(self, name: str) -> str:
        return self.scope.get(name, name)

    def term(self, p: S.ProcessTerm) -> str:
        match p:
            case S.Fwd(dst, src):
                return f"{self.see(dst)} <- {self.see(src)}"
            case S.Spawn(aliases, chan, annot, body, cont):
                c = self.bind(chan)
                ann = f" : {print_type(annot)}" if annot is not None else ""
                body_s = self.term(body)
                if isinstance(body, S.Spawn):
                    body_s = f"({body_s})"
                als = ", ".join(self.bind(a) for a in aliases)
                return f"{{{als}}} <- (nu {c}{ann}) {body_s} ; {self.term(cont)}"
            case S.SendLabel(subject, label, cont):
                return f"{self.see(subject)}.{label}({self.see(cont)})"
            case S.CaseLabel(subject, branches):
                parts = []
                for l, v, b in branches:
                    v2 = self.bind(v)
                    parts.append(f"{l}({v2}) => {self.term(b)}")
                return f"case {self.see(subject)} {{ " + " | ".join(parts) + " }"
            case S.SendPair(subject, first, second):
                return f"{self.see(subject)}.<{self.see(first)}, {self.see(second)}>"
            case S.CasePair(subject, x, y, body):
                x2, y2 = self.bind(x), self.bind(y)
                return f"case {self.see(subject)} {{ <{x2}, {y2}> => {self.term(body)} }}"
            case S.SendUnit(subject):
                return f"{self.see(subject)}.<>"
            case S.CaseUnit(subject, body):
                return f"case {self.see(subject)} {{ <> => {self.term(body)} }}"
            case S.SendShift(subject, cont):
                return f"{self.see(subject)}.shift({self.see(cont)})"
            case S.CaseShift(subject, x, body):
                x2 = self.bind(x)
                return f"case {self.see(subject)} {{ shift({x2}) => {self.term(body)} }}"
            case S.Call(name, args, result):
                arglist = ", ".join(self.see(a) for a in args)
                return f"{self.see(result)} <- {name} <- {arglist}".rstrip()
        raise TypeError(f"not a process term: {p!r}")


def print_process(p: S.ProcessTerm, in_scope=None) -> str:
    """Render a term; parse(print(p)) is alpha-equivalent to p."""
    if in_scope is None:
        in_scope = sorted(S.free_channels(p))
    return _Printer(in_scope).term(p)


def print_program(program: S.Program) -> str:
    lines: list[str] = []
    for m in program.theory.modes:
        props = sorted(program.theory.sigma[m])
        suffix = f" with {', '.join(props)}" if props else ""
        lines.append(f"mode {m}{suffix};")
    for hi, lo in program.theory.declared_order:
        lines.append(f"order {hi} > {lo};")
    if program.types:
        lines.append("")
    for td in program.types.values():
        lines.append(f"type {td.name}[{td.mode}] = {print_type(td.body)};")
    for pd in program.procs.values():
        lines.append("")
        printer = _Printer([])
        params = ", ".join(f"{printer.bind(c)} : {print_type(t)}" for c, t in pd.params)
        result = f"{printer.bind(pd.result_chan)} : {print_type(pd.result_type)}"
        lines.append(f"proc {pd.name} ({params}) |- ({result}) =")
        lines.append(f"  {printer.term(pd.body)};")
    return "\n".join(lines) + "\n"

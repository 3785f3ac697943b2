"""Seeded random generation of theories, types, programs, and proofs.

Programs are generated goal-directed: a term is grown for a typing goal
by picking among the rule-shaped moves that are legal at that goal, so
the result typechecks by construction (and is validated against the
checker anyway).  Mode theories are chains, generated types avoid atoms
and keep functions out of contexts; the hand-written corpus covers those
shapes.  A generation attempt that paints itself into a corner raises
Dead and the driver retries with fresh randomness.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .modes import ModeTheory, make_theory
from . import syntax as S
from . import kernel as K

MODE_NAMES = ("U", "M", "L", "K")
LABELS = ("a", "b", "c")


class Dead(Exception):
    """The current generation attempt cannot be completed."""


def random_chain_theory(rng: random.Random, n_modes: int) -> ModeTheory:
    """A chain m1 > m2 > ... with monotonically shrinking properties."""
    names = MODE_NAMES[:n_modes]
    props: list[frozenset[str]] = []
    current: set[str] = set()
    for _ in reversed(names):
        if "W" not in current and rng.random() < 0.5:
            current.add("W")
        if "C" not in current and rng.random() < 0.5:
            current.add("C")
        props.append(frozenset(current))
    props.reverse()  # top of the chain gets the largest property set
    order = [(names[i], names[i + 1]) for i in range(len(names) - 1)]
    theory = make_theory(list(zip(names, props)), order)
    assert not theory.validate()
    return theory


def modes_geq(theory: ModeTheory, k: str) -> list[str]:
    return [m for m in theory.modes if theory.geq(m, k)]


def modes_leq(theory: ModeTheory, k: str) -> list[str]:
    return [m for m in theory.modes if theory.geq(k, m)]


def random_inhabited_type(rng: random.Random, theory: ModeTheory, mode: str,
                          depth: int, positive_only: bool = True,
                          floor: str | None = None) -> S.SessionType:
    """A session type providable from an empty context.

    With a `floor` mode, any up-shift stays consumable at goals of mode
    `floor` or below (its body mode dominates the floor).
    """
    choices = ["one"]
    if depth > 0:
        choices += ["plus", "plus", "tensor"]
        higher = [m for m in modes_geq(theory, mode) if m != mode]
        if higher:
            choices.append("down")
        if not positive_only:
            choices += ["with"]
            lower = [m for m in modes_leq(theory, mode) if m != mode
                     and (floor is None or theory.geq(m, floor))]
            if lower:
                choices.append("up")
    match rng.choice(choices):
        case "one":
            return S.One(mode)
        case "plus":
            n = rng.randint(1, 3)
            return S.Plus(tuple(
                (LABELS[i], random_inhabited_type(rng, theory, mode, depth - 1,
                                                  positive_only, floor))
                for i in range(n)), mode)
        case "with":
            n = rng.randint(1, 2)
            return S.With(tuple(
                (LABELS[i], random_inhabited_type(rng, theory, mode, depth - 1,
                                                  positive_only, floor))
                for i in range(n)), mode)
        case "tensor":
            return S.Tensor(
                random_inhabited_type(rng, theory, mode, depth - 1, positive_only,
                                      floor),
                random_inhabited_type(rng, theory, mode, depth - 1, positive_only,
                                      floor),
                mode)
        case "down":
            high = rng.choice([m for m in modes_geq(theory, mode) if m != mode])
            return S.Down(high, mode,
                          random_inhabited_type(rng, theory, high, depth - 1,
                                                positive_only, floor))
        case "up":
            low = rng.choice([m for m in modes_leq(theory, mode) if m != mode
                              and (floor is None or theory.geq(m, floor))])
            return S.Up(low, mode,
                        random_inhabited_type(rng, theory, low, depth - 1,
                                              positive_only, floor))
    raise AssertionError


# ---------------------------------------------------------------------------
# Goal-directed term generation


@dataclass
class _Gen:
    rng: random.Random
    theory: ModeTheory
    counter: "itertools.count"
    aux: tuple[str, S.Context, S.SessionType] | None = None  # callable definition

    def fresh(self, base: str) -> str:
        return f"{base}${next(self.counter)}"

    def term(self, ctx: dict[str, S.SessionType], chan: str,
             goal: S.SessionType, fuel: int) -> S.ProcessTerm:
        rng = self.rng
        theory = self.theory
        k = goal.mode
        moves: list[tuple] = []

        if fuel > 0:
            for c, t in ctx.items():
                if theory.has_contraction(t.mode):
                    moves.append(("share", c))
                if theory.has_weakening(t.mode):
                    moves.append(("cancel", c))
            moves.append(("new",))
            if self.aux is not None and theory.geq(self.aux[2].mode, k):
                moves.append(("call_aux",))

        for c, t in ctx.items():
            match t:
                case S.Plus():
                    moves.append(("recv_label", c))
                case S.Tensor():
                    moves.append(("recv_pair", c))
                case S.One():
                    moves.append(("recv_unit", c))
                case S.Down():
                    moves.append(("recv_shift", c))
                case S.With():
                    moves.append(("send_label", c))
                case S.Up(low, _, _) if theory.geq(low, k):
                    moves.append(("send_shift", c))

        match goal:
            case S.Plus():
                moves.append(("own_label",))
            case S.Tensor():
                moves.append(("own_pair",))
            case S.One() if not ctx:
                moves.append(("own_unit",))
            case S.Down(high, _, _) if all(theory.geq(t.mode, high)
                                           for t in ctx.values()):
                moves.append(("own_shift",))
            case S.With():
                moves.append(("own_recv_label",))
            case S.Lolli():
                moves.append(("own_recv_pair",))
            case S.Up():
                moves.append(("own_recv_shift",))

        if len(ctx) == 1:
            (c, t), = ctx.items()
            if t == goal:
                moves.append(("fwd", c))

        if not moves:
            raise Dead(f"no legal move for goal at {k}")
        move = moves[rng.randrange(len(moves))]

        def without(c):
            return {n: t for n, t in ctx.items() if n != c}

        def spawn(aliases, formula, body_fn, cont_fn):
            w = self.fresh("w")
            return S.Spawn(tuple(aliases), w, formula, body_fn(w), cont_fn())

        match move:
            case ("share", c):
                t = ctx[c]
                s1, s2 = self.fresh(c), self.fresh(c)
                rest = without(c)
                return spawn(
                    (s1, s2), t,
                    lambda w: S.Fwd(w, c),
                    lambda: self.term({**rest, s1: t, s2: t}, chan, goal, fuel - 1))
            case ("cancel", c):
                t = ctx[c]
                return spawn(
                    (), t,
                    lambda w: S.Fwd(w, c),
                    lambda: self.term(without(c), chan, goal, fuel - 1))
            case ("new",):
                m = rng.choice(modes_geq(theory, k))
                t = random_inhabited_type(rng, theory, m, rng.randint(0, 2),
                                          positive_only=rng.random() < 0.6,
                                          floor=k)
                s = self.fresh("n")
                return spawn(
                    (s,), t,
                    lambda w: self.term({}, w, t, fuel // 2),
                    lambda: self.term({**ctx, s: t}, chan, goal, fuel - 1))
            case ("call_aux",):
                name, params, rtype = self.aux
                args = []
                binders = []
                for _, pt in params:
                    a = self.fresh("g")
                    args.append(a)
                    binders.append((a, pt))
                s = self.fresh("r")

                def build(i: int) -> S.ProcessTerm:
                    if i == len(binders):
                        inner_ctx = {**ctx, s: rtype}
                        w = self.fresh("w")
                        return S.Spawn(
                            (s,), w, None,
                            S.Call(name, tuple(args), w),
                            self.term(inner_ctx, chan, goal, fuel - 1))
                    a, pt = binders[i]
                    w = self.fresh("w")
                    return S.Spawn((a,), w, pt,
                                   self.term({}, w, pt, fuel // 2), build(i + 1))

                return build(0)
            case ("recv_label", c):
                t = ctx[c]
                rest = without(c)
                branches = []
                for label, bt in t.branches:
                    v = self.fresh("v")
                    branches.append((label, v,
                                     self.term({**rest, v: bt}, chan, goal, fuel - 1)))
                return S.CaseLabel(c, tuple(branches))
            case ("recv_pair", c):
                t = ctx[c]
                rest = without(c)
                x, y = self.fresh("x"), self.fresh("y")
                return S.CasePair(c, x, y, self.term(
                    {**rest, x: t.left, y: t.right}, chan, goal, fuel - 1))
            case ("recv_unit", c):
                return S.CaseUnit(c, self.term(without(c), chan, goal, fuel - 1))
            case ("recv_shift", c):
                t = ctx[c]
                x = self.fresh("x")
                return S.CaseShift(c, x, self.term(
                    {**without(c), x: t.body}, chan, goal, fuel - 1))
            case ("send_label", c):
                t = ctx[c]
                label, bt = t.branches[rng.randrange(len(t.branches))]
                s = self.fresh("s")
                return spawn(
                    (s,), bt,
                    lambda w: S.SendLabel(c, label, w),
                    lambda: self.term({**without(c), s: bt}, chan, goal, fuel - 1))
            case ("send_shift", c):
                t = ctx[c]
                s = self.fresh("s")
                return spawn(
                    (s,), t.body,
                    lambda w: S.SendShift(c, w),
                    lambda: self.term({**without(c), s: t.body}, chan, goal, fuel - 1))
            case ("own_label",):
                label, bt = goal.branches[self.rng.randrange(len(goal.branches))]
                s = self.fresh("s")
                return spawn(
                    (s,), bt,
                    lambda w: self.term(dict(ctx), w, bt, fuel - 1),
                    lambda: S.SendLabel(chan, label, s))
            case ("own_pair",):
                left_ctx = {}
                right_ctx = {}
                for c, t in ctx.items():
                    (left_ctx if rng.random() < 0.5 else right_ctx)[c] = t
                s1, s2 = self.fresh("s"), self.fresh("s")
                w1, w2 = self.fresh("w"), self.fresh("w")
                return S.Spawn(
                    (s1,), w1, goal.left,
                    self.term(left_ctx, w1, goal.left, fuel - 1),
                    S.Spawn((s2,), w2, goal.right,
                            self.term(right_ctx, w2, goal.right, fuel - 1),
                            S.SendPair(chan, s1, s2)))
            case ("own_unit",):
                return S.SendUnit(chan)
            case ("own_shift",):
                s = self.fresh("s")
                return spawn(
                    (s,), goal.body,
                    lambda w: self.term(dict(ctx), w, goal.body, fuel - 1),
                    lambda: S.SendShift(chan, s))
            case ("own_recv_label",):
                branches = []
                for label, bt in goal.branches:
                    v = self.fresh("v")
                    branches.append((label, v, self.term(dict(ctx), v, bt, fuel - 1)))
                return S.CaseLabel(chan, tuple(branches))
            case ("own_recv_pair",):
                x, y = self.fresh("x"), self.fresh("y")
                return S.CasePair(chan, x, y, self.term(
                    {**ctx, x: goal.left}, y, goal.right, fuel - 1))
            case ("own_recv_shift",):
                x = self.fresh("x")
                return S.CaseShift(chan, x, self.term(dict(ctx), x, goal.body, fuel - 1))
            case ("fwd", c):
                return S.Fwd(chan, c)
        raise AssertionError(move)


def random_program(rng: random.Random, n_modes: int | None = None,
                   fuel: int = 6, type_depth: int = 2,
                   positive_only: bool = True,
                   with_aux: bool | None = None) -> tuple[S.Program, str]:
    """A random well-typed program with a zero-channel `main` definition.

    May raise Dead; see generate_checked_program for the retrying driver.
    """
    theory = random_chain_theory(rng, n_modes or rng.randint(2, 4))
    counter = itertools.count(1)
    gen = _Gen(rng, theory, counter)
    procs: dict[str, S.ProcDef] = {}

    if with_aux is None:
        with_aux = rng.random() < 0.5
    if with_aux:
        amode = rng.choice(theory.modes)
        rtype = random_inhabited_type(rng, theory, amode, type_depth, positive_only)
        params = []
        for i in range(rng.randint(1, 2)):
            pmode = rng.choice(modes_geq(theory, amode))
            pt = random_inhabited_type(rng, theory, pmode, 1, positive_only)
            params.append((gen.fresh("p"), pt))
        params = tuple(params)
        rchan = gen.fresh("r")
        body = gen.term(dict(params), rchan, rtype, fuel - 2)
        procs["helper"] = S.ProcDef("helper", params, rchan, rtype, body)
        gen.aux = ("helper", params, rtype)

    mode = rng.choice(theory.modes)
    main_type = random_inhabited_type(rng, theory, mode, type_depth, positive_only)
    main_chan = gen.fresh("c")
    main_body = gen.term({}, main_chan, main_type, fuel)
    procs["main"] = S.ProcDef("main", (), main_chan, main_type, main_body)
    return S.Program(theory, {}, procs, name_seed=next(counter)), "main"


def generate_checked_program(rng: random.Random, attempts: int = 200,
                             **kwargs) -> tuple[S.Program, str]:
    """Retry random_program until the result passes the typechecker."""
    from . import checker as TC
    for _ in range(attempts):
        try:
            program, main = random_program(rng, **kwargs)
        except Dead:
            continue
        if not TC.check_program(program.theory, program):
            return program, main
    raise Dead(f"no well-typed program generated in {attempts} attempts")


# ---------------------------------------------------------------------------
# Random proofs in the standard sequent system


def _random_small_type(rng: random.Random, theory: ModeTheory, mode: str,
                       depth: int) -> S.SessionType:
    choices = ["atom", "one"]
    if depth > 0:
        choices += ["plus", "with", "tensor", "lolli"]
    match rng.choice(choices):
        case "atom":
            return S.Atom(rng.choice(("p", "q")), mode)
        case "one":
            return S.One(mode)
        case "plus":
            n = rng.randint(1, 2)
            return S.Plus(tuple((LABELS[i], _random_small_type(rng, theory, mode, depth - 1))
                                for i in range(n)), mode)
        case "with":
            n = rng.randint(1, 2)
            return S.With(tuple((LABELS[i], _random_small_type(rng, theory, mode, depth - 1))
                                for i in range(n)), mode)
        case "tensor":
            return S.Tensor(_random_small_type(rng, theory, mode, depth - 1),
                            _random_small_type(rng, theory, mode, depth - 1), mode)
        case "lolli":
            return S.Lolli(_random_small_type(rng, theory, mode, depth - 1),
                           _random_small_type(rng, theory, mode, depth - 1), mode)
    raise AssertionError


def random_shift_free_sequent(rng: random.Random, theory: ModeTheory,
                              mode: str, size: int = 5) -> K.Sequent:
    """A single-mode, shift-free sequent for the conservativity probe."""
    n_ants = rng.randint(0, 2)
    ants = tuple((f"x{i}", _random_small_type(rng, theory, mode, rng.randint(0, 2)))
                 for i in range(n_ants))
    succ = _random_small_type(rng, theory, mode, rng.randint(1, 2))
    return K.Sequent(ants, succ)


def _rename_sequent(seq: K.Sequent, sub: dict[str, str]) -> K.Sequent:
    return K.Sequent(tuple((sub.get(c, c), t) for c, t in seq.antecedents), seq.succ)


def _rename_proof(p: K.Proof, sub: dict[str, str]) -> K.Proof:
    return K.Proof(
        p.rule, _rename_sequent(p.conclusion, sub),
        tuple(_rename_proof(q, sub) for q in p.premises),
        principal=sub.get(p.principal, p.principal) if p.principal else None,
        label=p.label,
        cut_names=tuple(sub.get(c, c) for c in p.cut_names)
        if p.cut_names is not None else None,
    )


def random_proof(rng: random.Random, theory: ModeTheory, steps: int = 8) -> K.Proof:
    """Grow a random checked proof by wrapping leaves in applicable rules."""
    counter = itertools.count()

    def fresh() -> str:
        return f"x{next(counter)}"

    def leaf() -> K.Proof:
        mode = rng.choice(theory.modes)
        if rng.random() < 0.3:
            return K.Proof("oneR", K.Sequent((), S.One(mode)))
        t = _random_small_type(rng, theory, mode, rng.randint(0, 2))
        x = fresh()
        return K.Proof("id", K.Sequent(((x, t),), t))

    def wrap(p: K.Proof) -> K.Proof:
        con = p.conclusion
        ants = con.antecedents
        succ = con.succ
        k = succ.mode
        options: list[str] = ["plusR", "withR_dup", "oneL", "upR", "cut_id"]
        up_modes = [m for m in theory.modes if theory.geq(k, m)]
        if up_modes:
            options.append("downR_wrap")
        if ants:
            options += ["plusL1", "withL1", "cut_id"]
        if len(ants) >= 2:
            options.append("tensorL_pair")
        weak_modes = [m for m in theory.modes
                      if theory.has_weakening(m) and theory.geq(m, k)]
        if weak_modes:
            options.append("weaken")
        pairs = [(i, j) for i in range(len(ants)) for j in range(len(ants))
                 if i < j and ants[i][1] == ants[j][1]
                 and theory.has_contraction(ants[i][1].mode)]
        if pairs:
            options.append("contract")

        match rng.choice(options):
            case "plusR":
                other = _random_small_type(rng, theory, k, 1)
                if rng.random() < 0.5:
                    branches = (("a", succ), ("b", other))
                    label = "a"
                else:
                    branches = (("a", other), ("b", succ))
                    label = "b"
                t = S.Plus(branches, k)
                return K.Proof("plusR", K.Sequent(ants, t), (p,), label=label)
            case "withR_dup":
                t = S.With((("a", succ), ("b", succ)), k)
                return K.Proof("withR", K.Sequent(ants, t), (p, p))
            case "oneL":
                m = rng.choice([mm for mm in theory.modes if theory.geq(mm, k)])
                x = fresh()
                return K.Proof("oneL", K.Sequent(ants + ((x, S.One(m)),), succ),
                               (p,), principal=x)
            case "upR":
                legal = [mm for mm in theory.modes if theory.geq(mm, k)
                         and all(theory.geq(t.mode, mm) for _, t in ants)]
                if not legal:
                    return p
                t = S.Up(k, rng.choice(legal), succ)
                return K.Proof("upR", K.Sequent(ants, t), (p,))
            case "downR_wrap":
                m = rng.choice([mm for mm in theory.modes if theory.geq(k, mm)])
                if not all(theory.geq(t.mode, k) for _, t in ants):
                    return p
                t = S.Down(k, m, succ)
                return K.Proof("downR", K.Sequent(ants, t), (p,))
            case "plusL1":
                i = rng.randrange(len(ants))
                y, yt = ants[i]
                x = fresh()
                t = S.Plus((("a", yt),), yt.mode)
                new_ants = tuple(a for a in ants if a[0] != y) + ((x, t),)
                return K.Proof("plusL", K.Sequent(new_ants, succ), (p,), principal=x)
            case "withL1":
                i = rng.randrange(len(ants))
                y, yt = ants[i]
                other = _random_small_type(rng, theory, yt.mode, 1)
                x = fresh()
                t = S.With((("a", yt), ("b", other)), yt.mode)
                new_ants = tuple(a for a in ants if a[0] != y) + ((x, t),)
                return K.Proof("withL", K.Sequent(new_ants, succ), (p,),
                               principal=x, label="a")
            case "tensorL_pair":
                same = [(i, j) for i in range(len(ants)) for j in range(len(ants))
                        if i != j and ants[i][1].mode == ants[j][1].mode]
                if not same:
                    return p
                i, j = same[rng.randrange(len(same))]
                (y, yt), (z, zt) = ants[i], ants[j]
                x = fresh()
                t = S.Tensor(yt, zt, yt.mode)
                new_ants = tuple(a for a in ants if a[0] not in (y, z)) + ((x, t),)
                return K.Proof("tensorL", K.Sequent(new_ants, succ), (p,), principal=x)
            case "weaken":
                m = rng.choice(weak_modes)
                t = _random_small_type(rng, theory, m, 1)
                x = fresh()
                return K.Proof("weaken", K.Sequent(ants + ((x, t),), succ),
                               (p,), principal=x)
            case "contract":
                i, j = pairs[rng.randrange(len(pairs))]
                (y, yt), (z, _) = ants[i], ants[j]
                x = fresh()
                new_ants = tuple(a for a in ants if a[0] not in (y, z)) + ((x, yt),)
                return K.Proof("contract", K.Sequent(new_ants, succ), (p,), principal=x)
            case "cut_id":
                if not ants:
                    return p
                i = rng.randrange(len(ants))
                y, yt = ants[i]
                x = fresh()
                ident = K.Proof("id", K.Sequent(((x, yt),), yt))
                new_ants = tuple((x, yt) if c == y else (c, t) for c, t in ants)
                return K.Proof("cut", K.Sequent(new_ants, succ), (ident, p),
                               cut_names=(y,))
        raise AssertionError

    proof = leaf()
    for _ in range(steps):
        if rng.random() < 0.25 and len(proof.conclusion.antecedents) < 3:
            # occasionally combine with a second proof through a tensor
            q = leaf()
            taken = set(proof.conclusion.names())
            sub = {}
            for c, _ in q.conclusion.antecedents:
                if c in taken:
                    sub[c] = fresh()
            q = _rename_proof(q, sub)
            if proof.conclusion.mode == q.conclusion.mode:
                t = S.Tensor(proof.conclusion.succ, q.conclusion.succ,
                             proof.conclusion.mode)
                con = K.Sequent(proof.conclusion.antecedents
                                + q.conclusion.antecedents, t)
                names = [c for c, _ in con.antecedents]
                if len(set(names)) == len(names):
                    proof = K.Proof("tensorR", con, (proof, q))
                    continue
        proof = wrap(proof)
    return proof

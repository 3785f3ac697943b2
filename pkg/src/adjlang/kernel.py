"""The logical side: sequent proofs, proof checking, bounded search.

Two proof systems share one node representation.  The *standard* system
has ordinary two-sided rules plus explicit weakening and contraction and
a multicut that removes n >= 0 copies of the cut formula (n constrained
by the multiplicity relation).  The *axiomatic* system is the standard
system with the noninvertible rules collapsed to zero-premise axioms and
the structural rules dropped; it is the erasure of the process typing
rules, so messages are proofs of axioms.

Named type references are treated as atoms here: the logic is about
finite propositions, recursion is a language-level extension.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .modes import ModeTheory
from . import syntax as S
from .syntax import SessionType


@dataclass(frozen=True)
class Sequent:
    antecedents: S.Context
    succ: SessionType

    @property
    def mode(self) -> str:
        return self.succ.mode

    def names(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.antecedents)

    def get(self, name: str) -> SessionType:
        return S.context_lookup(self.antecedents, name)

    def drop(self, *names: str) -> S.Context:
        return tuple((c, t) for c, t in self.antecedents if c not in names)


@dataclass(frozen=True)
class Proof:
    rule: str
    conclusion: Sequent
    premises: tuple["Proof", ...] = ()
    principal: Optional[str] = None
    label: Optional[str] = None
    cut_names: Optional[tuple[str, ...]] = None

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)


class ProofError(Exception):
    def __init__(self, rule: str, message: str):
        self.rule = rule
        self.message = message
        super().__init__(f"{rule}: {message}")


STANDARD_RULES = frozenset({
    "id", "cut", "weaken", "contract",
    "plusR", "plusL", "withR", "withL", "tensorR", "tensorL",
    "oneR", "oneL", "lolliR", "lolliL", "upR", "upL", "downR", "downL",
})
AXIOM_RULES = frozenset({
    "id", "cut",
    "plusR0", "withL0", "tensorR0", "oneR", "lolliL0", "upL0", "downR0",
    "plusL", "withR", "tensorL", "oneL", "lolliR", "upR", "downL",
})


def check_proof(theory: ModeTheory, proof: Proof) -> None:
    """Validate a standard proof; raises ProofError at the first bad node."""
    _check(theory, proof, STANDARD_RULES)


def check_axiom_proof(theory: ModeTheory, proof: Proof) -> None:
    """Validate an axiomatic proof; raises ProofError at the first bad node."""
    _check(theory, proof, AXIOM_RULES)


def proof_checks(theory: ModeTheory, proof: Proof, system: str = "standard") -> bool:
    try:
        _check(theory, proof, STANDARD_RULES if system == "standard" else AXIOM_RULES)
        return True
    except ProofError:
        return False


def _check(theory: ModeTheory, proof: Proof, allowed: frozenset):
    if proof.rule not in allowed:
        raise ProofError(proof.rule, "rule not part of this system")
    _check_node(theory, proof)
    for p in proof.premises:
        _check(theory, p, allowed)


def _ants_dict(seq: Sequent, rule: str) -> dict:
    names = seq.names()
    if len(set(names)) != len(names):
        raise ProofError(rule, "antecedent names must be distinct")
    return dict(seq.antecedents)


def _require(cond: bool, rule: str, message: str):
    if not cond:
        raise ProofError(rule, message)


def _new_names(rule: str, premise: Sequent, kept: Iterable[str], n: int) -> list[str]:
    fresh = [c for c in premise.names() if c not in set(kept)]
    _require(len(fresh) == n, rule, f"premise must introduce exactly {n} antecedent(s)")
    return fresh


def _check_node(theory: ModeTheory, d: Proof):
    rule = d.rule
    con = d.conclusion
    ants = _ants_dict(con, rule)
    succ = con.succ
    k = succ.mode
    for c, t in con.antecedents:
        _require(theory.geq(t.mode, k), rule,
                 f"presupposition fails: {c} at {t.mode} is not >= {k}")

    def premise(i: int) -> Sequent:
        return d.premises[i].conclusion

    def arity(n: int):
        _require(len(d.premises) == n, rule, f"expected {n} premise(s)")

    def same_succ(p: Sequent):
        _require(p.succ == succ, rule, "premise must conclude the same proposition")

    match rule:
        case "id":
            arity(0)
            _require(len(ants) == 1 and next(iter(ants.values())) == succ,
                     rule, "identity needs a single matching antecedent")

        case "cut":
            arity(2)
            _require(d.cut_names is not None, rule, "cut must record its alias names")
            names = d.cut_names
            _require(len(set(names)) == len(names), rule, "cut names must be distinct")
            left, right = premise(0), premise(1)
            a = left.succ
            m = a.mode
            _require(theory.geq(m, k), rule, f"mode condition fails: {m} is not >= {k}")
            _require(theory.multiplicity_ok(len(names), m), rule,
                     f"multiplicity {len(names)} is incompatible with mode {m}")
            rd = _ants_dict(right, rule)
            for x in names:
                _require(rd.get(x) == a, rule,
                         f"{x} must appear in the second premise at the cut formula")
            same_succ(right)
            ld = _ants_dict(left, rule)
            psi2 = {c: t for c, t in rd.items() if c not in set(names)}
            _require(not set(ld) & set(psi2), rule, "premise contexts must be disjoint")
            _require({**ld, **psi2} == ants, rule,
                     "conclusion context must be the two premise contexts")
            # left premise's presupposition already enforces Psi >= m

        case "weaken":
            arity(1)
            x = d.principal
            _require(x in ants, rule, "principal antecedent missing")
            _require(theory.has_weakening(ants[x].mode), rule,
                     f"mode {ants[x].mode} does not admit weakening")
            same_succ(premise(0))
            _require(_ants_dict(premise(0), rule) == {c: t for c, t in ants.items() if c != x},
                     rule, "premise must drop exactly the principal antecedent")

        case "contract":
            arity(1)
            x = d.principal
            _require(x in ants, rule, "principal antecedent missing")
            a = ants[x]
            _require(theory.has_contraction(a.mode), rule,
                     f"mode {a.mode} does not admit contraction")
            same_succ(premise(0))
            pd = _ants_dict(premise(0), rule)
            kept = {c: t for c, t in ants.items() if c != x}
            fresh = _new_names(rule, premise(0), kept, 2)
            _require(all(pd[f] == a for f in fresh), rule,
                     "both copies must carry the contracted proposition")
            _require({c: t for c, t in pd.items() if c not in fresh} == kept,
                     rule, "premise must keep the rest of the context")

        case "plusR":
            arity(1)
            _require(isinstance(succ, S.Plus) and d.label in succ.labels(), rule,
                     "succedent must be an internal choice containing the label")
            _require(_ants_dict(premise(0), rule) == ants, rule, "context must not change")
            _require(premise(0).succ == succ.branch(d.label), rule,
                     "premise must prove the selected branch")

        case "plusL":
            x = d.principal
            _require(x in ants and isinstance(ants[x], S.Plus), rule,
                     "principal antecedent must be an internal choice")
            t = ants[x]
            arity(len(t.branches))
            kept = {c: ty for c, ty in ants.items() if c != x}
            for prem, (_, bt) in zip(d.premises, t.branches):
                same_succ(prem.conclusion)
                pd = _ants_dict(prem.conclusion, rule)
                (y,) = _new_names(rule, prem.conclusion, kept, 1)
                _require(pd[y] == bt, rule, "branch premise at the wrong type")
                _require({c: ty for c, ty in pd.items() if c != y} == kept, rule,
                         "branch premise must keep the rest of the context")

        case "withR":
            _require(isinstance(succ, S.With), rule, "succedent must be an external choice")
            arity(len(succ.branches))
            for prem, (_, bt) in zip(d.premises, succ.branches):
                _require(_ants_dict(prem.conclusion, rule) == ants, rule,
                         "context must not change")
                _require(prem.conclusion.succ == bt, rule,
                         "branch premise must prove its component")

        case "withL":
            arity(1)
            x = d.principal
            _require(x in ants and isinstance(ants[x], S.With), rule,
                     "principal antecedent must be an external choice")
            t = ants[x]
            _require(d.label in t.labels(), rule, "label not offered")
            same_succ(premise(0))
            kept = {c: ty for c, ty in ants.items() if c != x}
            pd = _ants_dict(premise(0), rule)
            (y,) = _new_names(rule, premise(0), kept, 1)
            _require(pd[y] == t.branch(d.label), rule, "premise at the wrong branch type")
            _require({c: ty for c, ty in pd.items() if c != y} == kept, rule,
                     "premise must keep the rest of the context")

        case "tensorR":
            arity(2)
            _require(isinstance(succ, S.Tensor), rule, "succedent must be a tensor")
            l, r = premise(0), premise(1)
            _require(l.succ == succ.left and r.succ == succ.right, rule,
                     "premises must prove the components")
            ld, rd = _ants_dict(l, rule), _ants_dict(r, rule)
            _require(not set(ld) & set(rd), rule, "premise contexts must be disjoint")
            _require({**ld, **rd} == ants, rule, "premises must split the context")

        case "tensorL":
            arity(1)
            x = d.principal
            _require(x in ants and isinstance(ants[x], S.Tensor), rule,
                     "principal antecedent must be a tensor")
            t = ants[x]
            same_succ(premise(0))
            kept = {c: ty for c, ty in ants.items() if c != x}
            pd = _ants_dict(premise(0), rule)
            fresh = _new_names(rule, premise(0), kept, 2)
            have = sorted((pd[f] for f in fresh), key=repr)
            want = sorted((t.left, t.right), key=repr)
            _require(have == want, rule, "premise must add both components")
            _require({c: ty for c, ty in pd.items() if c not in fresh} == kept, rule,
                     "premise must keep the rest of the context")

        case "oneR":
            arity(0)
            _require(isinstance(succ, S.One) and not ants, rule,
                     "unit needs an empty context")

        case "oneL":
            arity(1)
            x = d.principal
            _require(x in ants and isinstance(ants[x], S.One), rule,
                     "principal antecedent must be a unit")
            same_succ(premise(0))
            _require(_ants_dict(premise(0), rule) == {c: t for c, t in ants.items() if c != x},
                     rule, "premise must drop exactly the unit")

        case "lolliR":
            arity(1)
            _require(isinstance(succ, S.Lolli), rule, "succedent must be a function")
            pd = _ants_dict(premise(0), rule)
            (x,) = _new_names(rule, premise(0), ants, 1)
            _require(pd[x] == succ.left, rule, "premise must assume the argument")
            _require({c: t for c, t in pd.items() if c != x} == ants, rule,
                     "premise must keep the context")
            _require(premise(0).succ == succ.right, rule, "premise must prove the result")

        case "lolliL":
            arity(2)
            x = d.principal
            _require(x in ants and isinstance(ants[x], S.Lolli), rule,
                     "principal antecedent must be a function")
            t = ants[x]
            m = t.mode
            arg, cont = premise(0), premise(1)
            _require(arg.succ == t.left, rule, "first premise must prove the argument")
            ad = _ants_dict(arg, rule)
            for c, ty in ad.items():
                _require(theory.geq(ty.mode, m), rule,
                         f"argument context entry {c} is not >= {m}")
            same_succ(cont)
            cd = _ants_dict(cont, rule)
            kept = {c: ty for c, ty in ants.items() if c != x and c not in ad}
            (y,) = _new_names(rule, cont, kept, 1)
            _require(cd[y] == t.right, rule, "second premise must assume the result")
            _require({c: ty for c, ty in cd.items() if c != y} == kept, rule,
                     "second premise must keep the remaining context")
            _require(set(ad) <= set(ants) and all(ants[c] == ad[c] for c in ad), rule,
                     "argument context must come from the conclusion")
            _require(x not in ad, rule, "principal may not feed its own argument")

        case "upR":
            arity(1)
            _require(isinstance(succ, S.Up), rule, "succedent must be an up-shift")
            _require(theory.geq(succ.mode, succ.low), rule, "malformed shift")
            _require(_ants_dict(premise(0), rule) == ants, rule, "context must not change")
            _require(premise(0).succ == succ.body, rule, "premise must prove the body")

        case "upL":
            arity(1)
            x = d.principal
            _require(x in ants and isinstance(ants[x], S.Up), rule,
                     "principal antecedent must be an up-shift")
            t = ants[x]
            _require(theory.geq(t.low, k), rule,
                     f"shift body mode {t.low} is not >= {k}")
            same_succ(premise(0))
            kept = {c: ty for c, ty in ants.items() if c != x}
            pd = _ants_dict(premise(0), rule)
            (y,) = _new_names(rule, premise(0), kept, 1)
            _require(pd[y] == t.body, rule, "premise must assume the body")
            _require({c: ty for c, ty in pd.items() if c != y} == kept, rule,
                     "premise must keep the rest of the context")

        case "downR":
            arity(1)
            _require(isinstance(succ, S.Down), rule, "succedent must be a down-shift")
            _require(theory.geq(succ.high, succ.mode), rule, "malformed shift")
            for c, t in con.antecedents:
                _require(theory.geq(t.mode, succ.high), rule,
                         f"context entry {c} is not >= {succ.high}")
            _require(_ants_dict(premise(0), rule) == ants, rule, "context must not change")
            _require(premise(0).succ == succ.body, rule, "premise must prove the body")

        case "downL":
            arity(1)
            x = d.principal
            _require(x in ants and isinstance(ants[x], S.Down), rule,
                     "principal antecedent must be a down-shift")
            t = ants[x]
            same_succ(premise(0))
            kept = {c: ty for c, ty in ants.items() if c != x}
            pd = _ants_dict(premise(0), rule)
            (y,) = _new_names(rule, premise(0), kept, 1)
            _require(pd[y] == t.body, rule, "premise must assume the body")
            _require({c: ty for c, ty in pd.items() if c != y} == kept, rule,
                     "premise must keep the rest of the context")

        # -- axiomatic rules

        case "plusR0":
            arity(0)
            _require(isinstance(succ, S.Plus) and d.label in succ.labels(), rule,
                     "succedent must be an internal choice containing the label")
            _require(len(ants) == 1
                     and next(iter(ants.values())) == succ.branch(d.label),
                     rule, "context must be exactly the selected branch")

        case "withL0":
            arity(0)
            _require(len(ants) == 1, rule, "context must be a single antecedent")
            t = next(iter(ants.values()))
            _require(isinstance(t, S.With) and d.label in t.labels(), rule,
                     "antecedent must be an external choice containing the label")
            _require(succ == t.branch(d.label), rule, "succedent must be the branch")

        case "tensorR0":
            arity(0)
            _require(isinstance(succ, S.Tensor) and len(ants) == 2, rule,
                     "context must be the two components")
            have = sorted(ants.values(), key=repr)
            want = sorted((succ.left, succ.right), key=repr)
            _require(have == want, rule, "context must be the two components")

        case "lolliL0":
            arity(0)
            _require(len(ants) == 2, rule, "context must be argument and function")
            fun = [t for t in ants.values()
                   if isinstance(t, S.Lolli) and t.right == succ]
            _require(len(fun) >= 1, rule, "context must contain a matching function")
            ok = any(sorted(ants.values(), key=repr)
                     == sorted((f.left, f), key=repr) for f in fun)
            _require(ok, rule, "context must be exactly the argument and the function")

        case "upL0":
            arity(0)
            _require(len(ants) == 1, rule, "context must be a single antecedent")
            t = next(iter(ants.values()))
            _require(isinstance(t, S.Up) and t.body == succ, rule,
                     "antecedent must be an up-shift of the succedent")
            _require(theory.geq(t.mode, t.low), rule, "malformed shift")

        case "downR0":
            arity(0)
            _require(isinstance(succ, S.Down), rule, "succedent must be a down-shift")
            _require(theory.geq(succ.high, succ.mode), rule, "malformed shift")
            _require(len(ants) == 1 and next(iter(ants.values())) == succ.body,
                     rule, "context must be exactly the body")

        case other:
            raise ProofError(other, "unknown rule")


# ---------------------------------------------------------------------------
# Bounded cut-free proof search


def _type_key(t: SessionType) -> str:
    return repr(t)


def canonical_sequent(seq: Sequent) -> tuple:
    """Identify sequents up to renaming of antecedent labels."""
    return (tuple(sorted(_type_key(t) for _, t in seq.antecedents)),
            _type_key(seq.succ))


def prove_cutfree(theory: ModeTheory, sequent: Sequent,
                  depth: int = 6) -> Optional[Proof]:
    """Complete backward search over the cut-free standard rules.

    Weakening and contraction are searched too; a branch is pruned when a
    sequent repeats (up to antecedent renaming) along it.  Returns a
    checkable proof, or None when the space within `depth` is exhausted.
    The root sequent must satisfy the declaration of independence (the
    rules preserve it, so every premise then satisfies it too).
    """
    for c, t in sequent.antecedents:
        if not theory.geq(t.mode, sequent.mode):
            raise ValueError(
                f"sequent violates the declaration of independence at {c}")
    counter = itertools.count()

    def fresh() -> str:
        return f"v${next(counter)}"

    def attempts(seq: Sequent):
        ants = seq.antecedents
        succ = seq.succ
        k = succ.mode
        ad = dict(ants)

        if len(ants) == 1 and ants[0][1] == succ:
            yield Proof("id", seq), ()

        # right rules
        match succ:
            case S.One():
                if not ants:
                    yield Proof("oneR", seq), ()
            case S.Plus(branches, _):
                for label, bt in branches:
                    yield (Proof("plusR", seq, label=label),
                           (Sequent(ants, bt),))
            case S.With(branches, _):
                yield (Proof("withR", seq),
                       tuple(Sequent(ants, bt) for _, bt in branches))
            case S.Tensor(left, right, _):
                idx = list(range(len(ants)))
                for r in range(len(ants) + 1):
                    for pick in itertools.combinations(idx, r):
                        l_ants = tuple(ants[i] for i in pick)
                        r_ants = tuple(ants[i] for i in idx if i not in pick)
                        yield (Proof("tensorR", seq),
                               (Sequent(l_ants, left), Sequent(r_ants, right)))
            case S.Lolli(left, right, _):
                x = fresh()
                yield (Proof("lolliR", seq),
                       (Sequent(((x, left),) + ants, right),))
            case S.Up(_, _, body):
                yield Proof("upR", seq), (Sequent(ants, body),)
            case S.Down(high, _, body):
                if all(theory.geq(t.mode, high) for _, t in ants):
                    yield Proof("downR", seq), (Sequent(ants, body),)

        # left rules
        for x, t in ants:
            rest = tuple(e for e in ants if e[0] != x)
            match t:
                case S.Plus(branches, _):
                    prems = []
                    for _, bt in branches:
                        prems.append(Sequent(rest + ((fresh(), bt),), succ))
                    yield Proof("plusL", seq, principal=x), tuple(prems)
                case S.With(branches, _):
                    for label, bt in branches:
                        yield (Proof("withL", seq, principal=x, label=label),
                               (Sequent(rest + ((fresh(), bt),), succ),))
                case S.Tensor(left, right, _):
                    yield (Proof("tensorL", seq, principal=x),
                           (Sequent(rest + ((fresh(), left), (fresh(), right)), succ),))
                case S.One():
                    yield Proof("oneL", seq, principal=x), (Sequent(rest, succ),)
                case S.Lolli(left, right, m):
                    idx = list(range(len(rest)))
                    for r in range(len(rest) + 1):
                        for pick in itertools.combinations(idx, r):
                            arg = tuple(rest[i] for i in pick)
                            if not all(theory.geq(ty.mode, t.mode) for _, ty in arg):
                                continue
                            keep = tuple(rest[i] for i in idx if i not in pick)
                            yield (Proof("lolliL", seq, principal=x),
                                   (Sequent(arg, left),
                                    Sequent(keep + ((fresh(), right),), succ)))
                case S.Up(low, _, body):
                    if theory.geq(low, k):
                        yield (Proof("upL", seq, principal=x),
                               (Sequent(rest + ((fresh(), body),), succ),))
                case S.Down(_, _, body):
                    yield (Proof("downL", seq, principal=x),
                           (Sequent(rest + ((fresh(), body),), succ),))

        # structural rules last: they never expose a connective themselves
        for x, t in ants:
            if theory.has_weakening(t.mode):
                yield (Proof("weaken", seq, principal=x),
                       (Sequent(tuple(e for e in ants if e[0] != x), succ),))
        for x, t in ants:
            if theory.has_contraction(t.mode):
                rest = tuple(e for e in ants if e[0] != x)
                yield (Proof("contract", seq, principal=x),
                       (Sequent(rest + ((fresh(), t), (fresh(), t)), succ),))

    def search(seq: Sequent, depth: int, path: frozenset) -> Optional[Proof]:
        if depth <= 0:
            return None
        key = canonical_sequent(seq)
        if key in path:
            return None
        path = path | {key}
        for node, premises in attempts(seq):
            sub = []
            for p in premises:
                r = search(p, depth - 1, path)
                if r is None:
                    break
                sub.append(r)
            else:
                return Proof(node.rule, node.conclusion, tuple(sub),
                             principal=node.principal, label=node.label)
        return None

    return search(sequent, depth, frozenset())


def conservativity_probe(theory: ModeTheory, sequent: Sequent,
                         depth: int = 6) -> tuple[bool, bool]:
    """Compare provability under the full theory and under the sequent's
    single mode alone.  The sequent must be shift-free and single-mode."""
    modes = {t.mode for _, t in sequent.antecedents} | {sequent.mode}
    if len(modes) != 1:
        raise ValueError("sequent mentions more than one mode")
    (m,) = modes

    def shift_free(t: SessionType) -> bool:
        match t:
            case S.Up() | S.Down():
                return False
            case S.Plus(branches, _) | S.With(branches, _):
                return all(shift_free(b) for _, b in branches)
            case S.Tensor(a, b, _) | S.Lolli(a, b, _):
                return shift_free(a) and shift_free(b)
            case _:
                return True

    for _, t in sequent.antecedents:
        if not shift_free(t):
            raise ValueError("sequent must not mention shifts")
    if not shift_free(sequent.succ):
        raise ValueError("sequent must not mention shifts")

    from .modes import make_theory
    single = make_theory([(m, theory.props(m))])
    full_proof = prove_cutfree(theory, sequent, depth)
    single_proof = prove_cutfree(single, sequent, depth)
    return full_proof is not None, single_proof is not None


# ---------------------------------------------------------------------------
# Identity expansion


def _proof_names(proof: Proof, out: set[str]):
    for c, _ in proof.conclusion.antecedents:
        out.add(c)
    if proof.cut_names:
        out.update(proof.cut_names)
    for p in proof.premises:
        _proof_names(p, out)


def _fresh_factory(proof: Proof, prefix: str):
    """Fresh antecedent names guaranteed not to collide with the proof's."""
    taken: set[str] = set()
    _proof_names(proof, taken)
    counter = itertools.count()

    def fresh() -> str:
        while True:
            name = f"{prefix}${next(counter)}"
            if name not in taken:
                taken.add(name)
                return name

    return fresh


def identity_expand(theory: ModeTheory, proof: Proof) -> Proof:
    """Rewrite a proof so identity is used only at atomic propositions.

    The conclusion is unchanged, and a cut-free input yields a cut-free
    output: each non-atomic identity is expanded by one connective layer
    and the construction recurses on the smaller identities."""
    fresh = _fresh_factory(proof, "e")

    def expand_id(x: str, t: SessionType) -> Proof:
        seq = Sequent(((x, t),), t)
        match t:
            case S.Atom() | S.TypeRef():
                return Proof("id", seq)
            case S.One():
                return Proof("oneL", seq, (Proof("oneR", Sequent((), t)),), principal=x)
            case S.Plus(branches, _):
                prems = []
                for label, bt in branches:
                    y = fresh()
                    inner = Proof("plusR", Sequent(((y, bt),), t),
                                  (expand_id(y, bt),), label=label)
                    prems.append(inner)
                return Proof("plusL", seq, tuple(prems), principal=x)
            case S.With(branches, _):
                prems = []
                for label, bt in branches:
                    y = fresh()
                    inner = Proof("withL", Sequent(((x, t),), bt),
                                  (expand_id(y, bt),), principal=x, label=label)
                    prems.append(inner)
                return Proof("withR", seq, tuple(prems))
            case S.Tensor(left, right, _):
                y, z = fresh(), fresh()
                pair = Proof("tensorR", Sequent(((y, left), (z, right)), t),
                             (expand_id(y, left), expand_id(z, right)))
                return Proof("tensorL", seq, (pair,), principal=x)
            case S.Lolli(left, right, _):
                w, y = fresh(), fresh()
                app = Proof("lolliL", Sequent(((w, left), (x, t)), right),
                            (expand_id(w, left), expand_id(y, right)), principal=x)
                return Proof("lolliR", seq, (app,))
            case S.Up(_, _, body):
                y = fresh()
                inner = Proof("upL", Sequent(((x, t),), body),
                              (expand_id(y, body),), principal=x)
                return Proof("upR", seq, (inner,))
            case S.Down(_, _, body):
                y = fresh()
                inner = Proof("downR", Sequent(((y, body),), t),
                              (expand_id(y, body),))
                return Proof("downL", seq, (inner,), principal=x)
        raise TypeError(f"not a session type: {t!r}")

    def go(d: Proof) -> Proof:
        if d.rule == "id":
            ((x, t),) = d.conclusion.antecedents
            return expand_id(x, t)
        return Proof(d.rule, d.conclusion, tuple(go(p) for p in d.premises),
                     principal=d.principal, label=d.label, cut_names=d.cut_names)

    return go(proof)


# ---------------------------------------------------------------------------
# Translations between the axiomatic and the standard system


def axioms_to_standard(proof: Proof) -> Proof:
    """Replace each zero-premise noninvertible axiom by the standard rule
    applied to an identity.  The conclusion sequent is unchanged."""
    fresh = _fresh_factory(proof, "t")

    def go(d: Proof) -> Proof:
        con = d.conclusion
        ants = dict(con.antecedents)
        succ = con.succ
        match d.rule:
            case "plusR0":
                ((a, at),) = con.antecedents
                return Proof("plusR", con, (Proof("id", Sequent(((a, at),), at)),),
                             label=d.label)
            case "withL0":
                ((a, at),) = con.antecedents
                bt = at.branch(d.label)
                y = fresh()
                return Proof("withL", con, (Proof("id", Sequent(((y, bt),), bt)),),
                             principal=a, label=d.label)
            case "tensorR0":
                (n1, t1), (n2, t2) = con.antecedents
                if t1 == succ.left and t2 == succ.right:
                    a, b = (n1, t1), (n2, t2)
                else:
                    a, b = (n2, t2), (n1, t1)
                return Proof("tensorR", con, (
                    Proof("id", Sequent((a,), succ.left)),
                    Proof("id", Sequent((b,), succ.right)),
                ))
            case "lolliL0":
                items = list(con.antecedents)
                fi = next(i for i, (_, t) in enumerate(items)
                          if isinstance(t, S.Lolli) and t.right == succ
                          and items[1 - i][1] == t.left)
                fname, ftype = items[fi]
                arg = items[1 - fi]
                y = fresh()
                return Proof("lolliL", con, (
                    Proof("id", Sequent((arg,), ftype.left)),
                    Proof("id", Sequent(((y, ftype.right),), ftype.right)),
                ), principal=fname)
            case "upL0":
                ((a, at),) = con.antecedents
                y = fresh()
                return Proof("upL", con,
                             (Proof("id", Sequent(((y, at.body),), at.body)),),
                             principal=a)
            case "downR0":
                ((a, at),) = con.antecedents
                return Proof("downR", con, (Proof("id", Sequent(((a, at),), at)),))
            case _:
                return Proof(d.rule, con, tuple(go(p) for p in d.premises),
                             principal=d.principal, label=d.label,
                             cut_names=d.cut_names)

    return go(proof)


def standard_to_axioms(proof: Proof) -> Proof:
    """Replace each noninvertible rule by a cut against its axiom and the
    structural rules by multicuts with identity."""
    fresh = _fresh_factory(proof, "s")

    def go(d: Proof) -> Proof:
        con = d.conclusion
        succ = con.succ
        match d.rule:
            case "plusR":
                x = fresh()
                bt = succ.branch(d.label)
                axiom = Proof("plusR0", Sequent(((x, bt),), succ), label=d.label)
                return Proof("cut", con, (go(d.premises[0]), axiom), cut_names=(x,))
            case "withL":
                p = d.principal
                t = dict(con.antecedents)[p]
                prem = d.premises[0]
                kept = {c for c, _ in con.antecedents if c != p}
                (y,) = [c for c, _ in prem.conclusion.antecedents if c not in kept]
                axiom = Proof("withL0", Sequent(((p, t),), t.branch(d.label)),
                              label=d.label)
                return Proof("cut", con, (axiom, go(prem)), cut_names=(y,))
            case "tensorR":
                a, b = fresh(), fresh()
                dl, dr = d.premises
                axiom = Proof("tensorR0",
                              Sequent(((a, succ.left), (b, succ.right)), succ))
                inner_con = Sequent(dr.conclusion.antecedents + ((a, succ.left),), succ)
                inner = Proof("cut", inner_con, (go(dr), axiom), cut_names=(b,))
                return Proof("cut", con, (go(dl), inner), cut_names=(a,))
            case "lolliL":
                p = d.principal
                t = dict(con.antecedents)[p]
                darg, dcont = d.premises
                a = fresh()
                axiom = Proof("lolliL0", Sequent(((a, t.left), (p, t)), t.right))
                inner_con = Sequent(darg.conclusion.antecedents + ((p, t),), t.right)
                inner = Proof("cut", inner_con, (go(darg), axiom), cut_names=(a,))
                kept = {c for c, _ in con.antecedents if c != p} \
                    - {c for c, _ in darg.conclusion.antecedents}
                (y,) = [c for c, _ in dcont.conclusion.antecedents
                        if c not in kept and c != p]
                return Proof("cut", con, (inner, go(dcont)), cut_names=(y,))
            case "upL":
                p = d.principal
                t = dict(con.antecedents)[p]
                prem = d.premises[0]
                kept = {c for c, _ in con.antecedents if c != p}
                (y,) = [c for c, _ in prem.conclusion.antecedents if c not in kept]
                axiom = Proof("upL0", Sequent(((p, t),), t.body))
                return Proof("cut", con, (axiom, go(prem)), cut_names=(y,))
            case "downR":
                a = fresh()
                axiom = Proof("downR0", Sequent(((a, succ.body),), succ))
                return Proof("cut", con, (go(d.premises[0]), axiom), cut_names=(a,))
            case "weaken":
                p = d.principal
                t = dict(con.antecedents)[p]
                ident = Proof("id", Sequent(((p, t),), t))
                return Proof("cut", con, (ident, go(d.premises[0])), cut_names=())
            case "contract":
                p = d.principal
                t = dict(con.antecedents)[p]
                prem = d.premises[0]
                kept = {c for c, _ in con.antecedents if c != p}
                ys = tuple(c for c, _ in prem.conclusion.antecedents if c not in kept)
                ident = Proof("id", Sequent(((p, t),), t))
                return Proof("cut", con, (ident, go(prem)), cut_names=ys)
            case _:
                return Proof(d.rule, con, tuple(go(p) for p in d.premises),
                             principal=d.principal, label=d.label,
                             cut_names=d.cut_names)

    return go(proof)


# ---------------------------------------------------------------------------
# Erasure of typing derivations


_ERASE_RULES = {
    "id": "id", "cut": "cut",
    "plusR0": "plusR0", "plusL": "plusL", "withR": "withR", "withL0": "withL0",
    "tensorR0": "tensorR0", "tensorL": "tensorL", "oneR": "oneR", "oneL": "oneL",
    "lolliR": "lolliR", "lolliL0": "lolliL0",
    "upR": "upR", "upL0": "upL0", "downR0": "downR0", "downL": "downL",
}


def erase_derivation(derivation) -> Proof:
    """Drop the process terms from a typing derivation, leaving an
    axiomatic proof of the same sequent.  Defined-process calls have no
    logical counterpart and must be inlined away first."""
    rule = derivation.rule
    if rule == "call":
        raise ValueError("call nodes have no logical erasure")
    if rule not in _ERASE_RULES:
        raise ValueError(f"unknown derivation rule: {rule}")
    goal = derivation.goal
    seq = Sequent(goal.context, goal.offered)
    term = goal.subject
    principal = None
    label = None
    match term:
        case S.SendLabel(subject, lab, _):
            label = lab
            if rule == "withL0":
                principal = subject
        case S.CaseLabel(subject, _) | S.CasePair(subject, _, _, _) \
                | S.CaseUnit(subject, _) | S.CaseShift(subject, _, _):
            if rule in ("plusL", "tensorL", "oneL", "downL"):
                principal = subject
        case S.SendPair(subject, _, _):
            if rule == "lolliL0":
                principal = subject
        case S.SendShift(subject, _):
            if rule == "upL0":
                principal = subject
    return Proof(
        _ERASE_RULES[rule], seq,
        tuple(erase_derivation(p) for p in derivation.premises),
        principal=principal, label=label,
        cut_names=derivation.cut_names,
    )


# ---------------------------------------------------------------------------
# Rendering


def print_proof(proof: Proof, indent: int = 0) -> str:
    from .frontend import print_type
    seq = proof.conclusion
    ants = ", ".join(f"{c} : {print_type(t)}" for c, t in seq.antecedents)
    line = "  " * indent + f"{proof.rule}"
    if proof.label:
        line += f"[{proof.label}]"
    if proof.cut_names is not None:
        line += "{" + ", ".join(proof.cut_names) + "}"
    line += f"  {ants or '.'} |- {print_type(seq.succ)}"
    out = [line]
    for p in proof.premises:
        out.append(print_proof(p, indent + 1))
    return "\n".join(out)

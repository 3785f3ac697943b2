import itertools

import pytest

from adjlang import syntax as S
from adjlang.modes import make_theory
from conftest import parse


def bits_program(mode="U"):
    return parse(f"""
mode U with W, C;
mode L;
order U > L;
type bits[{mode}] = +{{ b0 : bits, b1 : bits }};
""")


def test_wellformed_recursive_choice():
    for mode in ("U", "L"):
        prog = bits_program(mode)
        td = prog.types["bits"]
        assert S.type_wellformed(prog.theory, prog, td.body) == []


def test_shift_direction_checked():
    th = make_theory([("U", "WC"), ("L", "")], [("U", "L")])
    prog = S.Program(th, {}, {})
    good = S.Up("L", "U", S.Atom("A", "L"))
    assert S.type_wellformed(th, prog, good) == []
    bad = S.Up("U", "L", S.Atom("A", "U"))
    diags = S.type_wellformed(th, prog, bad)
    assert diags and "requires" in diags[0].message


def test_empty_label_set_rejected():
    th = make_theory([("m", "")])
    prog = S.Program(th, {}, {})
    diags = S.type_wellformed(th, prog, S.Plus((), "m"))
    assert any("empty label set" in d.message for d in diags)


def test_same_mode_combination_enforced():
    th = make_theory([("U", "WC"), ("L", "")], [("U", "L")])
    prog = S.Program(th, {}, {})
    mixed = S.Tensor(S.Atom("A", "U"), S.Atom("B", "L"), "U")
    diags = S.type_wellformed(th, prog, mixed)
    assert any("combines" in d.message for d in diags)


def test_unbound_type_name():
    th = make_theory([("m", "")])
    prog = S.Program(th, {}, {})
    diags = S.type_wellformed(th, prog, S.TypeRef("nope", "m"))
    assert any("unbound" in d.message for d in diags)


def test_unfold():
    prog = bits_program()
    ref = S.TypeRef("bits", "U")
    body = S.unfold(prog, ref)
    assert isinstance(body, S.Plus)
    assert body.labels() == ("b0", "b1")
    # unfolding is by definition idempotent in what it returns
    assert S.unfold(prog, ref) == body
    with pytest.raises(KeyError):
        S.unfold(prog, S.TypeRef("missing", "U"))


def test_wellformedness_stable_under_unfold():
    prog = bits_program()
    ref = S.TypeRef("bits", "U")
    a = S.type_wellformed(prog.theory, prog, ref)
    b = S.type_wellformed(prog.theory, prog, S.unfold(prog, ref))
    assert a == b == []


def test_non_contractive_definition_rejected():
    prog = parse("""
mode m;
type a[m] = b;
type b[m] = a;
""")
    diags = S.program_wellformed(prog)
    assert any("non-contractive" in d.message for d in diags)


def test_purely_positive():
    prog = bits_program()
    th = prog.theory
    bool_t = S.Plus((("false", S.One("U")), ("true", S.One("U"))), "U")
    assert S.purely_positive(prog, bool_t)
    assert not S.purely_positive(prog, S.Lolli(S.One("U"), S.One("U"), "U"))
    # recursive reference: visited names are accepted on revisit
    assert S.purely_positive(prog, S.TypeRef("bits", "U"))
    assert S.purely_positive(prog, S.Down("U", "L", S.One("U")))
    assert not S.purely_positive(prog, S.Up("L", "U", S.One("L")))
    assert not S.purely_positive(prog, S.Atom("p", "U"))


def test_free_channels_of_messages():
    assert S.free_channels(S.SendPair("z", "x1", "y")) == {"z", "x1", "y"}


def test_free_channels_of_case_pair():
    term = S.CasePair("x", "y", "x1", S.SendPair("z", "x1", "y"))
    assert S.free_channels(term) == {"x", "z"}


def test_free_channels_of_spawn():
    body = S.Fwd("a", "z")
    cont = S.SendPair("c", "s", "t")
    term = S.Spawn(("s",), "a", None, body, cont)
    assert S.free_channels(term) == {"z", "c", "t"}


def test_rename_apart_keeps_free_names():
    counter = itertools.count()
    term = S.CasePair("x", "y", "x1", S.SendPair("z", "x1", "y"))
    renamed = S.rename_apart(term, lambda b: f"{b}${next(counter)}")
    assert S.free_channels(renamed) == {"x", "z"}
    assert S.alpha_equal(term, renamed)
    assert not S.bound_channels(renamed) & S.free_channels(renamed)


def test_rename_channels_respects_binders():
    term = S.CasePair("x", "y", "x1", S.SendPair("z", "x1", "y"))
    out = S.rename_channels(term, {"x": "w", "y": "ignored"})
    assert out.subject == "w"
    assert out.body == S.SendPair("z", "x1", "y")


def test_alpha_equal_distinguishes_structure():
    a = S.SendLabel("c", "l", "d")
    b = S.SendLabel("c", "k", "d")
    assert not S.alpha_equal(a, b)
    assert S.alpha_equal(a, S.SendLabel("c", "l", "d"))


def test_signature_independence_checked():
    prog = parse("""
mode U with W, C;
mode L;
order U > L;
proc bad (x : A[L]) |- (z : B[U]) = z <- x;
""")
    diags = S.program_wellformed(prog)
    assert any("independence" in d.message for d in diags)

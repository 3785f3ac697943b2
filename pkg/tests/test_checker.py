import pytest

from adjlang import checker as C
from adjlang import syntax as S
from adjlang.modes import make_theory
from conftest import parse

THEORY3 = """
mode U with W, C;
mode M with W;
mode L;
order U > M;
order M > L;
"""


def check_src(src):
    prog = parse(src)
    return prog, C.check_program(prog.theory, prog)


def assert_ok(src):
    prog, diags = check_src(src)
    assert diags == [], [d.message for d in diags]
    return prog


def assert_fails(src, fragment=""):
    prog, diags = check_src(src)
    assert diags, "expected a typing error"
    if fragment:
        assert any(fragment in d.message for d in diags), [d.message for d in diags]
    return diags


# -- worked examples


@pytest.mark.parametrize("mode", ["U", "M", "L"])
def test_tensor_commutativity_at_every_mode(mode):
    assert_ok(THEORY3 + f"""
proc swap (x : A[{mode}] * B[{mode}]) |- (z : B[{mode}] * A[{mode}]) =
  case x {{ <y, x1> => z.<x1, y> }};
""")


def with_to_tensor_src(props):
    return f"""
mode m{props};
proc w2t (p : A[m] & B[m]) |- (z : A[m] * B[m]) =
  {{p1, p2}} <- (nu q) (q <- p) ;
  {{x}} <- (nu a : A[m]) p1.pi1(a) ;
  {{y}} <- (nu b : B[m]) p2.pi2(b) ;
  z.<x, y>;
"""


@pytest.mark.parametrize("props,ok", [
    (" with W, C", True), (" with C", True), (" with W", False), ("", False),
])
def test_with_to_tensor_needs_contraction(props, ok):
    src = with_to_tensor_src(props)
    if ok:
        assert_ok(src)
    else:
        assert_fails(src, "multiplicity")


def tensor_to_with_src(props):
    return f"""
mode m{props};
proc t2w (x : A[m] * B[m]) |- (p : A[m] & B[m]) =
  case p {{ pi1(p1) => case x {{ <y, z> => {{}} <- (nu a) (a <- z) ; p1 <- y }}
          | pi2(p2) => case x {{ <y, z> => {{}} <- (nu a) (a <- y) ; p2 <- z }} }};
"""


@pytest.mark.parametrize("props,ok", [
    (" with W, C", True), (" with W", True), (" with C", False), ("", False),
])
def test_tensor_to_with_needs_weakening(props, ok):
    src = tensor_to_with_src(props)
    if ok:
        assert_ok(src)
    else:
        assert_fails(src, "multiplicity")


def test_corpus_programs_check(corpus_programs):
    for name, prog in corpus_programs.items():
        diags = C.check_program(prog.theory, prog)
        assert diags == [], (name, [d.message for d in diags])


def test_map_without_cancellation_fails(corpus_dir):
    text = (corpus_dir / "map.adj").read_text()
    target = "{} <- (nu a) (a <- f) ;                        % cancel the service"
    assert target.lower() in text.lower()
    lines = [l for l in text.splitlines() if "cancel the service" not in l]
    prog = parse("\n".join(lines))
    diags = C.check_program(prog.theory, prog)
    assert any("unused channel" in d.message for d in diags), \
        [d.message for d in diags]


# -- rule-level negative cases


def test_fwd_requires_equal_types():
    assert_fails("""
mode m;
proc p (a : A[m]) |- (c : B[m]) = c <- a;
""", "forwarded channel")


def test_label_send_on_tensor_rejected():
    assert_fails("""
mode m;
proc p (a : A[m]) |- (c : A[m] * A[m]) = c.l(a);
""", "internal choice")


def test_label_not_in_choice():
    assert_fails("""
mode m;
proc p (a : 1[m]) |- (c : +{ go : 1[m] }) = c.stop(a);
""", "not offered")


def test_leftover_channel_at_axiom():
    assert_fails("""
mode m;
proc p (a : 1[m], b : 1[m]) |- (c : 1[m] * 1[m] ) = c.<a, a>;
""")


def test_unused_channel_reported():
    assert_fails("""
mode m;
proc p (a : 1[m]) |- (c : 1[m]) = c.<>;
""", "unused channel")


def test_missing_case_branch():
    assert_fails("""
mode m;
proc p (a : +{ x : 1[m], y : 1[m] }) |- (c : 1[m]) =
  case a { x(a1) => case a1 { <> => c.<> } };
""", "missing branch")


def test_channel_in_both_sides_of_cut():
    assert_fails("""
mode m;
proc p (a : 1[m]) |- (c : 1[m] * 1[m]) =
  {s} <- (nu w : 1[m]) (case a { <> => w.<> }) ; c.<a, s>;
""", "both")


def test_spawn_needs_annotation():
    assert_fails("""
mode m;
proc p () |- (c : 1[m]) =
  {s} <- (nu w) w.<> ; case s { <> => c.<> };
""", "annotation")


def test_annotation_not_needed_for_call_and_fwd():
    assert_ok("""
mode m;
proc mk () |- (c : 1[m]) = c.<>;
proc p () |- (c : 1[m]) =
  {s} <- (nu w) (w <- mk <-) ;
  {t} <- (nu v) (v <- s) ;
  case t { <> => c.<> };
""")


def test_independence_violation_at_spawn():
    assert_fails(THEORY3 + """
proc p (x : A[L]) |- (c : up[M] 1[L]) =
  case c { shift(c1) =>
    {s} <- (nu w : 1[M]) w.<> ;
    {} <- (nu v) (v <- s) ;
    c1 <- x };
""")


def test_mode_condition_at_spawn():
    # the cut formula's mode must dominate the offered mode
    assert_fails(THEORY3 + """
proc p () |- (c : 1[M]) =
  {s} <- (nu w : 1[L]) w.<> ;
  {} <- (nu v) (v <- s) ;
  c.<>;
""", "cannot support")


def test_multiplicity_in_configuration_spawn():
    assert_fails("""
mode m with W;
proc p () |- (c : 1[m]) =
  {s, t} <- (nu w : 1[m]) w.<> ;
  case s { <> => case t { <> => c.<> } };
""", "multiplicity")


def test_call_arity_and_types():
    assert_fails("""
mode m;
proc f (a : 1[m]) |- (x : 1[m]) = case a { <> => x.<> };
proc g (a : 1[m], b : 1[m]) |- (x : 1[m]) = x <- f <- a, b;
""", "takes")
    assert_fails("""
mode m;
proc f (a : 1[m]) |- (x : 1[m]) = case a { <> => x.<> };
proc g (a : +{ l : 1[m] }) |- (x : 1[m]) = x <- f <- a;
""", "argument")


def test_unit_send_requires_empty_context():
    assert_fails("""
mode m;
proc p (a : 1[m]) |- (c : 1[m]) = c.<>;
""", "unused")


def test_recursive_call_checks(corpus_programs):
    prog = corpus_programs["nor.adj"]
    d = C.check_definition(prog.theory, prog, "nor")
    assert d.rule == "plusL"


# -- derivations and the independent validator


def derivations_of(prog):
    return [C.check_definition(prog.theory, prog, name) for name in prog.procs]


def test_validator_accepts_checker_output(corpus_programs):
    for name, prog in corpus_programs.items():
        for d in derivations_of(prog):
            assert C.validate_derivation(prog.theory, prog, d) == [], name


def test_validator_rejects_tampered_derivation():
    prog = assert_ok("""
mode m;
proc p (x : A[m] * B[m]) |- (z : B[m] * A[m]) =
  case x { <y, x1> => z.<x1, y> };
""")
    d = C.check_definition(prog.theory, prog, "p")
    from dataclasses import replace
    bad = replace(d, rule="oneL")
    assert C.validate_derivation(prog.theory, prog, bad)
    bad2 = replace(d, premises=())
    assert C.validate_derivation(prog.theory, prog, bad2)


def test_presupposition_holds_throughout(corpus_programs):
    for prog in corpus_programs.values():
        for d in derivations_of(prog):
            stack = [d]
            while stack:
                node = stack.pop()
                g = node.goal
                for _, t in g.context:
                    assert prog.theory.geq(t.mode, g.offered.mode)
                stack.extend(node.premises)


def test_goal_constructor_enforces_independence():
    th = make_theory([("U", "WC"), ("L", "")], [("U", "L")])
    with pytest.raises(C.TypingError):
        C.make_goal(th, (("x", S.Atom("A", "L")),), S.SendUnit("c"), "c", S.One("U"))
    with pytest.raises(C.TypingError):
        C.make_goal(th, (("c", S.Atom("A", "U")),), S.SendUnit("c"), "c", S.One("U"))

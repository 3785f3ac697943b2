import pytest

from adjlang import frontend as F
from adjlang import syntax as S
from adjlang.diagnostics import SourceError
from conftest import parse


def test_tensor_commutativity_shape():
    prog = parse("""
mode m;
proc swap (x : A[m] * B[m]) |- (z : B[m] * A[m]) =
  case x { <y, x1> => z.<x1, y> };
""")
    body = prog.procs["swap"].body
    assert isinstance(body, S.CasePair)
    assert isinstance(body.body, S.SendPair)


def test_empty_alias_spawn_parses():
    prog = parse("""
mode m with W;
proc drop1 (z : A[m]) |- (c : 1[m]) =
  {} <- (nu a) (a <- z) ; c.<>;
""")
    body = prog.procs["drop1"].body
    assert isinstance(body, S.Spawn)
    assert body.aliases == ()
    assert isinstance(body.body, S.Fwd)


def test_call_parses():
    prog = parse("""
mode m;
proc f (a : A[m], b : A[m]) |- (x : A[m]) = x <- a;
proc g (a : A[m], b : A[m]) |- (x : A[m]) = x <- f <- a, b;
""")
    body = prog.procs["g"].body
    assert isinstance(body, S.Call)
    assert body.name == "f" and len(body.args) == 2


def test_singleton_spawn_without_braces():
    prog = parse("""
mode m;
proc p (y : A[m]) |- (c : A[m] * A[m]) = c <- q <- y;
proc q (y : A[m]) |- (c : A[m] * A[m]) =
  s <- (nu w : A[m]) (w <- y) ; c.<s, s>;
""")
    # parses; the (ill-typed) duplicate use is the checker's business
    body = prog.procs["q"].body
    assert isinstance(body, S.Spawn) and body.aliases != ()


def test_comments_and_modes():
    prog = parse("""
% a comment
mode U with W, C;  % trailing comment
mode L;
order U > L;
""")
    assert prog.theory.geq("U", "L")
    assert prog.theory.props("U") == {"W", "C"}


def test_duplicate_alias_rejected():
    with pytest.raises(SourceError):
        parse("""
mode m;
proc p (y : A[m]) |- (c : 1[m]) =
  {s, s} <- (nu w : A[m]) (w <- y) ; c.<>;
""")


def test_unbound_channel_rejected():
    with pytest.raises(SourceError) as e:
        parse("""
mode m;
proc p (y : A[m]) |- (c : A[m]) = c <- z;
""")
    assert "unbound" in str(e.value)


def test_mode_inference_for_unit_inside_choice():
    prog = parse("""
mode U with W, C;
type b[U] = +{ stop : 1, go : b };
""")
    body = prog.types["b"].body
    assert body.branch("stop") == S.One("U")


def test_unannotated_unit_alone_is_an_error():
    with pytest.raises(SourceError) as e:
        parse("""
mode m;
proc p (x : 1) |- (c : 1[m]) = case x { <> => c.<> };
""")
    assert "infer" in str(e.value)


def test_diagnostic_rendering_has_position():
    try:
        parse("mode m;\nproc p () |- (c : 1[m]) = c.< ;\n")
    except SourceError as e:
        rendered = e.diagnostics[0].render()
        assert rendered.startswith("<test>:2:")
        assert "error" in rendered
    else:
        pytest.fail("expected a syntax error")


def duplicate_definition_rejected():
    with pytest.raises(SourceError):
        parse("mode m; type a[m] = 1; type a[m] = 1;")


# -- round trips


def roundtrip(prog):
    text = F.print_program(prog)
    return F.parse_program(text, "<roundtrip>")


def test_print_parse_roundtrip_corpus(corpus_programs):
    for name, prog in corpus_programs.items():
        again = roundtrip(prog)
        assert set(prog.procs) == set(again.procs), name
        for pname, pd in prog.procs.items():
            assert S.alpha_equal(pd.body, again.procs[pname].body), (name, pname)
            assert pd.result_type == again.procs[pname].result_type
        for tname, td in prog.types.items():
            assert td.body == again.types[tname].body


def test_printer_avoids_capture_under_shadowing():
    prog = parse("""
mode m;
proc p (x : A[m] * (A[m] * A[m])) |- (z : A[m] * (A[m] * A[m])) =
  case x { <y, x1> => case x1 { <y1, x2> =>
    {s} <- (nu w : A[m] * A[m]) w.<y1, x2> ; z.<y, s> } };
""")
    again = roundtrip(prog)
    assert S.alpha_equal(prog.procs["p"].body, again.procs["p"].body)


def test_print_type_forms():
    t = S.Lolli(S.Tensor(S.Atom("A", "m"), S.One("m"), "m"), S.Atom("B", "m"), "m")
    assert F.print_type(t) == "A[m] * 1[m] -o B[m]"
    u = S.Up("L", "U", S.Lolli(S.Atom("A", "L"), S.Atom("B", "L"), "L"))
    assert F.print_type(u) == "up[U] (A[L] -o B[L])"


def test_print_process_examples():
    assert F.print_process(S.Fwd("c", "a")) == "c <- a"
    assert F.print_process(S.SendUnit("c")) == "c.<>"
    assert F.print_process(S.SendShift("c", "a")) == "c.shift(a)"


# -- configurations


NOR_CONFIG = """
chan a : bits; chan b : bits; chan c : bits;
chan a' : bits; chan b' : bits;
proc {a} [a'] ax { ax.b1(a') }
proc {b} [b'] bx { bx.b0(b') }
proc {c} [a, b] cx { cx <- nor <- a, b }
"""


def test_parse_config_nor(corpus_programs):
    prog = corpus_programs["nor.adj"]
    pc = F.parse_config(NOR_CONFIG, prog)
    assert len(pc.entries) == 3
    assert set(pc.chan_types) == {"a", "b", "c", "a'", "b'"}


def test_parse_config_empty(corpus_programs):
    pc = F.parse_config("", corpus_programs["nor.adj"])
    assert pc.entries == [] and pc.chan_types == {}


def test_parse_config_duplicate_alias_rejected(corpus_programs):
    prog = corpus_programs["nor.adj"]
    bad = """
chan a : bits; chan x : bits; chan y : bits;
proc {a} [x] w1 { w1 <- x }
proc {a} [y] w2 { w2 <- y }
"""
    with pytest.raises(SourceError) as e:
        F.parse_config(bad, prog)
    assert "overlap" in str(e.value)


def test_parse_config_checks_declared_uses(corpus_programs):
    prog = corpus_programs["nor.adj"]
    bad = "chan a : bits;\nproc {a} [] w { w <- x }\n"
    with pytest.raises(SourceError) as e:
        F.parse_config(bad, prog)
    assert "free channels" in str(e.value)


def test_sequent_parsing(corpus_programs):
    prog = corpus_programs["nor.adj"]
    ants, succ = F.parse_sequent("x : A * B |- B * A at L", prog)
    assert ants[0][1] == S.Tensor(S.Atom("A", "L"), S.Atom("B", "L"), "L")
    assert succ.mode == "L"
    ants2, succ2 = F.parse_sequent("|- 1[U]", prog)
    assert ants2 == () and succ2 == S.One("U")

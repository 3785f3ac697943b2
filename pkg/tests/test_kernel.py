import random

import pytest

from adjlang import checker as C
from adjlang import gen as G
from adjlang import kernel as K
from adjlang import syntax as S
from adjlang.modes import make_theory
from conftest import parse

UL = make_theory([("U", "WC"), ("L", "")], [("U", "L")])


def A(m):
    return S.Atom("A", m)


def B(m):
    return S.Atom("B", m)


def with_ab(m):
    return S.With((("pi1", A(m)), ("pi2", B(m))), m)


def plus_ab(m):
    return S.Plus((("pi1", A(m)), ("pi2", B(m))), m)


# -- proof checking


def test_check_id_then_plusR():
    m = "L"
    seq = K.Sequent((("x", A(m)),), plus_ab(m))
    proof = K.Proof("plusR", seq,
                    (K.Proof("id", K.Sequent((("x", A(m)),), A(m))),), label="pi1")
    K.check_proof(UL, proof)


def test_contraction_side_condition():
    m = "L"  # no contraction at L
    con = K.Sequent((("x", A(m)),), S.Tensor(A(m), A(m), m))
    prem = K.Sequent((("y", A(m)), ("z", A(m))), S.Tensor(A(m), A(m), m))
    inner = K.Proof("tensorR", prem, (
        K.Proof("id", K.Sequent((("y", A(m)),), A(m))),
        K.Proof("id", K.Sequent((("z", A(m)),), A(m)))))
    proof = K.Proof("contract", con, (inner,), principal="x")
    with pytest.raises(K.ProofError) as e:
        K.check_proof(UL, proof)
    assert "contraction" in str(e.value)
    # the same proof is fine at U
    u = "U"
    conU = K.Sequent((("x", A(u)),), S.Tensor(A(u), A(u), u))
    premU = K.Sequent((("y", A(u)), ("z", A(u))), S.Tensor(A(u), A(u), u))
    innerU = K.Proof("tensorR", premU, (
        K.Proof("id", K.Sequent((("y", A(u)),), A(u))),
        K.Proof("id", K.Sequent((("z", A(u)),), A(u)))))
    K.check_proof(UL, K.Proof("contract", conU, (innerU,), principal="x"))


def test_contraction_as_multicut_with_identity():
    u = "U"
    con = K.Sequent((("x", A(u)), ("w", B(u))), B(u))
    prem = K.Sequent((("y", A(u)), ("z", A(u)), ("w", B(u))), B(u))
    body = K.Proof("weaken", prem, (
        K.Proof("weaken", K.Sequent((("z", A(u)), ("w", B(u))), B(u)), (
            K.Proof("id", K.Sequent((("w", B(u)),), B(u))),), principal="z"),),
        principal="y")
    ident = K.Proof("id", K.Sequent((("x", A(u)),), A(u)))
    multicut = K.Proof("cut", con, (ident, body), cut_names=("y", "z"))
    K.check_proof(UL, multicut)


def test_weakening_as_multicut_with_identity():
    u = "U"
    con = K.Sequent((("x", A(u)), ("w", B(u))), B(u))
    ident = K.Proof("id", K.Sequent((("x", A(u)),), A(u)))
    rest = K.Proof("id", K.Sequent((("w", B(u)),), B(u)))
    multicut = K.Proof("cut", con, (ident, rest), cut_names=())
    K.check_proof(UL, multicut)
    # and it is rejected when the mode lacks weakening
    m = "L"
    conL = K.Sequent((("x", A(m)), ("w", B(m))), B(m))
    identL = K.Proof("id", K.Sequent((("x", A(m)),), A(m)))
    restL = K.Proof("id", K.Sequent((("w", B(m)),), B(m)))
    with pytest.raises(K.ProofError):
        K.check_proof(UL, K.Proof("cut", conL, (identL, restL), cut_names=()))


def test_presupposition_enforced():
    bad = K.Proof("id", K.Sequent((("x", A("L")),), A("L")))
    wrapped = K.Proof("upR", K.Sequent((("x", A("L")),), S.Up("L", "U", A("L"))),
                      (bad,))
    with pytest.raises(K.ProofError) as e:
        K.check_proof(UL, wrapped)
    assert "presupposition" in str(e.value)


def test_axiom_system_examples():
    m = "L"
    K.check_axiom_proof(UL, K.Proof(
        "plusR0", K.Sequent((("a", A(m)),), plus_ab(m)), label="pi1"))
    K.check_axiom_proof(UL, K.Proof(
        "withL0", K.Sequent((("a", with_ab(m)),), A(m)), label="pi1"))
    K.check_axiom_proof(UL, K.Proof(
        "tensorR0", K.Sequent((("a", A(m)), ("b", B(m))), S.Tensor(A(m), B(m), m))))
    K.check_axiom_proof(UL, K.Proof(
        "lolliL0", K.Sequent((("a", A(m)), ("f", S.Lolli(A(m), B(m), m))), B(m))))
    with pytest.raises(K.ProofError):
        # leftover antecedent at an axiom
        K.check_axiom_proof(UL, K.Proof(
            "plusR0", K.Sequent((("a", A(m)), ("b", B(m))), plus_ab(m)), label="pi1"))
    with pytest.raises(K.ProofError):
        # the standard two-premise rules are not part of the axiom system
        K.check_axiom_proof(UL, K.Proof(
            "plusR", K.Sequent((("a", A(m)),), plus_ab(m)),
            (K.Proof("id", K.Sequent((("a", A(m)),), A(m))),), label="pi1"))


# -- bounded search


@pytest.mark.parametrize("mode", ["U", "L"])
def test_tensor_commutativity_provable_everywhere(mode):
    seq = K.Sequent((("x", S.Tensor(A(mode), B(mode), mode)),),
                    S.Tensor(B(mode), A(mode), mode))
    proof = K.prove_cutfree(UL, seq, depth=4)
    assert proof is not None
    K.check_proof(UL, proof)


@pytest.mark.parametrize("mode,provable", [("U", True), ("L", False)])
def test_with_proves_tensor_iff_contraction(mode, provable):
    seq = K.Sequent((("p", with_ab(mode)),), S.Tensor(A(mode), B(mode), mode))
    proof = K.prove_cutfree(UL, seq, depth=6)
    assert (proof is not None) is provable
    if proof:
        K.check_proof(UL, proof)


@pytest.mark.parametrize("mode,provable", [("U", True), ("L", False)])
def test_tensor_proves_with_iff_weakening(mode, provable):
    seq = K.Sequent((("x", S.Tensor(A(mode), B(mode), mode)),), with_ab(mode))
    proof = K.prove_cutfree(UL, seq, depth=6)
    assert (proof is not None) is provable
    if proof:
        K.check_proof(UL, proof)


def test_duplication_unprovable_at_linear_mode():
    seq = K.Sequent((("x", A("L")),), S.Tensor(A("L"), A("L"), "L"))
    assert K.prove_cutfree(UL, seq, depth=6) is None


def test_no_cutfree_proof_of_unit_choice_without_context():
    # in the axiomatic reading this needs a cut; the standard system proves it
    seq = K.Sequent((), S.Plus((("l", S.One("L")),), "L"))
    proof = K.prove_cutfree(UL, seq, depth=4)
    assert proof is not None


def test_search_uses_shifts():
    seq = K.Sequent((("x", S.Up("L", "U", A("L")),),), A("L"))
    proof = K.prove_cutfree(UL, seq, depth=3)
    assert proof is not None and proof.rule == "upL"
    # the converse sequent is not even well-formed: it violates the
    # declaration of independence (this is how the faulty derivation of
    # linear contraction is blocked)
    seq2 = K.Sequent((("x", A("L")),), S.Up("L", "U", A("L")))
    with pytest.raises(ValueError):
        K.prove_cutfree(UL, seq2, depth=5)
    # a shared antecedent may be boxed up and duplicated, a linear one not
    seq3 = K.Sequent((("x", A("U")),), S.Up("L", "U", A("L")))
    assert K.prove_cutfree(UL, seq3, depth=5) is None


# -- identity expansion


def test_identity_expand_atomic_unchanged():
    proof = K.Proof("id", K.Sequent((("x", A("L")),), A("L")))
    assert K.identity_expand(UL, proof) == proof


def test_identity_expand_one_layer_tensor():
    t = S.Tensor(A("L"), B("L"), "L")
    proof = K.Proof("id", K.Sequent((("x", t),), t))
    out = K.identity_expand(UL, proof)
    K.check_proof(UL, out)
    assert out.rule == "tensorL"
    assert out.premises[0].rule == "tensorR"
    assert out.conclusion == proof.conclusion


def test_identity_expand_choice():
    t = S.Plus((("l", S.Atom("p", "L")),), "L")
    proof = K.Proof("id", K.Sequent((("x", t),), t))
    out = K.identity_expand(UL, proof)
    K.check_proof(UL, out)
    assert out.rule == "plusL"
    assert out.premises[0].rule == "plusR"


def _assert_ids_atomic(proof):
    if proof.rule == "id":
        ((_, t),) = proof.conclusion.antecedents
        assert isinstance(t, (S.Atom, S.TypeRef)), t
    for p in proof.premises:
        _assert_ids_atomic(p)


def _cut_free(proof):
    return proof.rule != "cut" and all(_cut_free(p) for p in proof.premises)


def test_identity_expand_random_proofs():
    rng = random.Random(0)
    for _ in range(60):
        th = G.random_chain_theory(rng, rng.randint(1, 3))
        proof = G.random_proof(rng, th, steps=rng.randint(1, 8))
        K.check_proof(th, proof)
        out = K.identity_expand(th, proof)
        K.check_proof(th, out)
        _assert_ids_atomic(out)
        assert out.conclusion == proof.conclusion
        if _cut_free(proof):
            assert _cut_free(out)


# -- translations


def test_plusR_becomes_cut_against_axiom():
    m = "L"
    prem = K.Proof("id", K.Sequent((("x", A(m)),), A(m)))
    proof = K.Proof("plusR", K.Sequent((("x", A(m)),), plus_ab(m)), (prem,),
                    label="pi1")
    K.check_proof(UL, proof)
    ax = K.standard_to_axioms(proof)
    K.check_axiom_proof(UL, ax)
    assert ax.rule == "cut"
    assert ax.premises[1].rule == "plusR0"


def test_weaken_becomes_empty_multicut():
    u = "U"
    prem = K.Proof("id", K.Sequent((("w", B(u)),), B(u)))
    proof = K.Proof("weaken", K.Sequent((("x", A(u)), ("w", B(u))), B(u)),
                    (prem,), principal="x")
    K.check_proof(UL, proof)
    ax = K.standard_to_axioms(proof)
    K.check_axiom_proof(UL, ax)
    assert ax.rule == "cut" and ax.cut_names == ()
    assert ax.premises[0].rule == "id"


def test_contract_becomes_two_name_multicut():
    u = "U"
    prem_inner = K.Proof("tensorR", K.Sequent((("y", A(u)), ("z", A(u))),
                                              S.Tensor(A(u), A(u), u)), (
        K.Proof("id", K.Sequent((("y", A(u)),), A(u))),
        K.Proof("id", K.Sequent((("z", A(u)),), A(u)))))
    proof = K.Proof("contract", K.Sequent((("x", A(u)),), S.Tensor(A(u), A(u), u)),
                    (prem_inner,), principal="x")
    K.check_proof(UL, proof)
    ax = K.standard_to_axioms(proof)
    K.check_axiom_proof(UL, ax)
    assert ax.rule == "cut" and set(ax.cut_names) == {"y", "z"}


def test_axioms_to_standard_examples():
    m = "L"
    ax = K.Proof("plusR0", K.Sequent((("a", A(m)),), plus_ab(m)), label="pi1")
    out = K.axioms_to_standard(ax)
    K.check_proof(UL, out)
    assert out.rule == "plusR" and out.premises[0].rule == "id"
    ident = K.Proof("id", K.Sequent((("a", A(m)),), A(m)))
    assert K.axioms_to_standard(ident) == ident


def test_roundtrip_preserves_conclusions():
    rng = random.Random(1)
    for _ in range(60):
        th = G.random_chain_theory(rng, rng.randint(1, 3))
        proof = G.random_proof(rng, th, steps=rng.randint(1, 8))
        ax = K.standard_to_axioms(proof)
        K.check_axiom_proof(th, ax)
        back = K.axioms_to_standard(ax)
        K.check_proof(th, back)
        assert back.conclusion == proof.conclusion == ax.conclusion


# -- erasure bridge


def test_erased_derivations_check(corpus_programs):
    prog = parse("""
mode U with W, C;
proc swap (x : A[U] * B[U]) |- (z : B[U] * A[U]) =
  case x { <y, x1> => z.<x1, y> };
proc w2t (p : A[U] & B[U]) |- (z : A[U] * B[U]) =
  {p1, p2} <- (nu q) (q <- p) ;
  {x} <- (nu a : A[U]) p1.pi1(a) ;
  {y} <- (nu b : B[U]) p2.pi2(b) ;
  z.<x, y>;
""")
    for name in prog.procs:
        d = C.check_definition(prog.theory, prog, name)
        ax = K.erase_derivation(d)
        K.check_axiom_proof(prog.theory, ax)
        std = K.axioms_to_standard(ax)
        K.check_proof(prog.theory, std)
        assert std.conclusion == ax.conclusion


def test_erasure_rejects_calls(corpus_programs):
    prog = corpus_programs["nor.adj"]
    d = C.check_definition(prog.theory, prog, "or")
    with pytest.raises(ValueError):
        K.erase_derivation(d)


# -- conservativity


def test_conservativity_on_commutativity():
    seq = K.Sequent((("x", S.Tensor(A("L"), B("L"), "L")),),
                    S.Tensor(B("L"), A("L"), "L"))
    assert K.conservativity_probe(UL, seq, depth=6) == (True, True)


def test_conservativity_on_unprovable():
    seq = K.Sequent((("x", A("L")),), S.Tensor(A("L"), A("L"), "L"))
    assert K.conservativity_probe(UL, seq, depth=6) == (False, False)


def test_conservativity_rejects_shifts_and_mixed_modes():
    with pytest.raises(ValueError):
        K.conservativity_probe(UL, K.Sequent((), S.Up("L", "U", A("L"))), 4)
    with pytest.raises(ValueError):
        K.conservativity_probe(
            UL, K.Sequent((("x", A("U")),), A("L")), 4)


def test_conservativity_random_agreement():
    rng = random.Random(2)
    for _ in range(40):
        th = G.random_chain_theory(rng, rng.randint(2, 4))
        mode = rng.choice(th.modes)
        seq = G.random_shift_free_sequent(rng, th, mode)
        full, single = K.conservativity_probe(th, seq, depth=5)
        assert full == single


def test_print_proof_is_textual():
    proof = K.prove_cutfree(UL, K.Sequent((("x", A("L")),), A("L")), 2)
    text = K.print_proof(proof)
    assert "id" in text and "|-" in text

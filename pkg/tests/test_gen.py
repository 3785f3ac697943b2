import random

from adjlang import checker as C
from adjlang import gen as G
from adjlang import kernel as K
from adjlang import runtime as R
from adjlang import syntax as S


def test_chain_theories_validate():
    rng = random.Random(0)
    for _ in range(50):
        th = G.random_chain_theory(rng, rng.randint(1, 4))
        assert th.validate() == []
        modes = th.modes
        for i in range(len(modes) - 1):
            assert th.geq(modes[i], modes[i + 1])


def test_inhabited_types_are_wellformed_and_positive():
    rng = random.Random(1)
    for _ in range(100):
        th = G.random_chain_theory(rng, rng.randint(1, 4))
        mode = rng.choice(th.modes)
        prog = S.Program(th, {}, {})
        t = G.random_inhabited_type(rng, th, mode, depth=3, positive_only=True)
        assert S.type_wellformed(th, prog, t) == []
        assert S.purely_positive(prog, t)


def test_generated_programs_typecheck_by_construction():
    rng = random.Random(2)
    for _ in range(30):
        prog, main = G.generate_checked_program(rng, fuel=6)
        assert C.check_program(prog.theory, prog) == []
        assert main in prog.procs
        assert prog.procs[main].params == ()


def test_generated_programs_with_negatives():
    rng = random.Random(3)
    for _ in range(20):
        prog, _ = G.generate_checked_program(rng, fuel=6, positive_only=False)
        assert C.check_program(prog.theory, prog) == []


def test_generated_programs_terminate_observably():
    rng = random.Random(4)
    for i in range(20):
        prog, main = G.generate_checked_program(rng, fuel=5)
        config, psi = R.initial_configuration(prog, main)
        res = R.run(prog, config, policy="demand-driven", seed=i, max_steps=500)
        assert res.verdict == "terminated-poised"
        ok, _ = R.observable(prog, res.config, psi)
        assert ok


def test_random_proofs_check():
    rng = random.Random(5)
    for _ in range(80):
        th = G.random_chain_theory(rng, rng.randint(1, 3))
        proof = G.random_proof(rng, th, steps=rng.randint(0, 10))
        K.check_proof(th, proof)


def test_random_proof_rule_diversity():
    rng = random.Random(6)
    rules = set()
    for _ in range(150):
        th = G.random_chain_theory(rng, 3)
        proof = G.random_proof(rng, th, steps=10)
        stack = [proof]
        while stack:
            p = stack.pop()
            rules.add(p.rule)
            stack.extend(p.premises)
    # the generator reaches structural, multiplicative, additive, shift rules
    assert {"id", "cut", "weaken", "plusR", "withR", "tensorR", "tensorL",
            "oneL", "upR", "downR", "plusL", "withL"} <= rules


def test_generated_runs_cover_all_rules():
    rng = random.Random(7)
    seen = set()
    for i in range(60):
        positive = rng.random() < 0.5
        prog, main = G.generate_checked_program(rng, fuel=7,
                                                positive_only=positive)
        config, _ = R.initial_configuration(prog, main)
        res = R.run(prog, config, policy=rng.choice(R.POLICIES), seed=i,
                    max_steps=300)
        seen |= {e.rule for e in res.trace}
    assert {"id", "cut", "drop", "copy", "call",
            "plusC", "withC", "tensorC", "oneC", "downC", "upC"} <= seen

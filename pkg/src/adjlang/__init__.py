"""adjlang: a kernel language for adjoint session-typed processes.

Modes with selectable weakening/contraction, asynchronous message
passing by multiset rewriting, a process typechecker, and a sequent
calculus kernel with bounded cut-free proof search.
"""

from .modes import ModeTheory, make_theory, context_geq
from .syntax import (
    Atom, Lolli, Tensor, One, Plus, With, Up, Down, TypeRef,
    Fwd, Spawn, SendLabel, CaseLabel, SendPair, CasePair,
    SendUnit, CaseUnit, SendShift, CaseShift, Call,
    Program, TypeDef, ProcDef,
    free_channels, unfold, purely_positive, type_wellformed, alpha_equal,
)
from .frontend import (
    parse_program, parse_config, parse_sequent,
    print_process, print_type, print_program,
)
from .checker import (
    TypingGoal, TypingDerivation, TypingError,
    check, check_program, check_definition, make_goal, validate_derivation,
)
from .runtime import (
    ProcObject, Configuration, Instance, TraceEvent, RunResult,
    make_configuration, initial_configuration, applicable_rules, step, run,
    poised, observable, check_configuration, check_configuration_comp,
    dump_config,
)
from .kernel import (
    Sequent, Proof, ProofError,
    check_proof, check_axiom_proof, prove_cutfree, identity_expand,
    axioms_to_standard, standard_to_axioms, conservativity_probe,
    erase_derivation, print_proof,
)

__version__ = "0.1.0"

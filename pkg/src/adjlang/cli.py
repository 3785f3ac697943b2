"""Command-line entry point: check, run, prove, and fmt subcommands.

Exit codes: 0 success / terminated poised, 1 error, 2 stuck open,
3 step limit reached, 4 proof search exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import checker as TC
from . import frontend as F
from . import kernel as K
from . import runtime as R
from . import syntax as S
from .diagnostics import Diagnostic, SourceError, warning

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_STUCK_OPEN = 2
EXIT_STEP_LIMIT = 3
EXIT_EXHAUSTED = 4

DEFAULT_THEORY = "mode U with W, C;\nmode L;\norder U > L;\n"


def _emit(diagnostics: list[Diagnostic], as_json: bool):
    for d in diagnostics:
        if as_json:
            print(json.dumps(d.to_json(), sort_keys=True))
        else:
            print(d.render(), file=sys.stderr)


def _load_program(path: str, as_json: bool):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        _emit([Diagnostic("error", str(e))], as_json)
        return None
    try:
        return F.parse_program(text, path)
    except SourceError as e:
        _emit(e.diagnostics, as_json)
        return None


def cmd_check(args) -> int:
    program = _load_program(args.file, args.json)
    if program is None:
        return EXIT_ERROR
    diagnostics = TC.check_program(program.theory, program)
    _emit(diagnostics, args.json)
    if any(d.severity == "error" for d in diagnostics):
        return EXIT_ERROR
    if not args.json:
        print(f"{args.file}: {len(program.procs)} definition(s) check")
    return EXIT_OK


def cmd_run(args) -> int:
    program = _load_program(args.file, args.json)
    if program is None:
        return EXIT_ERROR
    if args.main not in program.procs:
        _emit([Diagnostic("error", f"no definition named {args.main}")], args.json)
        return EXIT_ERROR

    diagnostics = TC.check_program(program.theory, program)
    if any(d.severity == "error" for d in diagnostics):
        if args.unsafe:
            _emit([warning("running an ill-typed program (--unsafe)")], args.json)
        else:
            _emit(diagnostics, args.json)
            return EXIT_ERROR

    pd = program.procs[args.main]
    if pd.params:
        _emit([Diagnostic("error", f"{args.main} must not use any channels")], args.json)
        return EXIT_ERROR
    pure = S.purely_positive(program, pd.result_type)
    if not pure:
        _emit([warning(f"{args.main} does not offer a purely positive type; "
                       "the final configuration will not be observable")], args.json)

    seed = args.seed
    env_seed = os.environ.get("ADJ_SEED")
    if env_seed is not None:
        seed = int(env_seed)

    config, psi = R.initial_configuration(program, args.main)
    try:
        result = R.run(program, config, policy=args.policy, seed=seed,
                       max_steps=args.max_steps)
    except R.MetatheoryViolation as e:
        _emit([Diagnostic("error", f"metatheory violation: {e}")], args.json)
        return EXIT_ERROR

    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            for event in result.trace:
                fh.write(json.dumps(event.to_json(), sort_keys=True) + "\n")

    print(f"verdict: {result.verdict} after {len(result.trace)} step(s)")
    print(R.dump_config(result.config), end="")
    if pure and result.verdict == "terminated-poised":
        ok, witness = R.observable(program, result.config, psi)
        print(f"observable: {'yes' if ok else 'NO'} "
              f"(peeled {len(witness)} message(s))")
    if result.verdict == "terminated-poised":
        return EXIT_OK
    if result.verdict == "stuck-open":
        return EXIT_STUCK_OPEN
    return EXIT_STEP_LIMIT


def cmd_prove(args) -> int:
    if args.mode_theory:
        program = _load_program(args.mode_theory, False)
        if program is None:
            return EXIT_ERROR
    else:
        program = F.parse_program(DEFAULT_THEORY, "<default theory>")
    try:
        ants, succ = F.parse_sequent(args.sequent, program)
    except SourceError as e:
        _emit(e.diagnostics, False)
        return EXIT_ERROR
    violations = program.theory.validate()
    if violations:
        _emit([Diagnostic("error", v) for v in violations], False)
        return EXIT_ERROR
    sequent = K.Sequent(ants, succ)
    if not program.theory.geq_all((t.mode for _, t in ants), succ.mode):
        _emit([Diagnostic("error", "sequent violates the declaration of independence")],
              False)
        return EXIT_ERROR
    proof = K.prove_cutfree(program.theory, sequent, depth=args.depth)
    if proof is None:
        print(f"EXHAUSTED({args.depth})")
        return EXIT_EXHAUSTED
    print(K.print_proof(proof))
    return EXIT_OK


def cmd_fmt(args) -> int:
    program = _load_program(args.file, as_json=False)
    if program is None:
        return EXIT_ERROR
    sys.stdout.write(F.print_program(program))
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("step limit must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adj",
        description="typecheck, execute, and reason about adjoint "
                    "session-typed processes")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="typecheck a program")
    p_check.add_argument("file")
    p_check.add_argument("--json", action="store_true",
                         help="emit diagnostics as JSON objects, one per line")
    p_check.set_defaults(fn=cmd_check)

    p_run = sub.add_parser("run", help="execute a definition")
    p_run.add_argument("file")
    p_run.add_argument("main", nargs="?", default="main",
                       help="definition to run (default: main)")
    p_run.add_argument("--seed", type=int, default=0,
                       help="scheduler seed (env ADJ_SEED overrides)")
    p_run.add_argument("--policy", choices=R.POLICIES, default="demand-driven")
    p_run.add_argument("--max-steps", type=_positive_int, default=10000)
    p_run.add_argument("--trace", metavar="FILE",
                       help="write the trace as JSON lines")
    p_run.add_argument("--unsafe", action="store_true",
                       help="run even if the program does not typecheck")
    p_run.add_argument("--json", action="store_true")
    p_run.set_defaults(fn=cmd_run)

    p_prove = sub.add_parser("prove", help="bounded cut-free proof search")
    p_prove.add_argument("sequent", help="e.g. 'x : A * B |- B * A at L'")
    p_prove.add_argument("--depth", type=int, default=6)
    p_prove.add_argument("--mode-theory", metavar="FILE",
                         help="program file whose header declares the theory")
    p_prove.set_defaults(fn=cmd_prove)

    p_fmt = sub.add_parser("fmt", help="parse and pretty-print a program")
    p_fmt.add_argument("file")
    p_fmt.set_defaults(fn=cmd_fmt)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

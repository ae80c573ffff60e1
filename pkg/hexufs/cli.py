"""
Command-line interface: `hexufs solve|analyze|check-ufs|verify|bench`.

Exit status: 0 on success, 1 when `solve` finds no answer set or `verify`
finds discrepancies, 2 on errors.
"""

import argparse
import json
import logging
import sys
import time
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from hexufs import config
from hexufs.depgraph import analyze
from hexufs.errors import HexError, PreconditionError
from hexufs.external_sources import OracleRegistry, default_registry, load_table_oracle
from hexufs.generator import parse_instance_spec, random_instance
from hexufs.interpretation import Interpretation
from hexufs.logging_utils import (
    log_completion,
    log_evaluation_start,
    log_evaluation_statistics,
    log_verification_results,
    setup_solver_logger,
)
from hexufs.parser import load_program, parse_atoms
from hexufs.pipeline import MODES, EvaluationOptions, evaluate, run_benchmark, verify
from hexufs.syntax import Program, format_atom_set
from hexufs.ufs import UfsQuery, find_unfounded_set

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hexufs",
        description="Ground HEX-program evaluator with decomposed unfounded-set checking.",
    )
    parser.add_argument("--exhaustive-cap", type=int, default=config.EXHAUSTIVE_ATOM_CAP,
                        help="Largest universe for the exhaustive engine.")
    parser.add_argument("--ufs-cap", type=int, default=config.UFS_DOMAIN_CAP,
                        help="Largest unfounded-set search domain.")
    parser.add_argument("--flp-cap", type=int, default=config.FLP_ATOM_CAP,
                        help="Largest universe for the brute-force FLP check.")
    parser.add_argument("--log-level", default=config.LOG_LEVEL, help="Log level (default %(default)s).")
    parser.add_argument("--log-file", default=None, help="Also write the log to this file.")
    parser.add_argument("--record", action="store_true", default=False,
                        help="Record the run in the SQLite run log.")
    sub = parser.add_subparsers(dest="command", required=True)

    def program_args(p):
        p.add_argument("file", metavar="FILE", help="Program file.")
        p.add_argument("--oracles", metavar="FILE", action="append", default=[],
                       help="Table-oracle file (repeatable).")

    solve = sub.add_parser("solve", help="Compute answer sets.")
    program_args(solve)
    solve.add_argument("--mode", choices=MODES, default=config.DEFAULT_MODE)
    solve.add_argument("--engine", choices=("exhaustive", "propagate"), default=config.DEFAULT_ENGINE)
    solve.add_argument("--max-answers", type=int, default=None, metavar="N")
    solve.add_argument("--stats-json", metavar="PATH", default=None,
                       help="Write the evaluation counters as JSON ('-' for stdout).")
    solve.add_argument("--no-ca-restriction", action="store_true", default=False,
                       help="Search components without requiring a cyclic input atom.")
    solve.add_argument("--workers", type=int, default=1, help="Threads checking candidates.")

    analyze_cmd = sub.add_parser("analyze", help="Report dependencies, components and the e-cycle criterion.")
    program_args(analyze_cmd)
    analyze_cmd.add_argument("--json", action="store_true", default=False)

    check = sub.add_parser("check-ufs", help="Search an unfounded set for an interpretation.")
    program_args(check)
    check.add_argument("--interpretation", required=True, metavar="ATOMS",
                       help='True atoms, e.g. "p,q,r(a)".')

    verify_cmd = sub.add_parser("verify", help="Cross-check full mode against brute force.")
    verify_cmd.add_argument("file", metavar="FILE", nargs="?", default=None)
    verify_cmd.add_argument("--oracles", metavar="FILE", action="append", default=[])
    verify_cmd.add_argument("--random", type=int, default=0, metavar="N",
                            help="Also verify N seeded random programs.")
    verify_cmd.add_argument("--seed", type=int, default=0, help="First seed of the random corpus.")
    verify_cmd.add_argument("--engine", choices=("exhaustive", "propagate"), default=config.DEFAULT_ENGINE)

    bench = sub.add_parser("bench", help="Compare modes on a generated instance.")
    bench.add_argument("--spec", required=True, help='Instance, e.g. "m=8,k=1,s=3,seed=0".')
    bench.add_argument("--modes", default="full,no-decomposition,no-criterion",
                       help="Comma separated modes.")
    bench.add_argument("--engine", choices=("exhaustive", "propagate"), default="propagate")
    bench.add_argument("--json", action="store_true", default=False)
    return parser


def load_inputs(path: str, oracle_paths: Sequence[str]) -> Tuple[str, Program, OracleRegistry]:
    """
    Read a program file and its table oracles.

    Returns:
        tuple: (program text, ground program, registry)
    """
    registry = default_registry()
    for oracle_path in oracle_paths:
        load_table_oracle(oracle_path, registry)
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return text, load_program(text, registry), registry


def _options(args, **overrides) -> EvaluationOptions:
    values = dict(
        exhaustive_cap=args.exhaustive_cap,
        ufs_cap=args.ufs_cap,
        flp_cap=args.flp_cap,
    )
    values.update(overrides)
    return EvaluationOptions(**values)


def _record(args, command: str, program_text: str, stats: Optional[dict], status: str, total_ms: float) -> None:
    if not args.record:
        return
    from utils.logging_utils import log_run

    log_run(command, program_text, stats or {}, status, total_ms)


def cmd_solve(args) -> int:
    text, program, registry = load_inputs(args.file, args.oracles)
    options = _options(
        args,
        mode=args.mode,
        engine=args.engine,
        max_answers=args.max_answers,
        ca_restriction=not args.no_ca_restriction,
        workers=args.workers,
    )
    log_evaluation_start(logger, len(program), len(program.atoms), options.mode, options.engine)
    report = evaluate(program, registry, options)
    for line in report.answer_set_strings():
        print(line)
    stats = report.to_stats()
    log_evaluation_statistics(logger, stats)
    if args.stats_json == "-":
        print(json.dumps(stats, indent=2))
    elif args.stats_json:
        with open(args.stats_json, "w", encoding="utf-8") as f:
            json.dump(stats, f, indent=2)
    _record(args, "solve", text, stats, "ok", report.phase_times_ms.get("total", 0.0))
    return 0 if report.answer_sets else 1


def cmd_analyze(args) -> int:
    text, program, _ = load_inputs(args.file, args.oracles)
    analysis = analyze(program)
    if args.json:
        print(json.dumps(analysis.to_dict(), indent=2))
    else:
        print(analysis.format())
    _record(args, "analyze", text, None, "ok", 0.0)
    return 0


def parse_interpretation(text: str, program: Program) -> Interpretation:
    """
    Turn "a,b,c" into an interpretation over A(Π).

    Raises:
        PreconditionError: an atom does not occur in the program
    """
    atoms = frozenset(parse_atoms(text))
    unknown = atoms - program.atoms
    if unknown:
        raise PreconditionError(f"atoms not in the program: {format_atom_set(unknown)}")
    return Interpretation.over(program, atoms)


def cmd_check_ufs(args) -> int:
    text, program, registry = load_inputs(args.file, args.oracles)
    interpretation = parse_interpretation(args.interpretation, program)
    query = UfsQuery(program, interpretation, interpretation.true_atoms)
    witness = find_unfounded_set(query, registry, args.ufs_cap)
    print(format_atom_set(witness) if witness is not None else "none")
    _record(args, "check-ufs", text, None, "ok", 0.0)
    return 0


def cmd_verify(args) -> int:
    if not args.file and not args.random:
        raise PreconditionError("verify needs a FILE or --random N")
    options = _options(args, engine=args.engine)
    discrepancies: List[str] = []
    checked = 0
    if args.file:
        _, program, registry = load_inputs(args.file, args.oracles)
        discrepancies += [f"{args.file}: {d}" for d in verify(program, registry, options)]
        checked += 1
    for seed in range(args.seed, args.seed + args.random):
        program, registry = random_instance(seed)
        discrepancies += [f"seed {seed}: {d}" for d in verify(program, registry, options)]
        checked += 1
    log_verification_results(logger, checked, discrepancies)
    for line in discrepancies:
        print(line)
    return 1 if discrepancies else 0


def cmd_bench(args) -> int:
    spec = parse_instance_spec(args.spec)
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    bad = [m for m in modes if m not in MODES]
    if bad:
        raise PreconditionError(f"unknown mode(s): {', '.join(bad)}")
    rows = run_benchmark(spec, modes, _options(args, engine=args.engine), progress=True)
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    header = f"{'mode':<18}{'answers':>9}{'compatible':>12}{'ufs_run':>9}{'skipped':>9}{'expansions':>12}{'ms':>10}"
    print(header)
    for row in rows:
        print(
            f"{row['mode']:<18}{row['answer_sets']:>9}{row['compatible_sets']:>12}"
            f"{row['ufs_searches_run']:>9}{row['ufs_searches_skipped']:>9}"
            f"{row['search_node_expansions']:>12}{row['total_ms']:>10.1f}"
        )
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "analyze": cmd_analyze,
    "check-ufs": cmd_check_ufs,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def _option_errors(error: ValidationError) -> str:
    return "; ".join(
        f"--{'.'.join(map(str, e['loc'])).replace('_', '-')}: {e['msg']}" for e in error.errors()
    )


def _fail(args: argparse.Namespace, message: str) -> int:
    print(f"hexufs: error: {message}", file=sys.stderr)
    file_arg = getattr(args, "file", None)
    if file_arg and args.record:
        _record(args, args.command, file_arg, None, f"error: {message}", 0.0)
    return 2


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        int: Exit status
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    setup_solver_logger(args.log_file, args.log_level)
    started = time.perf_counter()
    try:
        status = COMMANDS[args.command](args)
    except ValidationError as e:
        return _fail(args, _option_errors(e))
    except UnicodeDecodeError as e:
        return _fail(args, f"input is not UTF-8 text ({e.reason} at byte {e.start})")
    except HexError as e:
        return _fail(args, str(e))
    except OSError as e:
        print(f"hexufs: error: {e}", file=sys.stderr)
        return 2
    log_completion(logger, (time.perf_counter() - started) * 1000)
    return status


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

"""
End-to-end evaluation: guess, check compatibility, then confirm minimality
through unfounded-set search only where the dependency criterion demands it.

Modes:

- full: per SCC component, search only components with an e-cycle, within
  C ∩ A^T, optionally requiring a hit on the component's cyclic input atoms
- no-decomposition: one global search if the program has an e-cycle,
  requiring a hit on CA(Π)
- no-criterion: one unrestricted global search per candidate
- brute: no guessing; every interpretation goes through the FLP check
"""

import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field
from tqdm import tqdm

from hexufs import config
from hexufs.asp_core import CompatibleSet, GuessingProgram, build_guessing_program, enumerate_compatible_sets
from hexufs.depgraph import build_dependency_graph, needs_ufs_check, scc_partition
from hexufs.errors import CapExceededError
from hexufs.external_sources import OracleRegistry, default_registry
from hexufs.generator import InstanceSpec, generate_instance
from hexufs.interpretation import Interpretation, is_model
from hexufs.logging_utils import log_benchmark_row, log_candidate, log_ufs_result
from hexufs.syntax import OrdinaryAtom, Program, format_atom_set
from hexufs.ufs import SearchStats, UfsQuery, find_unfounded_set, is_flp_answer_set

logger = logging.getLogger(__name__)

MODES = ("full", "no-decomposition", "no-criterion", "brute")

Mode = Literal["full", "no-decomposition", "no-criterion", "brute"]
Engine = Literal["exhaustive", "propagate"]


class EvaluationOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: Mode = config.DEFAULT_MODE
    engine: Engine = config.DEFAULT_ENGINE
    ca_restriction: bool = True
    max_answers: Optional[int] = Field(default=None, ge=1)
    exhaustive_cap: int = Field(default=config.EXHAUSTIVE_ATOM_CAP, ge=0)
    ufs_cap: int = Field(default=config.UFS_DOMAIN_CAP, ge=0)
    flp_cap: int = Field(default=config.FLP_ATOM_CAP, ge=0)
    workers: int = Field(default=1, ge=1)


class EvaluationReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    mode: str
    engine: str
    answer_sets: List[FrozenSet[OrdinaryAtom]] = Field(default_factory=list)
    compatible_sets: int = 0
    candidates_rejected: int = 0
    ufs_searches_run: int = 0
    ufs_searches_skipped: int = 0
    components_total: int = 0
    components_ecyclic: int = 0
    search_node_expansions: int = 0
    phase_times_ms: Dict[str, float] = Field(default_factory=dict)

    @property
    def ufs_checks_eligible(self) -> int:
        return self.ufs_searches_run + self.ufs_searches_skipped

    def answer_set_strings(self) -> List[str]:
        return [format_atom_set(a) for a in self.answer_sets]

    def to_stats(self) -> Dict:
        """Stable-key document written by --stats-json; scalar values except the phase_times_ms map."""
        return {
            "answer_sets": len(self.answer_sets),
            "compatible_sets": self.compatible_sets,
            "candidates_rejected": self.candidates_rejected,
            "ufs_searches_run": self.ufs_searches_run,
            "ufs_searches_skipped": self.ufs_searches_skipped,
            "ufs_checks_eligible": self.ufs_checks_eligible,
            "components_total": self.components_total,
            "components_ecyclic": self.components_ecyclic,
            "search_node_expansions": self.search_node_expansions,
            "phase_times_ms": {k: round(v, 3) for k, v in self.phase_times_ms.items()},
            "mode": self.mode,
            "engine": self.engine,
        }


@dataclass(frozen=True)
class ScopedCheck:
    """One place to search: a (component) program, its atoms and required hits."""

    name: str
    program: Program
    atoms: FrozenSet[OrdinaryAtom]
    required_hit: FrozenSet[OrdinaryAtom]
    searched: bool


@dataclass
class CandidateResult:
    interpretation: Interpretation
    witness: Optional[FrozenSet[OrdinaryAtom]] = None
    runs: int = 0
    skipped: int = 0
    stats: Optional[SearchStats] = None
    elapsed_ms: float = 0.0

    @property
    def accepted(self) -> bool:
        return self.witness is None


def plan_checks(program: Program, options: EvaluationOptions) -> Tuple[List[ScopedCheck], int, int]:
    """
    Work out, once per program, where unfounded-set searches happen.

    Returns:
        tuple: (checks in evaluation order, components total, components e-cyclic)
    """
    if options.mode == "no-criterion":
        return [ScopedCheck("Π", program, program.atoms, frozenset(), True)], 1, 1
    graph = build_dependency_graph(program)
    if options.mode == "no-decomposition":
        needed, report = needs_ufs_check(program, graph=graph)
        required = report.cyclic_input_atoms if options.ca_restriction else frozenset()
        return [ScopedCheck("Π", program, program.atoms, required, needed)], 1, int(needed)

    partition = scc_partition(program, graph)
    checks = []
    for i, (component, sub) in enumerate(zip(partition.components, partition.programs), start=1):
        needed, report = needs_ufs_check(sub, scope=component)
        required = report.cyclic_input_atoms if options.ca_restriction else frozenset()
        checks.append(ScopedCheck(f"C{i}", sub, component, required, needed))
    return checks, len(checks), sum(1 for c in checks if c.searched)


def check_candidate(interpretation: Interpretation, checks: Sequence[ScopedCheck],
                    registry: OracleRegistry, ufs_cap: int) -> CandidateResult:
    """
    Run the planned searches for one compatible set, stopping at the first
    unfounded set. A check counts as skipped when the criterion exempts it
    or when it has nothing to search.
    """
    result = CandidateResult(interpretation, stats=SearchStats())
    started = time.perf_counter()
    try:
        _run_checks(result, checks, registry, ufs_cap)
    finally:
        result.elapsed_ms = (time.perf_counter() - started) * 1000
    return result


def _run_checks(result: CandidateResult, checks: Sequence[ScopedCheck],
                registry: OracleRegistry, ufs_cap: int) -> None:
    interpretation = result.interpretation
    for check in checks:
        domain = check.atoms & interpretation.true_atoms
        seeds = domain & check.required_hit if check.required_hit else domain
        if not check.searched or not seeds:
            result.skipped += 1
            continue
        result.runs += 1
        before = result.stats.expansions
        query = UfsQuery(check.program, interpretation, domain, check.required_hit)
        witness = find_unfounded_set(query, registry, ufs_cap, result.stats)
        log_ufs_result(logger, check.name, format_atom_set(witness) if witness else None,
                       result.stats.expansions - before)
        if witness:
            result.witness = witness
            return


def _candidate_stream(program: Program, registry: OracleRegistry, options: EvaluationOptions,
                      guessing: GuessingProgram,
                      checks: Sequence[ScopedCheck]) -> Iterator[Tuple[CompatibleSet, CandidateResult]]:
    compatible = enumerate_compatible_sets(program, registry, options.engine, guessing, options.exhaustive_cap)
    if options.workers == 1:
        for cs in compatible:
            yield cs, check_candidate(cs.projected, checks, registry, options.ufs_cap)
        return
    batch_size = options.workers * 4
    with ThreadPoolExecutor(max_workers=options.workers) as executor:
        while True:
            batch = list(itertools.islice(compatible, batch_size))
            if not batch:
                return
            results = executor.map(
                lambda cs: check_candidate(cs.projected, checks, registry, options.ufs_cap), batch
            )
            yield from zip(batch, results)


def _evaluate_brute(program: Program, registry: OracleRegistry, options: EvaluationOptions,
                    report: EvaluationReport) -> None:
    atoms = program.sorted_atoms
    if len(atoms) > options.flp_cap:
        raise CapExceededError("brute-force universe", len(atoms), options.flp_cap)
    universe = frozenset(atoms)
    for values in itertools.product((False, True), repeat=len(atoms)):
        candidate = Interpretation(frozenset(a for a, v in zip(atoms, values) if v), universe)
        if is_model(program, candidate, registry) and is_flp_answer_set(program, candidate, registry, options.flp_cap):
            report.answer_sets.append(candidate.true_atoms)
            if options.max_answers and len(report.answer_sets) >= options.max_answers:
                return


def evaluate(program: Program, registry: OracleRegistry,
             options: Optional[EvaluationOptions] = None) -> EvaluationReport:
    """
    Compute the FLP answer sets of a ground program.

    Args:
        program: Ground HEX-program
        registry: Registry binding every external atom of the program
        options: Evaluation options (defaults from the configuration)

    Returns:
        EvaluationReport: Answer sets in enumeration order plus counters

    Raises:
        CapExceededError: a size cap was exceeded
        OracleError: an oracle failed
    """
    options = options or EvaluationOptions()
    report = EvaluationReport(mode=options.mode, engine=options.engine)
    started = time.perf_counter()

    if options.mode == "brute":
        _evaluate_brute(program, registry, options, report)
        report.phase_times_ms["total"] = (time.perf_counter() - started) * 1000
        return report

    t0 = time.perf_counter()
    guessing = build_guessing_program(program)
    checks, report.components_total, report.components_ecyclic = plan_checks(program, options)
    report.phase_times_ms["analysis"] = (time.perf_counter() - t0) * 1000

    ufs_ms = 0.0
    stream = _candidate_stream(program, registry, options, guessing, checks)
    for index, (cs, result) in enumerate(stream, start=1):
        report.compatible_sets += 1
        report.ufs_searches_run += result.runs
        report.ufs_searches_skipped += result.skipped
        report.search_node_expansions += result.stats.expansions
        ufs_ms += result.elapsed_ms
        log_candidate(logger, index, format_atom_set(cs.projected.true_atoms), result.accepted,
                      format_atom_set(result.witness) if result.witness else None)
        if result.accepted:
            report.answer_sets.append(cs.projected.true_atoms)
            if options.max_answers and len(report.answer_sets) >= options.max_answers:
                break
        else:
            report.candidates_rejected += 1

    total = (time.perf_counter() - started) * 1000
    report.phase_times_ms["ufs_search"] = ufs_ms
    report.phase_times_ms["guess_and_check"] = max(0.0, total - report.phase_times_ms["analysis"] - ufs_ms)
    report.phase_times_ms["total"] = total
    return report


def verify(program: Program, registry: OracleRegistry,
           options: Optional[EvaluationOptions] = None) -> List[str]:
    """
    Compare the answer sets of full mode with brute mode.

    Returns:
        list: Human-readable discrepancies (empty when both agree)
    """
    options = options or EvaluationOptions()
    full = evaluate(program, registry, options.model_copy(update={"mode": "full", "max_answers": None}))
    brute = evaluate(program, registry, options.model_copy(update={"mode": "brute", "max_answers": None}))
    found, expected = set(full.answer_sets), set(brute.answer_sets)
    discrepancies = [f"spurious answer set {format_atom_set(a)}" for a in sorted(found - expected, key=format_atom_set)]
    discrepancies += [f"missing answer set {format_atom_set(a)}" for a in sorted(expected - found, key=format_atom_set)]
    return discrepancies


def run_benchmark(spec: InstanceSpec, modes: Sequence[str] = ("full", "no-decomposition", "no-criterion"),
                  options: Optional[EvaluationOptions] = None, progress: bool = False) -> List[Dict]:
    """
    Evaluate one generated instance in several modes and collect counters.

    The UFS domain cap is raised to the instance's atom count so that the
    global modes can run.

    Returns:
        list: One row per mode with the stats fields and total_ms
    """
    program = generate_instance(spec.m, spec.k, spec.s, spec.seed)
    options = options or EvaluationOptions()
    options = options.model_copy(update={"ufs_cap": max(options.ufs_cap, len(program.atoms))})
    rows = []
    for mode in tqdm(modes, desc="modes", disable=not progress):
        report = evaluate(program, default_registry(), options.model_copy(update={"mode": mode}))
        row = report.to_stats()
        row["total_ms"] = report.phase_times_ms.get("total", 0.0)
        row["instance"] = f"m={spec.m},k={spec.k},s={spec.s},seed={spec.seed}"
        log_benchmark_row(logger, row)
        rows.append(row)
    return rows

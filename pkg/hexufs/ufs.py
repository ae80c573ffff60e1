"""
Unfounded sets and the FLP semantics.

X is unfounded for Π wrt. a complete A if every rule r with H(r) ∩ X ≠ ∅
satisfies at least one of

  (i)   some body literal of r is false under A,
  (ii)  some body literal of r is false under A with X forced false,
  (iii) some atom of H(r) \\ X is true under A.

A model is an FLP answer set iff no unfounded set meets its true atoms; the
brute-force FLP check below is kept as an independent oracle.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, Optional, Tuple

from hexufs import config
from hexufs.depgraph import DependencyGraph, build_dependency_graph
from hexufs.errors import CapExceededError, HexError, PreconditionError
from hexufs.external_sources import OracleRegistry
from hexufs.interpretation import Interpretation, body_true, is_model, satisfies
from hexufs.syntax import OrdinaryAtom, Program, Rule, format_atom_set

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlpReduct:
    rules: Tuple[Rule, ...]

    @property
    def program(self) -> Program:
        return Program(self.rules)


def flp_reduct(program: Program, interpretation: Interpretation, registry: OracleRegistry) -> FlpReduct:
    """fΠ^A: the rules of Π whose whole body is true under A."""
    return FlpReduct(tuple(r for r in program.rules if body_true(r, interpretation, registry)))


def is_flp_answer_set(program: Program, interpretation: Interpretation, registry: OracleRegistry,
                      cap: int = config.FLP_ATOM_CAP) -> bool:
    """
    Brute-force FLP check: A is a model of fΠ^A and no interpretation with
    strictly fewer true atoms of A(Π) is.

    Raises:
        CapExceededError: A(Π) is larger than cap
    """
    size = len(program.atoms)
    if size > cap:
        raise CapExceededError("FLP universe", size, cap)
    reduct = flp_reduct(program, interpretation, registry).program
    if not is_model(reduct, interpretation, registry):
        return False
    true = sorted(interpretation.true_atoms & program.atoms)
    for n in range(len(true)):
        for subset in itertools.combinations(true, n):
            smaller = Interpretation(frozenset(subset), interpretation.universe)
            if is_model(reduct, smaller, registry):
                return False
    return True


def _input_atoms(program: Program, rule: Rule) -> FrozenSet[OrdinaryAtom]:
    by_predicate = program.atoms_by_predicate
    return frozenset(
        atom
        for lit in rule.external_literals
        for predicate in lit.payload.predicate_inputs
        for atom in by_predicate.get(predicate, ())
    )


class _Checker:
    """Evaluates the three conditions for a fixed program and interpretation."""

    def __init__(self, program: Program, interpretation: Interpretation, registry: OracleRegistry):
        self.program = program
        self.interpretation = interpretation
        self.registry = registry
        self._body_false = {}

    def body_false(self, rule: Rule) -> bool:
        if rule not in self._body_false:
            self._body_false[rule] = not body_true(rule, self.interpretation, self.registry)
        return self._body_false[rule]

    def violating_rule(self, atoms: FrozenSet[OrdinaryAtom]) -> Optional[Rule]:
        """First rule (program order) with a head atom in X that meets none of the conditions."""
        overridden = None
        for rule in self.program.rules:
            if not atoms.intersection(rule.head):
                continue
            if self.body_false(rule):
                continue
            if any(self.interpretation.is_true(h) for h in rule.head if h not in atoms):
                continue
            if overridden is None:
                overridden = self.interpretation.without(atoms)
            if not all(satisfies(overridden, lit, self.registry) for lit in rule.body):
                continue
            return rule
        return None


def is_unfounded_set(program: Program, interpretation: Interpretation,
                     atoms: Iterable[OrdinaryAtom], registry: OracleRegistry) -> bool:
    """
    Check whether X is an unfounded set of Π wrt. A.

    Raises:
        PreconditionError: X is not a subset of A(Π)
    """
    atoms = frozenset(atoms)
    stray = atoms - program.atoms
    if stray:
        raise PreconditionError(f"atoms outside A(Π): {format_atom_set(stray)}")
    return _Checker(program, interpretation, registry).violating_rule(atoms) is None


@dataclass(frozen=True)
class UfsQuery:
    """Search for a nonempty X ⊆ domain ∩ A^T meeting required_hit (if nonempty)."""

    program: Program
    interpretation: Interpretation
    domain: FrozenSet[OrdinaryAtom]
    required_hit: FrozenSet[OrdinaryAtom] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "domain", frozenset(self.domain))
        object.__setattr__(self, "required_hit", frozenset(self.required_hit))
        stray = self.domain - self.program.atoms
        if stray:
            raise PreconditionError(f"search domain outside A(Π): {format_atom_set(stray)}")

    @property
    def search_domain(self) -> FrozenSet[OrdinaryAtom]:
        return self.domain & self.interpretation.true_atoms


@dataclass
class SearchStats:
    searches: int = 0
    expansions: int = 0

    def add(self, other: "SearchStats") -> None:
        self.searches += other.searches
        self.expansions += other.expansions


def _order(atoms: FrozenSet[OrdinaryAtom]) -> Tuple[str, ...]:
    return tuple(sorted(a.key for a in atoms))


def find_unfounded_set(query: UfsQuery, registry: OracleRegistry,
                       cap: int = config.UFS_DOMAIN_CAP,
                       stats: Optional[SearchStats] = None) -> Optional[FrozenSet[OrdinaryAtom]]:
    """
    Search for an unfounded set, smallest first.

    Candidates grow from seed atoms (the required-hit atoms of the domain,
    else every domain atom). A candidate that leaves some rule r violating
    all three conditions is only extended by the positive ordinary body atoms
    of r or the atoms read by r's external atoms; every unfounded superset
    must contain one of them. Levels are processed by cardinality in
    lexicographic order, so the first hit is a minimum-size, lexicographically
    least witness.

    Args:
        query: The search query
        registry: Oracle registry
        cap: Largest admissible search domain
        stats: Counters updated in place (one expansion per candidate)

    Returns:
        frozenset or None: An unfounded set, or None if none exists

    Raises:
        CapExceededError: the domain intersected with A^T exceeds cap
    """
    stats = stats if stats is not None else SearchStats()
    stats.searches += 1
    domain = query.search_domain
    if len(domain) > cap:
        raise CapExceededError("UFS search domain", len(domain), cap)
    seeds = domain & query.required_hit if query.required_hit else domain
    if not seeds:
        return None

    checker = _Checker(query.program, query.interpretation, registry)
    level = sorted((frozenset([a]) for a in seeds), key=_order)
    visited = set(level)
    while level:
        following = set()
        for candidate in level:
            stats.expansions += 1
            rule = checker.violating_rule(candidate)
            if rule is None:
                logger.debug(f"Unfounded set {format_atom_set(candidate)} after {stats.expansions} expansions")
                return candidate
            growth = (frozenset(rule.positive_atoms) | _input_atoms(query.program, rule)) & domain
            for atom in growth - candidate:
                extended = candidate | {atom}
                if extended not in visited:
                    visited.add(extended)
                    following.add(extended)
        level = sorted(following, key=_order)
    return None


def is_unfounded_free(program: Program, interpretation: Interpretation, registry: OracleRegistry,
                      cap: int = config.UFS_DOMAIN_CAP) -> bool:
    """True iff no unfounded set of Π meets the true atoms of A."""
    query = UfsQuery(program, interpretation, interpretation.true_atoms & program.atoms)
    return find_unfounded_set(query, registry, cap) is None


def enumerate_unfounded_sets(program: Program, interpretation: Interpretation, registry: OracleRegistry,
                             atoms: Optional[Iterable[OrdinaryAtom]] = None) -> Iterator[FrozenSet[OrdinaryAtom]]:
    """Every unfounded subset of `atoms` (default A(Π)), smallest first; brute force."""
    pool = sorted(program.atoms if atoms is None else set(atoms))
    checker = _Checker(program, interpretation, registry)
    for n in range(len(pool) + 1):
        for subset in itertools.combinations(pool, n):
            candidate = frozenset(subset)
            if checker.violating_rule(candidate) is None:
                yield candidate


def is_cut(program: Program, unfounded: Iterable[OrdinaryAtom], cut: Iterable[OrdinaryAtom],
           graph: Optional[DependencyGraph] = None) -> bool:
    """
    C ⊆ U is a cut if no e-edge leads from U into C and no ordinary edge
    connects C and U \\ C in either direction.

    Raises:
        PreconditionError: C is not a subset of U
    """
    unfounded, cut = frozenset(unfounded), frozenset(cut)
    if not cut <= unfounded:
        raise PreconditionError("cut must be a subset of the unfounded set")
    graph = graph or build_dependency_graph(program)
    if any(u in unfounded and v in cut for u, v in graph.e_edges):
        return False
    rest = unfounded - cut
    return not any(
        (u in cut and v in rest) or (u in rest and v in cut)
        for u, v in graph.ordinary_edges
    )


def reduce_by_cut(program: Program, interpretation: Interpretation, unfounded: Iterable[OrdinaryAtom],
                  cut: Iterable[OrdinaryAtom], registry: OracleRegistry) -> FrozenSet[OrdinaryAtom]:
    """
    Remove a cut from an unfounded set; the remainder stays unfounded.

    Raises:
        PreconditionError: U is not unfounded or C is not a cut of U
    """
    unfounded, cut = frozenset(unfounded), frozenset(cut)
    if not is_unfounded_set(program, interpretation, unfounded, registry):
        raise PreconditionError(f"{format_atom_set(unfounded)} is not unfounded")
    if not is_cut(program, unfounded, cut):
        raise PreconditionError(f"{format_atom_set(cut)} is not a cut of {format_atom_set(unfounded)}")
    reduced = unfounded - cut
    if not is_unfounded_set(program, interpretation, reduced, registry):
        raise HexError(f"cut removal left founded set {format_atom_set(reduced)}")
    return reduced

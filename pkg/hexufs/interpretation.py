"""
Assignments, interpretations and satisfaction.

An Assignment is a consistent set of signed literals Ta / Fa. An
Interpretation is complete over its universe and stored as the set of its
true atoms; every other universe atom is false.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Set, Tuple

from hexufs.errors import PreconditionError
from hexufs.syntax import BodyLiteral, Constant, OrdinaryAtom, Program, Rule, format_atom_set


@dataclass(frozen=True)
class SignedLiteral:
    atom: OrdinaryAtom
    value: bool

    def __str__(self) -> str:
        return ("T " if self.value else "F ") + str(self.atom)


@dataclass(frozen=True)
class Assignment:
    literals: FrozenSet[SignedLiteral] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "literals", frozenset(self.literals))
        clash = self.true_atoms & self.false_atoms
        if clash:
            raise PreconditionError(
                f"inconsistent assignment on {format_atom_set(clash)}"
            )

    @classmethod
    def of(cls, true: Iterable[OrdinaryAtom] = (), false: Iterable[OrdinaryAtom] = ()) -> "Assignment":
        return cls(
            frozenset(SignedLiteral(a, True) for a in true)
            | frozenset(SignedLiteral(a, False) for a in false)
        )

    @cached_property
    def true_atoms(self) -> FrozenSet[OrdinaryAtom]:
        return frozenset(l.atom for l in self.literals if l.value)

    @cached_property
    def false_atoms(self) -> FrozenSet[OrdinaryAtom]:
        return frozenset(l.atom for l in self.literals if not l.value)

    def is_complete_over(self, universe: Iterable[OrdinaryAtom]) -> bool:
        assigned = self.true_atoms | self.false_atoms
        return all(a in assigned for a in universe)


@dataclass(frozen=True)
class Interpretation:
    """A complete assignment over `universe`, identified with its true atoms."""

    true_atoms: FrozenSet[OrdinaryAtom]
    universe: FrozenSet[OrdinaryAtom]

    def __post_init__(self):
        object.__setattr__(self, "true_atoms", frozenset(self.true_atoms))
        object.__setattr__(self, "universe", frozenset(self.universe))
        stray = self.true_atoms - self.universe
        if stray:
            raise PreconditionError(
                f"true atoms outside the universe: {format_atom_set(stray)}"
            )

    @classmethod
    def over(cls, program: Program, true_atoms: Iterable[OrdinaryAtom] = ()) -> "Interpretation":
        return cls(frozenset(true_atoms), program.atoms)

    @classmethod
    def from_assignment(cls, assignment: Assignment, universe: Iterable[OrdinaryAtom]) -> "Interpretation":
        universe = frozenset(universe)
        if not assignment.is_complete_over(universe):
            raise PreconditionError("assignment is not complete over the universe")
        return cls(assignment.true_atoms & universe, universe)

    @cached_property
    def false_atoms(self) -> FrozenSet[OrdinaryAtom]:
        return self.universe - self.true_atoms

    @cached_property
    def true_by_predicate(self) -> Dict[str, Set[Tuple[Constant, ...]]]:
        index: Dict[str, Set[Tuple[Constant, ...]]] = {}
        for atom in self.true_atoms:
            index.setdefault(atom.predicate, set()).add(tuple(atom.args))
        return index

    def is_true(self, atom: OrdinaryAtom) -> bool:
        # atoms outside the universe are false
        return atom in self.true_atoms

    def without(self, atoms: Iterable[OrdinaryAtom]) -> "Interpretation":
        """The interpretation A ∪̇¬ X: all atoms of X forced false."""
        return Interpretation(self.true_atoms - frozenset(atoms), self.universe)

    def restrict(self, universe: Iterable[OrdinaryAtom]) -> "Interpretation":
        universe = frozenset(universe)
        return Interpretation(self.true_atoms & universe, universe)

    def to_assignment(self) -> Assignment:
        return Assignment.of(true=self.true_atoms, false=self.false_atoms)

    def __str__(self) -> str:
        return format_atom_set(self.true_atoms)


def override_false(assignment: Assignment, atoms: Iterable[OrdinaryAtom]) -> Assignment:
    """
    Compute A ∪̇¬ X = (A \\ {Ta | a ∈ X}) ∪ {Fa | a ∈ X}.

    Args:
        assignment: The assignment A
        atoms: The atom set X

    Returns:
        Assignment: A with every atom of X set false
    """
    atoms = frozenset(atoms)
    kept = frozenset(l for l in assignment.literals if not (l.value and l.atom in atoms))
    return Assignment(kept | frozenset(SignedLiteral(a, False) for a in atoms))


def extension(predicate: str, assignment) -> Set[Tuple[Constant, ...]]:
    """
    ext(q, A): argument tuples of the true q-atoms.

    Accepts an Assignment or an Interpretation. A true 0-ary atom yields the
    single empty tuple.
    """
    if isinstance(assignment, Interpretation):
        return set(assignment.true_by_predicate.get(predicate, ()))
    return {tuple(a.args) for a in assignment.true_atoms if a.predicate == predicate}


def satisfies(interpretation: Interpretation, literal: BodyLiteral, registry) -> bool:
    """
    Truth value of a body literal under a complete interpretation.

    Ordinary atoms are looked up, external atoms are handed to the registry's
    oracle, and default negation inverts the result.

    Args:
        interpretation: Complete interpretation
        literal: The body literal
        registry: OracleRegistry binding external atom names

    Returns:
        bool: Whether the literal is true
    """
    if literal.is_external:
        value = registry.evaluate_ref(literal.payload, interpretation)
    else:
        value = interpretation.is_true(literal.payload)
    return not value if literal.naf else value


def body_true(rule: Rule, interpretation: Interpretation, registry) -> bool:
    return all(satisfies(interpretation, lit, registry) for lit in rule.body)


def rule_satisfied(rule: Rule, interpretation: Interpretation, registry) -> bool:
    if any(interpretation.is_true(a) for a in rule.head):
        return True
    return not body_true(rule, interpretation, registry)


def is_model(program: Program, interpretation: Interpretation, registry) -> bool:
    """True iff every rule of the program is satisfied by the interpretation."""
    return all(rule_satisfied(rule, interpretation, registry) for rule in program.rules)

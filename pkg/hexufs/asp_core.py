"""
Ordinary ASP machinery: the guessing program, the GL reduct, answer-set
enumeration with two engines, and compatible-set checking.

Both engines visit interpretations in the same deterministic order: atoms
sorted by name, false before true, first atom most significant. The
`exhaustive` engine walks all 2^n interpretations; the `propagate` engine is
a branch-and-bound search with unit and support propagation. Every complete
candidate then goes through the same model, support and minimality checks.
"""

import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from hexufs import config
from hexufs.errors import CapExceededError, NamingCollisionError, PreconditionError
from hexufs.external_sources import OracleRegistry
from hexufs.interpretation import Interpretation
from hexufs.syntax import (
    BodyLiteral,
    ExternalAtomRef,
    OrdinaryAtom,
    Program,
    Rule,
    format_atom_set,
)

logger = logging.getLogger(__name__)

ENGINES = ("exhaustive", "propagate")


def _flatten(text: str) -> str:
    return re.sub(r"\W", lambda m: f"_x{ord(m.group()):x}_", text)


def replacement_predicate(ref: ExternalAtomRef, prefix: str = config.REPLACEMENT_PREFIX) -> str:
    """Canonical predicate name of the replacement atom of &g[inputs]."""
    parts = [ref.name] + [_flatten(str(i)) for i in ref.inputs]
    return prefix + "_".join(parts)


@dataclass(frozen=True)
class GuessingProgram:
    """
    The ordinary program Π̂ with its replacement map.

    `replacements` maps each ground external atom &g[p](c) to the pair
    (e_&g[p](c), ne_&g[p](c)).
    """

    program: Program
    source: Program
    replacements: Dict[ExternalAtomRef, Tuple[OrdinaryAtom, OrdinaryAtom]] = field(default_factory=dict)

    @property
    def replacement_atoms(self) -> frozenset:
        return frozenset(a for pair in self.replacements.values() for a in pair)

    def replacement_of(self, ref: ExternalAtomRef) -> OrdinaryAtom:
        return self.replacements[ref][0]


def build_guessing_program(program: Program) -> GuessingProgram:
    """
    Replace every external atom by its replacement atom (same polarity) and
    add one guess rule `e | ne.` per replacement atom.

    Raises:
        PreconditionError: the program is not ground
        NamingCollisionError: a source atom uses a reserved prefix, or two
            external atoms flatten to the same name
    """
    if not program.is_ground:
        raise PreconditionError("guessing program requires a ground program")
    for predicate in program.predicates:
        if predicate.startswith((config.REPLACEMENT_PREFIX, config.COMPANION_PREFIX)):
            raise NamingCollisionError(f"atom {predicate} uses a reserved replacement prefix")

    replacements: Dict[ExternalAtomRef, Tuple[OrdinaryAtom, OrdinaryAtom]] = {}
    owners: Dict[str, Tuple] = {}
    for ref in program.external_atoms:
        name = replacement_predicate(ref)
        owner = (ref.name, ref.inputs)
        if owners.setdefault(name, owner) != owner:
            raise NamingCollisionError(f"external atoms {ref} and &{owners[name][0]} share replacement {name}")
        companion = replacement_predicate(ref, config.COMPANION_PREFIX)
        replacements[ref] = (OrdinaryAtom(name, tuple(ref.outputs)), OrdinaryAtom(companion, tuple(ref.outputs)))

    rules: List[Rule] = []
    for rule in program.rules:
        body = tuple(
            BodyLiteral(replacements[lit.payload][0], lit.naf) if lit.is_external else lit
            for lit in rule.body
        )
        rules.append(Rule(rule.head, body))
    rules.extend(Rule(pair) for pair in replacements.values())
    guessing = GuessingProgram(Program.from_rules(rules), program, replacements)
    logger.debug(f"Guessing program: {len(guessing.program)} rules, {len(replacements)} replacement atoms")
    return guessing


@dataclass(frozen=True)
class ReductRule:
    """A positive rule of a GL reduct; an empty head makes a constraint."""

    head: Tuple[OrdinaryAtom, ...]
    body: Tuple[OrdinaryAtom, ...] = ()

    def __str__(self) -> str:
        head = " | ".join(map(str, self.head))
        body = ", ".join(map(str, self.body))
        return f"{head} :- {body}." if body else f"{head}."


def _require_ordinary(program: Program) -> None:
    if program.has_external_atoms:
        raise PreconditionError("program still contains external atoms")


def gl_reduct(program: Program, interpretation: Interpretation) -> Tuple[ReductRule, ...]:
    """
    Gelfond-Lifschitz reduct: drop rules with a true default-negated atom and
    strip the remaining default-negated literals.

    Raises:
        PreconditionError: the program contains external atoms
    """
    _require_ordinary(program)
    reduct = []
    for rule in program.rules:
        if any(interpretation.is_true(a) for a in rule.negative_atoms):
            continue
        reduct.append(ReductRule(rule.head, rule.positive_atoms))
    return tuple(reduct)


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


class CompiledProgram:
    """Bitmask form of an ordinary program; atom i of the sorted universe is bit i."""

    def __init__(self, program: Program):
        _require_ordinary(program)
        self.atoms = program.sorted_atoms
        self.index = {atom: i for i, atom in enumerate(self.atoms)}
        self.size = len(self.atoms)
        self.full = (1 << self.size) - 1
        self.rules: List[Tuple[int, int, int]] = []
        for rule in program.rules:
            self.rules.append((
                self.mask(rule.head),
                self.mask(rule.positive_atoms),
                self.mask(rule.negative_atoms),
            ))
        self.heads_of: List[List[int]] = [[] for _ in range(self.size)]
        for r, (head, _, _) in enumerate(self.rules):
            for i in self.bits(head):
                self.heads_of[i].append(r)

    def mask(self, atoms) -> int:
        m = 0
        for atom in atoms:
            m |= 1 << self.index[atom]
        return m

    def bits(self, mask: int) -> List[int]:
        return [i for i in range(self.size) if mask >> i & 1]

    def to_interpretation(self, mask: int) -> Interpretation:
        return Interpretation(frozenset(self.atoms[i] for i in self.bits(mask)), frozenset(self.atoms))

    def is_model(self, true: int) -> bool:
        for head, pos, neg in self.rules:
            if pos & ~true == 0 and neg & true == 0 and head & true == 0:
                return False
        return True

    def is_supported(self, true: int) -> bool:
        """Every true atom is the only true head atom of some rule with a true body."""
        supported = 0
        for head, pos, neg in self.rules:
            hit = head & true
            if hit and pos & ~true == 0 and neg & true == 0 and hit & (hit - 1) == 0:
                supported |= hit
        return supported == true

    def is_minimal(self, true: int) -> bool:
        """
        No proper subset of `true` is a model of the reduct wrt. `true`.

        Atoms forced in every such model are closed first; only the remaining
        atoms are enumerated.
        """
        relevant = [
            (head & true, pos)
            for head, pos, neg in self.rules
            if head and pos & ~true == 0 and neg & true == 0
        ]
        forced = 0
        changed = True
        while changed:
            changed = False
            for head, pos in relevant:
                if pos & ~forced == 0 and head & ~forced and head & (head - 1) == 0:
                    forced |= head
                    changed = True
        rest = true & ~forced
        if rest == 0:
            return True
        subset = (rest - 1) & rest
        while True:
            candidate = forced | subset
            if all(pos & ~candidate or head & candidate for head, pos in relevant):
                return False
            if subset == 0:
                return True
            subset = (subset - 1) & rest

    def is_answer_set(self, true: int) -> bool:
        return self.is_model(true) and self.is_supported(true) and self.is_minimal(true)


def _exhaustive(compiled: CompiledProgram) -> Iterator[int]:
    for values in itertools.product((False, True), repeat=compiled.size):
        true = 0
        for i, value in enumerate(values):
            if value:
                true |= 1 << i
        if compiled.is_answer_set(true):
            yield true


def _propagate(compiled: CompiledProgram, true: int, false: int) -> Optional[Tuple[int, int]]:
    """Unit propagation on rule clauses plus support propagation; None on conflict."""
    changed = True
    while changed:
        changed = False
        assigned = true | false
        for head, pos, neg in compiled.rules:
            positive = head | neg
            if positive & pos:
                continue  # tautology
            if positive & true or pos & false:
                continue
            open_pos = positive & ~assigned
            open_neg = pos & ~assigned
            count = _popcount(open_pos) + _popcount(open_neg)
            if count == 0:
                return None
            if count == 1:
                if open_pos:
                    true |= open_pos
                else:
                    false |= open_neg
                assigned = true | false
                changed = True
        for i in range(compiled.size):
            bit = 1 << i
            if false & bit:
                continue
            supportable = False
            for r in compiled.heads_of[i]:
                head, pos, neg = compiled.rules[r]
                if pos & false or neg & true or (head & ~bit) & true:
                    continue
                supportable = True
                break
            if not supportable:
                if true & bit:
                    return None
                false |= bit
                changed = True
    return true, false


def _branch(compiled: CompiledProgram, true: int, false: int) -> Iterator[int]:
    state = _propagate(compiled, true, false)
    if state is None:
        return
    true, false = state
    open_atoms = compiled.full & ~(true | false)
    if open_atoms == 0:
        if compiled.is_answer_set(true):
            yield true
        return
    bit = open_atoms & -open_atoms
    yield from _branch(compiled, true, false | bit)
    yield from _branch(compiled, true | bit, false)


def enumerate_answer_sets(program: Program, engine: str = config.DEFAULT_ENGINE,
                          cap: int = config.EXHAUSTIVE_ATOM_CAP) -> Iterator[Interpretation]:
    """
    Stream the answer sets of an ordinary program.

    Args:
        program: Ordinary (external-free) program
        engine: "exhaustive" or "propagate"
        cap: Largest universe the exhaustive engine accepts

    Yields:
        Interpretation: Answer sets, in lexicographic false-first order

    Raises:
        CapExceededError: exhaustive engine on a universe larger than cap
        PreconditionError: external atoms present or unknown engine
    """
    if engine not in ENGINES:
        raise PreconditionError(f"unknown engine '{engine}'")
    compiled = CompiledProgram(program)
    if engine == "exhaustive":
        if compiled.size > cap:
            raise CapExceededError("answer-set universe", compiled.size, cap)
        masks = _exhaustive(compiled)
    else:
        masks = _branch(compiled, 0, 0)
    for mask in masks:
        yield compiled.to_interpretation(mask)


def project(interpretation: Interpretation, program: Program) -> Interpretation:
    """Drop replacement atoms: restrict Â to A(Π)."""
    return interpretation.restrict(program.atoms)


def check_compatible(program: Program, guessing: GuessingProgram,
                     interpretation: Interpretation, registry: OracleRegistry) -> bool:
    """
    True iff each replacement atom of Â is true exactly when its oracle is
    true under Â restricted to the ordinary atoms of Π.
    """
    projected = project(interpretation, program)
    for ref, (replacement, _) in guessing.replacements.items():
        if registry.evaluate_ref(ref, projected) != interpretation.is_true(replacement):
            return False
    return True


def compatible_extension(guessing: GuessingProgram, interpretation: Interpretation,
                         registry: OracleRegistry) -> Interpretation:
    """Extend A over A(Π) to Â over A(Π̂) by setting every guess to its oracle value."""
    projected = project(interpretation, guessing.source)
    true = set(projected.true_atoms)
    for ref, (replacement, companion) in guessing.replacements.items():
        true.add(replacement if registry.evaluate_ref(ref, projected) else companion)
    return Interpretation(frozenset(true), guessing.program.atoms)


@dataclass(frozen=True)
class CompatibleSet:
    interpretation: Interpretation
    projected: Interpretation

    def __str__(self) -> str:
        return format_atom_set(self.interpretation.true_atoms)


def enumerate_compatible_sets(program: Program, registry: OracleRegistry,
                              engine: str = config.DEFAULT_ENGINE,
                              guessing: Optional[GuessingProgram] = None,
                              cap: int = config.EXHAUSTIVE_ATOM_CAP) -> Iterator[CompatibleSet]:
    """
    Answer sets of Π̂ that pass check_compatible.

    Yields:
        CompatibleSet: Â together with its projection onto A(Π)
    """
    guessing = guessing or build_guessing_program(program)
    for candidate in enumerate_answer_sets(guessing.program, engine, cap):
        if check_compatible(program, guessing, candidate, registry):
            yield CompatibleSet(candidate, project(candidate, program))
        else:
            logger.debug(f"Guess mismatch, dropping {candidate}")

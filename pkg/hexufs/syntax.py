"""
Data model of (ground) HEX-programs.

A program is a deduplicated sequence of rules. A rule has a set of ordinary
head atoms and a sequence of body literals; a body literal wraps either an
ordinary atom or an external atom &g[inputs](outputs), possibly under default
negation. All types are immutable and hashable.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Tuple, Union

from hexufs.errors import PreconditionError

# Constants are interned by their surface token: `a`, `"a b"`, `42`.
Constant = str


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Constant, Variable]


def is_ground_term(term: Term) -> bool:
    return not isinstance(term, Variable)


def constant_value(constant: Constant) -> str:
    """
    Return the string value of a constant (quotes of string constants removed).

    Args:
        constant: Surface token of the constant

    Returns:
        str: The unquoted value
    """
    if len(constant) >= 2 and constant[0] == '"' and constant[-1] == '"':
        return constant[1:-1]
    return constant


@dataclass(frozen=True)
class OrdinaryAtom:
    """An atom p(c1, ..., cl); `strong_negation` marks a classical literal -p(...)."""

    predicate: str
    args: Tuple[Term, ...] = ()
    strong_negation: bool = False

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return all(is_ground_term(t) for t in self.args)

    @cached_property
    def key(self) -> str:
        return format_atom(self)

    def __str__(self) -> str:
        return self.key

    def __lt__(self, other: "OrdinaryAtom") -> bool:
        return self.key < other.key


@dataclass(frozen=True)
class PredicateInput:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ConstantInput:
    term: Term

    def __str__(self) -> str:
        return str(self.term)


InputTerm = Union[PredicateInput, ConstantInput]


@dataclass(frozen=True)
class ExternalAtomRef:
    """An external atom &name[inputs](outputs)."""

    name: str
    inputs: Tuple[InputTerm, ...] = ()
    outputs: Tuple[Term, ...] = ()

    @property
    def predicate_inputs(self) -> Tuple[str, ...]:
        return tuple(i.name for i in self.inputs if isinstance(i, PredicateInput))

    @property
    def constant_inputs(self) -> Tuple[Term, ...]:
        return tuple(i.term for i in self.inputs if isinstance(i, ConstantInput))

    @property
    def is_ground(self) -> bool:
        return all(is_ground_term(t) for t in self.constant_inputs + tuple(self.outputs))

    @cached_property
    def key(self) -> str:
        return format_external(self)

    def __str__(self) -> str:
        return self.key


@dataclass(frozen=True)
class BodyLiteral:
    payload: Union[OrdinaryAtom, ExternalAtomRef]
    naf: bool = False

    @property
    def is_external(self) -> bool:
        return isinstance(self.payload, ExternalAtomRef)

    def __str__(self) -> str:
        return format_literal(self)


@dataclass(frozen=True)
class Rule:
    """
    A rule h1 | ... | hk :- b1, ..., bn.

    The head is normalized to a sorted duplicate-free tuple, the body keeps its
    order with duplicate literals removed. An empty head makes a constraint.
    """

    head: Tuple[OrdinaryAtom, ...] = ()
    body: Tuple[BodyLiteral, ...] = ()

    def __post_init__(self):
        if not self.head and not self.body:
            raise PreconditionError("rule with empty head and empty body")
        object.__setattr__(self, "head", tuple(sorted(set(self.head))))
        object.__setattr__(self, "body", tuple(dict.fromkeys(self.body)))

    @property
    def is_constraint(self) -> bool:
        return not self.head

    @property
    def is_fact(self) -> bool:
        return not self.body

    @cached_property
    def positive_atoms(self) -> Tuple[OrdinaryAtom, ...]:
        """B+ restricted to ordinary atoms."""
        return tuple(l.payload for l in self.body if not l.naf and not l.is_external)

    @cached_property
    def negative_atoms(self) -> Tuple[OrdinaryAtom, ...]:
        return tuple(l.payload for l in self.body if l.naf and not l.is_external)

    @cached_property
    def external_literals(self) -> Tuple[BodyLiteral, ...]:
        return tuple(l for l in self.body if l.is_external)

    @property
    def is_ground(self) -> bool:
        return all(a.is_ground for a in self.head) and all(
            l.payload.is_ground for l in self.body
        )

    def __str__(self) -> str:
        return format_rule(self)


@dataclass(frozen=True)
class Program:
    """A sequence of rules, deduplicated on construction (first occurrence wins)."""

    rules: Tuple[Rule, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(dict.fromkeys(self.rules)))

    @classmethod
    def from_rules(cls, rules: Iterable[Rule]) -> "Program":
        return cls(tuple(rules))

    @cached_property
    def atoms(self) -> FrozenSet[OrdinaryAtom]:
        """A(Π): ordinary atoms occurring in heads and ordinary body literals."""
        found = set()
        for rule in self.rules:
            found.update(rule.head)
            found.update(l.payload for l in rule.body if not l.is_external)
        return frozenset(found)

    @cached_property
    def sorted_atoms(self) -> Tuple[OrdinaryAtom, ...]:
        return tuple(sorted(self.atoms))

    @cached_property
    def atoms_by_predicate(self) -> Dict[str, FrozenSet[OrdinaryAtom]]:
        index: Dict[str, set] = {}
        for atom in self.atoms:
            index.setdefault(atom.predicate, set()).add(atom)
        return {name: frozenset(atoms) for name, atoms in index.items()}

    @cached_property
    def predicates(self) -> Dict[str, int]:
        """Predicate table: name -> arity."""
        return {atom.predicate: atom.arity for atom in self.atoms}

    @cached_property
    def constants(self) -> FrozenSet[Constant]:
        found = set()
        for rule in self.rules:
            for atom in rule.head:
                found.update(t for t in atom.args if is_ground_term(t))
            for lit in rule.body:
                payload = lit.payload
                if isinstance(payload, OrdinaryAtom):
                    found.update(t for t in payload.args if is_ground_term(t))
                else:
                    found.update(t for t in payload.constant_inputs if is_ground_term(t))
                    found.update(t for t in payload.outputs if is_ground_term(t))
        return frozenset(found)

    @cached_property
    def external_atoms(self) -> Tuple[ExternalAtomRef, ...]:
        """Distinct external atoms in order of first occurrence."""
        seen = dict()
        for rule in self.rules:
            for lit in rule.external_literals:
                seen.setdefault(lit.payload, None)
        return tuple(seen)

    @property
    def is_ground(self) -> bool:
        return all(rule.is_ground for rule in self.rules)

    @property
    def has_external_atoms(self) -> bool:
        return bool(self.external_atoms)

    def __len__(self) -> int:
        return len(self.rules)

    def __str__(self) -> str:
        return format_program(self)


def format_atom(atom: OrdinaryAtom) -> str:
    text = atom.predicate
    if atom.args:
        text += "(" + ",".join(str(t) for t in atom.args) + ")"
    return "-" + text if atom.strong_negation else text


def format_external(ref: ExternalAtomRef) -> str:
    inputs = ",".join(str(i) for i in ref.inputs)
    outputs = ",".join(str(t) for t in ref.outputs)
    return f"&{ref.name}[{inputs}]({outputs})"


def format_literal(literal: BodyLiteral) -> str:
    prefix = "not " if literal.naf else ""
    return prefix + str(literal.payload)


def format_rule(rule: Rule) -> str:
    head = " | ".join(str(a) for a in rule.head)
    if not rule.body:
        return f"{head}."
    body = ", ".join(format_literal(l) for l in rule.body)
    if not rule.head:
        return f":- {body}."
    return f"{head} :- {body}."


def format_program(program: Program) -> str:
    return "".join(format_rule(rule) + "\n" for rule in program.rules)


def format_atom_set(atoms: Iterable[OrdinaryAtom]) -> str:
    """Render a set of atoms as a sorted "{a, b}" string."""
    return "{" + ", ".join(sorted(str(a) for a in atoms)) + "}"


def sort_atoms(atoms: Iterable[OrdinaryAtom]) -> List[OrdinaryAtom]:
    return sorted(atoms)

"""
Program generators: the chain benchmark family and the seeded random corpus
used for cross-checking the pipeline against brute force.
"""

import logging
import random
import re
from typing import FrozenSet, List, Tuple

from pydantic import BaseModel, Field, ValidationError, model_validator

from hexufs.errors import InvalidInstanceSpecError
from hexufs.external_sources import (
    PREDICATE,
    OracleRegistry,
    OracleSignature,
    TableEntry,
    TableOracle,
    default_registry,
)
from hexufs.syntax import BodyLiteral, ExternalAtomRef, OrdinaryAtom, PredicateInput, Program, Rule

logger = logging.getLogger(__name__)


class InstanceSpec(BaseModel):
    """m chains of s atoms each, k of them closing an external cycle."""

    m: int = Field(ge=0)
    k: int = Field(ge=0)
    s: int = Field(ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def check_counts(self):
        if self.k > self.m:
            raise ValueError(f"k={self.k} exceeds m={self.m}")
        return self


def parse_instance_spec(text: str) -> InstanceSpec:
    """
    Parse "m=8,k=1,s=3[,seed=0]".

    Raises:
        InvalidInstanceSpecError: malformed text or invalid values
    """
    values = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        match = re.fullmatch(r"(\w+)\s*=\s*(-?\d+)", part)
        if not match:
            raise InvalidInstanceSpecError(f"malformed instance spec part '{part}'")
        values[match.group(1)] = int(match.group(2))
    try:
        return InstanceSpec(**values)
    except ValidationError as e:
        raise InvalidInstanceSpecError(str(e)) from None


def _atom(name: str) -> OrdinaryAtom:
    return OrdinaryAtom(name)


def _pos(name: str) -> BodyLiteral:
    return BodyLiteral(_atom(name))


def _ecyclic_chains(spec: InstanceSpec) -> FrozenSet[int]:
    if spec.k == spec.m:
        return frozenset(range(1, spec.m + 1))
    return frozenset(range(spec.m - spec.k, spec.m))


def generate_instance(m: int, k: int, s: int, seed: int = 0) -> Program:
    """
    Build the chain benchmark program.

    Chain i has atoms c{i}_1..c{i}_s linked in an ordinary cycle and is fed
    by the disjunctive choice g{i} | ng{i}. The k chains just before the last
    one (all chains when k = m) also derive c{i}_1 from &id[c{i}_s](), which
    closes an e-cycle; their ordinary cycle is closed directly. Every other
    chain closes its ordinary cycle through a partner atom d{i}, so it is
    cyclic even when s = 1. Chain i depends on the last atom of chain i-1,
    through &id when chain i-1 is e-cyclic and chain i is not. For m=2, k=1,
    s=1 this is the choice layer plus

        c1_1 :- &id[c1_1](). c2_1 :- &id[c1_1](). d2 :- c2_1. c2_1 :- d2.

    The seed picks, per chain, whether the choice feeds it through g{i} or
    through `not ng{i}`.

    Args:
        m: Number of chains
        k: Number of e-cyclic chains
        s: Atoms per chain
        seed: Random seed

    Returns:
        Program: The ground program

    Raises:
        InvalidInstanceSpecError: when not m >= k >= 0 or s < 1
    """
    try:
        spec = InstanceSpec(m=m, k=k, s=s, seed=seed)
    except ValidationError as e:
        raise InvalidInstanceSpecError(str(e)) from None
    rng = random.Random(spec.seed)
    ecyclic = _ecyclic_chains(spec)
    rules: List[Rule] = []
    for i in range(1, spec.m + 1):
        chain = [f"c{i}_{j}" for j in range(1, spec.s + 1)]
        rules.append(Rule((_atom(f"g{i}"), _atom(f"ng{i}"))))
        if i > 1:
            previous = f"c{i - 1}_{spec.s}"
            if i - 1 in ecyclic and i not in ecyclic:
                link = BodyLiteral(ExternalAtomRef("id", (PredicateInput(previous),), ()))
            else:
                link = _pos(previous)
            rules.append(Rule((_atom(chain[0]),), (link,)))
        if rng.random() < 0.5:
            rules.append(Rule((_atom(chain[0]),), (_pos(f"g{i}"),)))
        else:
            rules.append(Rule((_atom(chain[0]),), (BodyLiteral(_atom(f"ng{i}"), naf=True),)))
        for j in range(spec.s - 1):
            rules.append(Rule((_atom(chain[j + 1]),), (_pos(chain[j]),)))
        if i in ecyclic:
            if spec.s > 1:
                rules.append(Rule((_atom(chain[0]),), (_pos(chain[-1]),)))
            ref = ExternalAtomRef("id", (PredicateInput(chain[-1]),), ())
            rules.append(Rule((_atom(chain[0]),), (BodyLiteral(ref),)))
        else:
            rules.append(Rule((_atom(f"d{i}"),), (_pos(chain[-1]),)))
            rules.append(Rule((_atom(chain[0]),), (_pos(f"d{i}"),)))
    program = Program.from_rules(rules)
    logger.debug(f"Generated instance m={m} k={k} s={s} seed={seed}: {len(program)} rules")
    return program


ATOM_POOL = (
    OrdinaryAtom("p"), OrdinaryAtom("q"), OrdinaryAtom("t"), OrdinaryAtom("u"),
    OrdinaryAtom("r", ("a",)), OrdinaryAtom("r", ("b",)),
    OrdinaryAtom("s", ("a",)), OrdinaryAtom("s", ("b",)),
)


def _random_oracle(rng: random.Random, name: str, atoms: List[OrdinaryAtom]) -> Tuple[TableOracle, ExternalAtomRef]:
    predicates = sorted({a.predicate for a in atoms})
    inputs = rng.sample(predicates, min(len(predicates), rng.randint(1, 2)))
    readable = [a for a in atoms if a.predicate in inputs]
    entries = []
    for _ in range(rng.randint(1, 3)):
        picked = rng.sample(readable, min(len(readable), rng.randint(0, 2)))
        split = rng.randint(0, len(picked))
        entries.append(TableEntry(frozenset(picked[:split]), frozenset(picked[split:]), ((),)))
    oracle = TableOracle(OracleSignature(name, (PREDICATE,) * len(inputs), 0), tuple(entries))
    ref = ExternalAtomRef(name, tuple(PredicateInput(p) for p in inputs), ())
    return oracle, ref


def _builtin_refs(rng: random.Random, atoms: List[OrdinaryAtom], count: int) -> List[ExternalAtomRef]:
    """Up to count builtin atoms: &id over a program predicate, or &diff[r,s](c)."""
    predicates = sorted({a.predicate for a in atoms})
    unary = sorted({a.predicate for a in atoms if a.arity == 1})
    refs: List[ExternalAtomRef] = []
    for _ in range(count):
        if len(unary) == 2 and rng.random() < 0.3:
            first, second = rng.sample(unary, 2)
            ref = ExternalAtomRef("diff", (PredicateInput(first), PredicateInput(second)),
                                  (rng.choice(("a", "b")),))
        else:
            ref = ExternalAtomRef("id", (PredicateInput(rng.choice(predicates)),), ())
        if ref not in refs:
            refs.append(ref)
    return refs


def random_instance(seed: int, max_atoms: int = 8, max_rules: int = 14,
                    max_oracles: int = 2, max_builtin_refs: int = 2) -> Tuple[Program, OracleRegistry]:
    """
    Seeded random ground program over at most max_atoms ordinary atoms.

    Body external atoms come from up to max_oracles table oracles (one fixed
    external atom each) and up to max_builtin_refs builtin &id or &diff atoms
    over the program's predicates.

    Returns:
        tuple: (program, registry with the builtins and the table oracles)
    """
    rng = random.Random(seed)
    atoms = rng.sample(ATOM_POOL, rng.randint(2, min(max_atoms, len(ATOM_POOL))))
    registry = default_registry()
    refs: List[ExternalAtomRef] = []
    for n in range(rng.randint(0, max_oracles)):
        oracle, ref = _random_oracle(rng, f"o{n + 1}", atoms)
        registry.register(oracle.to_spec())
        refs.append(ref)
    refs += _builtin_refs(rng, atoms, rng.randint(0, max_builtin_refs))

    rules: List[Rule] = []
    for _ in range(rng.randint(1, max_rules)):
        shape = rng.random()
        size = 0 if shape < 0.1 else (2 if shape > 0.8 else 1)
        head = tuple(rng.sample(atoms, size))
        body = []
        for _ in range(rng.randint(0 if head else 1, 3)):
            naf = rng.random() < 0.3
            if refs and rng.random() < 0.4:
                body.append(BodyLiteral(rng.choice(refs), naf))
            else:
                body.append(BodyLiteral(rng.choice(atoms), naf))
        rules.append(Rule(head, tuple(body)))
    return Program.from_rules(rules), registry

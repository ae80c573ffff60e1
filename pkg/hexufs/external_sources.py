"""
External sources: typed oracle signatures, the oracle registry, the builtin
oracles and the file-defined table oracle.

An oracle is a deterministic Boolean function f(A, inputs, output). Input
positions are typed when the oracle is registered: a `predicate` position
passes the extension of a predicate, a `constant` position a constant. An
oracle may only look at the extensions of its predicate inputs.
"""

import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from hexufs.errors import (
    DuplicateOracleError,
    EnumerationNotSupportedError,
    HexError,
    OracleError,
    OracleSignatureError,
    TableOracleFormatError,
    UnknownOracleError,
)
from hexufs.interpretation import Interpretation, extension
from hexufs.syntax import (
    Constant,
    ConstantInput,
    ExternalAtomRef,
    InputTerm,
    OrdinaryAtom,
    PredicateInput,
    Variable,
    constant_value,
    format_atom_set,
)

logger = logging.getLogger(__name__)

PREDICATE = "predicate"
CONSTANT = "constant"
INPUT_KINDS = (PREDICATE, CONSTANT)

OutputTuple = Tuple[Constant, ...]
EvaluateFn = Callable[[Interpretation, Tuple[str, ...], OutputTuple], bool]
EnumerateFn = Callable[[Interpretation, Tuple[str, ...], FrozenSet[Constant]], Iterable[OutputTuple]]


@dataclass(frozen=True)
class OracleSignature:
    name: str
    input_kinds: Tuple[str, ...]
    output_arity: int

    def __post_init__(self):
        bad = [k for k in self.input_kinds if k not in INPUT_KINDS]
        if bad:
            raise OracleSignatureError(f"&{self.name}: unknown input kind(s) {', '.join(bad)}")
        if self.output_arity < 0:
            raise OracleSignatureError(f"&{self.name}: negative output arity")


@dataclass(frozen=True)
class OracleSpec:
    """
    An oracle bound to a signature.

    `evaluate` receives the interpretation, the input values (predicate names
    and constants, positionally) and the output tuple. `enumerate` lists the
    true output tuples; without it, enumeration is pointwise over the constant
    universe unless `enumerable` is False. `check_ref` performs extra
    bind-time validation of an external atom naming this oracle.
    """

    signature: OracleSignature
    evaluate: EvaluateFn
    enumerate: Optional[EnumerateFn] = None
    enumerable: bool = True
    check_ref: Optional[Callable[[ExternalAtomRef], None]] = None

    @property
    def name(self) -> str:
        return self.signature.name


def _input_values(ref: ExternalAtomRef) -> Tuple[str, ...]:
    values = []
    for item in ref.inputs:
        if isinstance(item, PredicateInput):
            values.append(item.name)
        else:
            values.append(item.term)
    return tuple(values)


class OracleRegistry:
    """Name -> OracleSpec map. Populated during setup, read-only afterwards."""

    def __init__(self, specs: Iterable[OracleSpec] = ()):
        self._specs: Dict[str, OracleSpec] = {}
        for spec in specs:
            self.register(spec)

    def register(self, spec: OracleSpec) -> OracleSpec:
        if spec.name in self._specs:
            raise DuplicateOracleError(f"oracle &{spec.name} is already registered")
        self._specs[spec.name] = spec
        logger.debug(f"Registered oracle &{spec.name} {spec.signature.input_kinds} -> {spec.signature.output_arity}")
        return spec

    def copy(self) -> "OracleRegistry":
        return OracleRegistry(self._specs.values())

    def __contains__(self, name: str) -> bool:
        return name in self._specs

    @property
    def names(self) -> List[str]:
        return sorted(self._specs)

    def spec(self, name: str) -> OracleSpec:
        try:
            return self._specs[name]
        except KeyError:
            raise UnknownOracleError(f"unknown external atom &{name}") from None

    def signature(self, name: str) -> OracleSignature:
        return self.spec(name).signature

    def resolve_inputs(self, name: str, tokens: Sequence) -> Tuple[InputTerm, ...]:
        """
        Type raw input tokens of &name[...] by the registered signature.

        Args:
            name: Oracle name
            tokens: Parsed input terms (constants or variables)

        Returns:
            tuple: PredicateInput / ConstantInput per position
        """
        signature = self.signature(name)
        if len(tokens) != len(signature.input_kinds):
            raise OracleSignatureError(
                f"&{name} expects {len(signature.input_kinds)} input(s), got {len(tokens)}"
            )
        resolved: List[InputTerm] = []
        for kind, token in zip(signature.input_kinds, tokens):
            if kind == PREDICATE:
                if isinstance(token, Variable) or not re.fullmatch(r"[a-z_]\w*", str(token)):
                    raise OracleSignatureError(f"&{name}: predicate input expected, got {token}")
                resolved.append(PredicateInput(str(token)))
            else:
                resolved.append(ConstantInput(token))
        return tuple(resolved)

    def check_ref(self, ref: ExternalAtomRef) -> None:
        """Validate an external atom against the signature of its oracle."""
        spec = self.spec(ref.name)
        kinds = spec.signature.input_kinds
        if len(ref.inputs) != len(kinds):
            raise OracleSignatureError(f"{ref}: expected {len(kinds)} input(s)")
        for kind, item in zip(kinds, ref.inputs):
            expected = PredicateInput if kind == PREDICATE else ConstantInput
            if not isinstance(item, expected):
                raise OracleSignatureError(f"{ref}: input {item} must be a {kind}")
        if len(ref.outputs) != spec.signature.output_arity:
            raise OracleSignatureError(
                f"{ref}: output arity {len(ref.outputs)} != {spec.signature.output_arity}"
            )
        if spec.check_ref is not None:
            spec.check_ref(ref)

    def evaluate(self, name: str, interpretation: Interpretation,
                 inputs: Tuple[str, ...], output: OutputTuple) -> bool:
        """
        f_&name(A, inputs, output).

        Raises:
            UnknownOracleError: name not registered
            OracleSignatureError: input count or output arity mismatch
            OracleError: the oracle callback failed
        """
        spec = self.spec(name)
        if len(inputs) != len(spec.signature.input_kinds) or len(output) != spec.signature.output_arity:
            raise OracleSignatureError(f"&{name}: arguments do not match the signature")
        try:
            return bool(spec.evaluate(interpretation, tuple(inputs), tuple(output)))
        except HexError:
            raise
        except Exception as e:
            raise OracleError(f"oracle &{name} failed: {e}") from e

    def evaluate_ref(self, ref: ExternalAtomRef, interpretation: Interpretation) -> bool:
        return self.evaluate(ref.name, interpretation, _input_values(ref), tuple(ref.outputs))

    def external_extension(self, ref: ExternalAtomRef, interpretation: Interpretation,
                           universe: Iterable[Constant]) -> Set[OutputTuple]:
        """
        ext(&g[inputs], A): the true output tuples over the constant universe.

        Output positions holding constants act as filters; variable positions
        range over the universe.
        """
        spec = self.spec(ref.name)
        universe = frozenset(universe)
        inputs = _input_values(ref)
        arity = spec.signature.output_arity
        if spec.enumerate is not None:
            try:
                candidates = {
                    tuple(t) for t in spec.enumerate(interpretation, inputs, universe)
                    if all(c in universe for c in t)
                }
            except HexError:
                raise
            except Exception as e:
                raise OracleError(f"oracle &{ref.name} failed: {e}") from e
        elif spec.enumerable:
            candidates = {
                t for t in itertools.product(sorted(universe), repeat=arity)
                if self.evaluate(ref.name, interpretation, inputs, t)
            }
        else:
            raise EnumerationNotSupportedError(f"oracle &{ref.name} cannot enumerate its outputs")
        pattern = tuple(ref.outputs)
        return {
            t for t in candidates
            if len(t) == arity and all(isinstance(p, Variable) or p == c for p, c in zip(pattern, t))
        }


def _id_evaluate(interpretation, inputs, output):
    return bool(extension(inputs[0], interpretation))


def _id_enumerate(interpretation, inputs, universe):
    return [()] if extension(inputs[0], interpretation) else []


def _diff_evaluate(interpretation, inputs, output):
    return output in extension(inputs[0], interpretation) - extension(inputs[1], interpretation)


def _diff_enumerate(interpretation, inputs, universe):
    return extension(inputs[0], interpretation) - extension(inputs[1], interpretation)


def _concat_evaluate(interpretation, inputs, output):
    return constant_value(output[0]) == constant_value(inputs[0]) + constant_value(inputs[1])


def _concat_enumerate(interpretation, inputs, universe):
    joined = constant_value(inputs[0]) + constant_value(inputs[1])
    return [(c,) for c in universe if constant_value(c) == joined]


def builtin_oracles() -> List[OracleSpec]:
    """
    The builtin oracles.

    - &id[p]() is true iff some p-atom is true (for a 0-ary p: iff p is true).
    - &diff[p,q](c) is true iff (c) is in ext(p) but not in ext(q).
    - &concat[a,b](c) is true iff the value of c is the concatenation of a and b.
    """
    return [
        OracleSpec(OracleSignature("id", (PREDICATE,), 0), _id_evaluate, _id_enumerate),
        OracleSpec(OracleSignature("diff", (PREDICATE, PREDICATE), 1), _diff_evaluate, _diff_enumerate),
        OracleSpec(OracleSignature("concat", (CONSTANT, CONSTANT), 1), _concat_evaluate, _concat_enumerate),
    ]


def default_registry() -> OracleRegistry:
    return OracleRegistry(builtin_oracles())


@dataclass(frozen=True)
class TableEntry:
    require: FrozenSet[OrdinaryAtom] = frozenset()
    forbid: FrozenSet[OrdinaryAtom] = frozenset()
    outputs: Tuple[OutputTuple, ...] = ()

    def matches(self, interpretation: Interpretation) -> bool:
        return (all(interpretation.is_true(a) for a in self.require)
                and not any(interpretation.is_true(a) for a in self.forbid))

    def __str__(self) -> str:
        outs = " ".join("(" + ",".join(t) + ")" for t in self.outputs)
        return (f"require {' & '.join(sorted(map(str, self.require)))} ; "
                f"forbid {' & '.join(sorted(map(str, self.forbid)))} ; out {outs}")


@dataclass(frozen=True)
class TableOracle:
    """
    Oracle given by a list of entries; output c is true iff some entry listing
    c has all its required atoms true and all its forbidden atoms false.
    """

    signature: OracleSignature
    entries: Tuple[TableEntry, ...] = field(default_factory=tuple)

    @property
    def predicates(self) -> FrozenSet[str]:
        return frozenset(a.predicate for e in self.entries for a in e.require | e.forbid)

    def evaluate(self, interpretation, inputs, output) -> bool:
        return any(output in e.outputs and e.matches(interpretation) for e in self.entries)

    def enumerate(self, interpretation, inputs, universe) -> Set[OutputTuple]:
        return {t for e in self.entries if e.matches(interpretation) for t in e.outputs}

    def check_ref(self, ref: ExternalAtomRef) -> None:
        stray = self.predicates - set(ref.predicate_inputs)
        if stray:
            raise OracleSignatureError(
                f"{ref}: table entries use predicate(s) {', '.join(sorted(stray))} "
                f"that are not predicate inputs"
            )

    def to_spec(self) -> OracleSpec:
        return OracleSpec(self.signature, self.evaluate, self.enumerate, True, self.check_ref)

    def to_text(self) -> str:
        lines = [f"oracle {self.signature.name} inputs {','.join(self.signature.input_kinds)} "
                 f"out_arity {self.signature.output_arity}"]
        lines.extend(str(e) for e in self.entries)
        return "\n".join(lines) + "\n"


_HEADER = re.compile(r"oracle\s+([a-z_]\w*)\s+inputs\s*([a-z,\s]*?)\s*out_arity\s+(\d+)")
_ATOM = re.compile(r'\s*([a-z_]\w*)\s*(?:\(([^)]*)\))?\s*')
_TUPLE = re.compile(r'\(([^)]*)\)')
_ARG = re.compile(r'"(?:[^"\\]|\\.)*"|[^,\s]+')


def _split_args(text: str) -> Tuple[Constant, ...]:
    return tuple(_ARG.findall(text or ""))


def _parse_atoms(text: str, lineno: int) -> FrozenSet[OrdinaryAtom]:
    atoms = set()
    for chunk in text.split("&"):
        if not chunk.strip():
            continue
        match = _ATOM.fullmatch(chunk)
        if not match:
            raise TableOracleFormatError(f"malformed atom '{chunk.strip()}'", lineno)
        atoms.add(OrdinaryAtom(match.group(1), _split_args(match.group(2))))
    return frozenset(atoms)


def parse_table_oracle(text: str) -> TableOracle:
    """
    Parse the table-oracle file format.

    Header: `oracle NAME inputs KIND,KIND,... out_arity N`; then one entry per
    line: `require a(t) & b ; forbid c ; out (t1) (t2)`. `%` starts a comment.

    Returns:
        TableOracle: The parsed oracle

    Raises:
        TableOracleFormatError: on any format error
    """
    signature = None
    entries: List[TableEntry] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        if signature is None:
            match = _HEADER.fullmatch(line)
            if not match:
                raise TableOracleFormatError("expected header 'oracle NAME inputs KINDS out_arity N'", lineno)
            kinds = tuple(k.strip() for k in match.group(2).split(",") if k.strip())
            try:
                signature = OracleSignature(match.group(1), kinds, int(match.group(3)))
            except OracleSignatureError as e:
                raise TableOracleFormatError(str(e), lineno) from None
            continue
        sections = {"require": "", "forbid": "", "out": None}
        for part in line.split(";"):
            part = part.strip()
            if not part:
                continue
            keyword, _, rest = part.partition(" ")
            if keyword not in sections:
                raise TableOracleFormatError(f"unknown section '{keyword}'", lineno)
            sections[keyword] = rest
        if sections["out"] is None:
            raise TableOracleFormatError("entry without 'out' section", lineno)
        outputs = tuple(_split_args(t) for t in _TUPLE.findall(sections["out"]))
        if not outputs:
            raise TableOracleFormatError("entry lists no output tuple", lineno)
        for t in outputs:
            if len(t) != signature.output_arity:
                raise TableOracleFormatError(
                    f"output ({','.join(t)}) does not have arity {signature.output_arity}", lineno
                )
        entry = TableEntry(_parse_atoms(sections["require"], lineno),
                           _parse_atoms(sections["forbid"], lineno), outputs)
        if entry.require & entry.forbid:
            raise TableOracleFormatError(
                f"atoms both required and forbidden: {format_atom_set(entry.require & entry.forbid)}", lineno
            )
        entries.append(entry)
    if signature is None:
        raise TableOracleFormatError("missing oracle header")
    if entries and PREDICATE not in signature.input_kinds:
        if any(e.require or e.forbid for e in entries):
            raise TableOracleFormatError(f"oracle {signature.name} has entry atoms but no predicate inputs")
    return TableOracle(signature, tuple(entries))


def load_table_oracle(path: str, registry: OracleRegistry) -> TableOracle:
    """
    Read a table-oracle file and register it.

    Args:
        path: Path to the oracle file
        registry: Registry to add the oracle to

    Returns:
        TableOracle: The registered oracle
    """
    with open(path, "r", encoding="utf-8") as f:
        oracle = parse_table_oracle(f.read())
    registry.register(oracle.to_spec())
    logger.info(f"Loaded table oracle &{oracle.signature.name} with {len(oracle.entries)} entries from {path}")
    return oracle

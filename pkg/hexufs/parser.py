"""
Program text front end: tokenizer and recursive-descent parser for the HEX
rule grammar, the classical-negation rewrite, and a naive instantiator.

Grammar (UTF-8, `%` starts a line comment):

    program  := (rule ".")*
    rule     := head | head ":-" body | ":-" body
    head     := atom ("|" atom)*
    body     := literal ("," literal)*
    literal  := ["not"] (atom | extatom)
    extatom  := "&" ident "[" term ("," term)* "]" "(" [term ("," term)*] ")"
    atom     := ["-"] ident ["(" term ("," term)* ")"]

Terms are lowercase identifiers, double-quoted strings, integers or
variables (capitalized); variables must be removed by `instantiate`.
"""

import itertools
import logging
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

from hexufs import config
from hexufs.errors import (
    NamingCollisionError,
    OracleSignatureError,
    ParseError,
    UnknownOracleError,
    UnsafeVariableError,
)
from hexufs.external_sources import OracleRegistry, default_registry
from hexufs.syntax import (
    BodyLiteral,
    Constant,
    ConstantInput,
    ExternalAtomRef,
    OrdinaryAtom,
    Program,
    Rule,
    Term,
    Variable,
)

logger = logging.getLogger(__name__)

_TOKEN_SPEC = [
    ("COMMENT", r"%[^\n]*"),
    ("NEWLINE", r"\n"),
    ("SKIP", r"[ \t\r]+"),
    ("IF", r":-"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"'),
    ("INTEGER", r"\d+"),
    ("VARIABLE", r"[A-Z]\w*"),
    ("IDENT", r"[a-z_]\w*"),
    ("PUNCT", r"[|,.()\[\]&-]"),
    ("MISMATCH", r"."),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start = 1, 0
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
            continue
        if kind in ("SKIP", "COMMENT"):
            continue
        if kind == "MISMATCH":
            raise ParseError(f"unexpected character {match.group()!r}", line, column)
        if kind == "IDENT" and match.group() == "not":
            kind = "NOT"
        tokens.append(Token(kind, match.group(), line, column))
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, registry: OracleRegistry):
        self.tokens = tokenize(text)
        self.pos = 0
        self.registry = registry
        self.arities: Dict[str, int] = {}

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _at(self, text: str) -> bool:
        token = self.current
        return token.text == text and token.kind in ("PUNCT", "IF")

    def _expect(self, text: str) -> Token:
        if not self._at(text):
            self._fail(f"expected '{text}'")
        return self._advance()

    def _fail(self, message: str):
        token = self.current
        found = "end of input" if token.kind == "EOF" else repr(token.text)
        raise ParseError(f"{message}, found {found}", token.line, token.column)

    def parse_program(self) -> List[Rule]:
        rules = []
        while self.current.kind != "EOF":
            rules.append(self.parse_rule())
        return rules

    def parse_rule(self) -> Rule:
        start = self.current
        head: List[OrdinaryAtom] = []
        body: List[BodyLiteral] = []
        if not self._at(":-"):
            if self._at("."):
                raise ParseError("rule with empty head and empty body", start.line, start.column)
            head.append(self.parse_atom())
            while self._at("|"):
                self._advance()
                head.append(self.parse_atom())
        if self._at(":-"):
            self._advance()
            body.append(self.parse_literal())
            while self._at(","):
                self._advance()
                body.append(self.parse_literal())
        self._expect(".")
        return Rule(tuple(head), tuple(body))

    def parse_literal(self) -> BodyLiteral:
        naf = False
        if self.current.kind == "NOT":
            self._advance()
            naf = True
        if self._at("&"):
            return BodyLiteral(self.parse_external(), naf)
        return BodyLiteral(self.parse_atom(), naf)

    def parse_term(self) -> Term:
        token = self.current
        if token.kind == "VARIABLE":
            self._advance()
            return Variable(token.text)
        if token.kind in ("IDENT", "STRING", "INTEGER"):
            self._advance()
            return token.text
        self._fail("expected a term")

    def _term_list(self, close: str) -> List[Term]:
        terms = []
        if not self._at(close):
            terms.append(self.parse_term())
            while self._at(","):
                self._advance()
                terms.append(self.parse_term())
        self._expect(close)
        return terms

    def parse_atom(self) -> OrdinaryAtom:
        negated = False
        if self._at("-"):
            self._advance()
            negated = True
        token = self.current
        if token.kind != "IDENT":
            self._fail("expected a predicate name")
        self._advance()
        args: List[Term] = []
        if self._at("("):
            self._advance()
            args = self._term_list(")")
        known = self.arities.setdefault(token.text, len(args))
        if known != len(args):
            raise ParseError(
                f"predicate {token.text} used with arity {len(args)}, earlier with arity {known}",
                token.line, token.column,
            )
        return OrdinaryAtom(token.text, tuple(args), negated)

    def parse_external(self) -> ExternalAtomRef:
        self._expect("&")
        token = self.current
        if token.kind != "IDENT":
            self._fail("expected an external atom name")
        self._advance()
        self._expect("[")
        raw_inputs = self._term_list("]")
        outputs: List[Term] = []
        if self._at("("):
            self._advance()
            outputs = self._term_list(")")
        try:
            inputs = self.registry.resolve_inputs(token.text, raw_inputs)
            ref = ExternalAtomRef(token.text, inputs, tuple(outputs))
            self.registry.check_ref(ref)
        except (UnknownOracleError, OracleSignatureError) as e:
            # keep the error type, add the position
            raise type(e)(f"{token.line}:{token.column}: {e}") from None
        return ref


def parse_program(text: str, registry: Optional[OracleRegistry] = None) -> Program:
    """
    Parse program text into a Program.

    Args:
        text: Program source
        registry: Oracle registry used to type external atom inputs
            (defaults to the builtin oracles)

    Returns:
        Program: Deduplicated program, possibly non-ground

    Raises:
        ParseError: syntax error, arity mismatch, empty rule
        OracleError: unknown oracle or signature mismatch
    """
    parser = _Parser(text, registry if registry is not None else default_registry())
    program = Program.from_rules(parser.parse_program())
    logger.debug(f"Parsed {len(program)} rules over {len(program.atoms)} atoms")
    return program


def parse_atoms(text: str) -> List[OrdinaryAtom]:
    """
    Parse a comma separated atom list such as "p, q, r(a)" (braces optional).

    Returns:
        list: The atoms in text order
    """
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1]
    parser = _Parser(text, OracleRegistry())
    atoms = []
    if parser.current.kind == "EOF":
        return atoms
    atoms.append(parser.parse_atom())
    while parser._at(","):
        parser._advance()
        atoms.append(parser.parse_atom())
    if parser.current.kind != "EOF":
        parser._fail("expected ',' or end of atom list")
    return atoms


def _negation_name(atom: OrdinaryAtom) -> OrdinaryAtom:
    return OrdinaryAtom(config.STRONG_NEGATION_PREFIX + atom.predicate, atom.args)


def rewrite_strong_negation(program: Program) -> Program:
    """
    Replace every classical literal -a by a fresh atom neg_a and add the
    constraint `:- a, neg_a.` once per replaced atom.

    Raises:
        NamingCollisionError: a neg_ name is already used by the program
    """
    negated = [a for a in _atoms_in_order(program) if a.strong_negation]
    if not negated:
        return program
    used = set(program.predicates) | {
        p for ref in program.external_atoms for p in ref.predicate_inputs
    }
    for atom in negated:
        fresh = config.STRONG_NEGATION_PREFIX + atom.predicate
        if fresh in used:
            raise NamingCollisionError(f"classical negation of {atom.predicate} collides with {fresh}")

    def rename(atom: OrdinaryAtom) -> OrdinaryAtom:
        return _negation_name(atom) if atom.strong_negation else atom

    rules = []
    for rule in program.rules:
        head = tuple(rename(a) for a in rule.head)
        body = tuple(
            lit if lit.is_external else BodyLiteral(rename(lit.payload), lit.naf)
            for lit in rule.body
        )
        rules.append(Rule(head, body))
    for atom in negated:
        positive = OrdinaryAtom(atom.predicate, atom.args)
        rules.append(Rule((), (BodyLiteral(positive), BodyLiteral(_negation_name(atom)))))
    logger.debug(f"Rewrote {len(negated)} classically negated atoms")
    return Program.from_rules(rules)


def _atoms_in_order(program: Program) -> List[OrdinaryAtom]:
    seen = {}
    for rule in program.rules:
        for atom in rule.head:
            seen.setdefault(atom, None)
        for lit in rule.body:
            if not lit.is_external:
                seen.setdefault(lit.payload, None)
    return list(seen)


def _rule_variables(rule: Rule) -> List[Variable]:
    found = {}
    terms: List[Term] = []
    for atom in rule.head:
        terms.extend(atom.args)
    for lit in rule.body:
        if lit.is_external:
            terms.extend(lit.payload.constant_inputs)
            terms.extend(lit.payload.outputs)
        else:
            terms.extend(lit.payload.args)
    for term in terms:
        if isinstance(term, Variable):
            found.setdefault(term, None)
    return list(found)


def _substitute(term: Term, binding: Dict[Variable, Constant]) -> Term:
    return binding.get(term, term) if isinstance(term, Variable) else term


def _ground_rule(rule: Rule, binding: Dict[Variable, Constant]) -> Rule:
    def atom(a: OrdinaryAtom) -> OrdinaryAtom:
        return OrdinaryAtom(a.predicate, tuple(_substitute(t, binding) for t in a.args), a.strong_negation)

    body = []
    for lit in rule.body:
        if lit.is_external:
            ref = lit.payload
            inputs = tuple(
                ConstantInput(_substitute(i.term, binding)) if isinstance(i, ConstantInput) else i
                for i in ref.inputs
            )
            outputs = tuple(_substitute(t, binding) for t in ref.outputs)
            body.append(BodyLiteral(ExternalAtomRef(ref.name, inputs, outputs), lit.naf))
        else:
            body.append(BodyLiteral(atom(lit.payload), lit.naf))
    return Rule(tuple(atom(a) for a in rule.head), tuple(body))


def instantiate(program: Program, universe: Optional[Iterable[Constant]] = None) -> Program:
    """
    Naive grounding: apply every substitution of a rule's variables by
    constants of the universe.

    A rule is safe when each of its variables occurs in a positive ordinary
    body atom.

    Args:
        program: Program possibly containing variables
        universe: Constants to substitute (default: constants of the program)

    Returns:
        Program: Ground program

    Raises:
        UnsafeVariableError: a variable fails the safety condition
    """
    constants = sorted(program.constants if universe is None else set(universe))
    rules: List[Rule] = []
    for rule in program.rules:
        variables = _rule_variables(rule)
        if not variables:
            rules.append(rule)
            continue
        safe = {t for a in rule.positive_atoms for t in a.args if isinstance(t, Variable)}
        for variable in variables:
            if variable not in safe:
                raise UnsafeVariableError(str(rule), variable.name)
        for values in itertools.product(constants, repeat=len(variables)):
            rules.append(_ground_rule(rule, dict(zip(variables, values))))
    result = Program.from_rules(rules)
    logger.debug(f"Instantiated {len(program)} rules into {len(result)} ground rules over {len(constants)} constants")
    return result


def drop_underivable_rules(program: Program) -> Program:
    """
    Remove rules with a positive ordinary body atom that heads no remaining
    rule. Such atoms are false in every answer set, so the answer sets are
    unchanged.
    """
    rules = list(program.rules)
    while True:
        heads = {a for r in rules for a in r.head}
        kept = [r for r in rules if all(a in heads for a in r.positive_atoms)]
        if len(kept) == len(rules):
            break
        rules = kept
    if len(rules) < len(program):
        logger.debug(f"Dropped {len(program) - len(rules)} rules with underivable bodies")
    return Program.from_rules(rules)


def load_program(text: str, registry: Optional[OracleRegistry] = None,
                 universe: Optional[Iterable[Constant]] = None) -> Program:
    """
    Parse, rewrite classical negation and, for programs with variables,
    instantiate and drop the ground rules that can never fire.
    """
    program = rewrite_strong_negation(parse_program(text, registry))
    if not program.is_ground:
        program = drop_underivable_rules(instantiate(program, universe))
    return program

"""
Dependency analysis of ground HEX-programs.

Edges point from a head atom to the atoms its rule depends on:

- ordinary edges a -> b for every positive ordinary body atom b,
- external edges a ->e b for every atom b of A(Π) whose predicate is a
  predicate input of an external atom in the body (positive or negated).

The undirected-ish relation used for cycle detection is
->d = -> ∪ <- ∪ ->e. An e-cycle is a cycle under ->d that uses an external
edge; equivalently an external edge whose endpoints share an SCC of ->d.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from hexufs.syntax import OrdinaryAtom, Program, format_atom_set

logger = logging.getLogger(__name__)

Edge = Tuple[OrdinaryAtom, OrdinaryAtom]


@dataclass(frozen=True)
class DependencyGraph:
    nodes: FrozenSet[OrdinaryAtom]
    ordinary_edges: FrozenSet[Edge]
    e_edges: FrozenSet[Edge]

    def positive_graph(self, scope: Optional[Iterable[OrdinaryAtom]] = None) -> nx.DiGraph:
        """The graph of -> ∪ ->e, optionally restricted to scope."""
        return _digraph(self.nodes, self.ordinary_edges | self.e_edges, scope)

    def dual_graph(self, scope: Optional[Iterable[OrdinaryAtom]] = None) -> nx.DiGraph:
        """The graph of ->d = -> ∪ <- ∪ ->e, optionally restricted to scope."""
        reversed_edges = frozenset((v, u) for u, v in self.ordinary_edges)
        return _digraph(self.nodes, self.ordinary_edges | reversed_edges | self.e_edges, scope)


def _digraph(nodes, edges, scope) -> nx.DiGraph:
    keep = set(nodes) if scope is None else set(scope) & set(nodes)
    graph = nx.DiGraph()
    graph.add_nodes_from(keep)
    graph.add_edges_from((u, v) for u, v in edges if u in keep and v in keep)
    return graph


def build_dependency_graph(program: Program) -> DependencyGraph:
    """
    Build the atom dependency graph of a ground program.

    Args:
        program: Ground program

    Returns:
        DependencyGraph: Nodes A(Π) with ordinary and external edges
    """
    ordinary: Set[Edge] = set()
    external: Set[Edge] = set()
    by_predicate = program.atoms_by_predicate
    for rule in program.rules:
        if not rule.head:
            continue
        targets = [
            atom
            for lit in rule.external_literals
            for predicate in lit.payload.predicate_inputs
            for atom in by_predicate.get(predicate, ())
        ]
        for head in rule.head:
            ordinary.update((head, body) for body in rule.positive_atoms)
            external.update((head, target) for target in targets)
    graph = DependencyGraph(program.atoms, frozenset(ordinary), frozenset(external))
    logger.debug(f"Dependency graph: {len(graph.nodes)} atoms, {len(ordinary)} edges, {len(external)} e-edges")
    return graph


def _cyclic_e_edges(dual: nx.DiGraph, e_edges: Iterable[Tuple]) -> List[Tuple]:
    component = {}
    for i, scc in enumerate(nx.strongly_connected_components(dual)):
        for node in scc:
            component[node] = i
    return [
        (u, v) for u, v in e_edges
        if u in component and v in component and component[u] == component[v]
    ]


def has_e_cycle(graph: DependencyGraph, scope: Optional[Iterable[OrdinaryAtom]] = None) -> bool:
    """True iff some external edge inside scope closes a cycle under ->d restricted to scope."""
    return bool(_cyclic_e_edges(graph.dual_graph(scope), graph.e_edges))


def cyclic_input_atoms(graph: DependencyGraph,
                       scope: Optional[Iterable[OrdinaryAtom]] = None) -> FrozenSet[OrdinaryAtom]:
    """CA: targets a of external edges b ->e a with a and b in one SCC of ->d."""
    return frozenset(v for _, v in _cyclic_e_edges(graph.dual_graph(scope), graph.e_edges))


def cyclic_input_predicates(graph: DependencyGraph) -> FrozenSet[str]:
    return frozenset(a.predicate for a in cyclic_input_atoms(graph))


def predicate_precheck(program: Program, graph: Optional[DependencyGraph] = None) -> bool:
    """
    e-cycle flag of the predicate dependency graph. False guarantees the
    atom graph has no e-cycle either.
    """
    graph = graph or build_dependency_graph(program)
    ordinary = {(u.predicate, v.predicate) for u, v in graph.ordinary_edges}
    external = {(u.predicate, v.predicate) for u, v in graph.e_edges}
    dual = nx.DiGraph()
    dual.add_nodes_from(program.predicates)
    dual.add_edges_from(ordinary | {(v, u) for u, v in ordinary} | external)
    return bool(_cyclic_e_edges(dual, external))


@dataclass(frozen=True)
class CriterionReport:
    has_e_cycle: bool
    cyclic_input_atoms: FrozenSet[OrdinaryAtom] = frozenset()
    cyclic_input_predicates: FrozenSet[str] = frozenset()
    predicate_e_cycle: bool = False
    scope: Optional[FrozenSet[OrdinaryAtom]] = None

    def to_dict(self) -> Dict:
        return {
            "has_e_cycle": self.has_e_cycle,
            "predicate_e_cycle": self.predicate_e_cycle,
            "cyclic_input_atoms": sorted(map(str, self.cyclic_input_atoms)),
            "cyclic_input_predicates": sorted(self.cyclic_input_predicates),
        }


def needs_ufs_check(program: Program, scope: Optional[Iterable[OrdinaryAtom]] = None,
                    graph: Optional[DependencyGraph] = None) -> Tuple[bool, CriterionReport]:
    """
    Decide whether unfounded-set search is needed for program (within scope).

    The search may be skipped iff there is no e-cycle under ->d restricted
    to the scope. The predicate-level check runs first as a cheap filter.

    Args:
        program: Program or component program
        scope: Atoms the check is restricted to (default: all atoms)
        graph: Prebuilt dependency graph of program

    Returns:
        tuple: (needs check, CriterionReport with CA restricted to scope)
    """
    graph = graph or build_dependency_graph(program)
    scope = frozenset(graph.nodes if scope is None else scope)
    predicate_cycle = predicate_precheck(program, graph)
    if not predicate_cycle:
        return False, CriterionReport(False, scope=scope)
    cyclic = has_e_cycle(graph, scope)
    ca = cyclic_input_atoms(graph) & scope
    report = CriterionReport(
        cyclic, ca, frozenset(a.predicate for a in ca), predicate_cycle, scope
    )
    return cyclic, report


@dataclass(frozen=True)
class ComponentPartition:
    """
    SCCs of -> ∪ ->e with their component programs.

    Components are ordered by their least atom; `dag_edges` holds (i, j)
    when some atom of component i depends on an atom of component j.
    """

    components: Tuple[FrozenSet[OrdinaryAtom], ...]
    programs: Tuple[Program, ...]
    dag_edges: FrozenSet[Tuple[int, int]] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.components)

    def component_of(self, atom: OrdinaryAtom) -> int:
        for i, component in enumerate(self.components):
            if atom in component:
                return i
        raise KeyError(atom)

    def dag(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.components)))
        graph.add_edges_from(self.dag_edges)
        return graph


def component_program(program: Program, component: Iterable[OrdinaryAtom]) -> Program:
    """Π_C: the rules whose head meets C, in program order."""
    component = frozenset(component)
    return Program.from_rules(r for r in program.rules if component.intersection(r.head))


def scc_partition(program: Program, graph: Optional[DependencyGraph] = None) -> ComponentPartition:
    """
    Partition A(Π) into strongly connected components of -> ∪ ->e.

    Returns:
        ComponentPartition: Components, component programs and DAG edges
    """
    graph = graph or build_dependency_graph(program)
    components = sorted(
        (frozenset(c) for c in nx.strongly_connected_components(graph.positive_graph())),
        key=lambda c: min(a.key for a in c),
    )
    index = {atom: i for i, c in enumerate(components) for atom in c}
    dag_edges = frozenset(
        (index[u], index[v])
        for u, v in graph.ordinary_edges | graph.e_edges
        if index[u] != index[v]
    )
    partition = ComponentPartition(
        tuple(components),
        tuple(component_program(program, c) for c in components),
        dag_edges,
    )
    logger.debug(f"SCC partition: {len(partition)} components")
    return partition


@dataclass(frozen=True)
class ComponentAnalysis:
    atoms: FrozenSet[OrdinaryAtom]
    rules: int
    needs_check: bool
    criterion: CriterionReport


@dataclass(frozen=True)
class ProgramAnalysis:
    """Everything the `analyze` command reports about a program."""

    graph: DependencyGraph
    partition: ComponentPartition
    needs_check: bool
    criterion: CriterionReport
    components: Tuple[ComponentAnalysis, ...]

    @property
    def verdict(self) -> str:
        if self.needs_check:
            return "UFS check: required (e-cycle)"
        return "UFS check: skippable (no e-cycle)"

    def to_dict(self) -> Dict:
        return {
            "atoms": sorted(map(str, self.graph.nodes)),
            "edges": sorted([str(u), str(v)] for u, v in self.graph.ordinary_edges),
            "e_edges": sorted([str(u), str(v)] for u, v in self.graph.e_edges),
            "needs_ufs_check": self.needs_check,
            "criterion": self.criterion.to_dict(),
            "components": [
                {
                    "atoms": sorted(map(str, c.atoms)),
                    "rules": c.rules,
                    "needs_ufs_check": c.needs_check,
                    "cyclic_input_atoms": sorted(map(str, c.criterion.cyclic_input_atoms)),
                }
                for c in self.components
            ],
            "component_dag": sorted(list(e) for e in self.partition.dag_edges),
            "verdict": self.verdict,
        }

    def format(self) -> str:
        lines = [f"atoms: {format_atom_set(self.graph.nodes)}", "edges:"]
        lines += [f"  {u} -> {v}" for u, v in sorted(self.graph.ordinary_edges, key=str)]
        lines += [f"  {u} ->e {v}" for u, v in sorted(self.graph.e_edges, key=str)]
        lines.append(f"predicate-level e-cycle: {'yes' if self.criterion.predicate_e_cycle else 'no'}")
        lines.append(f"cyclic input atoms: {format_atom_set(self.criterion.cyclic_input_atoms)}")
        lines.append(f"components: {len(self.components)}")
        for i, c in enumerate(self.components, start=1):
            flag = "e-cycle" if c.needs_check else "no e-cycle"
            lines.append(
                f"  C{i} {format_atom_set(c.atoms)}: {c.rules} rule(s), {flag}, "
                f"CA {format_atom_set(c.criterion.cyclic_input_atoms)}"
            )
        lines.append(self.verdict)
        return "\n".join(lines)


def analyze(program: Program) -> ProgramAnalysis:
    """Run the global and per-component criterion on a ground program."""
    graph = build_dependency_graph(program)
    needs, report = needs_ufs_check(program, graph=graph)
    report = CriterionReport(
        report.has_e_cycle,
        cyclic_input_atoms(graph),
        cyclic_input_predicates(graph),
        predicate_precheck(program, graph),
        report.scope,
    )
    partition = scc_partition(program, graph)
    components = []
    for component, sub in zip(partition.components, partition.programs):
        sub_needs, sub_report = needs_ufs_check(sub, scope=component)
        components.append(ComponentAnalysis(component, len(sub), sub_needs, sub_report))
    return ProgramAnalysis(graph, partition, needs, report, tuple(components))

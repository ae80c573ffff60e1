"""
Tests for the dependency graph, the e-cycle criterion and the SCC partition
"""

import os
import sys

import networkx as nx
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from hexufs.depgraph import (
    analyze,
    build_dependency_graph,
    cyclic_input_atoms,
    cyclic_input_predicates,
    has_e_cycle,
    needs_ufs_check,
    predicate_precheck,
    scc_partition,
)
from hexufs.generator import random_instance
from hexufs.parser import load_program, parse_atoms
from tests.fixtures.sample_programs import TWO_ATOM_LOOP


def atoms(text):
    return frozenset(parse_atoms(text))


def edge_strings(edges):
    return sorted(f"{u}->{v}" for u, v in edges)


class TestBuildDependencyGraph:
    """Tests for build_dependency_graph"""

    def test_example3_edges(self, example3):
        graph = build_dependency_graph(example3)
        assert edge_strings(graph.ordinary_edges) == ["p->q", "q->p"]
        assert edge_strings(graph.e_edges) == ["p->r", "r->r"]

    def test_no_external_atoms(self):
        graph = build_dependency_graph(load_program("a :- b. b :- not a. c | d :- a."))
        assert graph.e_edges == frozenset()
        assert edge_strings(graph.ordinary_edges) == ["a->b", "c->a", "d->a"]

    def test_naf_external_adds_edges(self):
        graph = build_dependency_graph(load_program("q :- not &id[p](). p :- q."))
        assert edge_strings(graph.e_edges) == ["q->p"]

    def test_concat_has_only_ordinary_cycle(self, concat_program):
        graph = build_dependency_graph(concat_program)
        assert graph.e_edges == frozenset()
        assert "str(ab)->str(ab)" in edge_strings(graph.ordinary_edges)
        assert not nx.is_directed_acyclic_graph(graph.positive_graph())

    def test_constraints_add_no_edges(self):
        graph = build_dependency_graph(load_program("a. :- a, &id[a]()."))
        assert graph.ordinary_edges == frozenset()
        assert graph.e_edges == frozenset()

    def test_scoped_graphs(self, example3):
        graph = build_dependency_graph(example3)
        dual = graph.dual_graph(atoms("p, q"))
        assert set(dual.nodes) == atoms("p, q")
        assert dual.number_of_edges() == 2


class TestECycle:
    """Tests for has_e_cycle and cyclic_input_atoms"""

    def test_example3(self, example3):
        graph = build_dependency_graph(example3)
        assert has_e_cycle(graph)
        assert not has_e_cycle(graph, atoms("p, q"))
        assert has_e_cycle(graph, atoms("r"))

    def test_diff(self, diff_program):
        assert not has_e_cycle(build_dependency_graph(diff_program))

    def test_concat(self, concat_program):
        assert not has_e_cycle(build_dependency_graph(concat_program))

    def test_cyclic_input_atoms_example3(self, example3):
        graph = build_dependency_graph(example3)
        assert cyclic_input_atoms(graph) == atoms("r")
        assert cyclic_input_predicates(graph) == frozenset(["r"])

    def test_cyclic_input_atoms_without_e_edges(self):
        assert cyclic_input_atoms(build_dependency_graph(load_program("a :- b. b :- a."))) == frozenset()

    def test_two_atom_loop(self):
        graph = build_dependency_graph(load_program(TWO_ATOM_LOOP))
        assert cyclic_input_atoms(graph) == atoms("b")

    def test_reverse_ordinary_edge_closes_cycle(self):
        # a ->e b and a -> b: the reversed ordinary edge b <- a closes the cycle
        graph = build_dependency_graph(load_program("a :- b, &id[b](). b :- c. c."))
        assert has_e_cycle(graph)


class TestNeedsUfsCheck:
    """Tests for needs_ufs_check and predicate_precheck"""

    def test_diff_skips(self, diff_program):
        needed, report = needs_ufs_check(diff_program)
        assert not needed
        assert not report.has_e_cycle
        assert report.cyclic_input_atoms == frozenset()

    def test_example1(self, example1):
        needed, report = needs_ufs_check(example1)
        assert needed
        assert report.cyclic_input_atoms == atoms("p")
        assert report.to_dict()["cyclic_input_predicates"] == ["p"]

    def test_example3_components(self, example3):
        partition = scc_partition(example3)
        flags = [needs_ufs_check(sub, scope=c)[0] for c, sub in zip(partition.components, partition.programs)]
        assert flags == [False, True]

    def test_predicate_precheck(self, diff_program, example1):
        assert not predicate_precheck(diff_program)
        assert predicate_precheck(example1)

    @pytest.mark.property_based
    def test_predicate_level_covers_atom_level(self):
        for seed in range(300):
            program, _ = random_instance(seed)
            graph = build_dependency_graph(program)
            if has_e_cycle(graph):
                assert predicate_precheck(program, graph), f"seed {seed}"

    def test_predicate_level_can_over_approximate(self):
        program = load_program("r(a) :- &id[r](). r(b) :- s. s.")
        graph = build_dependency_graph(program)
        assert predicate_precheck(program, graph)
        assert has_e_cycle(graph)
        other = load_program("r(a) :- &id[s](). s(b) :- r(b). r(b).")
        assert predicate_precheck(other)
        assert not has_e_cycle(build_dependency_graph(other))


class TestSccPartition:
    """Tests for scc_partition"""

    def test_example3(self, example3):
        partition = scc_partition(example3)
        assert list(partition.components) == [atoms("p, q"), atoms("r")]
        assert str(partition.programs[1]) == "r :- &id[r]().\n"
        assert len(partition.programs[0]) == 3
        assert partition.dag_edges == frozenset([(0, 1)])
        assert partition.component_of(parse_atoms("q")[0]) == 0

    def test_acyclic_program(self):
        partition = scc_partition(load_program("a. b :- a. c :- b."))
        assert [len(c) for c in partition.components] == [1, 1, 1]
        assert len(partition) == 3

    @pytest.mark.property_based
    def test_component_dag_is_acyclic(self):
        for seed in range(300):
            program, _ = random_instance(seed)
            partition = scc_partition(program)
            assert nx.is_directed_acyclic_graph(partition.dag()), f"seed {seed}"
            covered = frozenset().union(*partition.components) if partition.components else frozenset()
            assert covered == program.atoms


class TestAnalyze:
    def test_verdicts(self, example3, diff_program):
        assert analyze(example3).verdict == "UFS check: required (e-cycle)"
        assert analyze(diff_program).verdict == "UFS check: skippable (no e-cycle)"

    def test_report_dict(self, example3):
        report = analyze(example3).to_dict()
        assert report["atoms"] == ["p", "q", "r"]
        assert report["e_edges"] == [["p", "r"], ["r", "r"]]
        assert [c["atoms"] for c in report["components"]] == [["p", "q"], ["r"]]
        assert [c["needs_ufs_check"] for c in report["components"]] == [False, True]
        assert report["components"][1]["cyclic_input_atoms"] == ["r"]
        assert report["component_dag"] == [[0, 1]]
        assert report["criterion"]["cyclic_input_atoms"] == ["r"]

    def test_text_report(self, example3):
        text = analyze(example3).format()
        assert "  p ->e r" in text
        assert "  C1 {p, q}: 3 rule(s), no e-cycle, CA {}" in text
        assert "  C2 {r}: 1 rule(s), e-cycle, CA {r}" in text
        assert text.endswith("UFS check: required (e-cycle)")

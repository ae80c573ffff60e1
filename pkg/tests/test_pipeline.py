"""
Tests for the evaluation pipeline: worked examples, mode equivalence,
search effort and verification
"""

import os
import sys
from unittest.mock import patch

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from hexufs.asp_core import enumerate_compatible_sets
from hexufs.depgraph import CriterionReport
from hexufs.errors import CapExceededError, OracleError
from hexufs.external_sources import PREDICATE, OracleSignature, OracleSpec
from hexufs.generator import InstanceSpec, generate_instance, random_instance
from hexufs.parser import load_program, parse_atoms
from hexufs.pipeline import (
    EvaluationOptions,
    check_candidate,
    evaluate,
    plan_checks,
    run_benchmark,
    verify,
)
from hexufs.ufs import find_unfounded_set

STATS_KEYS = {
    "answer_sets", "compatible_sets", "candidates_rejected", "ufs_searches_run",
    "ufs_searches_skipped", "ufs_checks_eligible", "components_total",
    "components_ecyclic", "search_node_expansions", "phase_times_ms", "mode", "engine",
}


def options(**values):
    return EvaluationOptions(**values)


class TestWorkedExamples:
    """Exact counters on the worked examples"""

    def test_example1(self, example1, registry):
        report = evaluate(example1, registry, options(mode="full"))
        assert report.answer_set_strings() == ["{}"]
        assert report.compatible_sets == 2
        assert report.ufs_searches_run == 1
        assert report.ufs_searches_skipped == 1
        assert report.candidates_rejected == 1
        assert report.components_total == 1
        assert report.components_ecyclic == 1

    def test_example1_rejects_p_via_p(self, example1, registry):
        checks, _, _ = plan_checks(example1, options())
        found = {
            str(cs): check_candidate(cs.projected, checks, registry, 20).witness
            for cs in enumerate_compatible_sets(example1, registry)
        }
        assert found == {"{__ne_id_p}": None, "{__e_id_p, p}": frozenset(parse_atoms("p"))}

    def test_example3(self, example3, registry):
        report = evaluate(example3, registry, options(mode="full"))
        assert report.answer_set_strings() == ["{}"]
        assert report.compatible_sets == 2
        assert report.candidates_rejected == 1
        assert report.ufs_searches_run == 1
        assert report.ufs_searches_skipped == 3
        assert report.components_total == 2
        assert report.components_ecyclic == 1

    def test_example3_never_searches_first_component(self, example3, registry):
        with patch("hexufs.pipeline.find_unfounded_set", wraps=find_unfounded_set) as search:
            evaluate(example3, registry, options(mode="full"))
        assert search.call_count == 1
        query = search.call_args[0][0]
        assert query.domain == frozenset(parse_atoms("r"))
        assert query.program.rules[0].head == tuple(parse_atoms("r"))

    def test_example3_rejects_exactly_candidates_with_r(self, example3, registry):
        checks, _, _ = plan_checks(example3, options())
        r = parse_atoms("r")[0]
        for cs in enumerate_compatible_sets(example3, registry):
            result = check_candidate(cs.projected, checks, registry, 20)
            if cs.projected.is_true(r):
                assert result.witness == frozenset([r])
            else:
                assert result.accepted

    def test_diff_runs_no_search(self, diff_program, registry):
        report = evaluate(diff_program, registry, options(mode="full"))
        assert report.ufs_searches_run == 0
        assert report.answer_set_strings() == [
            "{dom(a), dom(b), dom(c), out(a), s1(a), s1(b), s2(b)}"
        ]
        assert verify(diff_program, registry) == []

    def test_concat_runs_no_search(self, concat_program, registry):
        report = evaluate(concat_program, registry, options(mode="full"))
        assert report.ufs_searches_run == 0
        assert report.answer_set_strings() == ["{dom(ab), str(a), str(ab), str(b)}"]
        assert verify(concat_program, registry) == []

    def test_guard(self, guard_program, guard_registry):
        report = evaluate(guard_program, guard_registry, options(mode="full"))
        assert sorted(report.answer_set_strings()) == ["{q}", "{r}"]
        assert report.candidates_rejected == 1
        assert verify(guard_program, guard_registry) == []

    def test_strong_negation(self, strong_negation_program, registry):
        report = evaluate(strong_negation_program, registry)
        assert report.answer_set_strings() == ["{p, q}"]

    @pytest.mark.parametrize("mode", ["full", "no-decomposition", "no-criterion", "brute"])
    def test_all_modes_agree_on_examples(self, mode, example1, example3, registry):
        assert evaluate(example1, registry, options(mode=mode)).answer_set_strings() == ["{}"]
        assert evaluate(example3, registry, options(mode=mode)).answer_set_strings() == ["{}"]


class TestReport:
    """Tests for the evaluation report"""

    def test_stats_keys(self, example1, registry):
        stats = evaluate(example1, registry).to_stats()
        assert set(stats) == STATS_KEYS
        assert set(stats["phase_times_ms"]) == {"analysis", "ufs_search", "guess_and_check", "total"}
        assert stats["ufs_checks_eligible"] == stats["ufs_searches_run"] + stats["ufs_searches_skipped"]

    @pytest.mark.parametrize("mode", ["full", "brute"])
    def test_stats_nest_one_level_at_most(self, mode, example3, registry):
        stats = evaluate(example3, registry, options(mode=mode)).to_stats()
        nested = {key for key, value in stats.items() if isinstance(value, (dict, list))}
        assert nested == {"phase_times_ms"}
        assert all(isinstance(value, (int, str)) for key, value in stats.items() if key not in nested)
        phases = stats["phase_times_ms"]
        assert "total" in phases
        assert all(isinstance(ms, float) and ms >= 0 for ms in phases.values())

    def test_brute_mode_counters(self, example1, registry):
        report = evaluate(example1, registry, options(mode="brute"))
        assert report.compatible_sets == 0
        assert report.ufs_searches_run == 0
        assert report.answer_set_strings() == ["{}"]

    def test_max_answers(self, registry):
        program = load_program("a | b | c.")
        report = evaluate(program, registry, options(max_answers=2))
        assert len(report.answer_sets) == 2
        assert report.compatible_sets == 2

    def test_no_decomposition_counts_one_component(self, example3, registry):
        report = evaluate(example3, registry, options(mode="no-decomposition"))
        assert report.components_total == 1
        assert report.ufs_searches_run == 1

    def test_no_criterion_searches_every_nonempty_candidate(self, diff_program, registry):
        report = evaluate(diff_program, registry, options(mode="no-criterion"))
        assert report.ufs_searches_run == report.compatible_sets == 1

    def test_ca_restriction_off(self, example3, registry):
        report = evaluate(example3, registry, options(ca_restriction=False))
        assert report.answer_set_strings() == ["{}"]
        assert report.ufs_searches_run == 1

    def test_exhaustive_cap(self, diff_program, registry):
        with pytest.raises(CapExceededError):
            evaluate(diff_program, registry, options(engine="exhaustive", exhaustive_cap=4))

    def test_oracle_failure_aborts(self, registry):
        def broken(interp, inputs, output):
            raise RuntimeError("source unavailable")

        registry.register(OracleSpec(OracleSignature("remote", (PREDICATE,), 0), broken))
        program = load_program("p :- &remote[q](). q.", registry)
        with pytest.raises(OracleError, match="remote"):
            evaluate(program, registry)

    def test_workers_match_sequential(self, registry):
        program = generate_instance(3, 1, 2, seed=1)
        sequential = evaluate(program, registry, options())
        parallel = evaluate(program, registry, options(workers=3))
        assert parallel.answer_sets == sequential.answer_sets
        assert parallel.search_node_expansions == sequential.search_node_expansions
        assert parallel.ufs_searches_run == sequential.ufs_searches_run


class TestVerify:
    """Tests for verify, including the corrupted-criterion check"""

    def test_examples_verify_clean(self, example1, example3, registry):
        assert verify(example1, registry) == []
        assert verify(example3, registry) == []

    def test_corrupted_criterion_is_caught(self, example1, registry):
        with patch("hexufs.pipeline.needs_ufs_check", return_value=(False, CriterionReport(False))):
            discrepancies = verify(example1, registry)
        assert discrepancies == ["spurious answer set {p}"]


@pytest.mark.slow
@pytest.mark.property_based
class TestRandomCorpus:
    """Mode equivalence and report consistency over the seeded corpus"""

    def test_modes_agree(self):
        rejecting = 0
        for seed in range(500):
            program, registry = random_instance(seed)
            brute = evaluate(program, registry, options(mode="brute"))
            expected = sorted(brute.answer_set_strings())
            for mode in ("full", "no-decomposition", "no-criterion"):
                report = evaluate(program, registry, options(mode=mode))
                assert sorted(report.answer_set_strings()) == expected, f"seed {seed}, mode {mode}"
                if mode == "full" and report.candidates_rejected:
                    rejecting += 1
            unrestricted = evaluate(program, registry, options(ca_restriction=False))
            assert sorted(unrestricted.answer_set_strings()) == expected, f"seed {seed}"
        # the unfounded-set search must actually reject candidates somewhere in the corpus
        assert rejecting >= 5

    def test_report_consistency(self):
        for seed in range(500):
            program, registry = random_instance(seed)
            report = evaluate(program, registry, options(engine="exhaustive"))
            compatible = {c.projected.true_atoms for c in enumerate_compatible_sets(program, registry)}
            assert set(report.answer_sets) <= compatible
            assert report.compatible_sets == len(report.answer_sets) + report.candidates_rejected
            assert report.ufs_checks_eligible == report.ufs_searches_run + report.ufs_searches_skipped
            assert report.components_ecyclic <= report.components_total

    def test_verify_corpus(self):
        for seed in range(100):
            program, registry = random_instance(seed)
            assert verify(program, registry) == [], f"seed {seed}"


class TestSearchEffort:
    """Counter-based effort comparison on the chain benchmark family"""

    @pytest.mark.parametrize("m,k,s", [(2, 1, 1), (3, 1, 2), (3, 2, 2), (4, 1, 3), (3, 0, 2)])
    def test_monotone_effort(self, m, k, s):
        rows = run_benchmark(InstanceSpec(m=m, k=k, s=s, seed=0))
        effort = {row["mode"]: row["search_node_expansions"] for row in rows}
        assert effort["full"] <= effort["no-decomposition"] <= effort["no-criterion"]
        answers = {row["mode"]: row["answer_sets"] for row in rows}
        assert len(set(answers.values())) == 1

    def test_no_e_cycle_means_no_search(self):
        for seed in range(3):
            rows = run_benchmark(InstanceSpec(m=4, k=0, s=2, seed=seed), modes=("full", "no-decomposition"))
            assert all(row["ufs_searches_run"] == 0 for row in rows)

    @pytest.mark.slow
    def test_decomposition_cuts_effort(self):
        rows = run_benchmark(InstanceSpec(m=8, k=1, s=3, seed=0))
        effort = {row["mode"]: row["search_node_expansions"] for row in rows}
        assert effort["full"] > 0
        assert effort["full"] <= 0.25 * effort["no-decomposition"]
        assert effort["full"] <= 0.10 * effort["no-criterion"]

    def test_benchmark_rows(self):
        rows = run_benchmark(InstanceSpec(m=2, k=1, s=1, seed=0), modes=("full", "brute"))
        assert [row["mode"] for row in rows] == ["full", "brute"]
        assert all(row["instance"] == "m=2,k=1,s=1,seed=0" for row in rows)
        assert rows[0]["answer_sets"] == rows[1]["answer_sets"]

"""
Tests for the hexufs command line
"""

import json
import os
import sqlite3
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from hexufs.cli import build_parser, cli_main, parse_interpretation
from hexufs.errors import PreconditionError
from hexufs.pipeline import MODES


def program_file(programs_dir, name):
    return os.path.join(programs_dir, name)


@pytest.fixture
def write_program(tmp_path):
    def write(text, name="program.hex"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


class TestParser:
    def test_subcommands(self):
        parser = build_parser()
        args = parser.parse_args(["solve", "x.hex", "--mode", "brute", "--oracles", "a.oracle", "--oracles", "b.oracle"])
        assert args.command == "solve"
        assert args.mode == "brute"
        assert args.oracles == ["a.oracle", "b.oracle"]

    def test_solve_mode_choices(self):
        assert build_parser().parse_args(["solve", "x.hex"]).mode == "full"
        assert cli_main(["solve", "x.hex", "--mode", "fast"]) == 2

    def test_missing_command(self):
        assert cli_main([]) == 2

    def test_modes_listed(self):
        assert "no-criterion" in MODES


class TestSolve:
    """Tests for hexufs solve"""

    def test_example1_prints_empty_answer_set(self, programs_dir, capsys):
        assert cli_main(["solve", program_file(programs_dir, "example1.hex")]) == 0
        assert capsys.readouterr().out == "{}\n"

    def test_guard_with_oracle(self, programs_dir, capsys):
        status = cli_main([
            "solve", program_file(programs_dir, "guard.hex"),
            "--oracles", program_file(programs_dir, "guard.oracle"),
        ])
        assert status == 0
        assert sorted(capsys.readouterr().out.splitlines()) == ["{q}", "{r}"]

    @pytest.mark.parametrize("mode", ["full", "no-decomposition", "no-criterion", "brute"])
    def test_modes_print_same_answers(self, mode, programs_dir, capsys):
        assert cli_main(["solve", program_file(programs_dir, "concat.hex"), "--mode", mode]) == 0
        assert capsys.readouterr().out == "{dom(ab), str(a), str(ab), str(b)}\n"

    def test_no_answer_set_exits_one(self, write_program, capsys):
        assert cli_main(["solve", write_program("a :- not a.")]) == 1
        assert capsys.readouterr().out == ""

    def test_stats_json_stdout(self, programs_dir, capsys):
        assert cli_main(["solve", program_file(programs_dir, "example3.hex"), "--stats-json", "-"]) == 0
        answer, document = capsys.readouterr().out.split("\n", 1)
        assert answer == "{}"
        stats = json.loads(document)
        assert stats["compatible_sets"] == 2
        assert stats["ufs_searches_run"] == 1
        assert stats["ufs_searches_skipped"] == 3
        assert stats["mode"] == "full"

    def test_stats_json_file(self, programs_dir, tmp_path, capsys):
        path = tmp_path / "stats.json"
        status = cli_main([
            "solve", program_file(programs_dir, "diff.hex"), "--stats-json", str(path), "--engine", "exhaustive",
        ])
        assert status == 0
        stats = json.loads(path.read_text())
        assert stats["ufs_searches_run"] == 0
        assert stats["engine"] == "exhaustive"

    def test_max_answers(self, write_program, capsys):
        assert cli_main(["solve", write_program("a | b | c."), "--max-answers", "1"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 1

    def test_workers(self, programs_dir, capsys):
        assert cli_main(["solve", program_file(programs_dir, "example3.hex"), "--workers", "2"]) == 0
        assert capsys.readouterr().out == "{}\n"


class TestErrors:
    """Errors exit with status 2 and a message on stderr"""

    def test_missing_file(self, tmp_path, capsys):
        assert cli_main(["solve", str(tmp_path / "absent.hex")]) == 2
        assert capsys.readouterr().err.startswith("hexufs: error:")

    def test_parse_error(self, write_program, capsys):
        assert cli_main(["solve", write_program("p :- q")]) == 2
        assert "hexufs: error: 1:" in capsys.readouterr().err

    def test_unknown_oracle(self, write_program, capsys):
        assert cli_main(["solve", write_program("p :- &nope[q]().")]) == 2
        assert "nope" in capsys.readouterr().err

    def test_malformed_oracle_file(self, write_program, tmp_path, capsys):
        oracle = tmp_path / "bad.oracle"
        oracle.write_text("oracle o inputs relation out_arity 0\n")
        assert cli_main(["solve", write_program("p."), "--oracles", str(oracle)]) == 2
        assert "line 1" in capsys.readouterr().err

    def test_exhaustive_cap(self, programs_dir, capsys):
        status = cli_main([
            "--exhaustive-cap", "2", "solve", program_file(programs_dir, "diff.hex"), "--engine", "exhaustive",
        ])
        assert status == 2

    @pytest.mark.parametrize("argv,flag", [
        (["solve", "{path}", "--max-answers", "0"], "--max-answers"),
        (["solve", "{path}", "--workers", "0"], "--workers"),
        (["solve", "{path}", "--max-answers", "-3"], "--max-answers"),
        (["--ufs-cap", "-1", "solve", "{path}"], "--ufs-cap"),
        (["--flp-cap", "-1", "verify", "{path}"], "--flp-cap"),
    ])
    def test_out_of_range_option(self, argv, flag, programs_dir, capsys):
        path = program_file(programs_dir, "example1.hex")
        assert cli_main([a.replace("{path}", path) for a in argv]) == 2
        err = capsys.readouterr().err
        assert err.startswith(f"hexufs: error: {flag}:")
        assert "Traceback" not in err

    def test_program_not_utf8(self, tmp_path, capsys):
        path = tmp_path / "binary.hex"
        path.write_bytes(b"p.\n\xff\xfe")
        assert cli_main(["solve", str(path)]) == 2
        assert capsys.readouterr().err.startswith("hexufs: error: input is not UTF-8 text")

    def test_oracle_file_not_utf8(self, write_program, tmp_path, capsys):
        oracle = tmp_path / "binary.oracle"
        oracle.write_bytes(b"\xff\xfe")
        assert cli_main(["analyze", write_program("p."), "--oracles", str(oracle)]) == 2
        assert "not UTF-8" in capsys.readouterr().err

    def test_option_error_is_recorded(self, programs_dir, run_db, capsys):
        path = program_file(programs_dir, "example1.hex")
        assert cli_main(["--record", "solve", path, "--workers", "0"]) == 2
        conn = sqlite3.connect(run_db)
        rows = conn.execute("SELECT command, status FROM solver_runs").fetchall()
        conn.close()
        assert rows == [("solve", "error: --workers: Input should be greater than or equal to 1")]


class TestAnalyze:
    def test_diff_is_skippable(self, programs_dir, capsys):
        assert cli_main(["analyze", program_file(programs_dir, "diff.hex")]) == 0
        assert "UFS check: skippable (no e-cycle)" in capsys.readouterr().out

    def test_example3_json(self, programs_dir, capsys):
        assert cli_main(["analyze", program_file(programs_dir, "example3.hex"), "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert [c["atoms"] for c in report["components"]] == [["p", "q"], ["r"]]
        assert report["criterion"]["has_e_cycle"] is True


class TestCheckUfs:
    """Tests for hexufs check-ufs"""

    def test_example3_witness(self, programs_dir, capsys):
        path = program_file(programs_dir, "example3.hex")
        assert cli_main(["check-ufs", path, "--interpretation", "p,q,r"]) == 0
        assert capsys.readouterr().out == "{r}\n"

    def test_unsupported_loop(self, programs_dir, capsys):
        path = program_file(programs_dir, "example3.hex")
        assert cli_main(["check-ufs", path, "--interpretation", "p,q"]) == 0
        assert capsys.readouterr().out == "{p, q}\n"

    def test_none(self, programs_dir, capsys):
        path = program_file(programs_dir, "diff.hex")
        interp = "dom(a),dom(b),dom(c),s1(a),s1(b),s2(b),out(a)"
        assert cli_main(["check-ufs", path, "--interpretation", interp]) == 0
        assert capsys.readouterr().out == "none\n"

    def test_unknown_atom(self, programs_dir, capsys):
        path = program_file(programs_dir, "example3.hex")
        assert cli_main(["check-ufs", path, "--interpretation", "z"]) == 2
        assert "atoms not in the program" in capsys.readouterr().err

    def test_parse_interpretation(self, example3):
        interp = parse_interpretation("p, r", example3)
        assert interp.universe == example3.atoms
        assert sorted(map(str, interp.true_atoms)) == ["p", "r"]
        with pytest.raises(PreconditionError):
            parse_interpretation("x", example3)


class TestVerify:
    def test_file(self, programs_dir, capsys):
        assert cli_main(["verify", program_file(programs_dir, "example1.hex")]) == 0
        assert capsys.readouterr().out == ""

    def test_random_corpus(self, capsys):
        assert cli_main(["verify", "--random", "10", "--seed", "3"]) == 0

    def test_needs_input(self, capsys):
        assert cli_main(["verify"]) == 2


class TestBench:
    """Tests for hexufs bench"""

    def test_json_rows(self, capsys):
        assert cli_main(["bench", "--spec", "m=3,k=1,s=2", "--json"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert [row["mode"] for row in rows] == ["full", "no-decomposition", "no-criterion"]
        assert len({row["answer_sets"] for row in rows}) == 1

    def test_table(self, capsys):
        assert cli_main(["bench", "--spec", "m=2,k=1,s=1", "--modes", "full,brute"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].split()[:2] == ["mode", "answers"]
        assert [line.split()[0] for line in lines[1:]] == ["full", "brute"]

    def test_unknown_mode(self, capsys):
        assert cli_main(["bench", "--spec", "m=2,k=1,s=1", "--modes", "full,fast"]) == 2
        assert "fast" in capsys.readouterr().err

    def test_bad_spec(self, capsys):
        assert cli_main(["bench", "--spec", "m=1,k=2,s=1"]) == 2


class TestRecord:
    def test_record_writes_run(self, programs_dir, run_db, capsys):
        assert cli_main(["--record", "solve", program_file(programs_dir, "example1.hex")]) == 0
        conn = sqlite3.connect(run_db)
        rows = conn.execute("SELECT command, status, answer_sets, mode FROM solver_runs").fetchall()
        conn.close()
        assert rows == [("solve", "ok", 1, "full")]

    def test_no_record_by_default(self, programs_dir, run_db, capsys):
        cli_main(["solve", program_file(programs_dir, "example1.hex")])
        assert not os.path.exists(run_db)

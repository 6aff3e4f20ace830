import json
import subprocess
import sys

import pytest

from sumsetlab.cli import main, parse_set
from sumsetlab.core import SetWindow, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    assert code == 0
    return json.loads(out), out


class TestLiterals:
    def test_comma_list(self):
        assert parse_set("0,2,5") == SetWindow.from_members([0, 2, 5], 5)
        assert parse_set("{0, 2, 5}") == SetWindow.from_members([0, 2, 5], 5)

    def test_empty(self):
        assert parse_set("{}", 4) == SetWindow.empty(4)
        assert parse_set("", 0) == SetWindow.empty(0)

    def test_binary(self):
        assert parse_set("b:101001") == SetWindow.from_members([0, 2, 5], 5)
        assert parse_set("b:0110", 9) == SetWindow.from_members([1, 2], 9)

    def test_file(self, tmp_path):
        p = tmp_path / "a.txt"
        p.write_text("1,4\n")
        assert parse_set(f"@{p}") == SetWindow.from_members([1, 4], 4)
        p.write_text("b:11")
        assert parse_set(f"@{p}", 3) == SetWindow.from_members([0, 1], 3)

    @pytest.mark.parametrize("bad", ["0,x", "b:102", "-1,2", "@/nonexistent/file"])
    def test_bad(self, bad):
        with pytest.raises(UsageError):
            parse_set(bad)

    def test_member_past_window(self):
        with pytest.raises(UsageError):
            parse_set("0,5", 3)


class TestDecide:
    def test_quiet_exit_codes(self, capsys):
        assert run(capsys, "decide", "0,1,2", "--quiet") == (0, "", "")
        assert run(capsys, "decide", "0", "--window", "2", "--quiet")[0] == 1
        assert run(capsys, "decide", "0,1,3", "--window", "4", "--quiet", "--node-limit", "1")[0] == 2

    def test_usage_errors_exit_64(self, capsys):
        assert run(capsys, "decide", "0,x")[0] == 64
        assert run(capsys, "decide", "0", "--budget", "9", "--window", "2")[0] == 64
        with pytest.raises(SystemExit) as info:
            main(["decide", "0,1", "--bogus"])
        assert info.value.code == 64
        with pytest.raises(SystemExit) as info:
            main(["frobnicate"])
        assert info.value.code == 64

    def test_json_witness(self, capsys):
        data, _ = run_json(capsys, "decide", "5,7,9", "--window", "34", "--min-size", "1",
                           "--budget", "2", "--size-cap", "2")
        assert data["verdict"] == "decomposable"
        wit = data["witness"]
        n = data["n"]
        got = {y + z for y in wit["Y"] for z in wit["Z"] if y + z <= n}
        assert got == set(wit["A_prime"])
        assert sorted(set(got) ^ {5, 7, 9}) == sorted(wit["flips"])

    def test_text_output(self, capsys):
        code, out, _ = run(capsys, "decide", "0,1,2")
        assert code == 0 and "decomposable" in out and "Y = {0,2}" in out

    def test_real_process_exit_status(self):
        proc = subprocess.run([sys.executable, "-m", "sumsetlab", "decide", "0", "--window", "2", "--quiet"])
        assert proc.returncode == 1
        proc = subprocess.run([sys.executable, "-m", "sumsetlab", "decide", "nope"], capture_output=True)
        assert proc.returncode == 64


class TestOtherVerbs:
    def test_census_threads_invariant(self, capsys):
        _, one = run_json(capsys, "census", "--n", "9", "--budget", "1")
        _, four = run_json(capsys, "census", "--n", "9", "--budget", "1", "--threads", "4")
        assert one == four

    def test_census_limit_exit_2(self, capsys):
        code, _, err = run(capsys, "census", "--n", "17")
        assert code == 2 and "limit" in err

    def test_sample_threads_and_rerun(self, capsys, tmp_path):
        args = ["sample", "event", "--k", "17", "--n", "34", "--trials", "3000", "--seed", "5"]
        a, raw_a = run_json(capsys, *args)
        _, raw_b = run_json(capsys, *args, "--threads", "3")
        _, raw_c = run_json(capsys, *args)
        assert raw_a == raw_b == raw_c
        assert a["p_bound"] == pytest.approx(251239591 / 2**35)
        out = tmp_path / "r.jsonl"
        run_json(capsys, *args, "--out", str(out))
        run_json(capsys, "sample", "decide", "--n", "10", "--trials", "200", "--seed", "1", "--out", str(out))
        csv_path = tmp_path / "r.csv"
        data, _ = run_json(capsys, "export", "--from", str(out), "--to", str(csv_path))
        assert data["rows"] == 2
        assert csv_path.read_text().splitlines()[0] == "n,k,trials,hits,p_hat,ci_low,ci_high,p_bound,seed"

    def test_sample_requires_seed(self):
        with pytest.raises(SystemExit) as info:
            main(["sample", "event", "--k", "17", "--n", "34", "--trials", "10", "--json"])
        assert info.value.code == 64

    def test_bounds(self, capsys):
        data, _ = run_json(capsys, "bounds", "--find-k")
        assert data["k"] == 17
        data, _ = run_json(capsys, "bounds", "--n", "34", "--k", "17")
        assert data["report"]["w"] == 631
        assert (data["report"]["p_bound"]["num"], data["report"]["p_bound"]["den"]) == (251239591, 2**35)
        data, _ = run_json(capsys, "bounds", "--find-k", "--threshold", "1.3")
        assert data["k"] == 14
        assert run(capsys, "bounds")[0] == 64
        assert run(capsys, "bounds", "--n", "3")[0] == 64

    def test_game(self, capsys):
        data, _ = run_json(capsys, "game", "--rounds", "2", "--f0", "0,1", "--k0", "4", "--verify")
        moves = data["transcript"]["moves"]
        assert [m["window_end"] for m in moves] == [37, 590]
        assert [c["n"] for c in data["verify"]["checks"]] == [37, 590]

    def test_game_random_needs_seed_in_json(self, capsys):
        code, _, err = run(capsys, "game", "--rounds", "1", "--f0", "0,1", "--k0", "4",
                           "--adversary", "random", "--json")
        assert code == 64 and "--seed" in err
        a, raw_a = run_json(capsys, "game", "--rounds", "2", "--f0", "0,1", "--k0", "4",
                            "--adversary", "random", "--seed", "3")
        _, raw_b = run_json(capsys, "game", "--rounds", "2", "--f0", "0,1", "--k0", "4",
                            "--adversary", "random", "--seed", "3")
        assert raw_a == raw_b

    def test_game_bad_params(self, capsys):
        assert run(capsys, "game", "--rounds", "1", "--f0", "0,1", "--k0", "4", "--alpha", "0.5")[0] == 64

    def test_freq(self, capsys):
        data, _ = run_json(capsys, "freq", "b:1111111111", "--pattern", "0,1", "--pattern-window", "2", "--n", "8")
        assert data["count"] == 9

    def test_oracle(self, capsys):
        data, _ = run_json(capsys, "oracle", "--n", "2", "--dump")
        assert data["count"] == 4
        assert data["masks"] == [[2], [0, 2], [1, 2], [0, 1, 2]]
        code, _, _ = run(capsys, "oracle", "--n", "14")
        assert code == 2

    def test_help_documents_exit_codes(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--help"])
        assert info.value.code == 0
        assert "--quiet" in capsys.readouterr().out

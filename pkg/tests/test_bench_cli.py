import csv
import io
import json

import pytest

from c1ke.bench import CSV_COLUMNS, BenchRecord, records_to_csv, resolve_sources, run_bench
from c1ke.cli import main
from c1ke.families import family_instances, gen_phi5
from c1ke.tableau import StrategyConfig


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestBench:
    def test_phi5_records(self):
        recs = run_bench(family_instances("phi5", range(1, 6)))
        assert [r.id for r in recs] == [f"phi5-00{n}" for n in range(1, 6)]
        assert all(r.verdict == "Closed" and r.expected == "Valid" for r in recs)
        nodes = [r.nodes for r in recs]
        assert nodes == sorted(nodes)

    def test_medical_records(self):
        recs = run_bench(family_instances("medical", []))
        assert [r.verdict for r in recs] == ["Closed", "Closed", "Open", "Closed"]
        assert not any(r.mismatch for r in recs)

    def test_empty(self):
        assert records_to_csv(run_bench([])) == ",".join(CSV_COLUMNS) + "\r\n"

    def test_limit_becomes_field(self):
        (rec,) = run_bench([gen_phi5(6)], StrategyConfig(node_limit=50))
        assert rec.verdict is None and rec.limit_hit == "node" and not rec.timed_out
        assert rec.nodes <= 50

    def test_jobs_do_not_change_csv(self):
        probs = family_instances("phi6", range(1, 5)) + family_instances("medical", [])
        one = records_to_csv(run_bench(probs, jobs=1), timing=False)
        many = records_to_csv(run_bench(list(reversed(probs)), jobs=3), timing=False)
        assert one == many

    def test_bad_jobs(self):
        with pytest.raises(ValueError):
            run_bench([], jobs=0)

    def test_mismatch_flag(self):
        rec = BenchRecord("x", "f", 1, "Open", "Valid", 1, 1, 0, 0, 0.0, 0)
        assert rec.mismatch

    def test_sources(self, tmp_path):
        (tmp_path / "a.p").write_text("P |- P  # id=refl expected=valid\nP |- Q\n")
        probs = resolve_sources([str(tmp_path), "phi5:2", "medical:1"])
        assert [p.id for p in probs] == ["refl", "a-002", "phi5-002", "medical-001"]
        with pytest.raises(ValueError):
            resolve_sources(["nope:1"])


GNC = "|- ~(P & (~P & @P))"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCli:
    def test_prove_gnc(self, capsys):
        code, out, _ = run(capsys, "prove", "-e", GNC)
        assert code == 0
        assert out.splitlines() == ["CLOSED", "nodes=7 branches=1 pb=0"]

    def test_prove_stdin(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO(GNC + "\n"))
        code, out, _ = run(capsys, "prove", "-")
        assert code == 0 and out.startswith("CLOSED")

    def test_prove_json_deterministic(self, capsys, tmp_path):
        f = tmp_path / "p.p"
        f.write_text(gen_phi5(2).to_line() + "\n")
        _, a, _ = run(capsys, "prove", str(f), "--json")
        _, b, _ = run(capsys, "prove", str(f), "--json")
        assert a == b and json.loads(a)["verdict"] == "Closed"

    def test_prove_dot(self, capsys, tmp_path):
        out = tmp_path / "p.dot"
        code, _, _ = run(capsys, "prove", "-e", GNC, "--dot", str(out))
        assert code == 0 and out.read_text().startswith("digraph")

    def test_prove_modes(self, capsys):
        for extra in (["--mode", "sigma-circ"], ["--no-derived"]):
            code, out, _ = run(capsys, "prove", "-e", GNC, *extra)
            assert code == 0 and out.startswith("CLOSED")

    def test_mismatch_wins(self, capsys, tmp_path):
        f = tmp_path / "m.p"
        f.write_text("P |- Q  # expected=valid\n" + gen_phi5(5).to_line() + "\n")
        code, out, err = run(capsys, "prove", str(f))
        assert code == 1 and "expected Valid" in err

    def test_limit_exit(self, capsys):
        code, out, err = run(capsys, "prove", "-e", str(gen_phi5(5).sequent), "--node-limit", "20")
        assert code == 3 and "LIMIT" in out

    def test_syntax_error(self, capsys):
        code, _, err = run(capsys, "prove", "-e", "P |- (Q")
        assert code == 2 and "byte 7" in err

    def test_syntax_error_in_file(self, capsys, tmp_path):
        f = tmp_path / "bad.p"
        f.write_text("P |- P\nP & |- Q\n")
        code, _, err = run(capsys, "prove", str(f))
        assert code == 2 and f"{f}:2:" in err

    def test_usage(self, capsys):
        assert run(capsys, "prove")[0] == 2
        assert run(capsys, "frobnicate")[0] == 2
        assert run(capsys, "prove", "/no/such/file")[0] == 2

    def test_check_case3(self, capsys):
        (case3,) = family_instances("medical", [3])
        code, out, _ = run(capsys, "check", "-e", str(case3.sequent))
        lines = out.splitlines()
        assert code == 0 and lines[0] == "INVALID"
        assert lines[1].startswith("# admissible-assignment certificate")
        assert "~M := 0" in lines and "K := 1" in lines and len(lines) == 15

    def test_check_valid_and_cap(self, capsys):
        assert run(capsys, "check", "-e", GNC)[1] == "VALID\n"
        code, out, _ = run(capsys, "check", "-e", GNC, "--cap", "3")
        assert code == 3

    def test_gen(self, capsys, tmp_path):
        code, out, _ = run(capsys, "gen", "phi5", "--n", "3")
        assert code == 0 and out == gen_phi5(3).to_line() + "\n"
        run(capsys, "gen", "phi6", "--n", "1..3", "--out", str(tmp_path))
        assert sorted(p.name for p in tmp_path.iterdir()) == ["phi6-001.p", "phi6-002.p", "phi6-003.p"]
        _, out, _ = run(capsys, "gen", "medical")
        assert len(out.splitlines()) == 4

    def test_parse_generated(self, capsys, tmp_path):
        f = tmp_path / "f.txt"
        run(capsys, "gen", "random", "--formulas", "--count", "100", "--seed", "7", "--out", str(f))
        code, out, _ = run(capsys, "parse", str(f))
        assert code == 0 and out == "ok 100/100\n"

    def test_parse_error(self, capsys, tmp_path):
        f = tmp_path / "f.txt"
        f.write_text("P\n(Q\n")
        code, _, err = run(capsys, "parse", str(f))
        assert code == 2 and ":2:" in err

    def test_bench(self, capsys, tmp_path):
        out = tmp_path / "b.csv"
        code, _, err = run(capsys, "bench", "medical", "phi6:1..2", "--csv", str(out))
        assert code == 0 and "6 problems, 0 mismatches" in err
        got = rows(out.read_text())
        assert [r["id"] for r in got] == ["medical-001", "medical-002", "medical-003", "medical-004",
                                          "phi6-001", "phi6-002"]
        assert all(r["elapsed_ms"] for r in got)

    def test_bench_no_timing_stdout(self, capsys):
        code, out, _ = run(capsys, "bench", "medical:3", "--no-timing")
        assert out.splitlines()[1] == "medical-003,medical,3,Open,Invalid,13,1,0,5,,0,"

    def test_bench_limit_and_jobs(self, capsys):
        assert run(capsys, "bench", "phi5:6", "--node-limit", "30")[0] == 3
        assert run(capsys, "bench", "medical", "--jobs", "0")[0] == 2

    def test_color_off_when_not_tty(self, capsys, monkeypatch):
        monkeypatch.setenv("C1KE_COLOR", "auto")
        _, out, _ = run(capsys, "prove", "-e", GNC)
        assert "\x1b[" not in out

import csv
import io
import json
from fractions import Fraction as F

import pytest

from budgetmatch.cli import BENCH_HEADER, main
from budgetmatch.serialize import load_market


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def ex1_path(tmp_path, capsys):
    p = tmp_path / "ex1.json"
    assert run(capsys, "generate", "example1", "-o", p)[0] == 0
    return p


def write(tmp_path, name, content):
    p = tmp_path / name
    p.write_text(content if isinstance(content, str) else json.dumps(content), encoding="utf-8")
    return p


def test_solve_example_with_trace(ex1_path, data_dir, capsys):
    code, out, _ = run(capsys, "solve", ex1_path, "--trace")
    assert code == 0
    trace, report = out.split("\n\n", 1)
    assert trace + "\n" == (data_dir / "example1_trace.txt").read_text(encoding="utf-8")
    assert "alpha_star: 3/2" in report
    assert "bound: 5/2" in report
    assert "matching: {x^{2,2},x^{3,1},x^{4,1}}" in report


def test_solve_json(ex1_path, capsys):
    code, out, _ = run(capsys, "solve", ex1_path, "--json")
    doc = json.loads(out)
    assert code == 0 and doc["alpha_star"] == "3/2" and doc["matching"] == [3, 4, 6]
    assert doc["assignment"]["d_1"] is None


def test_solve_empty_instance(tmp_path, capsys):
    p = write(tmp_path, "empty.json", {"doctors": 0, "hospitals": 0, "contracts": []})
    code, out, _ = run(capsys, "solve", p)
    assert code == 0
    assert "matching: ∅" in out and "alpha_star: 1" in out


def test_solve_golden_gadget_prop_removable(tmp_path, capsys):
    p = tmp_path / "g.json"
    run(capsys, "generate", "thm6", "--eps", "1/10", "-o", p)
    assert len(load_market(p).contracts) == 5
    code, out, _ = run(capsys, "solve", p, "--mechanism", "prop-removable")
    assert code == 0
    star = F(out.split("alpha_star: ")[1].split()[0])
    assert star <= F(144, 89)


def test_prop_removable_needs_proportional(ex1_path, capsys):
    code, _, err = run(capsys, "solve", ex1_path, "--mechanism", "prop-removable")
    assert code == 2 and "proportional" in err


def test_verify_boundary(ex1_path, tmp_path, capsys):
    mm = write(tmp_path, "mm.json", ["x^{2,2}", "x^{3,1}", "x^{4,1}"])
    code, out, _ = run(capsys, "verify", ex1_path, mm, "--alpha", "1")
    assert code == 1
    assert "h_1 | 193 | 194 | 194/193 | {x^{1,1},x^{3,1}}" in out
    assert "blocking: h_1 via {x^{1,1},x^{3,1}}" in out
    assert run(capsys, "verify", ex1_path, mm, "--alpha", "3/2")[0] == 0
    assert run(capsys, "verify", ex1_path, mm, "--alpha", "phi")[0] == 0
    assert run(capsys, "verify", ex1_path, mm, "--alpha", "1/2")[0] == 2


def test_verify_hand_matching(ex1_path, tmp_path, capsys):
    mm = write(tmp_path, "hand.json", {"matching": ["x^{1,1}", "x^{3,1}", "x^{2,2}"]})
    code, out, _ = run(capsys, "verify", ex1_path, mm)
    # h_1 already holds its best coalition; h_2 is the one blocked
    assert "h_1 | 194 | 194 | 1 |" in out
    assert code == 1 and "blocking: h_2" in out


def test_verify_infeasible_matching(ex1_path, tmp_path, capsys):
    mm = write(tmp_path, "bad.json", [0, 1])
    assert run(capsys, "verify", ex1_path, mm)[0] == 2


def test_generate_example_matches_table(ex1_path):
    m = load_market(ex1_path)
    got = {m.label(c.id): (c.u, c.s) for c in m.contracts}
    assert got == {
        "x^{1,1}": (111, F(57, 100)), "x^{1,2}": (30, F(56, 100)),
        "x^{2,1}": (98, F(50, 100)), "x^{2,2}": (40, F(55, 100)),
        "x^{3,1}": (83, F(42, 100)), "x^{3,2}": (10, F(60, 100)),
        "x^{4,1}": (110, F(55, 100)), "x^{4,2}": (20, F(45, 100)),
    }


def test_generate_random_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "generate", "random", "--seed", 7, "-o", a)
    run(capsys, "generate", "random", "--seed", 7, "-o", b)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("argv", [
    ["generate", "thm2", "--s-bar", "2/5"],
    ["generate", "subset-sum", "--a", "1,2"],
    ["generate", "random", "--doctors", "5:2"],
    ["generate", "thm6", "--eps", "abc"],
    ["generate", "nosuch"],
])
def test_generate_bad_params(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_generate_subset_sum_to_stdout(capsys):
    code, out, _ = run(capsys, "generate", "subset-sum", "--a", "1,2", "--t", "3")
    assert code == 0 and json.loads(out)["meta"]["m"] == 4


def test_probe_density_counterexample(data_dir, capsys):
    code, out, _ = run(capsys, "probe", data_dir / "density_manipulable.json")
    assert code == 1
    assert "misreport: x^{3,1}" in out and "truthful outcome: ∅" in out


@pytest.mark.parametrize("mechanism, proportional", [("smallest-first", True), ("matroid", False)])
def test_probe_strategyproof_mechanisms(mechanism, proportional, tmp_path, capsys):
    for seed in range(50):
        p = tmp_path / f"{seed}.json"
        args = ["generate", "random", "--seed", seed, "-o", p]
        if proportional:
            args.append("--proportional")
        run(capsys, *args)
        assert run(capsys, "probe", p, "--mechanism", mechanism)[0] == 0, seed


def test_probe_limit(ex1_path, capsys):
    assert run(capsys, "probe", ex1_path, "--limit", "1")[0] == 2


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == BENCH_HEADER
    return rows[1:]


def test_bench_density_vs_smallest_first(capsys):
    code, out, _ = run(capsys, "bench", "--mechanisms", "density,smallest-first", "--proportional",
                       "--s-bar", "3/5", "--doctors", "3,5", "--seeds", 5)
    rows = parse_csv(out)
    assert code == 0 and len(rows) == 2 * 2 * 5
    assert all(F(r[4]) <= F(5, 2) for r in rows)
    assert [r[0] for r in rows[:10]] == ["density"] * 10


def test_bench_matroid(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bench", "--mechanisms", "matroid", "--doctors", 4, "--s-bar", "3/5",
                     "--seeds", 8, "-o", out)
    rows = parse_csv(out.read_text())
    assert code == 0 and len(rows) == 8
    assert all(F(r[4]) <= F(r[5]) <= 6 for r in rows)


def test_bench_workers_keep_order(capsys):
    args = ["bench", "--mechanisms", "density,matroid", "--doctors", "3,4", "--seeds", 4]
    serial = parse_csv(run(capsys, *args)[1])
    parallel = parse_csv(run(capsys, *args, "--workers", 3)[1])
    assert [r[:6] for r in serial] == [r[:6] for r in parallel]


def test_bench_empty_sweep(capsys):
    code, out, _ = run(capsys, "bench", "--seeds", 0)
    assert code == 0 and out == ",".join(BENCH_HEADER) + "\n"


@pytest.mark.parametrize("content", [
    "", "{", "[]", "null", '{"doctors": 1}', '{"doctors": 1, "hospitals": 1, "contracts": [7]}',
    '{"doctors": -1, "hospitals": 1, "contracts": []}',
    '{"doctors": 1, "hospitals": 1, "contracts": [{"doctor": 0, "hospital": 0, "u": "1", "s": "1/2"}], "prefs": {"0": [0, 0]}}',
    '{"doctors": 1, "hospitals": 1, "contracts": [{"doctor": 0, "hospital": 0, "u": {}, "s": "1/2"}]}',
    b"\xff\xfe".decode("latin-1"),
])
def test_malformed_instances_exit_2(content, tmp_path, capsys):
    p = write(tmp_path, "bad.json", content)
    for cmd in (["solve", p], ["probe", p]):
        code, out, err = run(capsys, *cmd)
        assert code == 2
        assert "Traceback" not in err and err.startswith("error:")


def test_missing_file(capsys):
    code, _, err = run(capsys, "solve", "/no/such/file.json")
    assert code == 2 and "cannot read" in err


def test_unknown_mechanism(ex1_path, capsys):
    assert run(capsys, "solve", ex1_path, "--mechanism", "magic")[0] == 2
    assert run(capsys, "solve", ex1_path, "--pick", "random:x")[0] == 2

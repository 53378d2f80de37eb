import subprocess
import sys
from fractions import Fraction

import pytest

from spd_alloc.cli import bench_rows, main
from spd_alloc.model import Allocation, validate_instance
from spd_alloc.transfers import is_stable

from test_oracle import greedy_first_liker


def run(capsys, *argv, **kw):
    code = main(list(argv), **kw)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def write(tmp_path):
    def _write(text, name="inst.txt"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


def test_solve_ind(capsys, write):
    code, out, _ = run(capsys, "solve", "--input", write("2 2\n11\n11\n"))
    assert code == 0
    assert out == "agent 1: 1\nagent 2: 2\nprofile: 1 1\n"


def test_solve_div_thirds(capsys, write):
    code, out, _ = run(capsys, "solve", "--mode", "div", "--input", write("3 2\n11\n11\n11\n"))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[-1] == "profile: 2/3 2/3 2/3"
    totals = {}
    for ln in lines[:-1]:
        _, j, _, i, share = ln.split()
        assert Fraction(share).denominator in (1, 3)
        totals[j] = totals.get(j, 0) + Fraction(share)
    assert totals == {"1": 1, "2": 1}


def test_solve_to_file(capsys, write, tmp_path):
    dest = tmp_path / "out.txt"
    code, out, _ = run(capsys, "solve", "--input", write("1 2\n11\n"), "--output", str(dest))
    assert code == 0 and out == ""
    assert dest.read_text() == "agent 1: 1 2\nprofile: 2\n"


def test_exit_codes(capsys, write, tmp_path):
    assert run(capsys, "solve", "--input", write("x y\n11\n"))[0] == 2
    assert run(capsys, "solve", "--input", str(tmp_path / "missing.txt"))[0] == 3
    assert run(capsys, "solve", "--input", write("1 1\n1\n"), "--output", str(tmp_path / "no" / "dir.txt"))[0] == 3
    assert run(capsys, "bench", "--m", "0", "--n", "3")[0] == 2
    assert run(capsys, "score", "--criterion", "median", "--profile", "1,2")[0] == 2
    assert run(capsys, "score", "--criterion", "gini", "--profile=-1,2")[0] == 2
    assert run(capsys)[0] == 2


@pytest.mark.parametrize(
    "criterion,prof,expected",
    [("congestion", "0,5,9", "46"), ("envysum", "2,2,10", "16"), ("gini", "0,0,0", "0"), ("leximin", "4/3,2", "(-4/3,-2)")],
)
def test_score(capsys, criterion, prof, expected):
    code, out, _ = run(capsys, "score", "--criterion", criterion, "--profile", prof)
    assert code == 0 and out.strip() == expected


def test_layers(capsys, write):
    code, out, _ = run(capsys, "layers", "--input", write("3 4\n1111\n0001\n0000\n"))
    assert code == 0
    assert out == "layer 0: agents=[3] items=[]\nlayer 1: agents=[2] items=[4]\nlayer 3: agents=[1] items=[1,2,3]\n"


def test_linear(capsys, write):
    code, out, _ = run(capsys, "linear", "--input", write("3 2\n11\n11\n11\n"), "--costs", "0,1,2")
    assert code == 0 and out.endswith("profile: 1 1 0\n")
    assert run(capsys, "linear", "--input", write("3 2\n11\n11\n11\n"), "--costs", "0,1")[0] == 2


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--max-n", "3", "--max-m", "6", "--trials", "50", "--seed", "42")
    assert code == 0
    assert out.splitlines()[0] == "# seed 42"
    assert out.splitlines()[-1].endswith("checks passed")
    code, out, _ = run(capsys, "verify", "--trials", "0")
    assert code == 0 and "0/0" in out


def test_verify_mutant(capsys):
    code, out, err = run(capsys, "verify", "--max-n", "3", "--max-m", "4", "--trials", "20", "--seed", "5", solver=greedy_first_liker)
    assert code == 1
    assert "FAIL" in out and "first failure: solver-stable" in err


def test_verify_deterministic(capsys):
    a = run(capsys, "verify", "--trials", "5", "--seed", "8")[1]
    b = run(capsys, "verify", "--trials", "5", "--seed", "8")[1]
    assert a == b


def test_fixture(capsys):
    code, out, _ = run(capsys, "fixture")
    assert code == 0
    assert "leximax: item 4 -> agent 4, profile 1 5/3 5/3 5/3" in out


def test_bench_csv(capsys):
    code, out, _ = run(capsys, "bench", "--m", "100,200,400", "--n", "50")
    rows = out.strip().splitlines()
    assert code == 0 and rows[0] == "m,n,density,wall_time_ms,augmentations"
    assert [r.split(",")[0] for r in rows[1:]] == ["100", "200", "400"]
    times = [float(r.split(",")[3]) for r in rows[1:]]
    assert times[0] < times[2]


def test_bench_doubling_ratio():
    best = {}
    for _ in range(3):
        for m, n, _, wall, aug in bench_rows([500, 1000, 2000], [100], 0.5, 3):
            best[m] = min(best.get(m, wall), wall)
            assert aug <= m
    assert best[2000] / best[1000] <= 8
    assert best[1000] / best[500] <= 8


def test_module_entry_point(tmp_path):
    p = tmp_path / "i.txt"
    p.write_text("2 2\n11\n11\n")
    first = subprocess.run([sys.executable, "-m", "spd_alloc", "solve", "--input", str(p)], capture_output=True, text=True)
    second = subprocess.run([sys.executable, "-m", "spd_alloc", "solve", "--input", str(p)], capture_output=True, text=True)
    assert first.returncode == 0 and first.stdout == second.stdout
    helptext = subprocess.run([sys.executable, "-m", "spd_alloc", "--help"], capture_output=True, text=True).stdout
    assert "exit codes" in helptext and "SPD_ALLOC_THREADS" in helptext


def test_mutant_is_really_wrong():
    # the mutant returns a clean allocation, just not a stable one
    inst = validate_instance([[1, 1, 1], [0, 0, 1]])
    alloc = greedy_first_liker(inst)
    assert isinstance(alloc, Allocation) and not is_stable(inst, alloc)

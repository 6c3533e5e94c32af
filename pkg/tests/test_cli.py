import pytest

from cwsteiner.cli import main
from cwsteiner.expr import parse_instance

TRIANGLE = ("k 2\nterminals a b c\nbudget 3\n"
            "expr (join 1 2 (union (join 1 2 (union (intro 1 a) (intro 2 b))) (intro 1 c)))\n")
APART = "k 2\nterminals a b\nbudget 2\nexpr (union (intro 1 a) (intro 2 b))\n"


@pytest.fixture
def write(tmp_path):
    def _write(text, name="x.inst"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write


def test_solve_yes_no_error(write, capsys):
    assert main(["solve", write(TRIANGLE)]) == 0
    assert capsys.readouterr().out == "YES size=3 repeats=20 seed=0\n"
    assert main(["solve", write(APART), "--repeats", "3", "--seed", "5"]) == 1
    assert capsys.readouterr().out == "NO\n"
    assert main(["solve", write("k 2\nbogus\n")]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["solve", "/nonexistent/file"]) == 2


def test_oracle(write, capsys):
    assert main(["oracle", write(TRIANGLE)]) == 0
    assert capsys.readouterr().out == "YES size=3 exact=true\n"
    assert main(["oracle", write(APART)]) == 1
    assert capsys.readouterr().out == "NO exact=true\n"
    names = [f"v{i}" for i in range(21)]
    expr = f"(intro 1 {names[0]})"
    for v in names[1:]:
        expr = f"(union {expr} (intro 1 {v}))"
    assert main(["oracle", write(f"k 1\nterminals v0\nbudget 1\nexpr {expr}\n")]) == 2


def test_realize(write, capsys):
    text = "k 2\nterminals a b\nbudget 2\nexpr (join 1 2 (union (intro 1 a) (intro 2 b)))\n"
    assert main(["realize", write(text)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "vertices 2" and [l for l in out if l.startswith("edge")] == ["edge a b"]


def test_analyze(capsys):
    assert main(["analyze", "--k", "2", "--check", "rank"]) == 0
    assert capsys.readouterr().out == "rank(M_B)=16 PASS\n"
    assert main(["analyze", "--k", "3", "--check", "triangular", "--check", "basis"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 2
    assert main(["analyze", "--k", "2"]) == 0
    assert capsys.readouterr().out.count("PASS") == 5
    assert main(["analyze", "--k", "4", "--check", "basis"]) == 2


def test_gen_roundtrip(tmp_path, capsys):
    out = tmp_path / "g.inst"
    assert main(["gen", "--n", "6", "--k", "3", "--terminals", "2", "--seed", "4", "--out", str(out)]) == 0
    inst = parse_instance(out.read_text())
    assert inst.n == 6 and len(inst.terminals) == 2
    assert main(["gen", "--n", "2", "--k", "1", "--terminals", "3"]) == 2


def test_solve_agrees_with_oracle(tmp_path, capsys):
    for seed in range(15):
        path = tmp_path / f"{seed}.inst"
        main(["gen", "--n", "6", "--k", "2", "--terminals", "3", "--seed", str(seed), "--out", str(path)])
        a = main(["solve", str(path)])
        solved = capsys.readouterr().out.split()
        b = main(["oracle", str(path)])
        exact = capsys.readouterr().out.split()
        assert a == b
        if a == 0:
            assert solved[1] == exact[1]


def test_selftest_quick(capsys):
    assert main(["selftest", "--quick"]) == 0
    assert capsys.readouterr().out.strip().endswith("PASS")


def test_bad_flags():
    assert main(["solve"]) == 2
    assert main(["solve", "x", "--repeats", "0"]) == 2

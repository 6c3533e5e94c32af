import random

import pytest

from cwsteiner.expr import gen_random_instance


def tiny_instances(count, max_n=6, max_k=3, max_nodes=12, start=0):
    """Deterministic random instances small enough for the pair-enumeration oracle."""
    out, seed = [], start
    while len(out) < count:
        rng = random.Random(seed)
        n = rng.randint(1, max_n)
        t = rng.randint(1, n)
        inst = gen_random_instance(n, rng.randint(1, max_k), t, seed,
                                   budget=rng.randint(t, n) if rng.random() < 0.3 else None)
        if len(inst.nodes) <= max_nodes:
            out.append(inst)
        seed += 1
    return out


@pytest.fixture
def two_vertex_text():
    return "k 2\nterminals a b\nbudget 2\nexpr (join 1 2 (union (intro 1 a) (intro 2 b)))\n"


ACCEPTANCE_LINES: list[str] = []


def record(criterion, name, ok, detail):
    line = f"ACCEPTANCE {criterion} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

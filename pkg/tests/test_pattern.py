import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from cwsteiner.expr import LabeledGraph
from cwsteiner.pattern import (P, Pattern, PatternError, action, complete_rep, consistent,
                               dominates, enumerate_complete, enumerate_cs, enumerate_patterns,
                               fix, forget, inc, is_complete, is_cs, join, label_mask, lbs,
                               parity_rep, parity_rep_step, patadd, pattern_of_solution, relabel,
                               rotate, sing, symdiff, union_pat)


def L(*labels):
    return label_mask(*labels)


def test_notation_roundtrip():
    for text in ["[0]", "[01,2]", "[0,1,12]", "[e,0]", "[1,2,012]"]:
        assert str(P(text)) == str(P(str(P(text))))
    assert P("[1,2]") == P("[0,1,2]")
    assert P("[0.10,11.]").sets == (1 | 1 << 10, 1 << 11)
    assert P(str(P("[0.10,11.]"))) == P("[0.10,11.]")
    with pytest.raises(PatternError):
        P("[01,02]")
    with pytest.raises(PatternError):
        P("01")


def test_accessors():
    p = P("[0]")
    assert (lbs(p), sing(p), inc(p)) == (0, 0, 0)
    p = P("[01,2]")
    assert (lbs(p), sing(p), inc(p)) == (L(1, 2), L(2), L(1))
    p = P("[0,1,12]")
    assert (lbs(p), sing(p), inc(p)) == (L(1, 2), L(1), L(2))


def test_join_examples():
    for p in enumerate_patterns(2):
        assert join(p, P("[0]")) == p
    assert join(P("[0,1]"), P("[01]")) == P("[01]")
    assert join(P("[01,2]"), P("[12,0]")) == P("[012]")


def test_join_does_not_merge_within_pattern():
    # {1} and {12} overlap but belong to the same pattern
    assert join(P("[0,1,12]"), P("[0]")) == P("[0,1,12]")


def test_relabel_examples():
    assert relabel(P("[0,1]"), 1, 2) == P("[0,2]")
    assert relabel(P("[0,1,2]"), 1, 2) == P("[0,2]")
    assert relabel(P("[01,3]"), 2, 1) == P("[01,3]")


def test_union_examples():
    assert union_pat(P("[0]"), P("[0]")) == P("[0]")
    assert union_pat(P("[01]"), P("[0,2]")) == P("[01,2]")
    assert union_pat(P("[0,1]"), P("[0,1]")) == P("[0,1]")


def test_patadd_examples():
    assert patadd(P("[0,1]"), 1, 2) == P("[0,1]")
    assert patadd(P("[0,1,2]"), 1, 2) == P("[0,12]")
    assert patadd(P("[01,2]"), 1, 2) == P("[012]")


def test_consistent_examples():
    assert consistent(P("[0]"), P("[0]"))
    assert not consistent(P("[0,1]"), P("[0]"))
    assert consistent(P("[0,1]"), P("[01]"))
    assert not consistent(P("[e,0]"), P("[0]"))


def test_consistent_matches_join_definition():
    ps = enumerate_patterns(2)
    for p in ps:
        for q in ps:
            assert consistent(p, q) == (len(join(p, q).sets) == 1)


def test_rotate_examples():
    assert rotate(P("[0,12]"), 1, 2) == P("[0,12]")
    # removing 1 leaves an empty member that is kept
    assert rotate(P("[0,1]"), 1, 2) == P("[e,0]")
    assert rotate(P("[0,3]"), 1, 2) == P("[0,3]")


def test_fix_forget_examples():
    assert fix(P("[01]"), 1) == P("[01,1]")
    assert forget(P("[01]"), 1) == P("[0]")
    assert fix(P("[0,1]"), 1) == P("[0,1]")
    assert forget(P("[0,1]"), 1) == P("[0,1]")
    assert forget(P("[012]"), 2) == P("[01]")


def test_complete_rep_examples():
    assert complete_rep(P("[0,1]")) == {P("[0,1]")}
    assert complete_rep(P("[01]")) == {P("[0]"), P("[01,1]")}
    assert complete_rep(P("[012]")) == {P("[0]"), P("[01,1]"), P("[02,2]"), P("[012,1,2]")}


def test_is_complete_is_cs():
    assert is_complete(P("[01,1]")) and is_cs(P("[01,1]"))
    assert is_complete(P("[12,1,2,0]")) and not is_cs(P("[12,1,2,0]"))
    assert not is_complete(P("[01]")) and not is_cs(P("[01]"))
    assert all(is_complete(p) for p in enumerate_patterns(2) if is_cs(p))


def test_action_examples():
    assert all(action(P("[0,1]"), ell) == P("[0,1]") for ell in range(1, 5))
    assert action(P("[012]"), 1) == P("[012,1,2]")
    assert action(P("[012]"), 4) == P("[0]")
    assert action(P("[01]"), 3) is None
    assert action(P("[01]"), 1) == P("[01,1]") and action(P("[01]"), 2) == P("[0]")
    assert action(P("[0123]"), 1) is None
    with pytest.raises(PatternError):
        action(P("[0]"), 5)


def test_action_on_merged_pair():
    q = patadd(P("[0,1,2]"), 1, 2)
    assert q == P("[0,12]")
    got = [action(q, ell) for ell in range(1, 5)]
    assert got == [P("[0,12,1,2]"), P("[0,1]"), P("[0,2]"), P("[e,0]")]
    # the literal sequential reading keeps 2 once forgetting 1 made it a singleton
    assert action(q, 4, sequential=True) == P("[0,2]")


def _acted_family(p, i, j, ell, sequential):
    a = action(patadd(p, i, j), ell, sequential)
    return frozenset() if a is None else parity_rep(a)


@pytest.mark.parametrize("sequential, violations", [(False, 0), (True, 84)])
def test_actions_commute_with_parity_rep_k3(sequential, violations):
    bad = 0
    for p in enumerate_complete(3):
        for i, j in itertools.permutations(range(1, 4), 2):
            for ell in range(1, 5):
                acc = set()
                for r in parity_rep(p):
                    symdiff(acc, _acted_family(r, i, j, ell, sequential))
                bad += frozenset(acc) != _acted_family(p, i, j, ell, sequential)
    assert bad == violations


def test_action_of_patadd_with_zero_set():
    q = patadd(P("[01,1,2]"), 1, 2)
    assert q == P("[012]")
    assert [action(q, ell) for ell in range(1, 5)] == [P("[012,1,2]"), P("[01,1]"), P("[02,2]"), P("[0]")]


def test_actions_form_complete_rep():
    for p in enumerate_complete(2):
        for i, j in [(1, 2), (2, 1)]:
            q = patadd(p, i, j)
            outs = {action(q, ell) for ell in range(1, 5)} - {None}
            assert all(is_complete(r) for r in outs)
            # up to a pattern with an empty member, which is consistent with nothing
            assert {r for r in outs if 0 not in r.sets} == {r for r in complete_rep(q) if 0 not in r.sets}


def test_parity_rep_step_examples():
    got = parity_rep_step(P("[12,1,2,0]"), L(1, 2))
    assert got == {P("[0,1,2]"), P("[01,1,2]"), P("[02,1,2]")}
    assert all(is_cs(r) for r in got)
    with pytest.raises(PatternError):
        parity_rep_step(P("[0,1,2,12]"), L(1))


def test_parity_rep_step_cancels_duplicates():
    # Z already contains 2, so S'={} and S'={2} give the same pattern
    p = P("[02,12,1,2]")
    assert parity_rep_step(p, L(1, 2)) == {P("[012,1,2]")}


def test_parity_rep_examples():
    for cs in enumerate_cs(2):
        assert parity_rep(cs) == {cs}
    assert parity_rep(P("[12,1,2,0]")) == {P("[0,1,2]"), P("[01,1,2]"), P("[02,1,2]")}
    assert parity_rep(P("[e,0,1]")) == frozenset()
    with pytest.raises(PatternError):
        parity_rep(P("[01]"))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_parity_rep_identity_exhaustive(k):
    complete = enumerate_complete(k)
    for p in complete:
        fam = parity_rep(p)
        assert all(is_cs(r) for r in fam)
        for q in complete:
            assert sum(consistent(r, q) for r in fam) % 2 == consistent(p, q)


def test_enumeration_counts():
    assert len(enumerate_cs(2)) == 9
    assert len(enumerate_patterns(1)) == 8
    assert len(set(enumerate_patterns(2))) == 2 ** 4 * 4
    assert len(enumerate_patterns(3)) == 2 ** 8 * 8
    complete1 = enumerate_complete(1)
    assert set(complete1) == {P("[0]"), P("[e,0]"), P("[0,1]"), P("[01,1]"), P("[e,0,1]"), P("[e,01,1]")}
    for k in range(6):
        assert len(enumerate_cs(k)) == 3 ** k
    with pytest.raises(PatternError):
        enumerate_patterns(5)


def test_dominates_examples():
    for p in enumerate_patterns(1):
        assert dominates(p, p, 1)
    assert dominates(P("[01]"), P("[01,1]"), 2)
    # [01,1] is consistent with [0,1] but not with [0], and vice versa for [0]
    assert not dominates(P("[0]"), P("[0,1]"), 2)
    assert not dominates(P("[0,1]"), P("[0]"), 2)


def _graph(vertices, edges, labels):
    return LabeledGraph(list(vertices), {frozenset(e) for e in edges}, dict(zip(vertices, labels)))


def test_pattern_of_solution_examples():
    g = _graph("a", [], [1])
    assert pattern_of_solution(g, [], "a") == P("[0]")
    assert pattern_of_solution(g, ["a"], "a") == P("[01]")
    g = _graph("abc", [], [1, 2, 1])
    assert pattern_of_solution(g, ["a", "b"], "c") == P("[0,1,2]")
    g = _graph("abc", [("a", "b")], [1, 2, 1])
    assert pattern_of_solution(g, "abc", "c") == P("[01,12]")


# --- algebraic properties at k <= 3 -------------------------------------------------------

def test_lbs_sing_exhaustive():
    ps = enumerate_patterns(2) + random.Random(1).sample(enumerate_patterns(3), 300)
    for p in ps:
        for q in ps:
            if sing(p) & ~lbs(q):
                assert not consistent(p, q)


def test_complete_consistency_implies_equal_labels():
    cs = enumerate_complete(3)
    for p in cs:
        for q in cs:
            if consistent(p, q):
                assert lbs(p) == lbs(q)


def test_complete_rep_represents_exhaustive_k2():
    ps = enumerate_patterns(2)
    for p in ps:
        rep = complete_rep(p)
        assert all(is_complete(r) for r in rep)
        assert len(rep) <= 2 ** inc(p).bit_count()
        for q in ps:
            assert consistent(p, q) == any(consistent(r, q) for r in rep)


pattern_k3 = st.sampled_from(enumerate_patterns(3))


@settings(max_examples=300, deadline=None)
@given(pattern_k3, pattern_k3, pattern_k3)
def test_join_algebra(p, q, r):
    assert join(p, q) == join(q, p)
    assert join(join(p, q), r) == join(p, join(q, r))
    assert consistent(join(p, q), r) == consistent(p, join(q, r))


@settings(max_examples=300, deadline=None)
@given(pattern_k3, pattern_k3, st.sampled_from([(1, 2), (2, 1), (1, 3), (3, 2)]))
def test_relabel_rotate_and_patadd(p, q, ij):
    i, j = ij
    assert consistent(relabel(p, i, j), q) == consistent(p, rotate(q, i, j))
    if lbs(p) & L(i, j) == L(i, j):
        assert consistent(join(p, P(f"[0,{i}{j}]")), q) == consistent(p, union_pat(q, P(f"[0,{i}{j},{i},{j}]")))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 15), min_size=1, max_size=6), st.randoms())
def test_canonical_order_independent(masks, rnd):
    sets = [m << 1 for m in masks] + [1]
    shuffled = sets[:]
    rnd.shuffle(shuffled)
    assert Pattern.of(sets) == Pattern.of(shuffled)

"""Ground-truth implementations for cross-checking the solver at small scale.

Only the Pattern type and its algebra are shared with the fast path.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from typing import Iterable

from .expr import Instance, Introduce, Join, LabeledGraph, Relabel, realize
from .pattern import (Pattern, complete_rep, consistent, enumerate_patterns, parity_rep,
                      patadd, relabel, union_pat, action)

BRUTE_CAP = 20
FAMILY_CAP_N = 10
FAMILY_CAP_K = 3
DREP_CAP_N = 6
DREP_CAP_NODES = 12


class OracleCapError(ValueError):
    pass


def _vertex_bits(g: LabeledGraph) -> tuple[dict[str, int], list[int]]:
    idx = {v: n for n, v in enumerate(g.vertices)}
    adj = [0] * len(g.vertices)
    for e in g.edges:
        u, v = (idx[a] for a in e)
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return idx, adj


def _connected(mask: int, adj: list[int]) -> bool:
    if not mask:
        return False
    seen = mask & -mask
    frontier = seen
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        new = adj[low.bit_length() - 1] & mask & ~seen
        seen |= new
        frontier |= new
    return seen == mask


def brute_steiner(g: LabeledGraph, terminals: Iterable[str], b: int) -> bool:
    """Some S of exactly b vertices containing all terminals induces a connected graph."""
    if len(g.vertices) > BRUTE_CAP:
        raise OracleCapError(f"{len(g.vertices)} vertices exceed cap {BRUTE_CAP}")
    idx, adj = _vertex_bits(g)
    tmask = 0
    for t in terminals:
        tmask |= 1 << idx[t]
    extra = b - tmask.bit_count()
    others = [n for n in range(len(g.vertices)) if not tmask >> n & 1]
    if extra < 0 or extra > len(others):
        return False
    for combo in itertools.combinations(others, extra):
        mask = tmask
        for n in combo:
            mask |= 1 << n
        if _connected(mask, adj):
            return True
    return False


def min_steiner(instance: Instance) -> int | None:
    """Smallest size in [|terminals|, budget] with a Steiner tree, or None."""
    g = realize(instance.expr)
    for b in range(len(instance.terminals), instance.budget + 1):
        if brute_steiner(g, instance.terminals, b):
            return b
    return None


def _check_caps(instance: Instance, max_n: int, max_k: int | None = None,
                max_nodes: int | None = None) -> None:
    if instance.n > max_n:
        raise OracleCapError(f"n={instance.n} exceeds cap {max_n}")
    if max_k is not None and instance.k > max_k:
        raise OracleCapError(f"k={instance.k} exceeds cap {max_k}")
    if max_nodes is not None and len(instance.nodes) > max_nodes:
        raise OracleCapError(f"{len(instance.nodes)} nodes exceed cap {max_nodes}")


Family = dict[tuple[int, int], frozenset[Pattern]]


def _set_families(instance: Instance, wa, complete: bool) -> dict[tuple[int, int, int], frozenset[Pattern]]:
    terms, v0 = set(instance.terminals), instance.v0
    stack: list[Family] = []
    out: dict[tuple[int, int, int], frozenset[Pattern]] = {}
    for x, node in enumerate(instance.nodes):
        fam: dict[tuple[int, int], set[Pattern]] = defaultdict(set)
        if isinstance(node, Introduce):
            i, v = node.label, node.name
            if v != v0:
                fam[(1, wa.vertex_weight[v])].add(Pattern.of([1, 1 << i]))
            elif complete:
                fam[(1, wa.vertex_weight[v])] |= {Pattern.of([1]), Pattern.of([1 | 1 << i, 1 << i])}
            else:
                fam[(1, wa.vertex_weight[v])].add(Pattern.of([1 | 1 << i]))
            if v not in terms:
                fam[(0, 0)].add(Pattern.of([1]))
        elif isinstance(node, Relabel):
            for key, ps in stack.pop().items():
                fam[key] = {relabel(p, node.i, node.j) for p in ps}
        elif isinstance(node, Join):
            for key, ps in stack.pop().items():
                qs = {patadd(p, node.i, node.j) for p in ps}
                fam[key] = {r for q in qs for r in complete_rep(q)} if complete else qs
        else:
            right, left = stack.pop(), stack.pop()
            for (b1, c1), ps in left.items():
                for (b2, c2), qs in right.items():
                    if b1 + b2 > instance.budget:
                        continue
                    fam[(b1 + b2, c1 + c2)] |= {union_pat(p, q) for p in ps for q in qs}
        frozen = {key: frozenset(ps) for key, ps in fam.items() if ps}
        for (b, c), ps in frozen.items():
            out[(x, b, c)] = ps
        stack.append(frozen)
    return out


def naive_sol_families(instance: Instance, wa) -> dict[tuple[int, int, int], frozenset[Pattern]]:
    """(node id, b, c) -> patterns of partial solutions, by the pattern recurrences."""
    _check_caps(instance, FAMILY_CAP_N, FAMILY_CAP_K)
    return _set_families(instance, wa, complete=False)


def naive_rep_families(instance: Instance, wa) -> dict[tuple[int, int, int], frozenset[Pattern]]:
    """Like naive_sol_families but expanded into complete patterns at introduce and join nodes."""
    _check_caps(instance, FAMILY_CAP_N, FAMILY_CAP_K)
    return _set_families(instance, wa, complete=True)


def root_id(instance: Instance) -> int:
    return len(instance.nodes) - 1


# --- (S, pi) enumeration ------------------------------------------------------------------

Outcome = tuple[int, int, int, Pattern]


def enumerate_pairs(instance: Instance, wa) -> list[Outcome]:
    """One (b, c, d, pattern) entry per pair of partial solution and action sequence.

    An unselected vertex contributes the pattern [0] with no action weight.
    """
    _check_caps(instance, DREP_CAP_N, max_nodes=DREP_CAP_NODES)
    terms, v0 = set(instance.terminals), instance.v0
    stack: list[list[Outcome]] = []
    for x, node in enumerate(instance.nodes):
        if isinstance(node, Introduce):
            v, i = node.name, node.label
            base = Pattern.of([1 | 1 << i]) if v == v0 else Pattern.of([1, 1 << i])
            outs = []
            if v not in terms:
                outs.append((0, 0, 0, Pattern.of([1])))
            for ell in (1, 2):
                p = action(base, ell)
                if p is not None:
                    outs.append((1, wa.vertex_weight[v], wa.action_weight[(x, ell)], p))
        elif isinstance(node, Relabel):
            outs = [(b, c, d, relabel(p, node.i, node.j)) for b, c, d, p in stack.pop()]
        elif isinstance(node, Join):
            outs = []
            for b, c, d, p in stack.pop():
                q = patadd(p, node.i, node.j)
                for ell in range(1, 5):
                    r = action(q, ell)
                    if r is not None:
                        outs.append((b, c, d + wa.action_weight[(x, ell)], r))
        else:
            right, left = stack.pop(), stack.pop()
            outs = [(b1 + b2, c1 + c2, d1 + d2, union_pat(p, q))
                    for b1, c1, d1, p in left for b2, c2, d2, q in right
                    if b1 + b2 <= instance.budget]
        stack.append(outs)
    (root,) = stack
    return root


def naive_drep_counts(instance: Instance, wa) -> Counter:
    """(b, c, d, pattern) -> number of (S, pi) pairs producing it at the root."""
    return Counter(enumerate_pairs(instance, wa))


def naive_drep_parity(instance: Instance, wa, b: int, c: int, d: int, p: Pattern) -> int:
    return naive_drep_counts(instance, wa)[(b, c, d, p)] % 2


def naive_bas_root(instance: Instance, wa) -> dict[tuple[int, int, int], frozenset[Pattern]]:
    """Root CS families: XOR of parity_rep over patterns with an odd pair count."""
    acc: dict[tuple[int, int, int], set[Pattern]] = defaultdict(set)
    for (b, c, d, p), count in naive_drep_counts(instance, wa).items():
        if count % 2:
            acc[(b, c, d)].symmetric_difference_update(parity_rep(p))
    return {key: frozenset(ps) for key, ps in acc.items() if ps}


def check_representation(rep_set: Iterable[Pattern], sol_set: Iterable[Pattern], k: int,
                         partners: Iterable[Pattern] | None = None) -> bool:
    """Every partner is consistent with some member of sol_set iff with some member of rep_set."""
    rep_set, sol_set = list(rep_set), list(sol_set)
    for q in (enumerate_patterns(k) if partners is None else partners):
        if any(consistent(p, q) for p in sol_set) != any(consistent(p, q) for p in rep_set):
            return False
    return True

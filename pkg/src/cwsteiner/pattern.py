"""Connectivity patterns over labels {0..k} and their algebra.

A member set is an int bitmask; bit 0 stands for the special label 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

ZERO = 1
EMPTY_MARK = "e"
DEFAULT_FULL_CAP = 4
DEFAULT_CS_CAP = 14


class PatternError(ValueError):
    pass


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, order=True)
class Pattern:
    sets: tuple[int, ...]

    def __post_init__(self) -> None:
        zeros = sum(1 for s in self.sets if s & ZERO)
        if zeros != 1:
            raise PatternError(f"pattern needs exactly one zero-set, got {zeros}")
        if any(a >= b for a, b in zip(self.sets, self.sets[1:])):
            raise PatternError("member sets must be sorted and distinct; use Pattern.of")

    @classmethod
    def of(cls, sets: Iterable[int]) -> Pattern:
        return cls(tuple(sorted(set(sets))))

    @classmethod
    def parse(cls, text: str) -> Pattern:
        """Bracket notation: "[01,2]"; "e" is the empty member; a missing zero-set means {0}.

        Labels above 9 are written dot-separated inside a member, e.g. "0.10.11" or "11.".
        """
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise PatternError(f"expected bracket notation, got {text!r}")
        body = body[1:-1].strip()
        sets: list[int] = []
        for tok in filter(None, (t.strip() for t in body.split(","))) if body else []:
            if tok == EMPTY_MARK:
                sets.append(0)
                continue
            labels = [x for x in tok.split(".") if x] if "." in tok else list(tok)
            mask = 0
            for lab in labels:
                if not lab.isdigit():
                    raise PatternError(f"bad member {tok!r} in {text!r}")
                mask |= 1 << int(lab)
            sets.append(mask)
        if not any(s & ZERO for s in sets):
            sets.append(ZERO)
        return cls.of(sets)

    def __str__(self) -> str:
        parts = []
        for s in self.sets:
            if s == 0:
                parts.append(EMPTY_MARK)
                continue
            labs = list(bits(s))
            if max(labs) > 9:
                parts.append(".".join(map(str, labs)) + ("." if len(labs) == 1 else ""))
            else:
                parts.append("".join(map(str, labs)))
        return "[" + ",".join(parts) + "]"

    def __repr__(self) -> str:
        return f"Pattern({self})"

    @property
    def zero(self) -> int:
        return next(s for s in self.sets if s & ZERO)


def P(text: str) -> Pattern:
    """Shorthand for Pattern.parse."""
    return Pattern.parse(text)


def label_mask(*labels: int) -> int:
    m = 0
    for lab in labels:
        m |= 1 << lab
    return m


# --- accessors ----------------------------------------------------------------

def lbs(p: Pattern) -> int:
    """Labels occurring in p, as a bitmask (bit 0 never set)."""
    m = 0
    for s in p.sets:
        m |= s
    return m & ~ZERO


def sing(p: Pattern) -> int:
    m = 0
    for s in p.sets:
        if s and not s & (s - 1) and s != ZERO:
            m |= s
    return m


def inc(p: Pattern) -> int:
    return lbs(p) & ~sing(p)


def is_complete(p: Pattern) -> bool:
    return inc(p) == 0


def is_cs(p: Pattern) -> bool:
    return is_complete(p) and all(s & ZERO or (s and not s & (s - 1)) for s in p.sets)


# --- operations -----------------------------------------------------------------

def _merge_classes(masks: list[int], parent: list[int]) -> list[int]:
    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    groups: dict[int, int] = {}
    for idx, m in enumerate(masks):
        r = find(idx)
        groups[r] = groups.get(r, 0) | m
    return list(groups.values())


def join(p: Pattern, q: Pattern) -> Pattern:
    """Closure of the cross-intersection relation between members of p and of q."""
    a, b = p.sets, q.sets
    masks = list(a) + list(b)
    parent = list(range(len(masks)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    off = len(a)
    for i, s in enumerate(a):
        for j, t in enumerate(b):
            if s & t:
                ri, rj = find(i), find(off + j)
                if ri != rj:
                    parent[ri] = rj
    return Pattern.of(_merge_classes(masks, parent))


def consistent(p: Pattern, q: Pattern) -> bool:
    """Whether join(p, q) is a single set, by alternating reachability from the zero-sets."""
    ps, qs = list(p.sets), list(q.sets)
    if 0 in ps or 0 in qs:
        return False
    reach_p, reach_q = p.zero, 0
    ps.remove(reach_p)
    while True:
        grown = [t for t in qs if t & reach_p]
        if grown:
            qs = [t for t in qs if not t & reach_p]
            for t in grown:
                reach_q |= t
        grown = [t for t in ps if t & reach_q]
        if not grown:
            return not ps and not qs
        ps = [t for t in ps if not t & reach_q]
        for t in grown:
            reach_p |= t


def relabel(p: Pattern, i: int, j: int) -> Pattern:
    bi, bj = 1 << i, 1 << j
    return Pattern.of((s & ~bi) | bj if s & bi else s for s in p.sets)


def union_pat(p: Pattern, q: Pattern) -> Pattern:
    zp, zq = p.zero, q.zero
    rest = [s for s in p.sets if s != zp] + [s for s in q.sets if s != zq]
    return Pattern.of(rest + [zp | zq])


def patadd(p: Pattern, i: int, j: int) -> Pattern:
    ij = label_mask(i, j)
    if lbs(p) & ij != ij:
        return p
    return join(p, Pattern((ZERO, ij)))


def rotate(q: Pattern, i: int, j: int) -> Pattern:
    """q with i removed everywhere and then added to every set containing j."""
    bi, bj = 1 << i, 1 << j
    out = []
    for s in q.sets:
        s &= ~bi
        if s & bj:
            s |= bi
        out.append(s)
    return Pattern.of(out)


def fix(p: Pattern, i: int) -> Pattern:
    if not inc(p) >> i & 1:
        return p
    return Pattern.of(p.sets + (1 << i,))


def forget(p: Pattern, i: int) -> Pattern:
    if not inc(p) >> i & 1:
        return p
    return Pattern.of(s & ~(1 << i) for s in p.sets)


def complete_rep(p: Pattern) -> frozenset[Pattern]:
    """Complete patterns obtained by forgetting or fixing each incomplete label in turn."""
    layer = {p}
    for i in bits(inc(p)):
        layer = {f(r, i) for r in layer for f in (forget, fix)}
    return frozenset(layer)


def action(p: Pattern, ell: int, sequential: bool = False) -> Pattern | None:
    """Fix/forget combination number ell in 1..4; None where undefined.

    For inc(p) = {i < j} both choices are made against inc(p): a forgotten label is
    removed everywhere, even when forgetting i already left j as a singleton (the
    result then has an empty member). With sequential=True the second step re-checks
    inc, which leaves such a j in place; that variant does not commute with parity_rep.
    """
    if not 1 <= ell <= 4:
        raise PatternError(f"action index {ell} outside 1..4")
    labs = list(bits(inc(p)))
    if not labs:
        return p
    if len(labs) == 1:
        if ell > 2:
            return None
        return fix(p, labs[0]) if ell == 1 else forget(p, labs[0])
    if len(labs) > 2:
        return None
    i, j = labs
    fix_i, fix_j = ell in (1, 2), ell in (1, 3)
    if sequential:
        first = fix(p, i) if fix_i else forget(p, i)
        return fix(first, j) if fix_j else forget(first, j)
    sets = list(p.sets)
    drop = 0
    for lab, fixed in ((i, fix_i), (j, fix_j)):
        if fixed:
            sets.append(1 << lab)
        else:
            drop |= 1 << lab
    return Pattern.of(s & ~drop for s in sets)


def symdiff(acc: set[Pattern], items: Iterable[Pattern]) -> None:
    """In-place GF(2) accumulation of a pattern family."""
    for r in items:
        if r in acc:
            acc.remove(r)
        else:
            acc.add(r)


def parity_rep_step(p: Pattern, S: int) -> frozenset[Pattern]:
    z = p.zero
    if S not in p.sets or S == z or S.bit_count() < 2:
        raise PatternError(f"member {S:#b} cannot be eliminated from {p}")
    if not is_complete(p):
        raise PatternError(f"{p} is not complete")
    if any(t != z and t != S and t & S == t and t.bit_count() >= 2 for t in p.sets):
        raise PatternError(f"member {S:#b} of {p} is not minimal")
    rest = [t for t in p.sets if t != z and t != S]
    # when Z meets S, distinct S' can give the same pattern; those cancel in pairs
    out: set[Pattern] = set()
    sub = (S - 1) & S
    while True:
        symdiff(out, (Pattern.of(rest + [z | sub]),))
        if sub == 0:
            break
        sub = (sub - 1) & S
    return frozenset(out)


def parity_rep(p: Pattern) -> frozenset[Pattern]:
    """CS-patterns whose consistency counts mod 2 agree with p on complete partners.

    A pattern with an empty member is consistent with nothing, so its family is empty.
    """
    if not is_complete(p):
        raise PatternError(f"{p} is not complete")
    if 0 in p.sets:
        return frozenset()
    acc: set[Pattern] = set()
    todo = [p]
    while todo:
        r = todo.pop()
        z = r.zero
        big = [s for s in r.sets if s != z and s.bit_count() >= 2]
        if not big:
            symdiff(acc, (r,))
            continue
        # increasing mask order; the smallest big member is inclusion-minimal
        todo.extend(parity_rep_step(r, big[0]))
    return frozenset(acc)


# --- enumeration ----------------------------------------------------------------

def _check_cap(k: int, cap: int) -> None:
    if k < 0 or k > cap:
        raise PatternError(f"k={k} exceeds enumeration cap {cap}")


def enumerate_patterns(k: int, cap: int = DEFAULT_FULL_CAP) -> list[Pattern]:
    """Every pattern over labels 1..k: a family of 0-free sets plus a zero-set."""
    _check_cap(k, cap)
    full = 1 << k
    out = []
    for fam in range(1 << full):
        free = [m << 1 for m in range(full) if fam >> m & 1]
        for zm in range(full):
            out.append(Pattern.of(free + [(zm << 1) | ZERO]))
    return out


def enumerate_complete(k: int, cap: int = DEFAULT_FULL_CAP) -> list[Pattern]:
    return [p for p in enumerate_patterns(k, cap) if is_complete(p)]


def enumerate_cs(k: int, cap: int = DEFAULT_CS_CAP) -> list[Pattern]:
    """All 3^k CS-patterns, in index order of their base-3 digit encoding."""
    _check_cap(k, cap)
    out = []
    for digits in itertools.product((0, 1, 2), repeat=k):
        # digits[0] is label k (most significant) so that index order is numeric
        z, sets = ZERO, []
        for pos, d in enumerate(digits):
            lab = k - pos
            if d:
                sets.append(1 << lab)
            if d == 2:
                z |= 1 << lab
        out.append(Pattern.of(sets + [z]))
    return out


def dominates(p: Pattern, q: Pattern, k: int, cap: int = DEFAULT_FULL_CAP) -> bool:
    """Brute force: every pattern consistent with q is consistent with p."""
    return all(consistent(p, r) for r in enumerate_patterns(k, cap) if consistent(q, r))


# --- solutions --------------------------------------------------------------------

def pattern_of_solution(g, S: Iterable[str], v0: str) -> Pattern:
    """Pattern of the components of g[S]; label 0 marks the component of v0."""
    chosen = set(S)
    adj = g.adjacency()
    seen: set[str] = set()
    sets = []
    has_zero = False
    for v in g.vertices:
        if v not in chosen or v in seen:
            continue
        seen.add(v)
        stack, mask = [v], 0
        while stack:
            u = stack.pop()
            mask |= 1 << g.labeling[u]
            if u == v0:
                mask |= ZERO
                has_zero = True
            for w in adj[u]:
                if w in chosen and w not in seen:
                    seen.add(w)
                    stack.append(w)
        sets.append(mask)
    if not has_zero:
        sets.append(ZERO)
    return Pattern.of(sets)

"""Consistency matrices over state patterns: golden matrices, GF(2) ranks, triangularity, CS basis."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .pattern import (ZERO, Pattern, PatternError, consistent, enumerate_complete,
                      enumerate_cs, parity_rep)

STATES = ("O", "S", "C", "CS")
PATB_CAP = 8
TRIANGULAR_CAP = 7
BASIS_CAP = 3
MATRIX_CELL_CAP = 1 << 26

FIG1_ROWS = ("S", "O", "CS", "C")
FIG1_COLS = ("C", "CS", "O", "S")
FIG2_ROWS = ("S", "O", "CS")
FIG2_COLS = ("CS", "O", "S")

FIG1 = ((1, 1, 0, 0),
        (1, 0, 1, 0),
        (1, 1, 0, 1),
        (1, 1, 1, 1))
FIG2 = ((1, 0, 0),
        (0, 1, 0),
        (1, 0, 1))

# digit value of each CS state; sigma swaps S and CS
CS_DIGIT = {"O": 0, "S": 1, "CS": 2}
SIGMA = {"O": "O", "S": "CS", "CS": "S"}


def p_state(s: tuple[str, ...]) -> Pattern:
    """Zero-set holds labels in state C or CS; labels in state S or CS are singletons."""
    z, sets = ZERO, []
    for lab, st in enumerate(s, start=1):
        if st not in STATES:
            raise PatternError(f"unknown state {st!r}")
        if st in ("C", "CS"):
            z |= 1 << lab
        if st in ("S", "CS"):
            sets.append(1 << lab)
    return Pattern.of(sets + [z])


def state_tuples(k: int, order: tuple[str, ...] = STATES) -> list[tuple[str, ...]]:
    """All state assignments, label 1 as the major coordinate."""
    return list(itertools.product(order, repeat=k))


def enumerate_patb(k: int, cap: int = PATB_CAP) -> list[Pattern]:
    if not 0 <= k <= cap:
        raise PatternError(f"k={k} exceeds cap {cap}")
    return [p_state(s) for s in state_tuples(k)]


@dataclass(frozen=True)
class Gf2Matrix:
    rows: tuple[Pattern, ...]
    cols: tuple[Pattern, ...]
    bits: tuple[int, ...]  # bit c of bits[r] is entry (r, c)

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.bits[r] >> c & 1

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def to_lists(self) -> list[list[int]]:
        return [[b >> c & 1 for c in range(len(self.cols))] for b in self.bits]

    def grid(self) -> str:
        return "\n".join(" ".join(map(str, row)) for row in self.to_lists())


def consistency_matrix(rows: list[Pattern], cols: list[Pattern],
                       cap: int = MATRIX_CELL_CAP) -> Gf2Matrix:
    if len(rows) * len(cols) > cap:
        raise PatternError(f"{len(rows)}x{len(cols)} matrix exceeds cap {cap}")
    bits = []
    for p in rows:
        b = 0
        for c, q in enumerate(cols):
            if consistent(p, q):
                b |= 1 << c
        bits.append(b)
    return Gf2Matrix(tuple(rows), tuple(cols), tuple(bits))


def preset(name: str, k: int = 1) -> tuple[list[Pattern], list[Pattern]]:
    """Row and column orders. "fig1" and "fig2" match the FIG1 and FIG2 golden matrices
    (Kronecker order for k > 1); "lex" lists CS-patterns in index order, columns mapped by sigma."""
    if name == "fig1":
        return ([p_state(s) for s in state_tuples(k, FIG1_ROWS)],
                [p_state(s) for s in state_tuples(k, FIG1_COLS)])
    if name == "fig2":
        return ([p_state(s) for s in state_tuples(k, FIG2_ROWS)],
                [p_state(s) for s in state_tuples(k, FIG2_COLS)])
    if name == "lex":
        lex = state_tuples(k, ("O", "S", "CS"))
        return ([p_state(s) for s in lex],
                [p_state(tuple(SIGMA[x] for x in s)) for s in lex])
    raise ValueError(f"unknown preset {name!r}")


def gf2_rank(m: Gf2Matrix | list[int]) -> int:
    """Rank by elimination on row bitsets."""
    rows = list(m.bits if isinstance(m, Gf2Matrix) else m)
    rank = 0
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank


def kronecker(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    return [[x * y for x in ra for y in rb] for ra in a for rb in b]


def kronecker_power(a: list[list[int]], k: int) -> list[list[int]]:
    out = [[1]]
    for _ in range(k):
        out = kronecker(out, a)
    return out


def is_lower_unitriangular(m: Gf2Matrix) -> bool:
    n, n2 = m.shape
    if n != n2:
        return False
    for r, b in enumerate(m.bits):
        if not b >> r & 1 or b >> (r + 1):
            return False
    return True


def check_triangular_cs(k: int, cap: int = TRIANGULAR_CAP) -> bool:
    """M_CS with columns permuted by sigma is lower unitriangular in lexicographic digit order."""
    if not 1 <= k <= cap:
        raise PatternError(f"k={k} exceeds cap {cap}")
    rows, cols = preset("lex", k)
    return is_lower_unitriangular(consistency_matrix(rows, cols))


def check_cs_basis(k: int, cap: int = BASIS_CAP) -> bool:
    """parity_rep(p) parity-represents p against every complete partner, for all complete p."""
    if not 0 <= k <= cap:
        raise PatternError(f"k={k} exceeds cap {cap}")
    complete = enumerate_complete(k)
    for p in complete:
        fam = parity_rep(p)
        for q in complete:
            if sum(consistent(r, q) for r in fam) % 2 != consistent(p, q):
                return False
    return True


def check_kronecker(k: int) -> bool:
    rows, cols = preset("fig1", k)
    return consistency_matrix(rows, cols).to_lists() == kronecker_power([list(r) for r in FIG1], k)


def complete_rank(k: int) -> int:
    complete = enumerate_complete(k)
    return gf2_rank(consistency_matrix(complete, complete))

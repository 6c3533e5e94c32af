"""Randomized parity dynamic program over CS-pattern tables.

Each syntax-tree node gets a sparse map (b, c, d) -> 3^k-bit table, where b is the
solution size, c the vertex-weight sum and d the action-weight sum. Keys are packed
into one int so that adding two keys adds each field independently.
"""

from __future__ import annotations

import functools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .cspat import digit_masks, tau, tau_inv
from .expr import Instance, Introduce, Join, Relabel
from .pattern import action, parity_rep, patadd

ISO_FACTOR = 2 + math.sqrt(2)


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightAssignment:
    W: int
    D: int
    vertex_weight: dict[str, int]
    action_weight: dict[tuple[int, int], int]


def weight_bounds(n: int, nodes: int) -> tuple[int, int]:
    return math.ceil(ISO_FACTOR * n), math.ceil(4 * ISO_FACTOR * nodes)


def sample_weights(instance: Instance, seed: int) -> WeightAssignment:
    """Uniform independent weights; vertices in introduce order, then (node id, ell)."""
    W, D = weight_bounds(instance.n, len(instance.nodes))
    rng = random.Random(seed)
    vw = {v: rng.randint(1, W) for v in instance.vertex_names}
    aw = {(x, ell): rng.randint(1, D) for x in range(len(instance.nodes)) for ell in range(1, 5)}
    return WeightAssignment(W, D, vw, aw)


# --- key packing ------------------------------------------------------------------------

@dataclass(frozen=True)
class KeyCodec:
    cbits: int
    dbits: int

    @classmethod
    def for_instance(cls, instance: Instance, wa: WeightAssignment) -> KeyCodec:
        nodes = len(instance.nodes)
        return cls((instance.n * wa.W).bit_length(), (4 * nodes * wa.D).bit_length())

    def pack(self, b: int, c: int, d: int) -> int:
        return (b << (self.cbits + self.dbits)) | (c << self.dbits) | d

    def unpack(self, key: int) -> tuple[int, int, int]:
        d = key & ((1 << self.dbits) - 1)
        c = (key >> self.dbits) & ((1 << self.cbits) - 1)
        return key >> (self.cbits + self.dbits), c, d

    def size(self, key: int) -> int:
        return key >> (self.cbits + self.dbits)


@dataclass
class DpTable:
    """Keys sorted and distinct; row n holds the table of keys[n] as little-endian words."""

    k: int
    codec: KeyCodec
    keys: np.ndarray
    rows: np.ndarray

    @classmethod
    def empty(cls, k: int, codec: KeyCodec) -> DpTable:
        return cls(k, codec, np.zeros(0, np.int64), np.zeros((0, row_words(k)), np.uint64))

    @classmethod
    def from_dict(cls, k: int, codec: KeyCodec, entries: dict[int, int]) -> DpTable:
        items = sorted((key, t) for key, t in entries.items() if t)
        keys = np.fromiter((key for key, _ in items), np.int64, len(items))
        return cls(k, codec, keys, from_ints([t for _, t in items], k))

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def entries(self) -> dict[int, int]:
        """Packed key -> table bits."""
        return dict(zip(self.keys.tolist(), to_ints(self.rows, self.k)))

    def items(self) -> Iterator[tuple[tuple[int, int, int], int]]:
        for key, bits in self.entries.items():
            yield self.codec.unpack(key), bits

    def get(self, b: int, c: int, d: int) -> int:
        return self.entries.get(self.codec.pack(b, c, d), 0)

    def as_dict(self) -> dict[tuple[int, int, int], int]:
        return dict(self.items())

    def sizes(self) -> np.ndarray:
        return self.keys >> (self.codec.cbits + self.codec.dbits)

    @property
    def nbytes(self) -> int:
        return self.keys.nbytes + self.rows.nbytes


# --- row storage ---------------------------------------------------------------------------

def row_words(k: int) -> int:
    return (3 ** k + 63) // 64


def from_ints(tables: list[int], k: int) -> np.ndarray:
    w = row_words(k)
    raw = b"".join(t.to_bytes(8 * w, "little") for t in tables)
    return np.frombuffer(raw, dtype="<u8").reshape(len(tables), w).astype(np.uint64)


def to_ints(rows: np.ndarray, k: int) -> list[int]:
    nbytes = 8 * row_words(k)
    data = np.ascontiguousarray(rows, dtype="<u8").tobytes()
    return [int.from_bytes(data[n:n + nbytes], "little") for n in range(0, len(data), nbytes)]


def _to_big(rows: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(rows, dtype="<u8").tobytes(), "little")


def _from_big(big: int, like: np.ndarray) -> np.ndarray:
    m, w = like.shape
    return np.frombuffer(big.to_bytes(8 * m * w, "little"), dtype="<u8").reshape(m, w).astype(np.uint64)


def _replicate(mask: int, k: int, m: int) -> int:
    return int.from_bytes(mask.to_bytes(8 * row_words(k), "little") * m, "little")


# big-int passes run on row blocks of about this many bytes; whole-table ints thrash the cache
BLOCK_BYTES = 1 << 18


def _blocked(fn):
    @functools.wraps(fn)
    def run(rows: np.ndarray, k: int, *args, **kwargs) -> np.ndarray:
        step = max(1, BLOCK_BYTES // (8 * row_words(k)))
        if len(rows) <= step:
            return fn(rows, k, *args, **kwargs)
        return np.concatenate([fn(rows[lo:lo + step], k, *args, **kwargs)
                               for lo in range(0, len(rows), step)])
    return run


@_blocked
def _map_rows(rows: np.ndarray, k: int, moves: tuple[tuple[int, int], ...]) -> np.ndarray:
    """Apply index moves to every row at once; moves never cross a row boundary."""
    if not len(rows):
        return rows
    big = _to_big(rows)
    m = len(rows)
    out = 0
    for mask, s in moves:
        out ^= _shift(big & _replicate(mask, k, m), s)
    return _from_big(out, rows)


@_blocked
def _transform_rows(rows: np.ndarray, k: int, inverse: bool) -> np.ndarray:
    if not len(rows):
        return rows
    big = _to_big(rows)
    m = len(rows)
    for i in range(1, k + 1):
        s = 3 ** (i - 1)
        m0, m1, _ = digit_masks(k, i)
        r0, r1 = _replicate(m0, k, m), _replicate(m1, k, m)
        if inverse:
            big ^= (big & r1) << s
            big ^= (big & r0) << s
        else:
            big ^= (big & r0) << s
            big ^= (big & r1) << s
    return _from_big(big, rows)


def _xor_by_key(keys: np.ndarray, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct keys with the XOR of their rows; all-zero rows dropped."""
    if not len(keys):
        return keys, rows
    order = np.argsort(keys, kind="stable")
    keys, rows = keys[order], rows[order]
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    keys, rows = keys[starts], np.bitwise_xor.reduceat(rows, starts, axis=0)
    nz = rows.any(axis=1)
    return keys[nz], rows[nz]


# --- local rules ------------------------------------------------------------------------------

def _shift(t: int, s: int) -> int:
    return t << s if s >= 0 else t >> -s


def _grouped(moves: list[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    """Merge (mask, shift) moves sharing a shift; masks of one group are disjoint."""
    by_shift: dict[int, int] = {}
    for mask, s in moves:
        if mask:
            by_shift[s] = by_shift.get(s, 0) | mask
    return tuple((m, s) for s, m in sorted(by_shift.items()))


@lru_cache(maxsize=None)
def relabel_moves(k: int, i: int, j: int) -> tuple[tuple[int, int], ...]:
    """Relabel i to j on CS indices: digit j becomes max of both digits, digit i becomes 0."""
    mi, mj = digit_masks(k, i), digit_masks(k, j)
    si, sj = 3 ** (i - 1), 3 ** (j - 1)
    moves = []
    for a in range(3):
        for b in range(3):
            moves.append((mi[a] & mj[b], (max(a, b) - b) * sj - a * si))
    return _grouped(moves)


@lru_cache(maxsize=None)
def join_rules() -> dict[int, dict[tuple[int, int], tuple[tuple[int, int], ...]]]:
    """Per action ell: (lo digit, hi digit) -> CS digit pairs after patadd, action and parity_rep.

    Derived from the pattern algebra on the two joined labels alone; other labels ride along.
    """
    rules: dict[int, dict[tuple[int, int], tuple[tuple[int, int], ...]]] = {}
    for ell in range(1, 5):
        table = {}
        for x in range(9):
            q = patadd(tau_inv(x, 2), 1, 2)
            a = action(q, ell)
            outs = [] if a is None else sorted(tau(s, 2) for s in parity_rep(a))
            table[(x % 3, x // 3)] = tuple((y % 3, y // 3) for y in outs)
        rules[ell] = table
    return rules


@lru_cache(maxsize=None)
def join_moves(k: int, i: int, j: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    lo, hi = min(i, j), max(i, j)
    ml, mh = digit_masks(k, lo), digit_masks(k, hi)
    sl, sh = 3 ** (lo - 1), 3 ** (hi - 1)
    per_ell = []
    for ell in range(1, 5):
        moves = []
        for (a, b), targets in join_rules()[ell].items():
            for a2, b2 in targets:
                moves.append((ml[a] & mh[b], (a2 - a) * sl + (b2 - b) * sh))
        per_ell.append(_grouped(moves))
    return tuple(per_ell)


# --- handlers ------------------------------------------------------------------------------------

def handle_introduce(node: Introduce, x: int, instance: Instance, wa: WeightAssignment,
                     codec: KeyCodec) -> DpTable:
    entries: dict[int, int] = {}

    def flip(key: int, bits: int) -> None:
        entries[key] = entries.get(key, 0) ^ bits

    v = node.name
    if v not in instance.terminals:
        flip(codec.pack(0, 0, 0), 1)
    i = node.label
    if v == instance.v0:
        # p = [0i]; fix gives [0i,i] (digit 2), forget gives [0]
        targets = {1: 2 * 3 ** (i - 1), 2: 0}
    else:
        # p = [0,i] is complete; both actions leave it unchanged
        targets = {1: 3 ** (i - 1), 2: 3 ** (i - 1)}
    for ell in (1, 2):
        flip(codec.pack(1, wa.vertex_weight[v], wa.action_weight[(x, ell)]), 1 << targets[ell])
    return DpTable.from_dict(instance.k, codec, entries)


def handle_relabel(node: Relabel, child: DpTable) -> DpTable:
    if node.i == node.j:
        return child
    rows = _map_rows(child.rows, child.k, relabel_moves(child.k, node.i, node.j))
    nz = rows.any(axis=1)
    return DpTable(child.k, child.codec, child.keys[nz], rows[nz])


def handle_join(node: Join, x: int, child: DpTable, wa: WeightAssignment) -> DpTable:
    per_ell = join_moves(child.k, node.i, node.j)
    keys, rows = [], []
    for ell, moves in enumerate(per_ell, start=1):
        keys.append(child.keys + wa.action_weight[(x, ell)])
        rows.append(_map_rows(child.rows, child.k, moves))
    k2, r2 = _xor_by_key(np.concatenate(keys), np.concatenate(rows))
    return DpTable(child.k, child.codec, k2, r2)


CHUNK_CELLS = 1 << 21


def handle_union(left: DpTable, right: DpTable, budget: int) -> DpTable:
    """Sum over key pairs of lattice products: zeta, pairwise AND, XOR by key, Mobius."""
    k, codec = left.k, left.codec
    zl = _transform_rows(left.rows, k, inverse=False)
    zr = _transform_rows(right.rows, k, inverse=False)
    sl, sr = left.sizes(), right.sizes()
    w = zl.shape[1]
    key_parts, row_parts = [], []
    for bl in np.unique(sl).tolist():
        ml = sl == bl
        kl, rl = left.keys[ml], zl[ml]
        for br in np.unique(sr).tolist():
            if bl + br > budget:
                continue
            mr = sr == br
            kr, rr = right.keys[mr], zr[mr]
            step = max(1, CHUNK_CELLS // (len(kr) * w))
            for lo in range(0, len(kl), step):
                prod = rl[lo:lo + step, None, :] & rr[None, :, :]
                nz = prod.any(axis=2)
                if nz.any():
                    keys = kl[lo:lo + step, None] + kr[None, :]
                    ck, cr = _xor_by_key(keys[nz], prod[nz])
                    key_parts.append(ck)
                    row_parts.append(cr)
    if not key_parts:
        return DpTable.empty(k, codec)
    keys, rows = _xor_by_key(np.concatenate(key_parts), np.concatenate(row_parts))
    rows = _transform_rows(rows, k, inverse=True)
    nz = rows.any(axis=1)
    return DpTable(k, codec, keys[nz], rows[nz])


def run_dp(instance: Instance, wa: WeightAssignment, budget: int | None = None,
           mem_cap_mb: float | None = None) -> DpTable:
    """Bottom-up evaluation; sizes above the budget are dropped."""
    budget = instance.budget if budget is None else budget
    codec = KeyCodec.for_instance(instance, wa)
    if max(budget, 1).bit_length() + codec.cbits + codec.dbits > 62:
        raise ResourceError("packed (b, c, d) keys exceed 62 bits")
    cap = None if mem_cap_mb is None else mem_cap_mb * 2 ** 20
    stack: list[DpTable] = []
    for x, node in enumerate(instance.nodes):
        if isinstance(node, Introduce):
            t = handle_introduce(node, x, instance, wa, codec)
        elif isinstance(node, Relabel):
            t = handle_relabel(node, stack.pop())
        elif isinstance(node, Join):
            t = handle_join(node, x, stack.pop(), wa)
        else:
            right = stack.pop()
            left = stack.pop()
            t = handle_union(left, right, budget)
        if cap is not None and sum(s.nbytes for s in stack) + t.nbytes > cap:
            raise ResourceError(f"tables exceed {mem_cap_mb} MB at node {x}")
        stack.append(t)
    (root,) = stack
    return root


def decide(root: DpTable, b: int) -> bool:
    if not len(root):
        return False
    return bool(np.any((root.rows[:, 0] & np.uint64(1)).astype(bool) & (root.sizes() == b)))


def yes_sizes(root: DpTable) -> set[int]:
    if not len(root):
        return set()
    hit = (root.rows[:, 0] & np.uint64(1)).astype(bool)
    return set(root.sizes()[hit].tolist())


# --- top level ---------------------------------------------------------------------------

@dataclass
class SolveReport:
    answer: int | None
    repeats: int
    seed: int
    per_size_outcomes: list[dict[int, bool]]

    @property
    def yes(self) -> bool:
        return self.answer is not None

    def line(self) -> str:
        if self.answer is None:
            return "NO"
        return f"YES size={self.answer} repeats={self.repeats} seed={self.seed}"


def repeat_seeds(seed: int, repeats: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.getrandbits(63) for _ in range(repeats)]


def _one_repeat(args: tuple[Instance, int, float | None]) -> dict[int, bool]:
    instance, sub, cap = args
    root = run_dp(instance, sample_weights(instance, sub), mem_cap_mb=cap)
    found = yes_sizes(root)
    return {b: b in found for b in range(len(instance.terminals), instance.budget + 1)}


def solve(instance: Instance, repeats: int = 20, seed: int = 0, jobs: int = 1,
          mem_cap_mb: float | None = None) -> SolveReport:
    """Smallest size in [|terminals|, budget] answered YES by any repeat.

    One dp run per repeat serves every size. Stops early once the smallest possible
    size is witnessed, since no later repeat can improve the answer.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    seeds = repeat_seeds(seed, repeats)
    lowest = len(instance.terminals)
    outcomes: list[dict[int, bool]] = []
    args = [(instance, s, mem_cap_mb) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            outcomes = list(pool.map(_one_repeat, args))
    else:
        for a in args:
            outcomes.append(_one_repeat(a))
            if outcomes[-1].get(lowest):
                break
    sizes = [b for o in outcomes for b, ok in o.items() if ok]
    return SolveReport(min(sizes) if sizes else None, repeats, seed, outcomes)

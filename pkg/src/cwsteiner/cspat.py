"""Base-3 indexing of CS-patterns and GF(2) transforms over the lattice {0,1,2}^k.

A table is a Python int holding 3^k bits; bit x is the entry at CsIndex x.
Digit i of x (weight 3^i) describes label i+1: 0 absent, 1 singleton, 2 in the zero-set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .pattern import ZERO, Pattern, PatternError, is_cs

NAIVE_CAP = 6


@dataclass(frozen=True)
class Gf2Table:
    k: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> (3 ** self.k):
            raise ValueError(f"table does not fit in 3^{self.k} bits")

    def __getitem__(self, x: int) -> int:
        return self.bits >> x & 1

    def support(self) -> list[int]:
        return [x for x in range(3 ** self.k) if self.bits >> x & 1]

    def dump(self) -> str:
        """One "<base-3 index> <bit>" line per set entry, label k digit first."""
        return "\n".join(f"{to_digits(x, self.k)[::-1]} 1" for x in self.support())


def to_digits(x: int, k: int) -> str:
    """Digits of x as a string, label 1 first."""
    out = []
    for _ in range(k):
        x, r = divmod(x, 3)
        out.append("012"[r])
    return "".join(out)


def digit(x: int, i: int) -> int:
    """Digit of x for label i (1-based)."""
    return x // 3 ** (i - 1) % 3


def tau(p: Pattern, k: int | None = None) -> int:
    if not is_cs(p):
        raise PatternError(f"{p} is not a CS-pattern")
    z = p.zero
    x = 0
    for s in p.sets:
        if s & ZERO:
            continue
        if s == 0:
            raise PatternError(f"{p} has an empty member")
        lab = s.bit_length() - 1
        if k is not None and lab > k:
            raise PatternError(f"label {lab} of {p} exceeds k={k}")
        x += (2 if z >> lab & 1 else 1) * 3 ** (lab - 1)
    if z & ~ZERO & ~sum(1 << (s.bit_length() - 1) for s in p.sets if s and not s & ZERO):
        raise PatternError(f"{p} is not a CS-pattern")
    return x


def tau_inv(x: int, k: int) -> Pattern:
    if not 0 <= x < 3 ** k:
        raise ValueError(f"index {x} outside [0, 3^{k})")
    z, sets = ZERO, []
    for lab in range(1, k + 1):
        x, d = divmod(x, 3)
        if d:
            sets.append(1 << lab)
        if d == 2:
            z |= 1 << lab
    return Pattern.of(sets + [z])


# --- masks ---------------------------------------------------------------------------

def _repeat(block: int, period: int, count: int) -> int:
    return block * (((1 << (period * count)) - 1) // ((1 << period) - 1))


@lru_cache(maxsize=None)
def digit_masks(k: int, i: int) -> tuple[int, int, int]:
    """Masks of indices whose digit for label i (1-based) is 0, 1, 2."""
    s = 3 ** (i - 1)
    m0 = _repeat((1 << s) - 1, 3 * s, 3 ** (k - i))
    return m0, m0 << s, m0 << (2 * s)


@lru_cache(maxsize=None)
def full_mask(k: int) -> int:
    return (1 << 3 ** k) - 1


# --- transforms ---------------------------------------------------------------------------

def zeta_bits(t: int, k: int) -> int:
    """XOR of entries below each index in the digitwise order."""
    for i in range(1, k + 1):
        s = 3 ** (i - 1)
        m0, m1, _ = digit_masks(k, i)
        t ^= (t & m0) << s
        t ^= (t & m1) << s
    return t


def mobius_bits(t: int, k: int) -> int:
    for i in range(1, k + 1):
        s = 3 ** (i - 1)
        m0, m1, _ = digit_masks(k, i)
        t ^= (t & m1) << s
        t ^= (t & m0) << s
    return t


def zeta(t: Gf2Table) -> Gf2Table:
    return Gf2Table(t.k, zeta_bits(t.bits, t.k))


def mobius(t: Gf2Table) -> Gf2Table:
    return Gf2Table(t.k, mobius_bits(t.bits, t.k))


def _same_k(a: Gf2Table, b: Gf2Table) -> None:
    if a.k != b.k:
        raise ValueError(f"dimension mismatch: k={a.k} vs k={b.k}")


def join_product(a: Gf2Table, b: Gf2Table) -> Gf2Table:
    """Product whose index is the digitwise max of the factor indices."""
    _same_k(a, b)
    return Gf2Table(a.k, mobius_bits(zeta_bits(a.bits, a.k) & zeta_bits(b.bits, b.k), a.k))


def digit_max(x: int, y: int, k: int) -> int:
    out, w = 0, 1
    for _ in range(k):
        x, dx = divmod(x, 3)
        y, dy = divmod(y, 3)
        out += max(dx, dy) * w
        w *= 3
    return out


def naive_join_product(a: Gf2Table, b: Gf2Table) -> Gf2Table:
    _same_k(a, b)
    if a.k > NAIVE_CAP:
        raise ValueError(f"k={a.k} exceeds naive cap {NAIVE_CAP}")
    out = 0
    ys, zs = a.support(), b.support()
    for y in ys:
        for z in zs:
            out ^= 1 << digit_max(y, z, a.k)
    return Gf2Table(a.k, out)

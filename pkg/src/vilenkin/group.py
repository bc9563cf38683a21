"""Truncated bounded Vilenkin group: points, cylinder intervals, Haar measure.

The group is the direct product of cyclic groups Z_{m_0} x ... x Z_{m_{N-1}}
(all m_k >= 2), truncated at depth N.  A point is a digit vector
(x_0, ..., x_{N-1}); the flat index sum_k x_k * M_k, with M_0 = 1 and
M_{k+1} = m_k * M_k, identifies points with 0..M_N-1.  Every function in
this package lives on those M_N points with normalized counting (= Haar)
measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class GroupConfig:
    """Radix sequence, depth, cumulative products and max radix."""

    radices: tuple[int, ...]

    def __post_init__(self):
        if len(self.radices) == 0:
            raise ValueError("empty radix sequence")
        for m in self.radices:
            if int(m) < 2:
                raise ValueError(f"radix {m} < 2")
        object.__setattr__(self, "radices", tuple(int(m) for m in self.radices))

    @property
    def depth(self) -> int:
        return len(self.radices)

    @cached_property
    def cumprods(self) -> tuple[int, ...]:
        """M_0..M_N with M_0 = 1 and M_{k+1} = m_k * M_k."""
        out = [1]
        for m in self.radices:
            out.append(out[-1] * m)
        return tuple(out)

    @property
    def size(self) -> int:
        """Number of points M_N of the truncated group."""
        return self.cumprods[self.depth]

    @property
    def lam(self) -> int:
        """Max radix (the paper's sup of the radix sequence)."""
        return max(self.radices)

    @property
    def is_dyadic(self) -> bool:
        return all(m == 2 for m in self.radices)

    @cached_property
    def digit_table(self) -> np.ndarray:
        """(depth, size) int64 array: digit_table[k, idx] = digit k of idx."""
        idx = np.arange(self.size, dtype=np.int64)
        rows = [
            (idx // self.cumprods[k]) % self.radices[k] for k in range(self.depth)
        ]
        return np.array(rows, dtype=np.int64)


def walsh_config(depth: int) -> GroupConfig:
    """All-radix-2 config (Walsh-Paley case)."""
    return GroupConfig((2,) * depth)


@dataclass(frozen=True)
class GroupPoint:
    digits: tuple[int, ...]
    cfg: GroupConfig

    def __post_init__(self):
        if len(self.digits) != self.cfg.depth:
            raise ValueError("digit count != depth")
        for k, (d, m) in enumerate(zip(self.digits, self.cfg.radices)):
            if not 0 <= d < m:
                raise ValueError(f"digit {d} out of range at position {k}")
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))

    @property
    def index(self) -> int:
        return sum(d * M for d, M in zip(self.digits, self.cfg.cumprods))


def point_from_index(cfg: GroupConfig, idx: int) -> GroupPoint:
    if not 0 <= idx < cfg.size:
        raise ValueError(f"index {idx} out of range [0, {cfg.size})")
    digits = tuple((idx // cfg.cumprods[k]) % cfg.radices[k] for k in range(cfg.depth))
    return GroupPoint(digits, cfg)


def index_from_point(x: GroupPoint) -> int:
    return x.index


def unit_point(cfg: GroupConfig, k: int) -> GroupPoint:
    """The point e_k with a single 1 at coordinate k."""
    digits = [0] * cfg.depth
    digits[k] = 1
    return GroupPoint(tuple(digits), cfg)


def group_add(x: GroupPoint, t: GroupPoint) -> GroupPoint:
    if x.cfg != t.cfg:
        raise ValueError("config mismatch")
    digits = tuple((a + b) % m for a, b, m in zip(x.digits, t.digits, x.cfg.radices))
    return GroupPoint(digits, x.cfg)


def group_sub(x: GroupPoint, t: GroupPoint) -> GroupPoint:
    """Coordinate-wise difference mod m_k."""
    if x.cfg != t.cfg:
        raise ValueError("config mismatch")
    digits = tuple((a - b) % m for a, b, m in zip(x.digits, t.digits, x.cfg.radices))
    return GroupPoint(digits, x.cfg)


def sub_index_array(cfg: GroupConfig, x_idx: np.ndarray, t_idx: int) -> np.ndarray:
    """Indices of x - t for an array of x indices and a single t (digit-wise)."""
    out = np.zeros_like(np.asarray(x_idx, dtype=np.int64))
    rem = np.asarray(x_idx, dtype=np.int64)
    for k in range(cfg.depth):
        m = cfg.radices[k]
        xd = (rem // cfg.cumprods[k]) % m
        td = (t_idx // cfg.cumprods[k]) % m
        out += ((xd - td) % m) * cfg.cumprods[k]
    return out


@dataclass(frozen=True)
class CellSet:
    """Explicit sorted point-index set inside one group."""

    indices: np.ndarray
    cfg: GroupConfig

    def __post_init__(self):
        arr = np.asarray(self.indices, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("indices must be 1-D")
        if arr.size:
            if arr[0] < 0 or arr[-1] >= self.cfg.size or np.any(np.diff(arr) <= 0):
                raise ValueError("indices must be strictly increasing and < M_N")
        object.__setattr__(self, "indices", arr)

    def __len__(self) -> int:
        return int(self.indices.size)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.cfg.size, dtype=bool)
        m[self.indices] = True
        return m


def haar_measure(s: CellSet) -> Fraction:
    """|s| / M_N, exact."""
    return Fraction(len(s), s.cfg.size)


def interval(cfg: GroupConfig, n: int, x: GroupPoint | int = 0) -> CellSet:
    """Cylinder I_n(x): points agreeing with x in the first n digits.

    interval(cfg, 0) is the whole group; interval(cfg, depth, x) is {x}.
    """
    if not 0 <= n <= cfg.depth:
        raise ValueError(f"level {n} out of range [0, {cfg.depth}]")
    x_idx = x.index if isinstance(x, GroupPoint) else int(x)
    Mn = cfg.cumprods[n]
    base = x_idx % Mn
    idx = base + Mn * np.arange(cfg.size // Mn, dtype=np.int64)
    return CellSet(idx, cfg)


def annulus_cell(
    cfg: GroupConfig,
    level: int,
    i: int,
    j: int,
    tail_digits: tuple[int, ...] = (),
) -> CellSet:
    """One cell of the partition of the complement of I_level.

    For i < j < level: digits 0..i-1 zero, digit i nonzero (any value),
    digits i+1..j-1 zero, digit j nonzero (any value), digits j+1..level-1
    fixed to tail_digits, digits >= level free.  For j == level: digits
    0..i-1 zero, digit i nonzero, digits i+1..level-1 zero.
    """
    if not (0 <= i < j <= level <= cfg.depth):
        raise ValueError(f"need 0 <= i < j <= level <= depth, got ({i}, {j}, {level})")
    if j < level and len(tail_digits) != level - 1 - j:
        raise ValueError(f"expected {level - 1 - j} tail digits, got {len(tail_digits)}")
    digit_vals: list[np.ndarray] = []
    for k in range(level):
        m = cfg.radices[k]
        if k == i:
            digit_vals.append(np.arange(1, m))
        elif j < level and k == j:
            digit_vals.append(np.arange(1, m))
        elif j < level and k > j:
            d = int(tail_digits[k - j - 1])
            if not 0 <= d < m:
                raise ValueError(f"tail digit {d} out of range at position {k}")
            digit_vals.append(np.array([d]))
        else:
            digit_vals.append(np.array([0]))
    if j == level and tail_digits:
        raise ValueError("tail digits are only meaningful for j < level")

    low = np.zeros(1, dtype=np.int64)
    for k, vals in enumerate(digit_vals):
        low = (low[:, None] + vals[None, :] * cfg.cumprods[k]).ravel()
    Ml = cfg.cumprods[level]
    idx = (low[:, None] + Ml * np.arange(cfg.size // Ml, dtype=np.int64)[None, :]).ravel()
    idx.sort()
    return CellSet(idx, cfg)


def annulus_cells(cfg: GroupConfig, level: int):
    """All (i, j, tail) cells partitioning the complement of I_level."""
    for i in range(level):
        for j in range(i + 1, level + 1):
            if j == level:
                yield (i, j, ()), annulus_cell(cfg, level, i, j)
            else:
                shape = [cfg.radices[k] for k in range(j + 1, level)]
                for flat in range(int(np.prod(shape, dtype=np.int64)) if shape else 1):
                    tail = []
                    rem = flat
                    for m in shape:
                        tail.append(rem % m)
                        rem //= m
                    yield (i, j, tuple(tail)), annulus_cell(cfg, level, i, j, tuple(tail))


def annulus_union_mask(cfg: GroupConfig, level: int, pairs) -> np.ndarray:
    """Boolean mask of the union of I_level^{i,j} over the given (i, j) pairs."""
    first = np.full(cfg.size, cfg.depth + 1, dtype=np.int64)
    second = np.full(cfg.size, cfg.depth + 1, dtype=np.int64)
    for k in range(level - 1, -1, -1):
        nz = cfg.digit_table[k] != 0
        second[nz] = first[nz]
        first[nz] = k
    second = np.minimum(second, level)
    mask = np.zeros(cfg.size, dtype=bool)
    for (i, j) in pairs:
        mask |= (first == i) & (second == j)
    return mask


def verify_partition(cfg: GroupConfig, level: int) -> bool:
    """Check the annulus cells tile the complement of I_level exactly."""
    if level < 2:
        raise ValueError("partition is defined for level >= 2")
    counts = np.zeros(cfg.size, dtype=np.int64)
    total_measure = Fraction(0)
    for _, cell in annulus_cells(cfg, level):
        counts[cell.indices] += 1
        total_measure += haar_measure(cell)
    inside = interval(cfg, level, 0).mask()
    ok = bool(np.all(counts[inside] == 0) and np.all(counts[~inside] == 1))
    return ok and total_measure == 1 - Fraction(1, cfg.cumprods[level])

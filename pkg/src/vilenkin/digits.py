"""Digit expansions of operator indices and the low/high/gap order statistics.

An index n >= 1 expands uniquely as n = sum_k n_k * M_k with 0 <= n_k < m_k.
``low`` is the position of the lowest nonzero digit, ``high`` of the highest,
and ``rho = high - low`` is the gap that controls boundedness of the Fejer
means along a subsequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .group import GroupConfig


@dataclass(frozen=True)
class IndexProfile:
    n: int
    digits: tuple[int, ...]
    low: int
    high: int

    @property
    def rho(self) -> int:
        return self.high - self.low


def expand(cfg: GroupConfig, n: int) -> IndexProfile:
    """Mixed-radix expansion of n with its order statistics.

    n = 0 is rejected (low/high are undefined), as is n >= M_N (beyond the
    truncation depth).
    """
    n = int(n)
    if n == 0:
        raise ValueError("n = 0 has no nonzero digit; low/high undefined")
    if not 0 < n < cfg.size:
        raise ValueError(f"n = {n} out of range [1, {cfg.size})")
    digits = []
    rem = n
    for m in cfg.radices:
        digits.append(rem % m)
        rem //= m
    nz = [k for k, d in enumerate(digits) if d != 0]
    return IndexProfile(n, tuple(digits), nz[0], nz[-1])


def in_bounded_set(cfg: GroupConfig, n: int, c: int) -> bool:
    """True iff rho(n) <= c."""
    return expand(cfg, n).rho <= c


def lows_highs(cfg: GroupConfig, ns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized low/high positions for an array of indices in [1, M_N)."""
    ns = np.asarray(ns, dtype=np.int64)
    if np.any(ns < 1) or np.any(ns >= cfg.size):
        raise ValueError("indices out of range [1, M_N)")
    low = np.full(ns.shape, cfg.depth, dtype=np.int64)
    high = np.full(ns.shape, -1, dtype=np.int64)
    for k in range(cfg.depth - 1, -1, -1):
        nz = (ns // cfg.cumprods[k]) % cfg.radices[k] != 0
        low[nz] = k
        high[nz & (high < 0)] = k
    return low, high

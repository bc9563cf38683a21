"""Partial sums, Fejer means, and the restricted / weighted maximal operators.

The Fejer mean is the average of the first n partial sums S_1..S_n, i.e. the
spectral multiplier (n-j)/n on coefficient j < n; sigma_n f = f * K_n.  Note
the paper-facing subtlety: averaging S_0..S_{n-1} instead would drop the
top partial sum, and with it the entire divergence mechanism at indices just
above a power block (n = M_k + 1), so this package consistently averages
S_1..S_n.
"""

from __future__ import annotations

import numpy as np

from .digits import expand, lows_highs
from .group import GroupConfig
from .kernels import fejer_kernel
from .transform import GridFunction, Spectrum, convolve, forward, inverse_values


def partial_sum(s: Spectrum, n: int) -> GridFunction:
    """S_n f: synthesis of the first n coefficients; S_0 = 0."""
    if not 0 <= n <= s.cfg.size:
        raise ValueError(f"partial-sum order {n} out of range [0, {s.cfg.size}]")
    c = np.zeros(s.cfg.size, dtype=np.complex128)
    c[:n] = s.coeffs[:n]
    return GridFunction(inverse_values(c, s.cfg), s.cfg)


def fejer_multipliers(n: int, size: int) -> np.ndarray:
    w = np.zeros(size)
    w[:n] = (n - np.arange(n)) / n
    return w


def fejer_mean(s: Spectrum, n: int) -> GridFunction:
    """sigma_n f via the multiplier (n-j)/n (fast path)."""
    if not 1 <= n <= s.cfg.size:
        raise ValueError(f"Fejer order {n} out of range [1, {s.cfg.size}]")
    c = s.coeffs * fejer_multipliers(n, s.cfg.size)
    return GridFunction(inverse_values(c, s.cfg), s.cfg)


def fejer_mean_definitional(s: Spectrum, n: int) -> GridFunction:
    """sigma_n f as the literal average (1/n) sum_{k=1}^{n} S_k f (oracle)."""
    if not 1 <= n <= s.cfg.size:
        raise ValueError(f"Fejer order {n} out of range [1, {s.cfg.size}]")
    acc = np.zeros(s.cfg.size, dtype=np.complex128)
    for k in range(1, n + 1):
        acc += partial_sum(s, k).values
    return GridFunction(acc / n, s.cfg)


def fejer_mean_convolution(f: GridFunction, n: int) -> GridFunction:
    """sigma_n f = f * K_n (kernel route)."""
    return convolve(f, fejer_kernel(f.cfg, n))


def restricted_maximal(s: Spectrum, indices) -> GridFunction:
    """Pointwise sup of |sigma_n f| over a list of indices.

    With indices = {M_0, ..., M_N} this is the restricted maximal operator of
    the power-block subsequence.
    """
    idx = [int(n) for n in indices]
    if not idx:
        raise ValueError("empty index list")
    out = np.zeros(s.cfg.size)
    for n in idx:
        np.maximum(out, np.abs(fejer_mean(s, n).values), out=out)
    return GridFunction(out.astype(np.complex128), s.cfg)


def sigma_weight(cfg: GroupConfig, n: int, p: float) -> float:
    """(M_{<n>} / M_{|n|})^{1/p - 2}, the Theorem-1 weight."""
    if not 0 < p < 0.5:
        raise ValueError(f"p = {p} out of range (0, 1/2)")
    prof = expand(cfg, n)
    return float((cfg.cumprods[prof.low] / cfg.cumprods[prof.high]) ** (1.0 / p - 2.0))


def weighted_sigma(s: Spectrum, n: int, p: float) -> GridFunction:
    """(M_{<n>}/M_{|n|})^{1/p-2} |sigma_n f|, the operator the upper bound controls."""
    w = sigma_weight(s.cfg, n, p)
    return GridFunction(w * np.abs(fejer_mean(s, n).values).astype(np.complex128), s.cfg)


def index_preset(cfg: GroupConfig, name: str, *, c: int = 0, n_min: int = 1) -> list[int]:
    """Named index families used by the experiments.

    ``power-blocks``: {M_k}; ``rho-bounded``: {n : rho(n) <= c}; and
    ``two-pow-plus-one``: {2^k + 1} (all-radix-2 configs only).  Indices are
    restricted to [n_min, M_N].
    """
    if name == "power-blocks":
        out = [M for M in cfg.cumprods if n_min <= M <= cfg.size]
    elif name == "rho-bounded":
        ns = np.arange(max(n_min, 1), cfg.size, dtype=np.int64)
        lows, highs = lows_highs(cfg, ns)
        out = [int(n) for n in ns[(highs - lows) <= c]]
    elif name == "two-pow-plus-one":
        if not cfg.is_dyadic:
            raise ValueError("two-pow-plus-one preset requires all radices equal 2")
        out = [
            2**k + 1
            for k in range(cfg.depth)
            if n_min <= 2**k + 1 <= cfg.size
        ]
    else:
        raise ValueError(f"unknown preset {name!r}")
    if not out:
        raise ValueError(f"preset {name!r} is empty for this configuration")
    return out


def batched_fejer_means(s: Spectrum, indices: list[int]) -> np.ndarray:
    """sigma_n f for many n at once; rows follow the index list."""
    size = s.cfg.size
    coef = np.zeros((len(indices), size), dtype=np.complex128)
    for r, n in enumerate(indices):
        if not 1 <= n <= size:
            raise ValueError(f"Fejer order {n} out of range [1, {size}]")
        coef[r, :n] = s.coeffs[:n] * (n - np.arange(n)) / n
    return inverse_values(coef, s.cfg)

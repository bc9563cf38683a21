"""Dirichlet and Fejer kernels, closed forms, and the kernel-inequality verifiers.

Definitions: D_n = sum_{k<n} psi_k and K_n = (1/n) sum_{k=1}^{n} D_k, so the
Fejer multiplier on coefficient j is (n-j)/n for j < n and every K_n has unit
integral.  For all-radix-2 configs the kernels are rational with denominator
n and are also computed exactly in int64 (``dirichlet_exact_int``,
``fejer_numerator_exact_int``); the inequality verifiers use the exact path
when available so that "equals zero" means exactly zero.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from . import backend
from .digits import expand, lows_highs
from .group import GroupConfig, interval
from .transform import GridFunction, character_row, forward_values, inverse_values

_cache_lock = threading.Lock()
_cache: OrderedDict[tuple, np.ndarray] = OrderedDict()
_cache_budget = 128


def set_kernel_cache_budget(budget: int) -> None:
    global _cache_budget
    if budget < 0:
        raise ValueError("budget must be >= 0")
    with _cache_lock:
        _cache_budget = budget
        while len(_cache) > _cache_budget:
            _cache.popitem(last=False)


def _cached_synthesis(cfg: GroupConfig, kind: str, n: int, coeff_fn) -> np.ndarray:
    key = (cfg, kind, n)
    with _cache_lock:
        hit = _cache.get(key)
        if hit is not None:
            _cache.move_to_end(key)
            return hit
    values = inverse_values(coeff_fn(), cfg)
    with _cache_lock:
        if _cache_budget > 0:
            _cache[key] = values
            _cache.move_to_end(key)
            while len(_cache) > _cache_budget:
                _cache.popitem(last=False)
    return values


def dirichlet_values(cfg: GroupConfig, n: int) -> np.ndarray:
    if not 0 <= n <= cfg.size:
        raise ValueError(f"Dirichlet order {n} out of range [0, {cfg.size}]")

    def coeffs():
        c = np.zeros(cfg.size, dtype=np.complex128)
        c[:n] = 1.0
        return c

    return _cached_synthesis(cfg, "D", n, coeffs)


def dirichlet(cfg: GroupConfig, n: int) -> GridFunction:
    """D_n = sum of the first n characters; D_0 = 0, D_1 = 1."""
    return GridFunction(dirichlet_values(cfg, n), cfg)


def fejer_values(cfg: GroupConfig, n: int) -> np.ndarray:
    if not 1 <= n <= cfg.size:
        raise ValueError(f"Fejer order {n} out of range [1, {cfg.size}]")

    def coeffs():
        c = np.zeros(cfg.size, dtype=np.complex128)
        c[:n] = (n - np.arange(n)) / n
        return c

    return _cached_synthesis(cfg, "K", n, coeffs)


def fejer_kernel(cfg: GroupConfig, n: int) -> GridFunction:
    """K_n via the multiplier form (the fast path)."""
    return GridFunction(fejer_values(cfg, n), cfg)


def fejer_kernel_direct(cfg: GroupConfig, n: int) -> GridFunction:
    """K_n by the definition (1/n) sum_{k=1}^{n} D_k, summing character rows."""
    if not 1 <= n <= cfg.size:
        raise ValueError(f"Fejer order {n} out of range [1, {cfg.size}]")
    acc = np.zeros(cfg.size, dtype=np.complex128)
    # sum_{k=1}^{n} D_k = sum_{j<n} (n-j) psi_j
    for j in range(n):
        acc += (n - j) * character_row(cfg, j)
    return GridFunction(acc / n, cfg)


def dirichlet_exact_int(cfg: GroupConfig, n: int) -> np.ndarray:
    """D_n as exact int64 values (all-radix-2 configs only)."""
    if not cfg.is_dyadic:
        raise ValueError("exact integer kernels require all radices equal 2")
    if not 0 <= n <= cfg.size:
        raise ValueError(f"Dirichlet order {n} out of range [0, {cfg.size}]")
    row = np.zeros((1, cfg.size), dtype=np.int64)
    row[0, :n] = 1
    backend.get_module().walsh_passes_int(row, cfg.depth)
    return row[0]


def fejer_numerator_exact_int(cfg: GroupConfig, n: int) -> np.ndarray:
    """n * K_n as exact int64 values (all-radix-2 configs only)."""
    if not cfg.is_dyadic:
        raise ValueError("exact integer kernels require all radices equal 2")
    if not 1 <= n <= cfg.size:
        raise ValueError(f"Fejer order {n} out of range [1, {cfg.size}]")
    row = np.zeros((1, cfg.size), dtype=np.int64)
    row[0, :n] = n - np.arange(n)
    backend.get_module().walsh_passes_int(row, cfg.depth)
    return row[0]


def dirichlet_Mn_closed(cfg: GroupConfig, n: int) -> GridFunction:
    """Closed form of D_{M_n}: M_n on the cylinder I_n, zero elsewhere."""
    if not 0 <= n <= cfg.depth:
        raise ValueError(f"level {n} out of range [0, {cfg.depth}]")
    Mn = cfg.cumprods[n]
    values = np.zeros(cfg.size, dtype=np.complex128)
    values[np.arange(cfg.size) % Mn == 0] = Mn
    return GridFunction(values, cfg)


def dirichlet_sMn_closed(cfg: GroupConfig, s: int, n: int) -> GridFunction:
    """Closed form of D_{s*M_n} = D_{M_n} * sum_{k<s} r_n^k for 1 <= s < m_n."""
    if not 0 <= n < cfg.depth:
        raise ValueError(f"level {n} out of range [0, {cfg.depth})")
    if not 1 <= s <= cfg.radices[n] - 1:
        raise ValueError(f"digit factor {s} out of range [1, {cfg.radices[n] - 1}]")
    r = np.exp(2j * np.pi * cfg.digit_table[n] / cfg.radices[n])
    geom = np.zeros(cfg.size, dtype=np.complex128)
    rk = np.ones(cfg.size, dtype=np.complex128)
    for _ in range(s):
        geom += rk
        rk *= r
    return GridFunction(dirichlet_Mn_closed(cfg, n).values * geom, cfg)


def shift_identity_residual(cfg: GroupConfig, j: int, n: int) -> float:
    """Max-norm of D_{j+M_n} - (D_{M_n} + r_n * D_j), for j < M_n."""
    if not 0 <= n < cfg.depth:
        raise ValueError(f"level {n} out of range [0, {cfg.depth})")
    Mn = cfg.cumprods[n]
    if not 0 <= j < Mn:
        raise ValueError(f"shift {j} must satisfy 0 <= j < M_n = {Mn}")
    r = np.exp(2j * np.pi * cfg.digit_table[n] / cfg.radices[n])
    lhs = dirichlet_values(cfg, j + Mn)
    rhs = dirichlet_values(cfg, Mn) + r * dirichlet_values(cfg, j)
    return float(np.max(np.abs(lhs - rhs)))


def fejer_Mn_closed(cfg: GroupConfig, n: int) -> GridFunction:
    """K_{M_n} from the pointwise closed form.

    Off I_n (first nonzero digit t < n): zero unless digits t+1..n-1 all
    vanish, in which case M_t / (1 - r_t(x)).  On I_n the first n digits are
    zero, every psi_j with j < M_n equals 1, and the multiplier form sums to
    (M_n + 1) / 2.
    """
    if not 0 <= n <= cfg.depth:
        raise ValueError(f"level {n} out of range [0, {cfg.depth}]")
    Mn = cfg.cumprods[n]
    idx = np.arange(cfg.size, dtype=np.int64)
    values = np.zeros(cfg.size, dtype=np.complex128)
    values[idx % Mn == 0] = (Mn + 1) / 2
    for t in range(n):
        Mt = cfg.cumprods[t]
        on_shell = (idx % Mt == 0) & (cfg.digit_table[t] != 0)
        # zero branch unless x - x_t e_t lands in I_n, i.e. digits t+1..n-1 vanish
        clean = idx % Mn == cfg.digit_table[t] * Mt
        sel = on_shell & clean
        rt = np.exp(2j * np.pi * cfg.digit_table[t][sel] / cfg.radices[t])
        values[sel] = Mt / (1.0 - rt)
    return GridFunction(values, cfg)


def kernel_l1_norm(cfg: GroupConfig, n: int) -> float:
    """Integral of |K_n| over the group."""
    return float(np.mean(np.abs(fejer_values(cfg, n))))


def lower_9k_cell_indices(cfg: GroupConfig, low: int) -> np.ndarray:
    """Indices of I_{low+1}(e_{low-1} + e_low); requires low >= 1."""
    if low < 1:
        raise ValueError("cell needs low >= 1 (digit low-1 must exist)")
    if low >= cfg.depth:
        raise ValueError("cell level exceeds depth")
    base = cfg.cumprods[low - 1] + cfg.cumprods[low]
    M = cfg.cumprods[low + 1]
    return base + M * np.arange(cfg.size // M, dtype=np.int64)


def lower_9k_margin(cfg: GroupConfig, n: int) -> float:
    """min over the cell of |n K_n| minus M_{<n>}^2 / (2 pi lambda)."""
    prof = expand(cfg, n)
    if prof.low < 1:
        raise ValueError("Eq. (9k) cell is undefined for lowest digit at position 0")
    cell = lower_9k_cell_indices(cfg, prof.low)
    if cfg.is_dyadic:
        nk = np.abs(fejer_numerator_exact_int(cfg, n)[cell]).astype(np.float64)
    else:
        nk = n * np.abs(fejer_values(cfg, n)[cell])
    bound = cfg.cumprods[prof.low] ** 2 / (2 * np.pi * cfg.lam)
    return float(nk.min() - bound)


def verify_lower_9k(cfg: GroupConfig, n: int, slack: float = 1e-12) -> bool:
    """True iff the kernel lower bound holds on its cell within slack."""
    return lower_9k_margin(cfg, n) >= -slack


def verify_upper_10k(cfg: GroupConfig, n: int) -> tuple[float, bool]:
    """Empirical constant for |K_n| <= (c/n) sum_{l=<n>..|n|} M_l |K_{M_l}|.

    Returns (c_hat, zero_consistent): c_hat maximizes |K_n| / rhs over points
    with rhs > 0; zero_consistent reports whether |K_n| vanishes wherever the
    rhs does.
    """
    prof = expand(cfg, n)
    if cfg.is_dyadic:
        num = np.abs(fejer_numerator_exact_int(cfg, n)).astype(np.float64)
        denom = np.zeros(cfg.size)
        for l in range(prof.low, prof.high + 1):
            denom += np.abs(fejer_numerator_exact_int(cfg, cfg.cumprods[l])).astype(np.float64)
        zeros = denom == 0
        num_zero_ok = bool(np.all(num[zeros] == 0)) if zeros.any() else True
    else:
        num = n * np.abs(fejer_values(cfg, n))
        denom = np.zeros(cfg.size)
        for l in range(prof.low, prof.high + 1):
            Ml = cfg.cumprods[l]
            denom += Ml * np.abs(fejer_values(cfg, Ml))
        zeros = denom < 1e-9 * cfg.size
        num_zero_ok = bool(np.all(num[zeros] < 1e-9 * cfg.size)) if zeros.any() else True
    pos = ~zeros
    c_hat = float(np.max(num[pos] / denom[pos])) if pos.any() else 0.0
    return c_hat, num_zero_ok


def verify_lemma5b(cfg: GroupConfig, level: int, i: int, j: int, n: int) -> float:
    """Empirical constant for int_{I_level} |K_n(x-t)| dmu <= c M_i M_j / M_level^2.

    x ranges over the union I_level^{i,j} (all tails); requires n >= M_level.
    """
    if not (0 <= i < j <= level <= cfg.depth):
        raise ValueError(f"need 0 <= i < j <= level, got ({i}, {j}, {level})")
    if n < cfg.cumprods[level]:
        raise ValueError(f"Lemma 5b needs n >= M_level = {cfg.cumprods[level]}")
    absk = GridFunction(np.abs(fejer_values(cfg, n)).astype(np.complex128), cfg)
    ind = np.zeros(cfg.size, dtype=np.complex128)
    ind[interval(cfg, level, 0).indices] = 1.0
    from .transform import convolve  # local import to avoid cycle at module load

    integral = convolve(absk, GridFunction(ind, cfg)).values.real
    from .group import annulus_union_mask

    mask = annulus_union_mask(cfg, level, [(i, j)])
    if not mask.any():
        raise ValueError(f"empty cell I_{level}^{{{i},{j}}}")
    Ml = cfg.cumprods[level]
    return float(integral[mask].max() * Ml**2 / (cfg.cumprods[i] * cfg.cumprods[j]))


@dataclass(frozen=True)
class KernelSweepRow:
    n: int
    low: int
    high: int
    l1_norm: float
    upper_10k: float
    upper_zero_ok: bool
    lower_9k_margin: float | None


def kernel_sweep(cfg: GroupConfig, n_max: int | None = None) -> list[KernelSweepRow]:
    """Per-n kernel statistics for n = 1..n_max (default M_N - 1), in one pass.

    Streams S_n = sum_{k<=n} D_k = n K_n with chunked synthesis, so the whole
    sweep is O(M_N^2) work and O(M_N) memory per chunk.  Exact in int64 for
    all-radix-2 configs.
    """
    size = cfg.size
    if n_max is None:
        n_max = size - 1
    if not 1 <= n_max <= size:
        raise ValueError(f"n_max out of range [1, {size}]")
    dyadic = cfg.is_dyadic
    mod = backend.get_module()

    # denominators for (10k): T_h = sum_{l<=h} |M_l K_{M_l}| = sum_{l<=h} |S_{M_l}|
    abs_SM = []
    for l in range(cfg.depth + 1):
        if dyadic:
            abs_SM.append(np.abs(fejer_numerator_exact_int(cfg, cfg.cumprods[l])).astype(np.float64))
        else:
            Ml = cfg.cumprods[l]
            abs_SM.append(Ml * np.abs(fejer_values(cfg, Ml)))
    T = np.cumsum(np.array(abs_SM), axis=0)

    cells = {h: lower_9k_cell_indices(cfg, h) for h in range(1, cfg.depth)}
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    lows, highs = lows_highs(cfg, ns)

    rows: list[KernelSweepRow] = []
    chunk = max(1, min(256, (1 << 22) // max(size, 1)))
    lam = cfg.lam
    S = None  # running sum over k<=n of D_k
    for start in range(1, n_max + 1, chunk):
        stop = min(start + chunk, n_max + 1)
        if dyadic:
            block = np.zeros((stop - start, size), dtype=np.int64)
            for r, n in enumerate(range(start, stop)):
                block[r, :n] = 1
            mod.walsh_passes_int(block, cfg.depth)
        else:
            blockc = np.zeros((stop - start, size), dtype=np.complex128)
            for r, n in enumerate(range(start, stop)):
                blockc[r, :n] = 1.0
            mod.mixed_radix_passes(blockc, cfg.radices, +1)
            block = blockc
        for r, n in enumerate(range(start, stop)):
            S = block[r].copy() if S is None else S + block[r]
            absS = np.abs(S).astype(np.float64) if dyadic else np.abs(S)
            low = int(lows[n - 1])
            high = int(highs[n - 1])
            l1 = float(absS.mean() / n)
            denom = T[high] - (T[low - 1] if low > 0 else 0.0)
            zeros = denom == 0 if dyadic else denom < 1e-9 * size
            if zeros.any():
                zero_ok = bool(np.all(absS[zeros] == 0)) if dyadic else bool(
                    np.all(absS[zeros] < 1e-9 * size)
                )
            else:
                zero_ok = True
            pos = ~zeros
            c_hat = float(np.max(absS[pos] / denom[pos])) if pos.any() else 0.0
            if low >= 1:
                bound = cfg.cumprods[low] ** 2 / (2 * np.pi * lam)
                margin = float(absS[cells[low]].min() - bound)
            else:
                margin = None
            rows.append(KernelSweepRow(n, low, high, l1, c_hat, zero_ok, margin))
    return rows

"""Vilenkin characters and the fast Fourier transform on the truncated group.

Conventions (fixed throughout the package):

* analysis is measure-weighted: coeff(n) = (1/M_N) * sum_x f(x) * conj(psi_n(x));
* synthesis is unweighted: f(x) = sum_n coeff(n) * psi_n(x).

The fast path runs one small DFT per digit (the multidimensional DFT over
Z_{m_0} x ... x Z_{m_{N-1}}), cost O(M_N * sum_k m_k).  ``naive_forward`` /
``naive_inverse`` are the O(M_N^2) double-sum oracles and share no code with
the fast path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .group import GroupConfig, GroupPoint, sub_index_array

REL_TOL = 1e-10


@dataclass(frozen=True)
class GridFunction:
    """Complex-valued function on the M_N points, indexed mixed-radix."""

    values: np.ndarray
    cfg: GroupConfig

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if v.shape != (self.cfg.size,):
            raise ValueError(f"expected {self.cfg.size} values, got shape {v.shape}")
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ValueError("non-finite values")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.cfg.size


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients indexed by n = 0..M_N-1."""

    coeffs: np.ndarray
    cfg: GroupConfig

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.cfg.size,):
            raise ValueError(f"expected {self.cfg.size} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c.view(np.float64))):
            raise ValueError("non-finite coefficients")
        object.__setattr__(self, "coeffs", c)

    def __len__(self):
        return self.cfg.size


def rademacher(cfg: GroupConfig, k: int, x: GroupPoint | int) -> complex:
    """Generalized Rademacher function exp(2*pi*i * x_k / m_k)."""
    if not 0 <= k < cfg.depth:
        raise ValueError(f"coordinate {k} out of range")
    idx = x.index if isinstance(x, GroupPoint) else int(x)
    xk = (idx // cfg.cumprods[k]) % cfg.radices[k]
    return complex(np.exp(2j * np.pi * xk / cfg.radices[k]))


def rademacher_row(cfg: GroupConfig, k: int) -> np.ndarray:
    """r_k evaluated at every point."""
    if not 0 <= k < cfg.depth:
        raise ValueError(f"coordinate {k} out of range")
    return np.exp(2j * np.pi * cfg.digit_table[k] / cfg.radices[k])


def character(cfg: GroupConfig, n: int, x: GroupPoint | int) -> complex:
    """psi_n(x) = prod_k r_k(x)^{n_k}; psi_0 == 1."""
    if not 0 <= n < cfg.size:
        raise ValueError(f"character index {n} out of range")
    x_idx = x.index if isinstance(x, GroupPoint) else int(x)
    phase = 0.0
    for k in range(cfg.depth):
        m = cfg.radices[k]
        nk = (n // cfg.cumprods[k]) % m
        xk = (x_idx // cfg.cumprods[k]) % m
        phase += (nk * xk % m) / m
    return complex(np.exp(2j * np.pi * phase))


def character_row(cfg: GroupConfig, n: int) -> np.ndarray:
    """psi_n at every point, built from digit phases (no transform involved)."""
    if not 0 <= n < cfg.size:
        raise ValueError(f"character index {n} out of range")
    phase = np.zeros(cfg.size)
    for k in range(cfg.depth):
        m = cfg.radices[k]
        nk = (n // cfg.cumprods[k]) % m
        if nk:
            phase += (nk * cfg.digit_table[k] % m) / m
    return np.exp(2j * np.pi * phase)


def character_matrix(cfg: GroupConfig) -> np.ndarray:
    """Full (M_N, M_N) matrix psi[n, x].  Quadratic memory; oracle use only."""
    phase = np.zeros((cfg.size, cfg.size))
    for k in range(cfg.depth):
        m = cfg.radices[k]
        d = cfg.digit_table[k]
        phase += np.outer(d, d) % m / m
    return np.exp(2j * np.pi * phase)


def walsh_character_matrix_int(cfg: GroupConfig) -> np.ndarray:
    """Exact +/-1 character matrix for all-radix-2 configs, as int8."""
    if not cfg.is_dyadic:
        raise ValueError("integer characters require all radices equal 2")
    parity = np.zeros((cfg.size, cfg.size), dtype=np.int8)
    for k in range(cfg.depth):
        d = cfg.digit_table[k].astype(np.int8)
        parity ^= d[:, None] & d[None, :]
    return np.int8(1) - np.int8(2) * parity


def _batched(values: np.ndarray) -> tuple[np.ndarray, bool]:
    arr = np.ascontiguousarray(values, dtype=np.complex128)
    if arr.ndim == 1:
        return arr[None, :], True
    if arr.ndim == 2:
        return arr, False
    raise ValueError("expected 1-D or 2-D array")


def forward_values(values: np.ndarray, cfg: GroupConfig) -> np.ndarray:
    """Fast analysis along the last axis; accepts a batch of rows."""
    data, squeeze = _batched(values)
    out = data.copy()
    backend.get_module().mixed_radix_passes(out, cfg.radices, -1)
    out /= cfg.size
    return out[0] if squeeze else out


def inverse_values(coeffs: np.ndarray, cfg: GroupConfig) -> np.ndarray:
    """Fast synthesis along the last axis; accepts a batch of rows."""
    data, squeeze = _batched(coeffs)
    out = data.copy()
    backend.get_module().mixed_radix_passes(out, cfg.radices, +1)
    return out[0] if squeeze else out


def forward(f: GridFunction) -> Spectrum:
    return Spectrum(forward_values(f.values, f.cfg), f.cfg)


def inverse(s: Spectrum) -> GridFunction:
    return GridFunction(inverse_values(s.coeffs, s.cfg), s.cfg)


def naive_forward(f: GridFunction) -> Spectrum:
    """O(M_N^2) analysis oracle: coeff(n) = (1/M_N) sum_x f(x) conj(psi_n(x))."""
    psi = character_matrix(f.cfg)
    return Spectrum(psi.conj() @ f.values / f.cfg.size, f.cfg)


def naive_inverse(s: Spectrum) -> GridFunction:
    """O(M_N^2) synthesis oracle: f(x) = sum_n coeff(n) psi_n(x)."""
    psi = character_matrix(s.cfg)
    return GridFunction(psi.T @ s.coeffs, s.cfg)


def convolve(f: GridFunction, g: GridFunction) -> GridFunction:
    """Group convolution (f*g)(x) = (1/M_N) sum_t f(x-t) g(t), via spectra."""
    if f.cfg != g.cfg:
        raise ValueError("config mismatch")
    prod = forward_values(f.values, f.cfg) * forward_values(g.values, g.cfg)
    return GridFunction(inverse_values(prod, f.cfg), f.cfg)


def naive_convolve(f: GridFunction, g: GridFunction) -> GridFunction:
    """Direct double-sum convolution oracle."""
    if f.cfg != g.cfg:
        raise ValueError("config mismatch")
    cfg = f.cfg
    x = np.arange(cfg.size, dtype=np.int64)
    out = np.zeros(cfg.size, dtype=np.complex128)
    for t in range(cfg.size):
        out += f.values[sub_index_array(cfg, x, t)] * g.values[t]
    return GridFunction(out / cfg.size, cfg)


def plancherel_residual(f: GridFunction) -> float:
    """| sum |coeff|^2 - mean |f|^2 | relative to mean |f|^2."""
    c = forward_values(f.values, f.cfg)
    lhs = float(np.sum(np.abs(c) ** 2))
    rhs = float(np.mean(np.abs(f.values) ** 2))
    return abs(lhs - rhs) / max(rhs, 1e-300)

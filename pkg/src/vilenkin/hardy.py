"""Martingales on the cylinder filtration, quasi-norms, and p-atoms.

A martingale here is the finite sequence f^(0)..f^(N) of functions, f^(n)
constant on every depth-n cylinder.  For a plain function the levels are the
cell averages, which coincide with the power-block partial sums S_{M_n} f;
both routes are implemented and cross-checked.  The weak-L_p supremum is
evaluated exactly: on a finite group the distribution function is a step
function, so only the jump points compete.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .group import GroupConfig, interval
from .means import partial_sum
from .transform import GridFunction, Spectrum, forward


def cell_average_values(values: np.ndarray, cfg: GroupConfig, level: int) -> np.ndarray:
    """Average over each cylinder I_level(x); returns a full-length vector.

    Cylinder membership is idx mod M_level, so cells sit at fixed residues.
    """
    if not 0 <= level <= cfg.depth:
        raise ValueError(f"level {level} out of range [0, {cfg.depth}]")
    Ml = cfg.cumprods[level]
    means = values.reshape(cfg.size // Ml, Ml).mean(axis=0)
    return np.tile(means, cfg.size // Ml)


@dataclass(frozen=True)
class Martingale:
    levels: tuple[GridFunction, ...]
    cfg: GroupConfig

    def __post_init__(self):
        if len(self.levels) != self.cfg.depth + 1:
            raise ValueError(f"expected {self.cfg.depth + 1} levels")

    def validate(self, tol: float = 1e-10) -> bool:
        """Measurability and conditional-expectation consistency."""
        scale = max(float(np.abs(lv.values).max()) for lv in self.levels) or 1.0
        for n, lv in enumerate(self.levels):
            if np.max(np.abs(lv.values - cell_average_values(lv.values, self.cfg, n))) > tol * scale:
                return False
        for n in range(self.cfg.depth):
            down = cell_average_values(self.levels[n + 1].values, self.cfg, n)
            if np.max(np.abs(down - self.levels[n].values)) > tol * scale:
                return False
        return True


def martingale_from_function(
    f: GridFunction, *, cross_check: bool = False, tol: float = 1e-10
) -> Martingale:
    """Levels f^(n) = E[f | depth-n cylinders] = S_{M_n} f.

    The cell-average route is used; ``cross_check`` recomputes every level as
    a power-block partial sum and verifies agreement within ``tol``
    (relative to max|f|).
    """
    cfg = f.cfg
    levels = [
        GridFunction(cell_average_values(f.values, cfg, n), cfg)
        for n in range(cfg.depth + 1)
    ]
    if cross_check:
        spec = forward(f)
        scale = float(np.abs(f.values).max()) or 1.0
        for n, lv in enumerate(levels):
            ps = partial_sum(spec, cfg.cumprods[n])
            if np.max(np.abs(ps.values - lv.values)) > tol * scale:
                raise AssertionError(
                    f"cell-average and partial-sum martingale levels disagree at n={n}"
                )
    return Martingale(tuple(levels), cfg)


def maximal_function(mart: Martingale) -> GridFunction:
    """f* = pointwise max of |f^(n)| over all levels."""
    out = np.abs(mart.levels[0].values).copy()
    for lv in mart.levels[1:]:
        np.maximum(out, np.abs(lv.values), out=out)
    return GridFunction(out.astype(np.complex128), mart.cfg)


def lp_quasinorm(g: GridFunction | np.ndarray, p: float, cfg: GroupConfig | None = None) -> float:
    """(integral of |g|^p)^{1/p} with normalized counting measure."""
    if p <= 0:
        raise ValueError(f"p = {p} must be positive")
    values = g.values if isinstance(g, GridFunction) else np.asarray(g)
    return float(np.mean(np.abs(values) ** p) ** (1.0 / p))


def weak_lp_quasinorm(g: GridFunction | np.ndarray, p: float) -> float:
    """(sup_{t>0} t^p mu(|g| > t))^{1/p}, exact on the finite group.

    mu(|g| > t) is right-continuous and steps only at the distinct values
    v of |g|; the sup on each step is approached as t -> v from below, where
    the measure equals mu(|g| >= v).  So the candidates are
    v^p * mu(|g| >= v) over distinct nonzero v.
    """
    if p <= 0:
        raise ValueError(f"p = {p} must be positive")
    values = g.values if isinstance(g, GridFunction) else np.asarray(g)
    mag = np.sort(np.abs(values).ravel())
    m = mag.size
    vals, first = np.unique(mag, return_index=True)
    keep = vals > 0
    if not keep.any():
        return 0.0
    tail = (m - first[keep]) / m  # mu(|g| >= v)
    best = float(np.max(vals[keep] ** p * tail))
    return best ** (1.0 / p)


def hardy_quasinorm(obj: Martingale | GridFunction, p: float) -> float:
    """H_p quasi-norm: ||f*||_p of the (induced) martingale."""
    mart = obj if isinstance(obj, Martingale) else martingale_from_function(obj)
    return lp_quasinorm(maximal_function(mart), p)


@dataclass(frozen=True)
class Atom:
    """Candidate p-atom supported in the cylinder I_{support_level}(0)."""

    values: GridFunction
    support_level: int
    p: float


def validate_atom(atom: Atom, rel_tol: float = 1e-12) -> bool:
    """Support, zero mean, and sup-norm bound, within rel_tol of the scale.

    Tolerances are relative to mu(I)^{-1/p} (the admissible sup), since atom
    values at small p are far above unit scale.
    """
    cfg = atom.values.cfg
    if not 0 <= atom.support_level <= cfg.depth:
        return False
    if not atom.p > 0:
        return False
    v = atom.values.values
    support = interval(cfg, atom.support_level, 0)
    bound = float(cfg.cumprods[atom.support_level] ** (1.0 / atom.p))  # mu(I)^{-1/p}
    outside = np.delete(np.abs(v), support.indices)
    if outside.size and outside.max() > rel_tol * bound:
        return False
    mean_on_I = np.mean(v[support.indices])
    if abs(mean_on_I) > rel_tol * bound:
        return False
    return bool(np.abs(v).max() <= bound * (1.0 + rel_tol))


def random_atom(cfg: GroupConfig, level: int, p: float, seed) -> Atom:
    """Seeded random p-atom on I_level(0): centered draw rescaled to the sup bound."""
    if not 0 <= level < cfg.depth:
        raise ValueError(f"atom level {level} out of range [0, {cfg.depth})")
    if p <= 0:
        raise ValueError(f"p = {p} must be positive")
    rng = np.random.default_rng(seed)
    support = interval(cfg, level, 0).indices
    for _ in range(100):
        draw = rng.standard_normal(support.size)
        draw -= draw.mean()
        peak = np.abs(draw).max()
        if peak > 1e-9:
            break
    else:
        raise RuntimeError("degenerate atom draws")
    bound = cfg.cumprods[level] ** (1.0 / p)
    v = np.zeros(cfg.size, dtype=np.complex128)
    v[support] = draw * (bound / peak)
    return Atom(GridFunction(v, cfg), level, p)

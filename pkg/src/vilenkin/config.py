"""Experiment configuration: a JSON document with field-level validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .group import GroupConfig, walsh_config

PRESETS = ("transform", "kernel", "verify", "thm1a", "sharpness", "rates")
P_CONSTRAINED_PRESETS = ("thm1a", "sharpness", "rates")
RATES_PRESETS = ("Mn", "Mn_plus_1", "walsh_2n_plus_1")
INDEX_KINDS = (
    "power-blocks",
    "rho-bounded",
    "two-pow-plus-one",
    "two-pow-even-plus-one",
    "explicit",
)


class ConfigError(ValueError):
    """Schema violation; the message names the offending field."""


@dataclass
class ExperimentConfig:
    group: GroupConfig
    seed: int
    p: float = 1.0 / 3.0
    preset: str = "verify"
    phi: dict = field(default_factory=lambda: {"kind": "constant", "value": 1.0})
    index_set: dict = field(default_factory=lambda: {"kind": "rho-bounded", "c": 3})
    rates_preset: str = "Mn"
    n_range: tuple[int, int] = (1, 8)
    atom_count: int = 20
    atom_levels: tuple[int, ...] = (4, 6, 8)
    output_dir: str = "."
    cache_budget: int = 128
    reference_mode: bool = False
    cap_factor: float = 4.0
    control: bool = False
    band_max: float = 4.0
    drift_max: float = 0.10
    lemma5b_levels: tuple[int, ...] = (3, 5)


def _require(doc: dict, name: str, types, validate=None):
    if name not in doc:
        raise ConfigError(f"{name}: required field is missing")
    val = doc[name]
    if not isinstance(val, types):
        raise ConfigError(f"{name}: expected {types}, got {type(val).__name__}")
    if validate is not None and not validate(val):
        raise ConfigError(f"{name}: invalid value {val!r}")
    return val


def _optional(doc: dict, name: str, default, types, validate=None):
    if name not in doc:
        return default
    return _require(doc, name, types, validate)


def _parse_group(doc: dict) -> GroupConfig:
    g = _require(doc, "group", dict)
    if "radices" in g:
        radices = g["radices"]
        if not isinstance(radices, list) or not radices:
            raise ConfigError("group.radices: expected a nonempty list")
        for m in radices:
            if not isinstance(m, int) or m < 2:
                raise ConfigError(f"group.radices: every radix must be an integer >= 2, got {m!r}")
        if len(radices) < 2:
            raise ConfigError("group.radices: depth must be >= 2")
        return GroupConfig(tuple(radices))
    radix = g.get("radix")
    depth = g.get("depth")
    if not isinstance(radix, int) or radix < 2:
        raise ConfigError("group.radix: expected an integer >= 2")
    if not isinstance(depth, int) or depth < 2:
        raise ConfigError("group.depth: expected an integer >= 2")
    return GroupConfig((radix,) * depth)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON config document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"document: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError("document: expected a JSON object")

    group = _parse_group(doc)
    seed = _require(doc, "seed", int)
    preset = _optional(doc, "preset", "verify", str, lambda v: v in PRESETS)
    p = _optional(doc, "p", 1.0 / 3.0, (int, float), lambda v: v > 0)
    if preset in P_CONSTRAINED_PRESETS and not 0 < p < 0.5:
        raise ConfigError(f"p: preset {preset!r} requires 0 < p < 1/2, got {p}")

    phi = _optional(doc, "phi", {"kind": "constant", "value": 1.0}, dict)
    if phi.get("kind", "constant") not in ("constant", "power", "log-power", "full-rate"):
        raise ConfigError(f"phi.kind: unknown kind {phi.get('kind')!r}")

    index_set = _optional(doc, "index_set", {"kind": "rho-bounded", "c": 3}, dict)
    if index_set.get("kind") not in INDEX_KINDS:
        raise ConfigError(f"index_set.kind: unknown kind {index_set.get('kind')!r}")
    if index_set.get("kind") == "explicit":
        vals = index_set.get("values")
        if not isinstance(vals, list) or not all(isinstance(v, int) for v in vals):
            raise ConfigError("index_set.values: expected a list of integers")

    rates_preset = _optional(doc, "rates_preset", "Mn", str, lambda v: v in RATES_PRESETS)
    n_range = _optional(
        doc, "n_range", [1, min(8, group.depth)], list,
        lambda v: len(v) == 2 and all(isinstance(x, int) for x in v) and v[0] < v[1],
    )
    atom_count = _optional(doc, "atom_count", 20, int, lambda v: v >= 1)
    atom_levels = _optional(
        doc, "atom_levels", [lvl for lvl in (4, 6, 8) if lvl < group.depth], list,
        lambda v: all(isinstance(x, int) and 0 <= x < group.depth for x in v),
    )
    output_dir = _optional(doc, "output_dir", ".", str)
    cache_budget = _optional(doc, "cache_budget", 128, int, lambda v: v >= 0)
    reference_mode = _optional(doc, "reference_mode", False, bool)
    cap_factor = _optional(doc, "cap_factor", 4.0, (int, float), lambda v: v >= 1)
    control = _optional(doc, "control", False, bool)
    band_max = _optional(doc, "band_max", 4.0, (int, float), lambda v: v > 1)
    drift_max = _optional(doc, "drift_max", 0.10, (int, float), lambda v: v > 0)
    lemma5b_levels = _optional(
        doc, "lemma5b_levels", [lvl for lvl in (3, 5) if lvl <= group.depth], list,
        lambda v: all(isinstance(x, int) and 2 <= x <= group.depth for x in v),
    )

    return ExperimentConfig(
        group=group,
        seed=seed,
        p=float(p),
        preset=preset,
        phi=phi,
        index_set=index_set,
        rates_preset=rates_preset,
        n_range=tuple(n_range),
        atom_count=atom_count,
        atom_levels=tuple(atom_levels),
        output_dir=output_dir,
        cache_budget=cache_budget,
        reference_mode=reference_mode,
        cap_factor=float(cap_factor),
        control=control,
        band_max=float(band_max),
        drift_max=float(drift_max),
        lemma5b_levels=tuple(lemma5b_levels),
    )


def config_echo(cfg: ExperimentConfig) -> dict:
    """JSON-serializable echo of a config for report summaries."""
    return {
        "group": {"radices": list(cfg.group.radices)},
        "seed": cfg.seed,
        "p": cfg.p,
        "preset": cfg.preset,
        "phi": cfg.phi,
        "index_set": cfg.index_set,
        "rates_preset": cfg.rates_preset,
        "n_range": list(cfg.n_range),
        "atom_count": cfg.atom_count,
        "atom_levels": list(cfg.atom_levels),
        "cache_budget": cfg.cache_budget,
        "reference_mode": cfg.reference_mode,
        "cap_factor": cfg.cap_factor,
        "control": cfg.control,
        "band_max": cfg.band_max,
        "drift_max": cfg.drift_max,
        "lemma5b_levels": list(cfg.lemma5b_levels),
    }

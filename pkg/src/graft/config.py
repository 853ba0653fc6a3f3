"""Pipeline configuration shared by the transfer stages and the CLI."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .errors import GraftError


@dataclass
class TransferConfig:
    """Knobs for the full transfer pipeline. Defaults are the recommended values.

    ``lam`` is the shared regularization weight for both model-fitting stages;
    ``lam_selection`` / ``lam_construction`` override it per stage when set.
    ``mu`` is the smoothness/consistency mix of the construction stage; None
    selects it automatically from the entity counts.
    """

    theta: int = 2
    lam: float = 0.1
    lam_selection: float | None = None
    lam_construction: float | None = None
    ridge: float = 1e-6
    d1: int = 16
    d2: int = 16
    z_entity: float = 1.96
    z_edge: float = 1.96
    max_path_len: int = 3
    mu: float | None = None
    distance_cap: float | None = None
    selection_tol: float = 1e-6
    selection_max_iters: int = 50
    construction_tol: float = 1e-6
    construction_max_iters: int = 500
    eta0: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.theta not in (1, 2):
            raise GraftError(f"theta must be 1 or 2, got {self.theta!r}")
        for name in ("lam", "ridge"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise GraftError(f"{name} must be a nonnegative finite number, got {v!r}")
        for name in ("lam_selection", "lam_construction"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v >= 0):
                raise GraftError(f"{name} must be nonnegative and finite, got {v!r}")
        for name in ("d1", "d2"):
            v = getattr(self, name)
            if not (isinstance(v, int) and v >= 1):
                raise GraftError(f"{name} must be a positive integer, got {v!r}")
        for name in ("z_entity", "z_edge"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise GraftError(f"{name} must be positive and finite, got {v!r}")
        if not (isinstance(self.max_path_len, int) and self.max_path_len >= 2):
            raise GraftError(f"max_path_len must be an integer >= 2, got {self.max_path_len!r}")
        if self.mu is not None and not (math.isfinite(self.mu) and 0.0 <= self.mu <= 1.0):
            raise GraftError(f"mu must be in [0, 1] or None for automatic, got {self.mu!r}")
        if self.distance_cap is not None and not (math.isfinite(self.distance_cap) and self.distance_cap > 0):
            raise GraftError(f"distance_cap must be positive, got {self.distance_cap!r}")
        for name in ("selection_tol", "construction_tol", "eta0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise GraftError(f"{name} must be positive and finite, got {v!r}")
        for name in ("selection_max_iters", "construction_max_iters"):
            v = getattr(self, name)
            if not (isinstance(v, int) and v >= 1):
                raise GraftError(f"{name} must be a positive integer, got {v!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise GraftError(f"seed must be an integer, got {self.seed!r}")

    @property
    def selection_lam_effective(self) -> float:
        return self.lam if self.lam_selection is None else self.lam_selection

    @property
    def construction_lam_effective(self) -> float:
        return self.lam if self.lam_construction is None else self.lam_construction

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELD_TYPES = {f.name: f for f in dataclasses.fields(TransferConfig)}


def _parse_value(name: str, raw: str):
    """Parse one key=value string from a config file into the field's type."""
    text = raw.strip()
    if name not in _FIELD_TYPES:
        raise GraftError(f"unknown config key {name!r}")
    if text.lower() in ("none", "auto"):
        return None
    if name in ("theta", "d1", "d2", "max_path_len", "selection_max_iters",
                "construction_max_iters", "seed"):
        try:
            return int(text)
        except ValueError:
            raise GraftError(f"config key {name!r} expects an integer, got {text!r}") from None
    try:
        return float(text)
    except ValueError:
        raise GraftError(f"config key {name!r} expects a number, got {text!r}") from None


def parse_config_file(text: str) -> dict:
    """Parse 'key = value' lines ('#' comments allowed) into config overrides."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise GraftError(f"config line {lineno}: expected 'key = value', got {line!r}")
        name, _, value = line.partition("=")
        name = name.strip()
        out[name] = _parse_value(name, value)
    return out


def build_config(file_overrides: dict | None = None, flag_overrides: dict | None = None) -> TransferConfig:
    """Defaults, overlaid with config-file values, overlaid with explicit flags.

    Every key present in ``flag_overrides`` wins, even when its value is None
    (e.g. an explicit automatic mu), so callers should include only the flags
    the user actually provided.
    """
    merged: dict = {}
    if file_overrides:
        merged.update(file_overrides)
    if flag_overrides:
        merged.update(flag_overrides)
    unknown = set(merged) - set(_FIELD_TYPES)
    if unknown:
        raise GraftError(f"unknown config keys: {sorted(unknown)}")
    return TransferConfig(**merged)

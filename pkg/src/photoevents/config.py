"""Pipeline configuration: one JSON file, nested sections, stable digest."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from ._validation import ConfigError, check_positive, check_scalar
from .data import ORDER_KEYS
from .graph import GraphConfig
from .svm import CALIBRATIONS, SamplingConfig
from .synth import SynthConfig


@dataclass(frozen=True)
class FeatureConfig:
    tau: float = 86400.0
    sigma: float = 100.0
    enable_social: bool = True
    enable_owner: bool = False

    def __post_init__(self):
        check_positive(self.tau, "tau")
        check_positive(self.sigma, "sigma")


@dataclass(frozen=True)
class TrainingConfig:
    lam: float = 1e-3
    epochs: int = 20
    seed: int = 0
    calibration: str = "logistic"

    def __post_init__(self):
        check_positive(self.lam, "lambda")
        check_scalar(self.epochs, "epochs", min_val=1, integer=True)
        check_scalar(self.seed, "seed", integer=True)
        if self.calibration not in CALIBRATIONS:
            raise ConfigError(f"calibration must be one of {CALIBRATIONS}")


@dataclass(frozen=True)
class ClusteringConfig:
    mu: float = 0.5
    mu_min: float = 0.05
    mu_max: float = 0.95
    mu_step: float = 0.05
    window: float | None = None
    order_key: str = "upload_time"

    def __post_init__(self):
        check_scalar(self.mu, "mu")
        check_positive(self.mu_step, "mu_step")
        if self.mu_max < self.mu_min:
            raise ConfigError("mu_max must be >= mu_min")
        if self.window is not None:
            check_scalar(self.window, "window", min_val=0.0)
        if self.order_key not in ORDER_KEYS:
            raise ConfigError(f"order_key must be one of {ORDER_KEYS}")

    def mu_values(self) -> list[float]:
        return mu_grid(self.mu_min, self.mu_max, self.mu_step)


@dataclass(frozen=True)
class AblationConfig:
    seeds: tuple[int, ...] = tuple(range(10))
    # test set uses seed + test_seed_offset; training set uses the seed itself
    test_seed_offset: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.seeds:
            raise ConfigError("ablation needs at least one seed")


def mu_grid(mu_min: float, mu_max: float, mu_step: float) -> list[float]:
    """Inclusive grid; values rounded to 10 decimals so 0.05-steps print cleanly."""
    check_positive(mu_step, "mu_step")
    out = []
    k = 0
    while True:
        v = round(mu_min + k * mu_step, 10)
        if v > mu_max + 1e-12:
            break
        out.append(v)
        k += 1
    return out


_SECTIONS = {
    "features": FeatureConfig,
    "graph": GraphConfig,
    "sampling": SamplingConfig,
    "training": TrainingConfig,
    "clustering": ClusteringConfig,
    "synth": SynthConfig,
    "ablation": AblationConfig,
}
# JSON key -> dataclass field, where they differ
_RENAMES = {"training": {"lambda": "lam"}}


@dataclass(frozen=True)
class PipelineConfig:
    features: FeatureConfig = field(default_factory=FeatureConfig)
    graph: GraphConfig = field(default_factory=GraphConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    clustering: ClusteringConfig = field(default_factory=ClusteringConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    ablation: AblationConfig = field(default_factory=AblationConfig)
    paths: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PipelineConfig":
        unknown = set(d) - set(_SECTIONS) - {"paths"}
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        kwargs: dict[str, Any] = {"paths": dict(d.get("paths") or {})}
        for name, klass in _SECTIONS.items():
            section = dict(d.get(name) or {})
            for src, dst in _RENAMES.get(name, {}).items():
                if src in section:
                    section[dst] = section.pop(src)
            names = {f.name for f in dataclasses.fields(klass)}
            bad = set(section) - names
            if bad:
                raise ConfigError(f"unknown keys in [{name}]: {sorted(bad)}")
            try:
                kwargs[name] = klass(**_tuplify(klass, section))
            except TypeError as e:
                raise ConfigError(f"[{name}]: {e}") from None
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}: invalid JSON ({e.msg})") from None

    def to_dict(self, include_paths=True) -> dict:
        out = {}
        for name in _SECTIONS:
            section = dataclasses.asdict(getattr(self, name))
            for src, dst in _RENAMES.get(name, {}).items():
                section[src] = section.pop(dst)
            out[name] = _listify(section)
        if include_paths:
            out["paths"] = dict(self.paths)
        return out

    def replace(self, section: str, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **{section: dataclasses.replace(getattr(self, section), **changes)})

    def digest(self) -> str:
        return config_digest(self.to_dict(include_paths=False))


def _tuplify(klass, section):
    types = {f.name: f.type for f in dataclasses.fields(klass)}
    return {k: tuple(v) if isinstance(v, list) and "tuple" in str(types[k]) else v for k, v in section.items()}


def _listify(obj):
    if isinstance(obj, dict):
        return {k: _listify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_listify(v) for v in obj]
    return obj


def config_digest(settings: dict) -> str:
    """SHA-256 over canonical JSON (sorted keys, no whitespace)."""
    blob = json.dumps(_listify(settings), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(blob.encode("utf-8")).hexdigest()

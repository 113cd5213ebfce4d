"""Experiment configuration loaded from JSON.

Every key is optional; missing keys take the defaults below.  Unknown keys
are rejected so typos do not silently fall back to defaults.  Schema::

    {
      "variants": ["VPG", "VD_INVERSE"],
      "seeds": [0, 1, 2, 3, 4],
      "batch_size": 128,
      "iterations": 4000,
      "stages": [[1, 2000, -10, -1], [2001, 4000, 1, 10]],
      "adam": {"lr": 0.01, "beta1": 0.9, "beta2": 0.99, "eps": 1e-8},
      "value_alpha": 0.05,
      "value_floor": 0.01,
      "init": {"mu": 0.0, "sigma": 1.0, "v_hat": 0.0, "w_hat": null},
      "sigmoid_init": {"k": 5.0, "a": 1.2, "b": 0.3, "c": 0.1},
      "entropy_bounds": [-1.0, 1.0],
      "convergence": {"d": 3.0, "w_true": 0.01, "d_list": [1, 2, 3, 4, 5],
                      "mu": 0.0, "batch_size": 10000, "iterations": 500,
                      "value_floor": 1e-4, "w_hat": 0.001},
      "mdp": {"profiles": ["boxcar", "triangular", "gaussian_bump"],
              "w": 0.2, "d_grid": [1.0, 1.5, ...], "alphas": [0.8, 0.9, 0.95],
              "hdr_d": [1.0, 2.0], "normalize": true},
      "entropy_grid": {"mu": [...], "sigma": [...]},
      "jobs": 1,
      "out": "results"
    }

``mdp.profiles`` entries are either built-in names or paths to two-column
profile files.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .bandit import BanditSchedule, Stage
from .gauss_math import ClipBounds
from .learner import AdamState, SigmoidMapping, Variant


class ConfigError(ValueError):
    pass


@dataclass
class AdamConfig:
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.99
    eps: float = 1e-8

    def state(self) -> AdamState:
        return AdamState(lr=self.lr, beta1=self.beta1, beta2=self.beta2, eps=self.eps)


@dataclass
class InitConfig:
    mu: float = 0.0
    sigma: float = 1.0
    v_hat: float = 0.0
    w_hat: float | None = None


@dataclass
class SigmoidConfig:
    k: float = 5.0
    a: float = 1.2
    b: float = 0.3
    c: float = 0.1

    def mapping(self) -> SigmoidMapping:
        return SigmoidMapping(self.k, self.a, self.b, self.c)


@dataclass
class ConvergenceConfig:
    d: float = 3.0
    w_true: float = 0.01
    d_list: list[float] = field(default_factory=lambda: [1.0, 2.0, 3.0, 4.0, 5.0])
    mu: float = 0.0
    batch_size: int = 10000
    iterations: int = 500
    value_floor: float = 1e-4
    w_hat: float = 0.001


@dataclass
class MdpConfig:
    profiles: list[str] = field(default_factory=lambda: ["boxcar", "triangular", "gaussian_bump"])
    w: float = 0.2
    d_grid: list[float] = field(default_factory=lambda: [1.0 + 0.5 * i for i in range(9)])
    alphas: list[float] = field(default_factory=lambda: [0.8, 0.9, 0.95])
    hdr_d: list[float] = field(default_factory=lambda: [1.0, 2.0])
    normalize: bool = True


@dataclass
class EntropyGridConfig:
    mu: list[float] = field(default_factory=lambda: [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0])
    sigma: list[float] = field(default_factory=lambda: [0.01, 0.05, 0.2, 0.5, 1.0, 2.0, 5.0])


@dataclass
class ExperimentConfig:
    variants: list[str] = field(default_factory=lambda: ["VPG", "VD_INVERSE"])
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    batch_size: int = 128
    iterations: int = 4000
    stages: list[list[float]] = field(default_factory=lambda: [[1, 2000, -10.0, -1.0], [2001, 4000, 1.0, 10.0]])
    adam: AdamConfig = field(default_factory=AdamConfig)
    value_alpha: float = 0.05
    value_floor: float = 0.01
    init: InitConfig = field(default_factory=InitConfig)
    sigmoid_init: SigmoidConfig = field(default_factory=SigmoidConfig)
    entropy_bounds: list[float] = field(default_factory=lambda: [-1.0, 1.0])
    convergence: ConvergenceConfig = field(default_factory=ConvergenceConfig)
    mdp: MdpConfig = field(default_factory=MdpConfig)
    entropy_grid: EntropyGridConfig = field(default_factory=EntropyGridConfig)
    jobs: int = 1
    out: str = "results"

    def __post_init__(self):
        if self.iterations < 0:
            raise ConfigError("iterations must be >= 0")
        if self.convergence.iterations < 0:
            raise ConfigError("convergence.iterations must be >= 0")
        if not self.seeds:
            raise ConfigError("seeds must be nonempty")
        if self.batch_size < 1 or self.convergence.batch_size < 1:
            raise ConfigError("batch sizes must be >= 1")
        try:
            for v in self.variants:
                Variant(v)
            self.schedule()
            self.bounds()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def schedule(self) -> BanditSchedule:
        return BanditSchedule(tuple(Stage(int(s[0]), int(s[1]), float(s[2]), float(s[3])) for s in self.stages))

    def bounds(self) -> ClipBounds:
        lo, hi = self.entropy_bounds
        return ClipBounds(float(lo), float(hi))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        sub = _NESTED.get((cls, name))
        kwargs[name] = _build(sub, value, f"{where}.{name}") if sub else value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


_NESTED = {
    (ExperimentConfig, "adam"): AdamConfig,
    (ExperimentConfig, "init"): InitConfig,
    (ExperimentConfig, "sigmoid_init"): SigmoidConfig,
    (ExperimentConfig, "convergence"): ConvergenceConfig,
    (ExperimentConfig, "mdp"): MdpConfig,
    (ExperimentConfig, "entropy_grid"): EntropyGridConfig,
}


def config_from_dict(data: dict) -> ExperimentConfig:
    return _build(ExperimentConfig, data, "config")


def load_config(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)

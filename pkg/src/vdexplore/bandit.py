"""Non-stationary continuous bandit with a binary, interval-shaped reward."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Stage:
    t_start: int
    t_end: int
    reward_lo: float
    reward_hi: float


@dataclass(frozen=True)
class BanditSchedule:
    """Contiguous stages; iteration ``t`` in stage k is rewarded on [lo_k, hi_k]."""

    stages: tuple[Stage, ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("schedule needs at least one stage")
        stages = tuple(s if isinstance(s, Stage) else Stage(*s) for s in self.stages)
        object.__setattr__(self, "stages", stages)
        for s in stages:
            if s.t_end < s.t_start:
                raise ValueError(f"stage {s} ends before it starts")
            if not s.reward_lo < s.reward_hi:
                raise ValueError(f"stage {s} needs reward_lo < reward_hi")
        for a, b in zip(stages, stages[1:]):
            if b.t_start != a.t_end + 1:
                raise ValueError(f"stages {a} and {b} are not contiguous")

    @classmethod
    def two_stage(cls) -> BanditSchedule:
        """[-10, -1] for t in [1, 2000], then [1, 10] for t in [2001, 4000]."""
        return cls((Stage(1, 2000, -10.0, -1.0), Stage(2001, 4000, 1.0, 10.0)))

    @classmethod
    def stationary(cls, lo: float, hi: float, iterations: int) -> BanditSchedule:
        return cls((Stage(1, max(iterations, 1), lo, hi),))

    def stage_at(self, t: int) -> Stage:
        for s in self.stages:
            if s.t_start <= t <= s.t_end:
                return s
        raise ValueError(f"iteration {t} is outside the schedule")

    @property
    def last_iteration(self) -> int:
        return self.stages[-1].t_end


@dataclass(frozen=True)
class RolloutBatch:
    actions: np.ndarray
    rewards: np.ndarray
    iteration: int

    @property
    def mean_reward(self) -> float:
        return float(self.rewards.mean())

    def __len__(self) -> int:
        return len(self.actions)


def reward(schedule: BanditSchedule, t: int, a):
    """1 if ``a`` lies in the closed rewarded interval of the stage active at ``t``."""
    s = schedule.stage_at(t)
    hit = (np.asarray(a) >= s.reward_lo) & (np.asarray(a) <= s.reward_hi)
    return hit.astype(np.int8) if np.ndim(hit) else int(hit)


def sample_batch(
    mu: float,
    sigma: float,
    schedule: BanditSchedule,
    t: int,
    n: int,
    rng: np.random.Generator,
) -> RolloutBatch:
    """Draw ``n`` unclipped actions from N(mu, sigma^2) and score them.

    Normals come from ``rng.standard_normal`` (NumPy's ziggurat transform of
    the generator's uniform stream), so a fixed seed reproduces batches bit
    for bit.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    actions = mu + sigma * rng.standard_normal(n)
    return RolloutBatch(actions, reward(schedule, t, actions), t)

"""REINFORCE with value-dependent exploration for the continuous bandit.

One training iteration samples a batch at the current (mu, sigma), takes an
ADAM ascent step on the policy parameters using the value estimate from the
previous iteration, and only then folds the batch into the value estimate.
The next sigma is recomputed from the updated parameters and value.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bandit import BanditSchedule, RolloutBatch, sample_batch
from .gauss_math import SQRT_2PI_E, ClipBounds, clipped_gaussian_entropy


class Variant(str, enum.Enum):
    VPG = "VPG"                # learned log-sigma
    VD_INVERSE = "VD_INVERSE"  # sigma = w_hat / (sqrt(2 pi e) max(V, floor))
    VD_SIGMOID = "VD_SIGMOID"  # sigma = max(a,0) / (exp(k (V - b)) + 1) + max(c,0)
    FIXED = "FIXED"            # sigma constant


@dataclass(frozen=True)
class AdamState:
    m: float = 0.0
    v: float = 0.0
    step: int = 0
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.99
    eps: float = 1e-8


def adam_update(state: AdamState, grad: float) -> tuple[AdamState, float]:
    """Bias-corrected ADAM; returns the new state and the step magnitude.

    The caller adds the step for ascent or subtracts it for descent.
    """
    step = state.step + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
    m_hat = m / (1.0 - state.beta1**step)
    v_hat = v / (1.0 - state.beta2**step)
    delta = state.lr * m_hat / (math.sqrt(v_hat) + state.eps)
    return replace(state, m=m, v=v, step=step), delta


@dataclass(frozen=True)
class ValueEstimate:
    """Running estimate of the single-state value, kept in [0, 1].

    For a scalar, an exponential moving average at rate ``alpha`` is exactly
    SGD on the squared loss (V - r)^2 / 2 with step size ``alpha``.
    """

    v_hat: float = 0.0
    alpha: float = 0.05


def value_update(est: ValueEstimate, batch_mean_reward: float) -> ValueEstimate:
    v = (1.0 - est.alpha) * est.v_hat + est.alpha * batch_mean_reward
    return replace(est, v_hat=min(max(v, 0.0), 1.0))


@dataclass(frozen=True)
class InverseMapping:
    log_w: float
    floor: float = 0.01

    @property
    def w_hat(self) -> float:
        return math.exp(self.log_w)

    def sigma(self, v_hat: float) -> float:
        return self.w_hat / (SQRT_2PI_E * max(v_hat, self.floor))


@dataclass(frozen=True)
class SigmoidMapping:
    k: float = 5.0
    a: float = 1.2
    b: float = 0.3
    c: float = 0.1


def sigmoid_sigma(mapping: SigmoidMapping, v_hat: float) -> float:
    a, c = max(mapping.a, 0.0), max(mapping.c, 0.0)
    if a <= 0.0 and c <= 0.0:
        raise ValueError("sigmoid mapping with a <= 0 and c <= 0 gives sigma = 0")
    sigma = a / (_exp_clamped(mapping.k * (v_hat - mapping.b)) + 1.0) + c
    if not sigma > 0.0:
        raise ValueError(f"sigmoid mapping produced non-positive sigma {sigma}")
    return sigma


def _exp_clamped(x: float) -> float:
    return math.exp(min(x, 700.0))


def sigmoid_log_sigma_grads(mapping: SigmoidMapping, v_hat: float) -> dict[str, float]:
    """d ln(sigma) / d theta for theta in (k, a, b, c); zero where a max() is inactive."""
    a = max(mapping.a, 0.0)
    s = 1.0 / (_exp_clamped(mapping.k * (v_hat - mapping.b)) + 1.0)
    sigma = sigmoid_sigma(mapping, v_hat)
    ds = s * (1.0 - s)
    return {
        "k": -a * ds * (v_hat - mapping.b) / sigma,
        "a": (s if mapping.a > 0 else 0.0) / sigma,
        "b": a * ds * mapping.k / sigma,
        "c": (1.0 if mapping.c > 0 else 0.0) / sigma,
    }


def _check_batch(batch: RolloutBatch) -> tuple[np.ndarray, np.ndarray]:
    if len(batch) == 0:
        raise ValueError("empty batch")
    return np.asarray(batch.actions, dtype=float), np.asarray(batch.rewards, dtype=float)


def score_grad_mu(batch: RolloutBatch, mu: float, sigma: float) -> float:
    """(1/n) sum r_i (a_i - mu) / sigma^2, no baseline."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    a, r = _check_batch(batch)
    return float(np.mean(r * (a - mu)) / sigma**2)


def score_grad_logsigma(batch: RolloutBatch, mu: float, sigma: float) -> float:
    """(1/n) sum r_i ((a_i - mu)^2 / sigma^2 - 1), no baseline."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    a, r = _check_batch(batch)
    z2 = ((a - mu) / sigma) ** 2
    return float(np.mean(r * (z2 - 1.0)))


def score_grad_wlog(batch: RolloutBatch, mu: float, mapping: InverseMapping, v_hat: float) -> float:
    # sigma is proportional to w_hat, so d ln sigma / d ln w_hat = 1
    return score_grad_logsigma(batch, mu, mapping.sigma(v_hat))


@dataclass(frozen=True)
class PolicyState:
    """Everything one run carries between iterations.

    ``sigma`` is the standard deviation the next batch will be drawn with.
    """

    variant: Variant
    mu: float
    sigma: float
    value: ValueEstimate
    log_sigma: float = 0.0
    inverse: InverseMapping | None = None
    sigmoid: SigmoidMapping | None = None
    adam: dict[str, AdamState] = field(default_factory=dict)
    fixed_mu: bool = False

    @property
    def w_hat(self) -> float | None:
        return self.inverse.w_hat if self.inverse is not None else None


def init_state(
    variant: Variant | str,
    mu: float = 0.0,
    sigma: float = 1.0,
    v_hat: float = 0.0,
    alpha: float = 0.05,
    floor: float = 0.01,
    w_hat: float | None = None,
    sigmoid: SigmoidMapping | None = None,
    adam: AdamState = AdamState(),
    fixed_mu: bool = False,
) -> PolicyState:
    """Build the starting state for ``variant``.

    For VD_INVERSE without an explicit ``w_hat`` the width is chosen so that
    the mapping reproduces ``sigma`` at the initial value estimate.  VD_SIGMOID
    starts wherever its mapping puts it; ``sigma`` is ignored there.
    """
    variant = Variant(variant)
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    value = ValueEstimate(min(max(v_hat, 0.0), 1.0), alpha)
    names = [] if fixed_mu else ["mu"]
    kwargs: dict = {}
    if variant is Variant.VPG:
        kwargs["log_sigma"] = math.log(sigma)
        names.append("log_sigma")
    elif variant is Variant.VD_INVERSE:
        if w_hat is None:
            w_hat = sigma * SQRT_2PI_E * max(value.v_hat, floor)
        inverse = InverseMapping(math.log(w_hat), floor)
        kwargs["inverse"] = inverse
        sigma = inverse.sigma(value.v_hat)
        names.append("log_w")
    elif variant is Variant.VD_SIGMOID:
        mapping = sigmoid or SigmoidMapping()
        kwargs["sigmoid"] = mapping
        sigma = sigmoid_sigma(mapping, value.v_hat)
        names += ["k", "a", "b", "c"]
    return PolicyState(
        variant, mu, sigma, value,
        adam={name: adam for name in names}, fixed_mu=fixed_mu, **kwargs,
    )


@dataclass(frozen=True)
class TraceRow:
    seed: int
    iteration: int
    variant: str
    mean_reward: float
    mu: float
    sigma: float
    w_hat: float | None
    v_hat: float
    clipped_entropy: float


def _ascend(adam: dict[str, AdamState], name: str, param: float, grad: float) -> float:
    adam[name], delta = adam_update(adam[name], grad)
    return param + delta


def train_step(
    state: PolicyState,
    schedule: BanditSchedule,
    t: int,
    n: int,
    rng: np.random.Generator,
    seed: int = 0,
    bounds: ClipBounds = ClipBounds(),
) -> tuple[PolicyState, TraceRow]:
    """One iteration: sample, policy update, value update, recompute sigma."""
    mu, sigma = state.mu, state.sigma
    batch = sample_batch(mu, sigma, schedule, t, n, rng)
    adam = dict(state.adam)
    changes: dict = {}

    g_logsigma = score_grad_logsigma(batch, mu, sigma)
    if not state.fixed_mu:
        changes["mu"] = _ascend(adam, "mu", mu, score_grad_mu(batch, mu, sigma))
    if state.variant is Variant.VPG:
        changes["log_sigma"] = _ascend(adam, "log_sigma", state.log_sigma, g_logsigma)
    elif state.variant is Variant.VD_INVERSE:
        g = score_grad_wlog(batch, mu, state.inverse, state.value.v_hat)
        changes["inverse"] = replace(state.inverse, log_w=_ascend(adam, "log_w", state.inverse.log_w, g))
    elif state.variant is Variant.VD_SIGMOID:
        dlog = sigmoid_log_sigma_grads(state.sigmoid, state.value.v_hat)
        params = {name: _ascend(adam, name, getattr(state.sigmoid, name), g_logsigma * dlog[name])
                  for name in ("k", "a", "b", "c")}
        changes["sigmoid"] = SigmoidMapping(**params)

    value = value_update(state.value, batch.mean_reward)
    new = replace(state, value=value, adam=adam, **changes)
    if new.variant is Variant.VPG:
        next_sigma = math.exp(new.log_sigma)
    elif new.variant is Variant.VD_INVERSE:
        next_sigma = new.inverse.sigma(value.v_hat)
    elif new.variant is Variant.VD_SIGMOID:
        next_sigma = sigmoid_sigma(new.sigmoid, value.v_hat)
    else:
        next_sigma = sigma
    new = replace(new, sigma=next_sigma)

    finite = math.isfinite(new.mu) and math.isfinite(next_sigma) and next_sigma > 0
    entropy = clipped_gaussian_entropy(new.mu, next_sigma, bounds) if finite else math.nan
    row = TraceRow(seed, t, new.variant.value, batch.mean_reward, new.mu, next_sigma,
                   new.w_hat, value.v_hat, entropy)
    return new, row

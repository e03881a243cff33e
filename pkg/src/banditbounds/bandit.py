"""Importance-weighted bandit game: environments, the smoothed Gibbs
strategy, estimate updates, and full-trace simulation.

Strategy timeline: rounds t < K^3 play the uniform warmup policy; from
round K^3 onward the policy is the Gibbs distribution over running
importance-weighted estimates, smoothed so every arm keeps probability at
least epsilon_t.  At the handoff round K*epsilon_t equals 1, which makes
the first smoothed policy uniform regardless of the estimates, so the two
phases join seamlessly.  A shorter configured warmup is honored by capping
epsilon at 1/K (the smoothing precondition K*epsilon <= 1 is enforced
explicitly either way).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .divergences import SimplexVector, _check_unit

__all__ = [
    "Environment",
    "GameConfig",
    "GameTrace",
    "PolicyState",
    "ScheduleError",
    "ScheduleParams",
    "gibbs_posterior",
    "run_game",
    "schedules",
    "smooth_policy",
    "update_estimates",
    "warmup_policy",
    "write_trace_csv",
]

REWARD_KINDS = ("bernoulli", "point", "beta")


class ScheduleError(ValueError):
    """Raised when a smoothing amount is incompatible with the simplex."""


class ScheduleParams(NamedTuple):
    gamma: float
    epsilon: float


def schedules(t: int, n_arms: int) -> ScheduleParams:
    """Learning-rate and exploration schedules gamma_t = (K t)^(1/4), epsilon_t = (K t)^(-1/4)."""
    t = int(t)
    n_arms = int(n_arms)
    if t < 1:
        raise ValueError("t must be a positive integer")
    if n_arms < 2:
        raise ValueError("need at least two arms")
    kt = float(n_arms * t)
    return ScheduleParams(gamma=kt**0.25, epsilon=kt**-0.25)


@dataclass(frozen=True, eq=False)
class Environment:
    """K reward distributions on [0,1] with known means.

    ``reward_kind`` selects the shape: "bernoulli", "point" (deterministic),
    or "beta" (a Beta draw with matching mean, stochastically rounded onto a
    uniform grid so the support is finite and the mean is preserved exactly).
    """

    means: np.ndarray
    reward_kind: str = "bernoulli"
    beta_concentration: float = 4.0
    beta_levels: int = 21

    def __post_init__(self) -> None:
        means = np.array(self.means, dtype=float, copy=True)
        if means.ndim != 1 or means.size < 1:
            raise ValueError("means must be a nonempty 1-d vector")
        for m in means:
            _check_unit(float(m), "mean")
        means.setflags(write=False)
        object.__setattr__(self, "means", means)
        if self.reward_kind not in REWARD_KINDS:
            raise ValueError(f"unknown reward_kind {self.reward_kind!r}")
        if not self.beta_concentration > 0.0:
            raise ValueError("beta_concentration must be positive")
        if int(self.beta_levels) < 2:
            raise ValueError("beta_levels must be at least 2")
        object.__setattr__(self, "beta_levels", int(self.beta_levels))

    @property
    def n_arms(self) -> int:
        return int(self.means.size)

    @property
    def best_arm(self) -> int:
        # np.argmax takes the first maximizer, which is the tie rule here.
        return int(np.argmax(self.means))

    @property
    def best_mean(self) -> float:
        return float(self.means[self.best_arm])

    def sample_reward(self, arm: int, rng: np.random.Generator) -> float:
        m = float(self.means[arm])
        if self.reward_kind == "point":
            return m
        if self.reward_kind == "bernoulli":
            return 1.0 if rng.random() < m else 0.0
        if m <= 0.0 or m >= 1.0:
            return m
        kappa = self.beta_concentration
        x = float(rng.beta(kappa * m, kappa * (1.0 - m)))
        step = 1.0 / (self.beta_levels - 1)
        j = min(int(x / step), self.beta_levels - 2)
        g = j * step
        # Stochastic rounding keeps the conditional mean equal to x.
        return g + step if rng.random() < (x - g) / step else g


@dataclass(frozen=True, eq=False)
class PolicyState:
    """Running estimate state after t rounds.

    ``weighted_sums[a]`` accumulates the importance-weighted samples
    R_s/pi_s(a) of rounds where arm a was played; ``pi_lmin`` is the
    smallest sampling probability assigned to any arm so far (1/K before
    the first round, so the invariant pi_lmin in (0, 1/K] always holds).
    """

    t: int
    weighted_sums: np.ndarray
    pi_lmin: float

    def __post_init__(self) -> None:
        sums = np.array(self.weighted_sums, dtype=float, copy=True)
        if sums.ndim != 1 or sums.size < 1:
            raise ValueError("weighted_sums must be a nonempty 1-d vector")
        if int(self.t) < 0:
            raise ValueError("t must be nonnegative")
        if not 0.0 < self.pi_lmin <= 1.0:
            raise ValueError("pi_lmin must lie in (0, 1]")
        sums.setflags(write=False)
        object.__setattr__(self, "weighted_sums", sums)
        object.__setattr__(self, "t", int(self.t))

    @classmethod
    def initial(cls, n_arms: int) -> "PolicyState":
        if n_arms < 1:
            raise ValueError("need at least one arm")
        return cls(t=0, weighted_sums=np.zeros(n_arms), pi_lmin=1.0 / n_arms)

    @property
    def n_arms(self) -> int:
        return int(self.weighted_sums.size)

    @property
    def rhat(self) -> np.ndarray:
        if self.t == 0:
            return np.zeros(self.n_arms)
        return self.weighted_sums / self.t


def update_estimates(
    state: PolicyState, pi: SimplexVector, arm: int, reward: float
) -> PolicyState:
    """Fold one observed round into the running state."""
    if pi.n_arms != state.n_arms:
        raise ValueError("policy dimension does not match the state")
    if not 0 <= int(arm) < state.n_arms:
        raise ValueError(f"arm {arm} outside 0..{state.n_arms - 1}")
    reward = _check_unit(reward, "reward")
    prob = float(pi.weights[arm])
    if prob <= 0.0:
        raise ValueError("observed an arm the policy assigns zero probability")
    sums = state.weighted_sums.copy()
    sums[int(arm)] += reward / prob
    return PolicyState(
        t=state.t + 1,
        weighted_sums=sums,
        pi_lmin=min(state.pi_lmin, pi.min_weight()),
    )


def _gibbs_weights(r_hat: np.ndarray, gamma: float) -> np.ndarray:
    z = gamma * r_hat
    z = z - z.max()
    w = np.exp(z)
    return w / w.sum()


def gibbs_posterior(r_hat, gamma: float) -> SimplexVector:
    """Distribution proportional to exp(gamma * r_hat), max-shifted for stability."""
    r_hat = np.asarray(r_hat, dtype=float)
    if r_hat.ndim != 1 or r_hat.size < 1:
        raise ValueError("r_hat must be a nonempty 1-d vector")
    if not np.all(np.isfinite(r_hat)):
        raise ValueError("r_hat must be finite")
    gamma = float(gamma)
    if math.isnan(gamma) or gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    return SimplexVector(_gibbs_weights(r_hat, gamma))


def _smooth_weights(rho_w: np.ndarray, epsilon: float) -> np.ndarray:
    return (1.0 - rho_w.size * epsilon) * rho_w + epsilon


def smooth_policy(rho: SimplexVector, epsilon_next: float) -> SimplexVector:
    """Mix toward uniform so every arm keeps probability >= epsilon_next."""
    epsilon_next = float(epsilon_next)
    if math.isnan(epsilon_next) or epsilon_next < 0.0:
        raise ValueError("epsilon_next must be nonnegative")
    if rho.n_arms * epsilon_next > 1.0 + 1e-12:
        raise ScheduleError(
            f"K*epsilon = {rho.n_arms * epsilon_next!r} exceeds 1; "
            "the smoothed policy would leave the simplex"
        )
    return SimplexVector(_smooth_weights(rho.weights, epsilon_next))


def warmup_policy(n_arms: int) -> SimplexVector:
    return SimplexVector.uniform(n_arms)


@dataclass(frozen=True)
class GameConfig:
    """Knobs for :func:`run_game` beyond the environment itself."""

    warmup_length: int | None = None
    store_samples: bool = False

    def __post_init__(self) -> None:
        if self.warmup_length is not None and int(self.warmup_length) < 1:
            raise ValueError("warmup_length must be a positive integer")


@dataclass(frozen=True, eq=False)
class GameTrace:
    """Complete record of one trajectory.

    Row t (0-indexed as t-1) holds the policy played at round t, the arm
    and reward drawn, the estimate vector after the round, and the running
    minimum sampling probability.  ``samples`` optionally stores the full
    importance-weighted sample vectors R_t^a (nonzero only at the played arm).
    """

    n_arms: int
    horizon: int
    warmup_length: int
    pi: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    rhat: np.ndarray
    pi_lmin: np.ndarray
    samples: np.ndarray | None = None

    def pi_min_per_round(self) -> np.ndarray:
        return self.pi.min(axis=1)


def _sample_index(weights: np.ndarray, u: float) -> int:
    acc = 0.0
    last = weights.size - 1
    for j in range(last):
        acc += weights[j]
        if u < acc:
            return j
    return last


def run_game(
    env: Environment,
    horizon: int,
    seed,
    config: GameConfig | None = None,
) -> GameTrace:
    """Play the smoothed Gibbs strategy for ``horizon`` rounds.

    Fully deterministic given ``seed`` (an int, SeedSequence, or Generator).
    """
    if config is None:
        config = GameConfig()
    horizon = int(horizon)
    if horizon < 1:
        raise ValueError("horizon must be a positive integer")
    k = env.n_arms
    if k < 2:
        raise ValueError("need at least two arms")
    warmup = config.warmup_length if config.warmup_length is not None else k**3
    rng = np.random.default_rng(seed)

    pi_rows = np.empty((horizon, k))
    actions = np.empty(horizon, dtype=np.int64)
    rewards = np.empty(horizon)
    rhat_rows = np.empty((horizon, k))
    lmin_rows = np.empty(horizon)
    samples = np.zeros((horizon, k)) if config.store_samples else None

    uniform_w = np.full(k, 1.0 / k)
    action_uniforms = rng.random(horizon)
    bernoulli_uniforms = (
        rng.random(horizon) if env.reward_kind == "bernoulli" else None
    )
    means = env.means

    sums = np.zeros(k)
    t_seen = 0
    lmin = 1.0 / k
    inv_k = 1.0 / k

    for t in range(1, horizon + 1):
        if t < warmup:
            pi_w = uniform_w
        else:
            if t == 1:
                rho_w = uniform_w
            else:
                gamma_prev = schedules(t - 1, k).gamma
                rho_w = _gibbs_weights(sums / t_seen, gamma_prev)
            # Capping at 1/K keeps K*epsilon <= 1 when a warmup shorter
            # than K^3 is configured; at or past K^3 the cap is inactive.
            eps_t = min(schedules(t, k).epsilon, inv_k)
            pi_w = _smooth_weights(rho_w, eps_t)

        arm = _sample_index(pi_w, action_uniforms[t - 1])
        if env.reward_kind == "bernoulli":
            reward = 1.0 if bernoulli_uniforms[t - 1] < means[arm] else 0.0
        elif env.reward_kind == "point":
            reward = float(means[arm])
        else:
            reward = env.sample_reward(arm, rng)

        weighted = reward / pi_w[arm]
        sums[arm] += weighted
        t_seen += 1
        m = float(pi_w.min())
        if m < lmin:
            lmin = m

        row = t - 1
        pi_rows[row] = pi_w
        actions[row] = arm
        rewards[row] = reward
        rhat_rows[row] = sums / t_seen
        lmin_rows[row] = lmin
        if samples is not None:
            samples[row, arm] = weighted

    for arr in (pi_rows, actions, rewards, rhat_rows, lmin_rows):
        arr.setflags(write=False)
    if samples is not None:
        samples.setflags(write=False)
    return GameTrace(
        n_arms=k,
        horizon=horizon,
        warmup_length=warmup,
        pi=pi_rows,
        actions=actions,
        rewards=rewards,
        rhat=rhat_rows,
        pi_lmin=lmin_rows,
        samples=samples,
    )


def write_trace_csv(trace: GameTrace, path) -> None:
    """One row per round: t, action, reward, policy entries, estimate entries."""
    k = trace.n_arms
    header = (
        ["t", "action", "reward"]
        + [f"pi_{a}" for a in range(k)]
        + [f"rhat_{a}" for a in range(k)]
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in range(trace.horizon):
            writer.writerow(
                [row + 1, int(trace.actions[row]), repr(float(trace.rewards[row]))]
                + [repr(float(x)) for x in trace.pi[row]]
                + [repr(float(x)) for x in trace.rhat[row]]
            )

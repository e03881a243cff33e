"""High-probability bounds for importance-weighted bandit estimates.

Two complementary routes are implemented.

* The kl route: for any comparison distribution rho over arms, the kl
  divergence between the scaled estimate pi_lmin * R_hat_t(rho) and the
  scaled truth pi_lmin * R(rho) stays below
  (KL(rho||mu) + 3 ln(t+1) - ln delta) / t simultaneously for all t with
  probability > 1 - delta.  Its L1 relaxation divides the Pinsker radius
  by pi_lmin, the smallest sampling probability seen so far.
* The weighted-martingale route: for nonnegative weights w and a
  data-independent lambda,
  |R_hat - R| <= (KL + (lambda^2/2) sum (w/pi_min)^2 + 2 ln(t+1)
  + ln(2/delta)) / (lambda * sum w).
  ``lambda_opt`` minimizes the KL-free part; ``weighted_gap_bound_opt``
  is the exact closed form of the uniform-weight bound at that lambda.

Both certificates below bound the rho-averaged gap |R_hat_t(rho) - R(rho)|
(the form the proofs actually control); single-arm statements follow by
taking rho to be a point mass.  Infinite prior KL propagates to an
infinite, never-violated bound.

The regret side evaluates the decaying per-round envelope of the smoothed
Gibbs strategy, the exact four-term decomposition of its instantaneous
regret, and the deterministic bounds on the two non-stochastic terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bandit import Environment, GameTrace, _gibbs_weights
from .concentration import CertificateResult
from .divergences import (
    SimplexVector,
    _check_delta,
    bernoulli_kl,
    categorical_kl,
    pinsker_gap,
)

__all__ = [
    "BoundConfig",
    "GapDriverReport",
    "RegretDecomposition",
    "expsum_ratio",
    "gap_driver_report",
    "gibbs_gap_bound",
    "gibbs_kl_sandwich",
    "gibbs_prior_from_means",
    "gibbs_prior_kl_bound",
    "kl_budget",
    "kl_certificate",
    "lambda_opt",
    "regret_decomposition",
    "regret_envelope",
    "reward_gap_radius",
    "weighted_gap_bound",
    "weighted_gap_bound_opt",
]

_SCALE_TOL = 1e-9   # slack allowed when clipping scaled estimates into [0,1]


def _check_t(t: int) -> int:
    t = int(t)
    if t < 1:
        raise ValueError("t must be a positive integer")
    return t


def _check_prior_kl(prior_kl: float) -> float:
    prior_kl = float(prior_kl)
    if math.isnan(prior_kl) or prior_kl < 0.0:
        raise ValueError("prior KL must be nonnegative")
    return prior_kl


def kl_budget(prior_kl: float, t: int, delta: float) -> float:
    """(KL(rho||mu) + 3 ln(t+1) - ln delta) / t, the kl-route budget at round t."""
    prior_kl = _check_prior_kl(prior_kl)
    t = _check_t(t)
    delta = _check_delta(delta)
    return (prior_kl + 3.0 * math.log(t + 1) - math.log(delta)) / t


def reward_gap_radius(prior_kl: float, t: int, delta: float, pi_lmin: float) -> float:
    """L1 relaxation of the kl route: Pinsker radius divided by pi_lmin."""
    pi_lmin = float(pi_lmin)
    if not 0.0 < pi_lmin <= 1.0:
        raise ValueError("pi_lmin must lie in (0, 1]")
    return pinsker_gap(kl_budget(prior_kl, t, delta)) / pi_lmin


def _clip_unit(x: float, what: str) -> float:
    if -_SCALE_TOL <= x < 0.0:
        return 0.0
    if 1.0 < x <= 1.0 + _SCALE_TOL:
        return 1.0
    if 0.0 <= x <= 1.0:
        return x
    raise ValueError(
        f"{what} = {x!r} falls outside [0, 1]: the pi_lmin scaling "
        "contract is violated"
    )


def kl_certificate(
    r_hat_rho: float,
    r_rho: float,
    pi_lmin: float,
    prior_kl: float,
    t: int,
    delta: float,
) -> CertificateResult:
    """Check the kl-route bound for one comparison distribution at round t.

    ``r_hat_rho`` and ``r_rho`` are the rho-averaged estimate and truth;
    both must land in [0, 1] after scaling by ``pi_lmin``.
    """
    pi_lmin = float(pi_lmin)
    if not 0.0 < pi_lmin <= 1.0:
        raise ValueError("pi_lmin must lie in (0, 1]")
    scaled_hat = _clip_unit(pi_lmin * float(r_hat_rho), "pi_lmin * r_hat_rho")
    scaled_true = _clip_unit(pi_lmin * float(r_rho), "pi_lmin * r_rho")
    value = bernoulli_kl(scaled_hat, scaled_true)
    bound = kl_budget(prior_kl, t, delta)
    return CertificateResult(
        holds=value <= bound, slack=bound - value, value=value, bound=bound
    )


def _check_pi_min_seq(pi_min_seq, t: int) -> np.ndarray:
    seq = np.asarray(pi_min_seq, dtype=float)
    if seq.ndim != 1 or seq.size != t:
        raise ValueError(f"pi_min_seq must be a vector of length t = {t}")
    if np.any(seq <= 0.0) or np.any(seq > 1.0):
        raise ValueError("pi_min_seq entries must lie in (0, 1]")
    return seq


def lambda_opt(t: int, delta: float, pi_min_seq) -> float:
    """sqrt(2 t^2 (2 ln(t+1) + ln(2/delta)) / sum pi_min^-2).

    Minimizes the KL-free part of the weighted bound with uniform weights;
    feed it a deterministic lower-bound sequence to keep it data-independent.
    """
    t = _check_t(t)
    delta = _check_delta(delta)
    seq = _check_pi_min_seq(pi_min_seq, t)
    a = float(np.sum(seq**-2.0))
    big_l = 2.0 * math.log(t + 1) + math.log(2.0 / delta)
    return math.sqrt(2.0 * t * t * big_l / a)


def weighted_gap_bound(
    prior_kl: float, t: int, delta: float, lam: float, weights, pi_min_seq
) -> float:
    """The weighted-martingale route bound on |R_hat^w(rho) - R(rho)|."""
    prior_kl = _check_prior_kl(prior_kl)
    t = _check_t(t)
    delta = _check_delta(delta)
    lam = float(lam)
    if not lam > 0.0:
        raise ValueError("lambda must be positive")
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size != t:
        raise ValueError(f"weights must be a vector of length t = {t}")
    if np.any(w < 0.0):
        raise ValueError("weights must be nonnegative")
    total_w = float(w.sum())
    if not total_w > 0.0:
        raise ValueError("weights must not all vanish")
    seq = _check_pi_min_seq(pi_min_seq, t)
    quad = float(np.sum((w / seq) ** 2))
    numerator = (
        prior_kl
        + 0.5 * lam * lam * quad
        + 2.0 * math.log(t + 1)
        + math.log(2.0 / delta)
    )
    return numerator / (lam * total_w)


def weighted_gap_bound_opt(prior_kl: float, t: int, delta: float, pi_min_seq) -> float:
    """Uniform-weight bound evaluated exactly at lambda_opt.

    Equals (KL + 2 L) * sqrt(A / (2 L)) / t with
    L = 2 ln(t+1) + ln(2/delta) and A = sum pi_min^-2.
    """
    prior_kl = _check_prior_kl(prior_kl)
    t = _check_t(t)
    delta = _check_delta(delta)
    seq = _check_pi_min_seq(pi_min_seq, t)
    a = float(np.sum(seq**-2.0))
    big_l = 2.0 * math.log(t + 1) + math.log(2.0 / delta)
    return (prior_kl + 2.0 * big_l) * math.sqrt(a / (2.0 * big_l)) / t


@dataclass(frozen=True, eq=False)
class GapDriverReport:
    """Per-round comparison of the two routes' gap radii and their drivers.

    ``lmin_driver`` is 1/pi_lmin (kl route); ``rms_driver`` is
    sqrt((1/t) sum pi_min^-2) (weighted route).  Gap columns use prior
    KL = 0 so the drivers alone separate the two routes.
    """

    rounds: np.ndarray
    lmin_driver: np.ndarray
    rms_driver: np.ndarray
    kl_route_gap: np.ndarray
    weighted_route_gap: np.ndarray


def gap_driver_report(trace: GameTrace, delta: float) -> GapDriverReport:
    delta = _check_delta(delta)
    ts = np.arange(1, trace.horizon + 1, dtype=float)
    lmin = trace.pi_lmin
    pi_min = trace.pi_min_per_round()
    cum_inv_sq = np.cumsum(pi_min**-2.0)
    rms = np.sqrt(cum_inv_sq / ts)
    budget = (3.0 * np.log(ts + 1) - math.log(delta)) / ts
    kl_gap = np.sqrt(budget / 2.0) / lmin
    big_l = 2.0 * np.log(ts + 1) + math.log(2.0 / delta)
    weighted_gap = 2.0 * big_l * np.sqrt(cum_inv_sq / (2.0 * big_l)) / ts
    return GapDriverReport(
        rounds=np.arange(1, trace.horizon + 1),
        lmin_driver=1.0 / lmin,
        rms_driver=rms,
        kl_route_gap=kl_gap,
        weighted_route_gap=weighted_gap,
    )


def regret_envelope(n_arms: int, t: int, delta: float) -> float:
    """Per-round regret bound of the smoothed Gibbs strategy at round t >= K^3.

    K^(3/4)/(t+1)^(1/4) times (2.5 plus the two estimate-error radii).
    Vacuous (above 1) at small t; correctness, not tightness, is the contract.
    """
    n_arms = int(n_arms)
    if n_arms < 2:
        raise ValueError("need at least two arms")
    t = _check_t(t)
    if t < n_arms**3:
        raise ValueError(f"the envelope needs t >= K^3 = {n_arms**3}, got {t}")
    delta = _check_delta(delta)
    log_term = 3.0 * math.log(t + 1) - math.log(delta)
    inner = (
        2.5
        + math.sqrt((math.log(n_arms) + log_term) / (2.0 * n_arms))
        + math.sqrt(log_term / (2.0 * n_arms))
    )
    return n_arms**0.75 / (t + 1) ** 0.25 * inner


@dataclass(frozen=True, eq=False)
class RegretDecomposition:
    """Exact four-term split of per-round regret, for rounds t >= K^3.

    At each t: rho is the Gibbs distribution on R_hat_t, rho_tilde its
    smoothed version (the policy for round t+1), and

    regret_t = R(a*) - R(rho_tilde)
             = [R(a*) - R_hat(a*)] + [R_hat(a*) - R_hat(rho)]
             + [R_hat(rho) - R(rho)] + [R(rho) - R(rho_tilde)].

    ``gibbs_shift_bound`` (K/gamma_t) dominates the second term and
    ``smoothing_bound`` (K*epsilon_{t+1}) the fourth, deterministically.
    """

    rounds: np.ndarray
    estimate_gap_best: np.ndarray
    gibbs_shift: np.ndarray
    estimate_gap_gibbs: np.ndarray
    smoothing_loss: np.ndarray
    regret: np.ndarray
    gibbs_shift_bound: np.ndarray
    smoothing_bound: np.ndarray

    def total(self) -> np.ndarray:
        return (
            self.estimate_gap_best
            + self.gibbs_shift
            + self.estimate_gap_gibbs
            + self.smoothing_loss
        )


def regret_decomposition(trace: GameTrace, env: Environment) -> RegretDecomposition:
    if env.n_arms != trace.n_arms:
        raise ValueError("environment and trace disagree on the number of arms")
    k = trace.n_arms
    start = k**3
    if trace.horizon < start:
        raise ValueError(
            f"trace of length {trace.horizon} never reaches round K^3 = {start}"
        )
    ts = np.arange(start, trace.horizon + 1)
    tf = ts.astype(float)
    rhat = trace.rhat[start - 1 :, :]
    gamma = (k * tf) ** 0.25
    eps_next = (k * (tf + 1.0)) ** -0.25

    z = gamma[:, None] * rhat
    z = z - z.max(axis=1, keepdims=True)
    w = np.exp(z)
    rho = w / w.sum(axis=1, keepdims=True)
    rho_tilde = (1.0 - k * eps_next)[:, None] * rho + eps_next[:, None]

    means = env.means
    a_star = env.best_arm
    r_star = env.best_mean
    rhat_star = rhat[:, a_star]
    rhat_rho = np.sum(rho * rhat, axis=1)
    r_rho = rho @ means
    r_rho_tilde = rho_tilde @ means

    return RegretDecomposition(
        rounds=ts,
        estimate_gap_best=r_star - rhat_star,
        gibbs_shift=rhat_star - rhat_rho,
        estimate_gap_gibbs=rhat_rho - r_rho,
        smoothing_loss=r_rho - r_rho_tilde,
        regret=r_star - r_rho_tilde,
        gibbs_shift_bound=k / gamma,
        smoothing_bound=k * eps_next,
    )


def expsum_ratio(x, alpha: float) -> float:
    """sum x_i e^(-alpha x_i) / sum e^(-alpha x_i), requiring x[0] = 0.

    Bounded above by n/alpha.  Exponents are max-shifted so large negative
    entries cannot overflow.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("x must be a vector with at least two entries")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    if x[0] != 0.0:
        raise ValueError("the first entry of x must be exactly 0")
    alpha = float(alpha)
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    exponents = -alpha * x
    exponents = exponents - exponents.max()
    weights = np.exp(exponents)
    return float(np.dot(x, weights) / weights.sum())


def gibbs_prior_kl_bound(gamma: float, epsilon: float, t: int, delta: float) -> float:
    """High-probability bound on KL(gibbs posterior || synthetic gibbs prior).

    c^2 + 2 c sqrt(3 ln(t+1) - ln delta) with c = gamma/(epsilon sqrt(2t)).
    Under the (K t)^(+-1/4) schedules c equals sqrt(K/2) for every t.
    """
    gamma = float(gamma)
    epsilon = float(epsilon)
    if not gamma >= 0.0:
        raise ValueError("gamma must be nonnegative")
    if not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    t = _check_t(t)
    delta = _check_delta(delta)
    c = gamma / (epsilon * math.sqrt(2.0 * t))
    return c * c + 2.0 * c * math.sqrt(3.0 * math.log(t + 1) - math.log(delta))


def gibbs_gap_bound(gamma: float, epsilon: float, t: int, delta: float) -> float:
    """Bound on |R_hat(rho) - R(rho)| for the Gibbs posterior at round t.

    (1/(epsilon sqrt(2t))) * (gamma/(epsilon sqrt(2t))
    + sqrt(3 ln(t+1) - ln delta)).
    """
    gamma = float(gamma)
    epsilon = float(epsilon)
    if not gamma >= 0.0:
        raise ValueError("gamma must be nonnegative")
    if not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    t = _check_t(t)
    delta = _check_delta(delta)
    scale = 1.0 / (epsilon * math.sqrt(2.0 * t))
    return scale * (gamma * scale + math.sqrt(3.0 * math.log(t + 1) - math.log(delta)))


def gibbs_prior_from_means(means, gamma: float) -> SimplexVector:
    """The Gibbs distribution over true means: a legal prior because it
    depends only on the environment, never on observed data.  Computable in
    synthetic diagnostics only, where the means are known."""
    means = np.asarray(means, dtype=float)
    if np.any(means < 0.0) or np.any(means > 1.0):
        raise ValueError("means must lie in [0, 1]")
    return SimplexVector(_gibbs_weights(means, float(gamma)))


def gibbs_kl_sandwich(r_hat, means, gamma: float) -> tuple[float, float]:
    """Deterministic inequality KL(rho||mu) <= gamma * (gap(rho) + gap(mu)).

    rho is the Gibbs posterior on estimates, mu the Gibbs prior on true
    means, gap(rho) = R_hat(rho) - R(rho) and gap(mu) = R(mu) - R_hat(mu).
    Returns (lhs, rhs); lhs <= rhs holds by concavity of ln for any inputs.
    """
    r_hat = np.asarray(r_hat, dtype=float)
    means = np.asarray(means, dtype=float)
    if r_hat.shape != means.shape or r_hat.ndim != 1:
        raise ValueError("r_hat and means must be matching 1-d vectors")
    gamma = float(gamma)
    if not gamma >= 0.0:
        raise ValueError("gamma must be nonnegative")
    rho = SimplexVector(_gibbs_weights(r_hat, gamma))
    mu = SimplexVector(_gibbs_weights(means, gamma))
    lhs = categorical_kl(rho, mu)
    rhs = gamma * (
        (rho.expectation(r_hat) - rho.expectation(means))
        + (mu.expectation(means) - mu.expectation(r_hat))
    )
    return lhs, rhs


@dataclass(frozen=True)
class BoundConfig:
    """Choices shared by certificate sweeps: confidence level, prior over
    arms (None means uniform), and the lambda rule for the weighted route
    ("optimal" or an explicit positive number)."""

    delta: float
    prior: SimplexVector | None = None
    lambda_rule: str | float = "optimal"

    def __post_init__(self) -> None:
        _check_delta(self.delta)
        if isinstance(self.lambda_rule, str):
            if self.lambda_rule != "optimal":
                raise ValueError("lambda_rule must be 'optimal' or a positive number")
        elif not float(self.lambda_rule) > 0.0:
            raise ValueError("lambda_rule must be 'optimal' or a positive number")

"""Binary and categorical KL divergence, KL inversion, and simplex values.

Conventions used throughout: ``0 * ln 0 = 0``, and the divergence is an
explicit ``math.inf`` whenever the second argument sits on the boundary
while the first does not.  Infinities are never replaced by large floats;
they propagate so that downstream bounds become "never violated" rather
than silently wrong.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SimplexVector",
    "bernoulli_kl",
    "bernoulli_kl_vec",
    "categorical_kl",
    "kl_lower_inverse",
    "kl_upper_inverse",
    "pinsker_gap",
]

# Simplex sums within _SUM_TOL of 1 are accepted as-is; deviations up to
# _RENORM_TOL are renormalized; anything larger is rejected as malformed.
_SUM_TOL = 1e-12
_RENORM_TOL = 1e-9

_BISECT_TOL = 1e-12
_BISECT_LOG_TOL = 1e-14
_BISECT_MAX_ITER = 200


def _check_unit(x: float, name: str) -> float:
    x = float(x)
    if math.isnan(x) or x < 0.0 or x > 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")
    return x


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if math.isnan(delta) or not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    return delta


def _log_ratio(num: float, den: float) -> float:
    # log(num / den) without the intermediate overflow that a direct
    # division hits when num / den exceeds the float range (subnormal den).
    ratio = num / den
    if math.isinf(ratio):
        return math.log(num) - math.log(den)
    return math.log(ratio)


def bernoulli_kl(p: float, q: float) -> float:
    """KL divergence between Bernoulli(p) and Bernoulli(q).

    Returns ``math.inf`` when ``q`` is 0 or 1 and ``p != q``.
    """
    p = _check_unit(p, "p")
    q = _check_unit(q, "q")
    if p == q:
        return 0.0
    if q <= 0.0 or q >= 1.0:
        return math.inf
    if p == 0.0:
        return -math.log1p(-q)
    if p == 1.0:
        return -math.log(q)
    return p * _log_ratio(p, q) + (1.0 - p) * _log_ratio(1.0 - p, 1.0 - q)


def bernoulli_kl_vec(p, q) -> np.ndarray:
    """Elementwise :func:`bernoulli_kl` on arrays (broadcasting allowed)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    for name, arr in (("p", p), ("q", q)):
        if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError(f"{name} entries must lie in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        left = np.where(p > 0.0, p * np.log(p / q), 0.0)
        right = np.where(p < 1.0, (1.0 - p) * np.log((1.0 - p) / (1.0 - q)), 0.0)
    out = left + right
    return np.where(p == q, 0.0, out)


def categorical_kl(rho: "SimplexVector", mu: "SimplexVector") -> float:
    """KL divergence between two distributions on the same finite set."""
    if rho.n_arms != mu.n_arms:
        raise ValueError(
            f"dimension mismatch: {rho.n_arms} vs {mu.n_arms} categories"
        )
    r = rho.weights
    m = mu.weights
    if np.any((r > 0.0) & (m == 0.0)):
        return math.inf
    mask = r > 0.0
    return float(np.sum(r[mask] * np.log(r[mask] / m[mask])))


def pinsker_gap(c: float) -> float:
    """Largest |p - q| compatible with kl(p||q) <= c, via Pinsker."""
    c = float(c)
    if math.isnan(c) or c < 0.0:
        raise ValueError(f"kl budget must be nonnegative, got {c!r}")
    return math.sqrt(c / 2.0)


def kl_upper_inverse(p_hat: float, c: float) -> float:
    """Largest q in [p_hat, 1] with kl(p_hat||q) <= c.

    Bisection on the increasing branch in the coordinate ln(1-q), where the
    kl curve has bounded slope all the way to the simplex boundary; this
    reaches both the argument tolerance (1e-12) and the same tolerance on
    the kl value within the iteration cap even when the inverse sits
    extremely close to 1.  ``c = inf`` returns 1.0.
    """
    p_hat = _check_unit(p_hat, "p_hat")
    c = float(c)
    if math.isnan(c) or c < 0.0:
        raise ValueError(f"kl budget must be nonnegative, got {c!r}")
    if math.isinf(c):
        return 1.0
    if c == 0.0 or p_hat == 1.0:
        return p_hat
    if p_hat == 0.0:
        # kl(0||q) = -ln(1-q) inverts in closed form.
        return -math.expm1(-c)
    # kl >= p ln p + (1-p) ln((1-p)/(1-q)) gives the infeasible bracket end.
    hi_v = math.log1p(-p_hat)
    lo_v = hi_v - (c - p_hat * math.log(p_hat)) / (1.0 - p_hat)
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo_v + hi_v)
        if bernoulli_kl(p_hat, 1.0 - math.exp(mid)) <= c:
            hi_v = mid
        else:
            lo_v = mid
        if (
            hi_v - lo_v <= _BISECT_LOG_TOL
            and c - bernoulli_kl(p_hat, 1.0 - math.exp(hi_v)) <= _BISECT_TOL
        ):
            break
    return min(1.0, max(p_hat, 1.0 - math.exp(hi_v)))


def kl_lower_inverse(p_hat: float, c: float) -> float:
    """Smallest q in [0, p_hat] with kl(p_hat||q) <= c.

    Mirror of the upper inverse, bisecting in ln q.
    """
    p_hat = _check_unit(p_hat, "p_hat")
    c = float(c)
    if math.isnan(c) or c < 0.0:
        raise ValueError(f"kl budget must be nonnegative, got {c!r}")
    if math.isinf(c):
        return 0.0
    if c == 0.0 or p_hat == 0.0:
        return p_hat
    if p_hat == 1.0:
        # kl(1||q) = -ln q inverts in closed form.
        return math.exp(-c)
    hi_u = math.log(p_hat)
    lo_u = hi_u - (c - (1.0 - p_hat) * math.log1p(-p_hat)) / p_hat
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo_u + hi_u)
        if bernoulli_kl(p_hat, math.exp(mid)) <= c:
            hi_u = mid
        else:
            lo_u = mid
        if (
            hi_u - lo_u <= _BISECT_LOG_TOL
            and c - bernoulli_kl(p_hat, math.exp(hi_u)) <= _BISECT_TOL
        ):
            break
    return max(0.0, min(p_hat, math.exp(hi_u)))


@dataclass(frozen=True, eq=False)
class SimplexVector:
    """An immutable probability vector.

    Entries must be nonnegative (tiny negative float noise up to 1e-12 is
    clipped to zero) and sum to 1.  A sum deviating from 1 by less than
    1e-9 is renormalized; larger deviations are rejected.
    """

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float, copy=True)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-d vector")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0.0):
            if np.any(w < -_SUM_TOL):
                raise ValueError("weights must be nonnegative")
            w[w < 0.0] = 0.0
        s = float(w.sum())
        if abs(s - 1.0) > _RENORM_TOL:
            raise ValueError(f"weights sum to {s!r}, too far from 1 to renormalize")
        if abs(s - 1.0) > _SUM_TOL:
            w = w / s
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n_arms: int) -> "SimplexVector":
        if n_arms < 1:
            raise ValueError("need at least one category")
        return cls(np.full(n_arms, 1.0 / n_arms))

    @classmethod
    def point_mass(cls, n_arms: int, index: int) -> "SimplexVector":
        if not 0 <= index < n_arms:
            raise ValueError(f"index {index} outside 0..{n_arms - 1}")
        w = np.zeros(n_arms)
        w[index] = 1.0
        return cls(w)

    @property
    def n_arms(self) -> int:
        return int(self.weights.size)

    def expectation(self, values) -> float:
        values = np.asarray(values, dtype=float)
        if values.shape != self.weights.shape:
            raise ValueError("values must match the weight vector length")
        return float(np.dot(self.weights, values))

    def min_weight(self) -> float:
        return float(self.weights.min())

    def __len__(self) -> int:
        return self.n_arms

"""Concentration toolkit.

Three layers, all backed by exact finite computations where possible:

* a dominance oracle: dependent [0,1]-valued chains whose conditional mean
  is constant are compared against i.i.d. Bernoulli draws under convex test
  functions, by exhaustive path enumeration;
* a moment bound for the exponentiated kl of a Bernoulli sample mean,
  evaluated exactly over the N+1 outcomes;
* two martingale tail bounds — a kl-form bound driven by ln((N+1)/delta)
  and the classical Hoeffding-Azuma bound driven by ln(2/delta) — plus
  seeded simulators used to measure their empirical coverage.

RNG discipline: every simulator derives one independent stream per
trajectory from ``SeedSequence(seed, spawn_key=(STREAM_TAG, index))``, so
results do not depend on execution order and can be reproduced trajectory
by trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np

from .divergences import bernoulli_kl, _check_delta, _check_unit

__all__ = [
    "BudgetError",
    "CertificateResult",
    "DependentChainSpec",
    "MartingaleBatch",
    "MartingaleRange",
    "azuma_alt_bound",
    "azuma_alt_kl_certificate",
    "bernoulli_convex_expectation",
    "bernoulli_kl_moment",
    "convex_domination_gap",
    "convex_test_functions",
    "dependent_convex_expectation",
    "hoeffding_azuma_bound",
    "markov_bound",
    "midpoint_convexity_probe",
    "random_constant_mean_chain",
    "simulate_importance_weighted",
    "simulate_profile_walks",
    "simulate_sign_walks",
]

PATH_BUDGET = 1_000_000          # hard cap on |support|**length enumerations
MOMENT_MAX_LENGTH = 25           # bernoulli_kl_moment stays exact-and-cheap
_MEAN_TOL = 1e-12
_SIMPLEX_TOL = 1e-12
_EXP_CAP = 700.0                 # beyond this math.exp overflows a double

_WALK_STREAM = 101
_IW_STREAM = 102
_PROFILE_STREAM = 103


class BudgetError(ValueError):
    """Raised when an exact enumeration would exceed the path budget."""


@dataclass(frozen=True)
class CertificateResult:
    """Outcome of checking an empirical quantity against a bound.

    ``slack = bound - value``; nonnegative slack means the bound holds.
    """

    holds: bool
    slack: float
    value: float
    bound: float


def markov_bound(expectation: float, delta: float) -> float:
    """Threshold that a nonnegative variable exceeds with probability < delta."""
    expectation = float(expectation)
    if math.isnan(expectation) or expectation < 0.0:
        raise ValueError(f"expectation must be nonnegative, got {expectation!r}")
    delta = _check_delta(delta)
    return expectation / delta


def bernoulli_kl_moment(length: int, p: float) -> float:
    """E[exp(N * kl(S_hat || p))] for S_hat the mean of N i.i.d. Bernoulli(p).

    Computed exactly by summing over the N+1 outcomes of the sample mean
    with binomial weights (each term assembled in log space).  The value is
    bounded by N+1.
    """
    length = int(length)
    if length < 1:
        raise ValueError("length must be a positive integer")
    if length > MOMENT_MAX_LENGTH:
        raise BudgetError(
            f"exact moment enumeration capped at length {MOMENT_MAX_LENGTH}"
        )
    p = _check_unit(p, "p")
    if p == 0.0 or p == 1.0:
        # The sample mean equals p almost surely and the exponent vanishes.
        return 1.0
    log_p = math.log(p)
    log_1p = math.log1p(-p)
    total = 0.0
    for k in range(length + 1):
        log_w = math.log(math.comb(length, k)) + k * log_p + (length - k) * log_1p
        exponent = log_w + length * bernoulli_kl(k / length, p)
        total += math.exp(exponent) if exponent < _EXP_CAP else math.inf
    return total


# ---------------------------------------------------------------------------
# Dependent chains with constant conditional mean
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DependentChainSpec:
    """Finite description of a dependent [0,1]-valued process.

    ``transitions`` maps each reachable history prefix — a tuple of support
    indices — to the conditional distribution (over ``support``) of the next
    value.  Construction walks every reachable prefix and rejects the spec
    unless each conditional is a probability vector whose mean equals
    ``mean`` to within 1e-12: the constant-conditional-mean hypothesis is
    validated up front, not trusted.
    """

    length: int
    support: tuple[float, ...]
    transitions: Mapping[tuple[int, ...], Sequence[float]]
    mean: float

    def __post_init__(self) -> None:
        if int(self.length) < 1:
            raise ValueError("length must be a positive integer")
        object.__setattr__(self, "length", int(self.length))
        support = tuple(float(v) for v in self.support)
        if not support:
            raise ValueError("support must be nonempty")
        for v in support:
            _check_unit(v, "support value")
        object.__setattr__(self, "support", support)
        mean = _check_unit(self.mean, "mean")
        object.__setattr__(self, "mean", mean)
        if len(support) ** self.length > PATH_BUDGET:
            raise BudgetError(
                f"{len(support)}**{self.length} paths exceed the "
                f"enumeration budget of {PATH_BUDGET}"
            )
        cleaned: dict[tuple[int, ...], tuple[float, ...]] = {}
        stack: list[tuple[int, ...]] = [()]
        values = np.asarray(support)
        while stack:
            prefix = stack.pop()
            try:
                raw = self.transitions[prefix]
            except KeyError:
                raise ValueError(
                    f"missing conditional distribution for reachable prefix {prefix}"
                ) from None
            probs = np.asarray(raw, dtype=float)
            if probs.shape != (len(support),):
                raise ValueError(
                    f"conditional at prefix {prefix} has wrong length "
                    f"{probs.size}, expected {len(support)}"
                )
            if np.any(probs < 0.0):
                raise ValueError(f"negative probability at prefix {prefix}")
            if abs(float(probs.sum()) - 1.0) > _SIMPLEX_TOL:
                raise ValueError(
                    f"conditional at prefix {prefix} sums to {probs.sum()!r}"
                )
            cond_mean = float(np.dot(probs, values))
            if abs(cond_mean - mean) > _MEAN_TOL:
                raise ValueError(
                    f"conditional mean {cond_mean!r} at prefix {prefix} "
                    f"deviates from {mean!r}: the constant-mean hypothesis fails"
                )
            cleaned[prefix] = tuple(float(x) for x in probs)
            if len(prefix) + 1 < self.length:
                for j, pr in enumerate(probs):
                    if pr > 0.0:
                        stack.append(prefix + (j,))
        object.__setattr__(self, "transitions", cleaned)

    @classmethod
    def iid_bernoulli(cls, length: int, p: float) -> "DependentChainSpec":
        p = _check_unit(p, "p")
        probs = (1.0 - p, p)
        transitions: dict[tuple[int, ...], tuple[float, ...]] = {}
        stack: list[tuple[int, ...]] = [()]
        while stack:
            prefix = stack.pop()
            transitions[prefix] = probs
            if len(prefix) + 1 < length:
                for j, pr in enumerate(probs):
                    if pr > 0.0:
                        stack.append(prefix + (j,))
        return cls(length=length, support=(0.0, 1.0), transitions=transitions, mean=p)

    @classmethod
    def constant(cls, length: int, value: float) -> "DependentChainSpec":
        value = _check_unit(value, "value")
        transitions = {(): (1.0,)}
        for depth in range(1, length):
            transitions[(0,) * depth] = (1.0,)
        return cls(length=length, support=(value,), transitions=transitions, mean=value)


def _conditional_vertices(support: Sequence[float], mean: float) -> list[np.ndarray]:
    """Vertices of {q >= 0, sum q = 1, sum q*v = mean} for a small support."""
    m = len(support)
    vertices: list[np.ndarray] = []
    for i in range(m):
        if support[i] == mean:
            q = np.zeros(m)
            q[i] = 1.0
            vertices.append(q)
    for i in range(m):
        for j in range(i + 1, m):
            vi, vj = support[i], support[j]
            if vi == vj:
                continue
            qi = (vj - mean) / (vj - vi)
            if 0.0 <= qi <= 1.0:
                q = np.zeros(m)
                q[i] = qi
                q[j] = 1.0 - qi
                vertices.append(q)
    return vertices


def random_constant_mean_chain(
    length: int,
    rng: np.random.Generator,
    support_size: int | None = None,
) -> DependentChainSpec:
    """Draw a random chain satisfying the constant-conditional-mean hypothesis.

    Each reachable prefix gets an independent random point of the feasible
    polytope of conditionals.  With a 2-point support that polytope is a
    single point (the chain degenerates to i.i.d.), so 3-point supports
    dominate the mix.
    """
    if support_size is None:
        u = rng.random()
        support_size = 1 if u < 0.1 else (2 if u < 0.3 else 3)
    if not 1 <= support_size <= 3:
        raise ValueError("support_size must be 1, 2, or 3")
    if support_size == 1:
        return DependentChainSpec.constant(length, float(rng.random()))
    while True:
        support = np.sort(rng.random(support_size))
        if np.min(np.diff(support)) > 0.05:
            break
    spread = support[-1] - support[0]
    mean = float(rng.uniform(support[0] + 0.05 * spread, support[-1] - 0.05 * spread))
    vertices = _conditional_vertices(tuple(support), mean)
    if not vertices:
        raise RuntimeError("no feasible conditional; unreachable by construction")

    def draw() -> tuple[float, ...]:
        if len(vertices) == 1:
            q = vertices[0]
        else:
            a, b = rng.choice(len(vertices), size=2, replace=False)
            t = rng.random()
            q = t * vertices[a] + (1.0 - t) * vertices[b]
        return tuple(float(x) for x in q)

    transitions: dict[tuple[int, ...], tuple[float, ...]] = {}
    stack: list[tuple[int, ...]] = [()]
    while stack:
        prefix = stack.pop()
        probs = draw()
        transitions[prefix] = probs
        if len(prefix) + 1 < length:
            for j, pr in enumerate(probs):
                if pr > 0.0:
                    stack.append(prefix + (j,))
    return DependentChainSpec(
        length=length,
        support=tuple(float(v) for v in support),
        transitions=transitions,
        mean=mean,
    )


def dependent_convex_expectation(
    chain: DependentChainSpec, f: Callable[[tuple[float, ...]], float]
) -> float:
    """E[f(X_1..X_N)] under the chain, by exact enumeration of reachable paths."""
    if len(chain.support) ** chain.length > PATH_BUDGET:
        raise BudgetError("path count exceeds the enumeration budget")
    values = chain.support
    total = 0.0
    stack: list[tuple[tuple[int, ...], float]] = [((), 1.0)]
    while stack:
        prefix, prob = stack.pop()
        if len(prefix) == chain.length:
            total += prob * float(f(tuple(values[j] for j in prefix)))
            continue
        for j, pr in enumerate(chain.transitions[prefix]):
            if pr > 0.0:
                stack.append((prefix + (j,), prob * pr))
    return total


def bernoulli_convex_expectation(
    length: int, p: float, f: Callable[[tuple[float, ...]], float]
) -> float:
    """E[f(Y_1..Y_N)] for Y_i i.i.d. Bernoulli(p), by exact enumeration."""
    length = int(length)
    if length < 1:
        raise ValueError("length must be a positive integer")
    if 2**length > PATH_BUDGET:
        raise BudgetError("path count exceeds the enumeration budget")
    p = _check_unit(p, "p")
    total = 0.0
    for bits in range(2**length):
        path = tuple(float((bits >> i) & 1) for i in range(length))
        ones = sum(1 for x in path if x == 1.0)
        weight = p**ones * (1.0 - p) ** (length - ones)
        if weight > 0.0:
            total += weight * float(f(path))
    return total


def convex_domination_gap(
    chain: DependentChainSpec, f: Callable[[tuple[float, ...]], float]
) -> float:
    """E_bernoulli[f] - E_chain[f]; nonnegative for convex f.

    Convexity of ``f`` is the caller's responsibility (see
    :func:`midpoint_convexity_probe` for a stochastic spot check).
    """
    return bernoulli_convex_expectation(
        chain.length, chain.mean, f
    ) - dependent_convex_expectation(chain, f)


def convex_test_functions(
    length: int, mean: float
) -> tuple[tuple[str, Callable[[tuple[float, ...]], float]], ...]:
    """The fixed convex family used by the oracle sweeps.

    max, squared sum, and the exponentiated-kl moment function matched to
    ``mean``; each is convex on [0,1]^N.
    """
    mean = _check_unit(mean, "mean")

    def f_max(xs: tuple[float, ...]) -> float:
        return max(xs)

    def f_square_sum(xs: tuple[float, ...]) -> float:
        return sum(xs) ** 2

    def f_kl_moment(xs: tuple[float, ...]) -> float:
        x_bar = min(max(sum(xs) / length, 0.0), 1.0)
        exponent = length * bernoulli_kl(x_bar, mean)
        return math.exp(exponent) if exponent < _EXP_CAP else math.inf

    return (("max", f_max), ("square_sum", f_square_sum), ("kl_moment", f_kl_moment))


def midpoint_convexity_probe(
    f: Callable[[tuple[float, ...]], float],
    length: int,
    trials: int = 64,
    seed: int = 0,
    tol: float = 1e-9,
) -> bool:
    """Stochastic midpoint test: f((x+y)/2) <= (f(x)+f(y))/2 on random pairs."""
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        x = rng.random(length)
        y = rng.random(length)
        mid = f(tuple((x + y) / 2.0))
        avg = 0.5 * (f(tuple(x)) + f(tuple(y)))
        if mid > avg + tol:
            return False
    return True


# ---------------------------------------------------------------------------
# Martingale tail bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MartingaleRange:
    """Per-step increment ranges [low_i, high_i] with low_i <= 0 <= high_i."""

    lows: np.ndarray
    highs: np.ndarray

    def __post_init__(self) -> None:
        lows = np.asarray(self.lows, dtype=float)
        highs = np.asarray(self.highs, dtype=float)
        if lows.ndim != 1 or lows.shape != highs.shape or lows.size == 0:
            raise ValueError("lows and highs must be matching nonempty vectors")
        if not (np.all(np.isfinite(lows)) and np.all(np.isfinite(highs))):
            raise ValueError("ranges must be finite")
        # Zero-width ranges (a_i = b_i = 0) are legal: the step is a.s. 0.
        if np.any(lows > 0.0) or np.any(highs < 0.0):
            raise ValueError("each range must satisfy low <= 0 <= high")
        lows = lows.copy()
        highs = highs.copy()
        lows.setflags(write=False)
        highs.setflags(write=False)
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)

    @classmethod
    def equal(cls, n_steps: int, low: float, high: float) -> "MartingaleRange":
        return cls(np.full(n_steps, float(low)), np.full(n_steps, float(high)))

    @property
    def n_steps(self) -> int:
        return int(self.lows.size)


def _check_global_range(low: float, high: float) -> tuple[float, float]:
    low = float(low)
    high = float(high)
    if not (math.isfinite(low) and math.isfinite(high)):
        raise ValueError("range endpoints must be finite")
    if high <= low:
        raise ValueError(f"degenerate range [{low!r}, {high!r}]")
    if low > 0.0 or high < 0.0:
        raise ValueError("martingale increments need low <= 0 <= high")
    return low, high


def azuma_alt_kl_certificate(
    z_bar: float, n_steps: int, low: float, high: float, delta: float
) -> CertificateResult:
    """Check kl(z_bar || -low/(high-low)) against ln((N+1)/delta)/N.

    ``z_bar`` is the mean of the increments after the affine rescaling
    (x - low)/(high - low) onto [0,1]; the reference point -low/(high-low)
    is where the rescaled martingale mean sits.
    """
    z_bar = _check_unit(z_bar, "z_bar")
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ValueError("n_steps must be a positive integer")
    low, high = _check_global_range(low, high)
    delta = _check_delta(delta)
    reference = -low / (high - low)
    value = bernoulli_kl(z_bar, reference)
    bound = math.log((n_steps + 1) / delta) / n_steps
    return CertificateResult(
        holds=value <= bound, slack=bound - value, value=value, bound=bound
    )


def azuma_alt_bound(n_steps: int, low: float, high: float, delta: float) -> float:
    """kl-form tail radius: (high-low) * sqrt(N * ln((N+1)/delta) / 2)."""
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ValueError("n_steps must be a positive integer")
    low, high = _check_global_range(low, high)
    delta = _check_delta(delta)
    return (high - low) * math.sqrt(n_steps * math.log((n_steps + 1) / delta) / 2.0)


def hoeffding_azuma_bound(ranges: MartingaleRange, delta: float) -> float:
    """Classical tail radius: sqrt(0.5 * sum (high_i - low_i)^2 * ln(2/delta))."""
    delta = _check_delta(delta)
    widths = ranges.highs - ranges.lows
    return math.sqrt(0.5 * float(np.sum(widths**2)) * math.log(2.0 / delta))


# ---------------------------------------------------------------------------
# Seeded martingale simulators
# ---------------------------------------------------------------------------


class MartingaleBatch(NamedTuple):
    """Final sums of simulated martingales plus their global increment range."""

    sums: np.ndarray
    low: float
    high: float
    n_steps: int


def _stream(seed: int, tag: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(tag, index)))


def simulate_sign_walks(
    n_steps: int, trials: int, seed: int, step: float = 1.0
) -> MartingaleBatch:
    """Symmetric +-step random walks; one independent stream per trajectory."""
    if n_steps < 1 or trials < 1:
        raise ValueError("n_steps and trials must be positive")
    step = float(step)
    if step <= 0.0:
        raise ValueError("step must be positive")
    sums = np.empty(trials)
    for i in range(trials):
        rng = _stream(seed, _WALK_STREAM, i)
        signs = 2.0 * rng.integers(0, 2, size=n_steps) - 1.0
        sums[i] = step * float(signs.sum())
    return MartingaleBatch(sums=sums, low=-step, high=step, n_steps=n_steps)


def simulate_importance_weighted(
    n_steps: int, trials: int, seed: int, floor: float = 0.25
) -> MartingaleBatch:
    """Centered importance-weighted indicators with history-dependent rates.

    Each increment is B_i/q_i - 1 with B_i ~ Bernoulli(q_i) and q_i a
    function of the running sum, kept inside [floor, 1-floor]; the
    conditional mean is 0 regardless of the history, which is exactly the
    dependence structure produced by adaptive sampling.  Increments live in
    [-1, 1/floor - 1].
    """
    if n_steps < 1 or trials < 1:
        raise ValueError("n_steps and trials must be positive")
    floor = float(floor)
    if not 0.0 < floor < 0.5:
        raise ValueError("floor must lie in (0, 0.5)")
    span = 1.0 - 2.0 * floor
    sums = np.empty(trials)
    for i in range(trials):
        rng = _stream(seed, _IW_STREAM, i)
        uniforms = rng.random(n_steps)
        s = 0.0
        for t in range(n_steps):
            scale = max(1.0, math.sqrt(t + 1.0))
            q = floor + span / (1.0 + math.exp(-s / scale))
            if uniforms[t] < q:
                s += 1.0 / q - 1.0
            else:
                s -= 1.0
        sums[i] = s
    return MartingaleBatch(sums=sums, low=-1.0, high=1.0 / floor - 1.0, n_steps=n_steps)


def simulate_profile_walks(
    step_sizes, trials: int, seed: int
) -> tuple[np.ndarray, MartingaleRange]:
    """Symmetric walks with per-step magnitudes ``step_sizes``.

    Returns the final sums together with the per-step increment ranges
    [-c_i, c_i]; one independent stream per trajectory as usual.
    """
    steps = np.asarray(step_sizes, dtype=float)
    if steps.ndim != 1 or steps.size == 0:
        raise ValueError("step_sizes must be a nonempty 1-d vector")
    if not np.all(np.isfinite(steps)) or np.any(steps <= 0.0):
        raise ValueError("step sizes must be positive and finite")
    if int(trials) < 1:
        raise ValueError("trials must be positive")
    sums = np.empty(int(trials))
    for i in range(int(trials)):
        rng = _stream(seed, _PROFILE_STREAM, i)
        signs = 2.0 * rng.integers(0, 2, size=steps.size) - 1.0
        sums[i] = float(np.dot(steps, signs))
    return sums, MartingaleRange(-steps, steps)

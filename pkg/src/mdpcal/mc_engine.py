"""Seeded Monte-Carlo estimation of Bayes risk and the local prior exponent.

Randomness comes from numpy's Philox counter-based generator with one
substream per (replicate index, draw kind), so estimates are bit-reproducible
regardless of execution order.  The Laplace-location prior theta^(lambda-1)
exp(-gamma theta) on (0, truncation] is sampled by inverse CDF built on the
regularized incomplete gamma kernel.  Plain Monte Carlo only: estimates carry
binomial standard errors, no importance sampling.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError
from .special_fn import regularized_gamma_p

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Draw kinds for substream derivation.
_KIND_NULL_DATA = 0
_KIND_PRIOR_DRAW = 1
_KIND_ALT_DATA = 2
_KIND_PRIOR_PROBE = 3

_SAMPLER_GRID = 20_001

STATISTICS = ("ks", "sign")


@dataclass(frozen=True)
class PriorSpec:
    """Truncated Gamma-type prior on the Laplace location parameter."""

    family: str = "laplace-location"
    lambda_: float = 1.0
    gamma_rate: float = 1.0
    truncation: float = 10.0

    def __post_init__(self):
        if self.family != "laplace-location":
            raise DomainError(f"unsupported prior family {self.family!r}")
        if self.lambda_ <= 0 or self.gamma_rate <= 0 or self.truncation <= 0:
            raise DomainError("lambda, gamma_rate and truncation must be positive")


@dataclass(frozen=True)
class McConfig:
    """Replication counts, sample size, seed and threshold grid."""

    m_alternatives: int
    m_null: int
    n: int
    seed: int
    threshold_grid: tuple[float, ...]

    def __post_init__(self):
        if min(self.m_alternatives, self.m_null, self.n) < 1:
            raise DomainError("replication counts and sample size must be >= 1")
        grid = tuple(float(t) for t in self.threshold_grid)
        if not grid:
            raise DomainError("threshold grid must be nonempty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("threshold grid must be strictly increasing")
        object.__setattr__(self, "threshold_grid", grid)


def _mix64(z: int) -> int:
    # splitmix64 finalizer
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def substream(seed: int, kind: int, index: int) -> np.random.Generator:
    """Philox generator keyed by (seed, draw kind, replicate index)."""
    w0 = _mix64((seed & _MASK64) ^ ((kind + 1) * _GOLDEN))
    w1 = _mix64(w0 ^ (index * 0x632BE59BD9B4E019 + 0xD1B54A32D192ED03))
    return np.random.Generator(np.random.Philox(key=np.array([w0, w1], dtype=np.uint64)))


class _TruncatedGammaSampler:
    """Inverse-CDF sampler for the truncated Gamma prior.

    The CDF P(lambda, gamma*theta) is tabulated on a grid graded toward the
    origin (where the density vanishes for lambda > 1) and inverted by
    monotone linear interpolation.
    """

    def __init__(self, prior: PriorSpec, grid_points: int = _SAMPLER_GRID):
        frac = np.linspace(0.0, 1.0, grid_points)
        self.theta = prior.truncation * frac * frac
        cdf = np.array([regularized_gamma_p(prior.lambda_, prior.gamma_rate * t)
                        if t > 0 else 0.0 for t in self.theta])
        self.cdf = cdf / cdf[-1]

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        return np.interp(gen.random(size), self.cdf, self.theta)

    def inverse(self, u: np.ndarray) -> np.ndarray:
        return np.interp(u, self.cdf, self.theta)


@functools.lru_cache(maxsize=8)
def _sampler_for(prior: PriorSpec) -> _TruncatedGammaSampler:
    return _TruncatedGammaSampler(prior)


def _laplace_cdf(x: np.ndarray) -> np.ndarray:
    return np.where(x < 0, 0.5 * np.exp(np.minimum(x, 0.0)),
                    1.0 - 0.5 * np.exp(-np.maximum(x, 0.0)))


def _ks_rows(data: np.ndarray) -> np.ndarray:
    # sqrt(n) * sup|F_n - F0| per row, F0 the standard Laplace CDF.
    n = data.shape[1]
    u = _laplace_cdf(np.sort(data, axis=1))
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - u, axis=1)
    d_minus = np.max(u - (i - 1) / n, axis=1)
    return math.sqrt(n) * np.maximum(d_plus, d_minus)


def _sign_rows(data: np.ndarray) -> np.ndarray:
    # Gaussianised sign count (V - n/2) / (sqrt(n)/2).
    n = data.shape[1]
    v = np.count_nonzero(data > 0, axis=1)
    return (v - 0.5 * n) / (0.5 * math.sqrt(n))

_STAT_FN = {"ks": _ks_rows, "sign": _sign_rows}


@dataclass(frozen=True)
class McRiskResult:
    """Per-threshold Monte-Carlo error estimates with binomial standard errors."""

    thresholds: tuple[float, ...]
    alpha_hat: tuple[float, ...]
    se_alpha: tuple[float, ...]
    beta_hat: tuple[float, ...]
    se_beta: tuple[float, ...]
    risk_hat: tuple[float, ...]
    argmin_threshold: float
    argmin_index: int
    statistic: str
    seed: int


def mc_bayes_risk(prior: PriorSpec, cfg: McConfig, statistic: str,
                  w0: float = 1.0, w1: float = 1.0) -> McRiskResult:
    """Estimate the Bayes risk curve over the threshold grid.

    Alternatives are drawn from the prior, a fresh sample is simulated from
    each, and the statistic is computed against the null; the Type-I curve
    comes from null replicates of the same statistic.  Deterministic given
    the seed.
    """
    if statistic not in STATISTICS:
        raise DomainError(f"statistic must be one of {STATISTICS}, got {statistic!r}")
    if w0 <= 0 or w1 <= 0:
        raise DomainError("error-cost weights must be positive")
    stat_fn = _STAT_FN[statistic]
    sampler = _sampler_for(prior)
    n = cfg.n

    thetas = np.empty(cfg.m_alternatives)
    for m in range(cfg.m_alternatives):
        gen = substream(cfg.seed, _KIND_PRIOR_DRAW, m)
        thetas[m] = sampler.inverse(gen.random(1))[0]

    alt = np.empty((cfg.m_alternatives, n))
    for m in range(cfg.m_alternatives):
        gen = substream(cfg.seed, _KIND_ALT_DATA, m)
        alt[m] = gen.laplace(loc=thetas[m], scale=1.0, size=n)

    null = np.empty((cfg.m_null, n))
    for j in range(cfg.m_null):
        gen = substream(cfg.seed, _KIND_NULL_DATA, j)
        null[j] = gen.laplace(loc=0.0, scale=1.0, size=n)

    t_alt = np.sort(stat_fn(alt))
    t_null = np.sort(stat_fn(null))

    grid = np.asarray(cfg.threshold_grid)
    # alpha(t) = P(T0 > t), beta(t) = P(T1 <= t); same draws across thresholds.
    alpha = 1.0 - np.searchsorted(t_null, grid, side="right") / cfg.m_null
    beta = np.searchsorted(t_alt, grid, side="right") / cfg.m_alternatives
    se_alpha = np.sqrt(alpha * (1.0 - alpha) / cfg.m_null)
    se_beta = np.sqrt(beta * (1.0 - beta) / cfg.m_alternatives)
    risk = w0 * alpha + w1 * beta
    argmin = int(np.argmin(risk))

    return McRiskResult(
        thresholds=tuple(grid),
        alpha_hat=tuple(alpha),
        se_alpha=tuple(se_alpha),
        beta_hat=tuple(beta),
        se_beta=tuple(se_beta),
        risk_hat=tuple(risk),
        argmin_threshold=float(grid[argmin]),
        argmin_index=argmin,
        statistic=statistic,
        seed=cfg.seed,
    )


class ExponentFit(NamedTuple):
    kappa_hat: float
    intercept: float
    r2: float


def fit_power_law(radii: Sequence[float], probs: Sequence[float]) -> ExponentFit:
    """Least-squares fit of log p on log radius; slope is the exponent."""
    if len(radii) != len(probs):
        raise DomainError("radii and probabilities must have equal lengths")
    if len(radii) < 2:
        raise DomainError("need at least two radii to fit a slope")
    if any(r <= 0 for r in radii) or any(p <= 0 for p in probs):
        raise DomainError("radii and probabilities must be positive")
    xs = [math.log(r) for r in radii]
    ys = [math.log(p) for p in probs]
    x_bar = sum(xs) / len(xs)
    y_bar = sum(ys) / len(ys)
    sxx = sum((x - x_bar) ** 2 for x in xs)
    syy = sum((y - y_bar) ** 2 for y in ys)
    sxy = sum((x - x_bar) * (y - y_bar) for x, y in zip(xs, ys))
    if sxx == 0:
        raise DomainError("radii must not all coincide")
    slope = sxy / sxx
    intercept = y_bar - slope * x_bar
    r2 = 1.0 if syy == 0 else (sxy * sxy) / (sxx * syy)
    return ExponentFit(slope, intercept, r2)


def estimate_prior_exponent(prior: PriorSpec, radii: Sequence[float], m: int,
                            seed: int) -> ExponentFit:
    """Probe the prior near the origin: empirical mass below each radius,
    then a log-log regression for the exponent."""
    radii = tuple(float(r) for r in radii)
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be strictly decreasing")
    if any(not 0 < r <= prior.truncation for r in radii):
        raise DomainError("radii must lie in (0, truncation]")
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")

    gen = substream(seed, _KIND_PRIOR_PROBE, 0)
    thetas = _sampler_for(prior).sample(gen, m)
    probs = []
    for eps in radii:
        p_hat = np.count_nonzero(thetas <= eps) / m
        if p_hat == 0.0:
            raise DomainError(
                f"no prior draws below radius {eps}; increase m or enlarge the radii"
            )
        probs.append(p_hat)
    return fit_power_law(radii, probs)


def plugin_threshold(kappa_hat: float, rho: float, n: int) -> float:
    """Asymptotic plug-in threshold sqrt(kappa_hat / (4 rho) * ln n)."""
    if kappa_hat <= 0 or rho <= 0:
        raise DomainError("kappa_hat and rho must be positive")
    if n < 2 or int(n) != n:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    return math.sqrt(kappa_hat / (4.0 * rho) * math.log(n))


def _prior_from_json(payload: dict) -> PriorSpec:
    try:
        return PriorSpec(
            family=payload.get("family", "laplace-location"),
            lambda_=float(payload["lambda"]),
            gamma_rate=float(payload["gamma_rate"]),
            truncation=float(payload["truncation"]),
        )
    except KeyError as exc:
        raise DomainError(f"prior JSON missing field {exc}") from None


@dataclass(frozen=True)
class McRun:
    prior: PriorSpec
    config: McConfig
    statistic: str
    w0: float = 1.0
    w1: float = 1.0


def load_mc_config(path: str | Path) -> McRun:
    """Read a Bayes-risk MC run from JSON mirroring the PriorSpec/McConfig fields."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    try:
        mc = payload["mc"]
        config = McConfig(
            m_alternatives=int(mc["m_alternatives"]),
            m_null=int(mc["m_null"]),
            n=int(mc["n"]),
            seed=int(mc["seed"]),
            threshold_grid=tuple(mc["threshold_grid"]),
        )
        return McRun(
            prior=_prior_from_json(payload["prior"]),
            config=config,
            statistic=str(payload["statistic"]),
            w0=float(payload.get("w0", 1.0)),
            w1=float(payload.get("w1", 1.0)),
        )
    except KeyError as exc:
        raise DomainError(f"MC config missing field {exc}") from None


@dataclass(frozen=True)
class ExponentRun:
    prior: PriorSpec
    radii: tuple[float, ...]
    m: int
    seed: int


def load_exponent_config(path: str | Path) -> ExponentRun:
    """Read a prior-exponent probe configuration from JSON."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    try:
        return ExponentRun(
            prior=_prior_from_json(payload["prior"]),
            radii=tuple(float(r) for r in payload["radii"]),
            m=int(payload["m"]),
            seed=int(payload["seed"]),
        )
    except KeyError as exc:
        raise DomainError(f"exponent config missing field {exc}") from None


def write_mc_csv(result: McRiskResult, fh) -> None:
    """Emit the risk curve as CSV: threshold, alpha_hat, se_alpha, beta_hat,
    se_beta, risk_hat."""
    fh.write("threshold,alpha_hat,se_alpha,beta_hat,se_beta,risk_hat\r\n")
    for row in zip(result.thresholds, result.alpha_hat, result.se_alpha,
                   result.beta_hat, result.se_beta, result.risk_hat):
        fh.write(",".join(repr(float(v)) for v in row) + "\r\n")

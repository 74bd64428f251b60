"""Scaled chi distribution and the critical variance threshold.

``ChiLaw(r, sigma2)`` is the law of ||g|| for g ~ N(0, sigma2 * I_r). The
radial kernel is only well defined when the density mass at a reflected
radius 1-s dominates the mass at s on [0, 1/2]; ``sigma_star`` gives the
smallest standard deviation for which that holds and
``ratio_condition_holds`` checks it numerically on a grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RankTooSmallError

__all__ = [
    "ChiLaw",
    "RatioCheck",
    "sigma_star",
    "chi_log_density",
    "chi_density",
    "chi_cdf",
    "ratio_condition_holds",
]

# Absolute slack when scanning for density-ratio violations.
RATIO_ATOL = 1e-12


@dataclass(frozen=True)
class ChiLaw:
    """Distribution of the Euclidean norm of an r-dim centered Gaussian
    with i.i.d. coordinates of variance sigma2."""

    r: int
    sigma2: float

    def __post_init__(self) -> None:
        if int(self.r) != self.r or self.r < 1:
            raise ValueError(f"degrees of freedom must be an integer >= 1, got {self.r}")
        if not (self.sigma2 > 0.0):
            raise ValueError(f"variance must be positive, got {self.sigma2}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @property
    def mode(self) -> float:
        """Density maximizer sigma * sqrt(r - 1)."""
        return math.sqrt(self.sigma2 * (self.r - 1))


def sigma_star(r: int) -> float:
    """Smallest admissible standard deviation 1 / (2 sqrt(r - 1)).

    Below this value the density mode falls inside (0, 1/2) and the
    kernel's mixture weight exceeds 1 somewhere. Rank 1 has no admissible
    value at all (parity obstruction), hence RankTooSmallError.
    """
    if r < 2:
        raise RankTooSmallError(f"no unit-increment chain with Gaussian law for r={r}")
    return 1.0 / (2.0 * math.sqrt(r - 1.0))


def chi_log_density(law: ChiLaw, s):
    """Log density, elementwise on arrays; -inf outside the support."""
    r, sigma2 = law.r, law.sigma2
    log_norm = -(0.5 * r - 1.0) * math.log(2.0) - math.lgamma(0.5 * r) - 0.5 * r * math.log(sigma2)
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(
            s > 0.0,
            (r - 1.0) * np.log(np.where(s > 0.0, s, 1.0)) - s * s / (2.0 * sigma2) + log_norm,
            -np.inf,
        )
    if r == 1:
        # s^0 = 1 keeps the density finite at the origin
        out = np.where(s == 0.0, log_norm, out)
    return out if out.ndim else float(out)


def chi_density(law: ChiLaw, s):
    """Density of the scaled chi law; 0 for s < 0. Accepts arrays."""
    out = np.exp(chi_log_density(law, s))
    return out if np.ndim(out) else float(out)


def _lower_gamma_series(a: float, x: float) -> float:
    """exp-scaled series for P(a, x), accurate for x < a + 1."""
    term = 1.0 / a
    total = term
    n = a
    for _ in range(10_000):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total


def _upper_gamma_cf(a: float, x: float) -> float:
    """exp-scaled Lentz continued fraction for Q(a, x), for x >= a + 1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h


def gammainc_lower(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x).

    Series expansion for x < a + 1, continued fraction for the upper tail
    otherwise; both are scaled by exp(a ln x - x - lgamma(a)) so large
    shapes do not overflow. Absolute error well below 1e-10.
    """
    if a <= 0.0:
        raise ValueError(f"shape must be positive, got {a}")
    if x <= 0.0:
        return 0.0
    lead = a * math.log(x) - x - math.lgamma(a)
    if lead < -745.0:  # exp underflows; the answer saturates
        return 1.0 if x > a else 0.0
    if x < a + 1.0:
        return math.exp(lead) * _lower_gamma_series(a, x)
    return 1.0 - math.exp(lead) * _upper_gamma_cf(a, x)


def chi_cdf(law: ChiLaw, s):
    """CDF of the scaled chi law; accepts scalars or arrays."""

    def scalar(v: float) -> float:
        if v <= 0.0:
            return 0.0
        return gammainc_lower(0.5 * law.r, v * v / (2.0 * law.sigma2))

    if np.ndim(s) == 0:
        return scalar(float(s))
    return np.array([scalar(float(v)) for v in np.asarray(s, dtype=float).ravel()]).reshape(
        np.shape(s)
    )


@dataclass(frozen=True)
class RatioCheck:
    """Outcome of the grid scan: largest density excess at a radius s over
    its reflection 1-s, and where it occurred."""

    holds: bool
    worst_s: float
    worst_gap: float


def ratio_condition_holds(r: int, sigma: float, grid: int = 100_000) -> RatioCheck:
    """Scan s in [0, 1/2] for density(s) exceeding density(1-s).

    The kernel's mixture weight density(1-t)/density(t) for t in [1/2, 1)
    stays within [0, 1] exactly when no grid point violates
    density(s) <= density(1-s) beyond RATIO_ATOL. Holds iff
    sigma >= sigma_star(r).
    """
    if r < 2:
        raise RankTooSmallError(f"ratio condition undefined for r={r}")
    if grid < 2:
        raise ValueError("grid must have at least 2 points")
    law = ChiLaw(r, sigma * sigma)
    s = np.linspace(0.0, 0.5, grid)
    gap = chi_density(law, s) - chi_density(law, 1.0 - s)
    k = int(np.argmax(gap))
    worst = float(gap[k])
    return RatioCheck(holds=worst <= RATIO_ATOL, worst_s=float(s[k]), worst_gap=worst)

"""Unit-increment Markov kernel on R^r with a prescribed Gaussian
stationary law, and the sphere-slice sampler it is built from.

Every transition moves by exactly a unit vector. Writing t = ||x||, the
next point keeps either the current radius (a uniform point of the slice
at radius t) or reflects to radius 1-t (the unique such point when x is
nonzero). The reflection weight chi(1-t)/chi(t) is a probability exactly
when the variance parameter is at least sigma_star(r)^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chilaw import sigma_star
from .errors import BadVarianceError, DimMismatchError, InfeasibleSliceError
from .rng import RngHandle, as_generator

__all__ = [
    "KernelParams",
    "SliceSpec",
    "slice_feasible",
    "slice_sample",
    "kernel_step",
    "run_chain",
    "kernel_step_batch",
    "advance_chain_batch",
    "write_trajectory",
]

# Additive slack for the feasibility interval and the mixture-weight clamp.
FEAS_ATOL = 1e-12
CLAMP_TOL = 1e-9
# Retries when a Gaussian draw lands (numerically) parallel to the axis.
MAX_REDRAWS = 100


@dataclass(frozen=True)
class KernelParams:
    """Dimension r >= 2 and variance sigma2 >= 1 / (4 (r - 1))."""

    r: int
    sigma2: float

    def __post_init__(self) -> None:
        if self.r < 2:
            sigma_star(self.r)  # raises RankTooSmallError
        floor = 1.0 / (4.0 * (self.r - 1.0))
        if self.sigma2 < floor - 1e-12:
            raise BadVarianceError(
                f"sigma2={self.sigma2} below the admissible floor {floor} for r={self.r}"
            )


@dataclass(frozen=True)
class SliceSpec:
    """Current point x and target radius s for a unit-step slice."""

    x: np.ndarray
    s: float


def _axis_offset(norm_x: float, s: float) -> float:
    """Signed component along x/||x|| of the unit step reaching radius s."""
    return (s * s - norm_x * norm_x - 1.0) / (2.0 * norm_x)


def slice_feasible(spec: SliceSpec) -> bool:
    """Whether some y has ||y - x|| = 1 and ||y|| = s.

    Equivalent to (||x|| - 1)^2 <= s^2 <= (||x|| + 1)^2, checked with a
    small additive slack so boundary slices built in floating point (the
    single-point cases) stay feasible.
    """
    x = np.asarray(spec.x, dtype=float)
    s = float(spec.s)
    if s < 0.0:
        return False
    t = float(np.linalg.norm(x))
    slack = FEAS_ATOL * max(1.0, s * s, t * t)
    return (t - 1.0) ** 2 <= s * s + slack and s * s <= (t + 1.0) ** 2 + slack


def _orthogonal_unit(x_hat: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """Uniform unit vector orthogonal to x_hat (unit), by projection."""
    for _ in range(MAX_REDRAWS):
        g = gen.standard_normal(x_hat.shape[0])
        w = g - (g @ x_hat) * x_hat
        nw = np.linalg.norm(w)
        if nw > 1e-12:
            return w / nw
    raise InfeasibleSliceError("could not draw a direction orthogonal to x")


def slice_sample(spec: SliceSpec, rng: RngHandle | np.random.Generator) -> np.ndarray:
    """Uniform point y with ||y - x|| = 1 and ||y|| = s.

    For x = 0 the slice is the whole unit sphere scaled by s. Otherwise
    the step decomposes into a fixed component along x and a uniform
    direction orthogonal to it; at the feasibility boundary the
    orthogonal part vanishes and the slice is a single point.
    """
    if not slice_feasible(spec):
        raise InfeasibleSliceError(f"no unit step from ||x||={np.linalg.norm(spec.x):.6g} reaches radius {spec.s}")
    x = np.asarray(spec.x, dtype=float)
    s = float(spec.s)
    gen = as_generator(rng)
    t = float(np.linalg.norm(x))
    if t == 0.0:
        for _ in range(MAX_REDRAWS):
            g = gen.standard_normal(x.shape[0])
            ng = np.linalg.norm(g)
            if ng > 1e-12:
                return (s / ng) * g
        raise InfeasibleSliceError("degenerate Gaussian draws at x = 0")
    lam = min(1.0, max(-1.0, _axis_offset(t, s)))
    x_hat = x / t
    ortho = 1.0 - lam * lam
    if ortho <= 0.0:
        return x + lam * x_hat
    w = _orthogonal_unit(x_hat, gen)
    return x + lam * x_hat + math.sqrt(ortho) * w


def _reflection_weight(params: KernelParams, t: float) -> float:
    """Mixture weight chi(1-t)/chi(t) for t in [1/2, 1), clamped to [0, 1]."""
    p = math.exp(
        (params.r - 1.0) * (math.log1p(-t) - math.log(t))
        + (2.0 * t - 1.0) / (2.0 * params.sigma2)
    )
    if p > 1.0 + CLAMP_TOL:
        raise BadVarianceError(
            f"reflection weight {p:.6g} exceeds 1 at radius {t:.6g}; variance too small"
        )
    return min(p, 1.0)


def kernel_step(
    params: KernelParams, x: np.ndarray, rng: RngHandle | np.random.Generator
) -> np.ndarray:
    """One transition of the unit-increment kernel from x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (params.r,):
        raise DimMismatchError(f"state has shape {x.shape}, expected ({params.r},)")
    gen = as_generator(rng)
    t = float(np.linalg.norm(x))
    if t == 0.0:
        return slice_sample(SliceSpec(x, 1.0), gen)
    if t < 0.5:
        return ((t - 1.0) / t) * x
    if t < 1.0:
        if gen.random() < _reflection_weight(params, t):
            return ((t - 1.0) / t) * x
        return slice_sample(SliceSpec(x, t), gen)
    return slice_sample(SliceSpec(x, t), gen)


def run_chain(
    params: KernelParams,
    x0: np.ndarray,
    steps: int,
    rng: RngHandle | np.random.Generator,
) -> np.ndarray:
    """Trajectory of steps+1 points starting at x0; rows are states."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (params.r,):
        raise DimMismatchError(f"x0 has shape {x0.shape}, expected ({params.r},)")
    gen = as_generator(rng)
    traj = np.empty((steps + 1, params.r))
    traj[0] = x0
    for k in range(steps):
        traj[k + 1] = kernel_step(params, traj[k], gen)
    return traj


def kernel_step_batch(
    params: KernelParams, xs: np.ndarray, rng: RngHandle | np.random.Generator
) -> np.ndarray:
    """Advance N independent states (rows of xs) by one kernel step each.

    Distributionally identical to mapping kernel_step over the rows, but
    vectorized; used by the large stationarity experiments.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != params.r:
        raise DimMismatchError(f"batch has shape {xs.shape}, expected (N, {params.r})")
    gen = as_generator(rng)
    n = xs.shape[0]
    t = np.linalg.norm(xs, axis=1)

    # reflection weight per row: 1 below radius 1/2, 0 at or above 1
    mid = (t >= 0.5) & (t < 1.0)
    p = np.zeros(n)
    p[t < 0.5] = 1.0
    if np.any(mid):
        tm = t[mid]
        pm = np.exp(
            (params.r - 1.0) * (np.log1p(-tm) - np.log(tm))
            + (2.0 * tm - 1.0) / (2.0 * params.sigma2)
        )
        if float(pm.max(initial=0.0)) > 1.0 + CLAMP_TOL:
            raise BadVarianceError("reflection weight exceeds 1; variance too small")
        p[mid] = np.minimum(pm, 1.0)

    coin = gen.random(n)
    gauss = gen.standard_normal(xs.shape)
    ys = np.empty_like(xs)

    origin = t == 0.0
    reflect = (coin < p) & ~origin
    slide = ~reflect & ~origin

    if np.any(origin):
        g = gauss[origin]
        ng = np.linalg.norm(g, axis=1, keepdims=True)
        bad = ng[:, 0] <= 1e-12
        for _ in range(MAX_REDRAWS):
            if not np.any(bad):
                break
            g[bad] = gen.standard_normal((int(bad.sum()), params.r))
            ng = np.linalg.norm(g, axis=1, keepdims=True)
            bad = ng[:, 0] <= 1e-12
        ys[origin] = g / ng

    if np.any(reflect):
        tr = t[reflect]
        ys[reflect] = ((tr - 1.0) / tr)[:, None] * xs[reflect]

    if np.any(slide):
        xv = xs[slide]
        tv = t[slide]
        lam = -1.0 / (2.0 * tv)
        x_hat = xv / tv[:, None]
        g = gauss[slide]
        w = g - np.sum(g * x_hat, axis=1, keepdims=True) * x_hat
        nw = np.linalg.norm(w, axis=1)
        bad = nw <= 1e-12
        for _ in range(MAX_REDRAWS):
            if not np.any(bad):
                break
            g2 = gen.standard_normal((int(bad.sum()), params.r))
            w2 = g2 - np.sum(g2 * x_hat[bad], axis=1, keepdims=True) * x_hat[bad]
            w[bad] = w2
            nw[bad] = np.linalg.norm(w2, axis=1)
            bad = nw <= 1e-12
        w /= nw[:, None]
        ys[slide] = xv + lam[:, None] * x_hat + np.sqrt(1.0 - lam * lam)[:, None] * w

    return ys


def advance_chain_batch(
    params: KernelParams,
    x0s: np.ndarray,
    steps: int,
    rng: RngHandle | np.random.Generator,
) -> np.ndarray:
    """Run N independent chains for the given number of steps; returns the
    final states only."""
    gen = as_generator(rng)
    xs = np.asarray(x0s, dtype=float).copy()
    for _ in range(steps):
        xs = kernel_step_batch(params, xs, gen)
    return xs


def write_trajectory(path: str | Path, traj: np.ndarray) -> None:
    """Dump one point per line, coordinates space-separated (no header)."""
    traj = np.asarray(traj, dtype=float)
    lines = [" ".join(repr(float(v)) for v in row) for row in np.atleast_2d(traj)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

"""Dense numeric substrate: PSD checks, rank-revealing Cholesky, power
iteration, seeded Gaussian sampling, and the shared matrix file format.

Matrices are plain float64 numpy arrays. The validators below are the
boundary checks used by everything downstream; they return the validated
array so call sites can chain them.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import DimMismatchError, NoConvergenceError, NotPsdError
from .rng import RngHandle, as_generator

__all__ = [
    "check_matrix",
    "check_symmetric",
    "check_psd",
    "check_correlation",
    "psd_cholesky",
    "cholesky_rank",
    "top_eigvec",
    "gaussian_vector",
    "read_matrix",
    "write_matrix",
]

# Relative pivot tolerance deciding rank in the semidefinite Cholesky.
PIVOT_RTOL = 1e-8
# Symmetry and eigenvalue slack for PSD validation.
SYM_RTOL = 1e-12
EIG_RTOL = 1e-9
# Unit-diagonal slack for correlation matrices.
DIAG_ATOL = 1e-10

_DEFAULT_EIG_RNG = RngHandle(0x9E3779B97F4A7C15, 0)


def check_matrix(a: np.ndarray) -> np.ndarray:
    """Validate a dense real matrix: 2-d, finite entries."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimMismatchError(f"expected a 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def check_symmetric(s: np.ndarray, rtol: float = SYM_RTOL) -> np.ndarray:
    s = check_matrix(s)
    n, m = s.shape
    if n != m:
        raise DimMismatchError(f"expected a square matrix, got {n}x{m}")
    scale = max(float(np.abs(s).max(initial=0.0)), 1.0)
    if float(np.abs(s - s.T).max(initial=0.0)) > rtol * scale:
        raise NotPsdError("matrix is not symmetric")
    return s


def check_psd(s: np.ndarray) -> np.ndarray:
    """Validate symmetry and spectrum: min eigenvalue >= -1e-9 * (max ∨ 1)."""
    s = check_symmetric(s)
    w = np.linalg.eigvalsh(0.5 * (s + s.T))
    lo, hi = float(w[0]), float(w[-1])
    if lo < -EIG_RTOL * max(hi, 1.0):
        raise NotPsdError(f"smallest eigenvalue {lo:.3e} below tolerance")
    return s


def check_correlation(s: np.ndarray) -> np.ndarray:
    """Validate an elliptope member: PSD with unit diagonal."""
    s = check_psd(s)
    if float(np.abs(np.diag(s) - 1.0).max(initial=0.0)) > DIAG_ATOL:
        raise NotPsdError("diagonal is not the all-ones vector")
    return s


def psd_cholesky(s: np.ndarray, pivot_rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Lower-triangular L with L Lt = s for positive semidefinite s.

    Unlike the strict Cholesky factor, rank deficiency is allowed: L has
    exactly rank(s) strictly positive diagonal entries and the remaining
    columns are identically zero, which makes the factor unique. Pivots
    are judged relative to trace(s)/n; a pivot below -pivot_rtol times
    that scale raises NotPsdError.
    """
    s = check_symmetric(s)
    n = s.shape[0]
    scale = max(float(np.trace(s)) / max(n, 1), 1e-30)
    tol = pivot_rtol * scale
    l = np.zeros_like(s)
    for j in range(n):
        d = s[j, j] - l[j, :j] @ l[j, :j]
        if d < -tol:
            raise NotPsdError(f"negative pivot {d:.3e} at column {j}")
        if d > tol:
            l[j, j] = math.sqrt(d)
            if j + 1 < n:
                l[j + 1 :, j] = (s[j + 1 :, j] - l[j + 1 :, :j] @ l[j, :j]) / l[j, j]
        # pivot within tolerance of zero: the column stays zero
    return l


def cholesky_rank(l: np.ndarray) -> int:
    """Number of strictly positive pivots of a psd_cholesky factor."""
    return int(np.count_nonzero(np.diag(l) > 0.0))


def top_eigvec(
    s: np.ndarray,
    tol: float = 1e-9,
    *,
    rng: RngHandle | np.random.Generator | None = None,
    init: np.ndarray | None = None,
    max_iter: int = 10_000,
) -> np.ndarray:
    """Dominant unit eigenvector of a nonzero PSD matrix via power iteration.

    Stops once ||s v - l v|| <= tol * l with l = vT s v. The start vector
    comes from ``init`` when given, otherwise from ``rng`` (a fixed default
    handle when omitted, so repeated calls are deterministic). Raises
    NoConvergenceError after ``max_iter`` sweeps, which in practice signals
    a near-degenerate top of the spectrum.
    """
    s = check_symmetric(s)
    n = s.shape[0]
    if float(np.abs(s).max(initial=0.0)) == 0.0:
        raise ValueError("top_eigvec needs a nonzero matrix")
    if init is not None:
        v = np.asarray(init, dtype=float).copy()
    else:
        gen = as_generator(rng if rng is not None else _DEFAULT_EIG_RNG)
        v = gen.standard_normal(n)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ValueError("zero initialization vector")
    v /= nv
    for _ in range(max_iter):
        w = s @ v
        lam = float(v @ w)
        if np.linalg.norm(w - lam * v) <= tol * abs(lam) and lam != 0.0:
            return v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            raise NoConvergenceError("iterate collapsed to the null space")
        v = w / nw
    raise NoConvergenceError(f"power iteration did not converge in {max_iter} sweeps")


def gaussian_vector(
    sigma: np.ndarray, rng: RngHandle | np.random.Generator
) -> np.ndarray:
    """One draw from N(0, sigma) as L xi with L = psd_cholesky(sigma)."""
    l = psd_cholesky(sigma)
    gen = as_generator(rng)
    return l @ gen.standard_normal(sigma.shape[0])


def write_matrix(path: str | Path, a: np.ndarray) -> None:
    """Write the shared text format: 'm n' header, then one row per line."""
    a = check_matrix(a)
    m, n = a.shape
    lines = [f"{m} {n}"]
    for row in a:
        lines.append(" ".join(repr(float(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_matrix(path: str | Path) -> np.ndarray:
    """Read the shared text format written by write_matrix."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"{path}: expected 'm n' header, got {lines[0]!r}")
    m, n = int(header[0]), int(header[1])
    if len(lines) - 1 != m:
        raise ValueError(f"{path}: expected {m} rows, found {len(lines) - 1}")
    a = np.empty((m, n), dtype=float)
    for i, ln in enumerate(lines[1:]):
        vals = ln.split()
        if len(vals) != n:
            raise ValueError(f"{path}: row {i} has {len(vals)} entries, expected {n}")
        a[i] = [float(v) for v in vals]
    return a

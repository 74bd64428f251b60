import math

import numpy as np
import pytest

from discforge.errors import NoConvergenceError, NotPsdError
from discforge.linalg import (
    check_correlation,
    check_psd,
    cholesky_rank,
    gaussian_vector,
    psd_cholesky,
    read_matrix,
    top_eigvec,
    write_matrix,
)
from discforge.rng import RngHandle


def eig_rank(s, tol=1e-8):
    # independent rank oracle: count of eigenvalues above tolerance
    return int(np.sum(np.linalg.eigvalsh(s) > tol))


def test_cholesky_identity():
    assert np.array_equal(psd_cholesky(np.eye(2)), np.eye(2))


def test_cholesky_all_ones_zeroes_second_column():
    s = np.ones((2, 2))
    l = psd_cholesky(s)
    assert np.array_equal(l, np.array([[1.0, 0.0], [1.0, 0.0]]))
    assert np.allclose(l @ l.T, s, atol=1e-12)


def test_cholesky_rank_deficient_unit_rows():
    gen = RngHandle(101).generator()
    u = gen.standard_normal((5, 2))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    s = u @ u.T
    l = psd_cholesky(s)
    assert cholesky_rank(l) == eig_rank(s) == 2
    assert np.abs(l @ l.T - s).max() < 1e-8
    assert np.array_equal(l, np.tril(l))
    # columns without a positive pivot are entirely zero
    for j in range(5):
        if l[j, j] <= 0.0:
            assert np.all(l[:, j] == 0.0)


def test_cholesky_idempotent_on_own_outputs():
    gen = RngHandle(102).generator()
    for n, r in [(4, 1), (6, 3), (8, 8), (7, 2)]:
        u = gen.standard_normal((n, r))
        l = psd_cholesky(u @ u.T)
        again = psd_cholesky(l @ l.T)
        assert np.abs(again - l).max() < 1e-10


def test_cholesky_rejects_indefinite():
    with pytest.raises(NotPsdError):
        psd_cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(NotPsdError):
        psd_cholesky(np.array([[1.0, 0.5], [0.0, 1.0]]))  # asymmetric


def test_cholesky_zero_matrix():
    assert np.array_equal(psd_cholesky(np.zeros((3, 3))), np.zeros((3, 3)))


def test_top_eigvec_diagonal():
    v = top_eigvec(np.diag([3.0, 1.0]))
    assert abs(abs(v[0]) - 1.0) < 1e-8 and abs(v[1]) < 1e-8


def test_top_eigvec_planted_plane():
    n = 10
    j = np.arange(1, n + 1)
    c = np.cos(2 * np.pi * j / n)
    s = np.sin(2 * np.pi * j / n)
    sigma = np.outer(c, c) + np.outer(s, s)
    v = top_eigvec(sigma, rng=RngHandle(3))
    lam = float(v @ sigma @ v)
    assert abs(lam - n / 2) < 1e-8
    # v lies in span{c, s}
    proj = (v @ c) * c / (c @ c) + (v @ s) * s / (s @ s)
    assert np.linalg.norm(v - proj) < 1e-7


def test_top_eigvec_rank_one():
    c = np.array([2.0, -1.0, 2.0])
    v = top_eigvec(np.outer(c, c))
    direction = c / np.linalg.norm(c)
    assert min(np.linalg.norm(v - direction), np.linalg.norm(v + direction)) < 1e-8


def test_top_eigvec_no_convergence_on_tight_spectrum():
    s = np.diag([1.0, 0.999])
    with pytest.raises(NoConvergenceError):
        top_eigvec(s, tol=1e-12, max_iter=50)


def test_gaussian_vector_zero_covariance():
    assert np.array_equal(gaussian_vector(np.zeros((4, 4)), RngHandle(0)), np.zeros(4))


def test_gaussian_vector_identity_covariance_lln():
    n, draws = 4, 100_000
    gen = RngHandle(7).generator()
    xs = np.vstack([gaussian_vector(np.eye(n), gen) for _ in range(64)])
    # bulk of the draws vectorized through the same law for speed
    l = psd_cholesky(np.eye(n))
    xs = np.vstack([xs, (l @ gen.standard_normal((n, draws - 64))).T])
    cov = np.cov(xs, rowvar=False, ddof=1)
    assert np.abs(cov - np.eye(n)).max() < 0.05


def test_gaussian_vector_signing_coupling_has_equal_magnitudes():
    sigma = np.array([1.0, -1.0, 1.0, -1.0])
    cov = np.outer(sigma, sigma)
    gen = RngHandle(8).generator()
    for _ in range(50):
        g = gaussian_vector(cov, gen)
        assert np.allclose(np.abs(g), np.abs(g[0]), atol=1e-12)
        assert np.allclose(g * sigma, g[0] * sigma[0], atol=1e-12)


def test_gaussian_vector_rank_one_is_collinear():
    x = np.array([0.3, -2.0, 1.1])
    gen = RngHandle(9).generator()
    for _ in range(25):
        g = gaussian_vector(np.outer(x, x), gen)
        # cross products vanish exactly for scalar multiples
        assert np.linalg.norm(np.cross(g, x)) < 1e-9


def test_check_psd_and_correlation():
    check_psd(np.eye(3))
    check_correlation(np.eye(3))
    with pytest.raises(NotPsdError):
        check_psd(np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(NotPsdError):
        check_correlation(2.0 * np.eye(3))


def test_matrix_file_round_trip(tmp_path):
    gen = RngHandle(11).generator()
    a = gen.standard_normal((3, 5)) * math.pi
    path = tmp_path / "a.mat"
    write_matrix(path, a)
    b = read_matrix(path)
    assert np.array_equal(a, b)
    text = path.read_text(encoding="utf-8")
    assert text.splitlines()[0] == "3 5"


def test_matrix_file_errors(tmp_path):
    bad = tmp_path / "bad.mat"
    bad.write_text("2 2\n1 2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_matrix(bad)
    bad.write_text("", encoding="utf-8")
    with pytest.raises(ValueError):
        read_matrix(bad)

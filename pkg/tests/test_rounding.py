import math

import numpy as np
import pytest
from scipy.stats import ks_2samp

from discforge.errors import BadSizeError
from discforge.rng import RngHandle
from discforge.rounding import (
    gw_round,
    half_ones,
    komlos_rows,
    make_planted,
    pca_round,
    rounding_experiment,
    shift,
    shift_orbit_index,
    spencer_rows,
)


def test_make_planted_invariants():
    inst = make_planted(20, 102, RngHandle(60))
    assert abs(inst.c @ inst.s) < 1e-9
    assert abs(inst.c @ inst.c - inst.n / 2) < 1e-9
    assert abs(inst.s @ inst.s - inst.n / 2) < 1e-9
    assert np.abs(inst.a @ inst.c).max() < 1e-8
    assert np.abs(inst.a @ inst.s).max() < 1e-8
    assert np.abs(np.diag(inst.sigma) - 1.0).max() < 1e-10


def test_make_planted_rejects_bad_sizes():
    for n in (8, 100, 5, 3):
        with pytest.raises(BadSizeError):
            make_planted(4, n, RngHandle(0))


def test_planted_column_norms_are_controlled():
    # entries have variance at most 1, so column norms hover near sqrt(m)
    m = 40
    inst = make_planted(m, 202, RngHandle(61))
    norms = np.linalg.norm(inst.a, axis=0)
    assert norms.max() <= math.sqrt(m) + 3.0


def test_gw_round_rank_one_recovers_signing():
    sigma = np.array([1.0, -1.0, 1.0, 1.0, -1.0])
    gen = RngHandle(62).generator()
    for _ in range(20):
        out = gw_round(np.outer(sigma, sigma), gen)
        assert np.array_equal(out, sigma) or np.array_equal(out, -sigma)


def test_gw_round_identity_gives_fair_coins():
    gen = RngHandle(63).generator()
    n, draws = 8, 10_000
    outs = np.array([gw_round(np.eye(n), gen) for _ in range(draws)])
    se = 1.0 / math.sqrt(draws)
    assert np.abs(outs.mean(axis=0)).max() <= 3.0 * se


def test_pca_round_rank_one_recovers_signing():
    sigma = np.array([1.0, 1.0, -1.0])
    out = pca_round(np.outer(sigma, sigma))
    assert np.array_equal(out, sigma) or np.array_equal(out, -sigma)


def test_pca_round_identity_returns_signs():
    out = pca_round(np.eye(5), rng=RngHandle(64))
    assert np.all(np.abs(out) == 1.0)


def test_shift_examples():
    assert np.array_equal(shift(np.array([1, 2, 3])), [2, 3, 1])
    v = np.arange(7)
    out = v
    for _ in range(7):
        out = shift(out)
    assert np.array_equal(out, v)


def test_shift_orbit_index():
    w = half_ones(6)
    assert shift_orbit_index(w, w) == 0
    assert shift_orbit_index(shift(shift(w)), w) == 2
    assert shift_orbit_index(np.ones(6), w) is None


def test_planted_rounding_lands_in_shift_orbit():
    n = 102
    inst = make_planted(10, n, RngHandle(65))
    w = half_ones(n)
    gen = RngHandle(66).generator()
    for _ in range(25):
        assert shift_orbit_index(gw_round(inst.sigma, gen), w) is not None
    pca = pca_round(inst.sigma, init=inst.c + 1e-3 * inst.s)
    assert shift_orbit_index(pca, w) is not None
    # with the in-plane tie-break toward c, the output is exactly sgn(c)
    assert np.array_equal(pca, np.where(inst.c >= 0.0, 1.0, -1.0))


def test_balanced_sum_norm_is_shift_invariant():
    # the trig rows rotate under shifting, so the planted balanced sum has
    # the same Euclidean norm for every shift of the half-ones vector
    n = 102
    inst = make_planted(4, n, RngHandle(67))
    u = np.column_stack([inst.c, inst.s])
    w = half_ones(n)
    ref = np.linalg.norm(w @ u)
    cur = w
    for _ in range(n):
        cur = shift(cur)
        assert abs(np.linalg.norm(cur @ u) - ref) < 1e-9


def test_row_projections_same_law_across_shifts():
    n = 102
    gen = RngHandle(68).generator()
    inst = make_planted(4000, n, gen)
    w = half_ones(n)
    a = inst.a @ w
    b = inst.a @ shift(w)
    res = ks_2samp(a, b)
    assert res.pvalue >= 0.01


def test_quadratic_form_limit():
    # w' (I - projections) w / n approaches 1 - 8/pi^2
    limit = 1.0 - 8.0 / math.pi**2
    for n, tol in ((102, 0.01), (502, 0.002), (2002, 0.0005)):
        j = np.arange(1, n + 1)
        c = np.cos(2.0 * math.pi * j / n)
        s = np.sin(2.0 * math.pi * j / n)
        w = half_ones(n)
        val = (w @ w - (2.0 / n) * ((c @ w) ** 2 + (s @ w) ** 2)) / n
        assert abs(val - limit) < tol


def test_row_counts():
    assert spencer_rows(502) == 80
    assert komlos_rows(502) == 62


def test_rounding_experiment_small():
    report = rounding_experiment("spencer", 102, trials=4, rng=RngHandle(69))
    assert report.spec["m"] == spencer_rows(102)
    assert report.verdicts["orbit_membership"]["passed"]
    assert report.verdicts["feasible_fraction"]["passed"]
    assert report.verdicts["planted_coupling_zero"]["passed"]
    assert len(report.metrics) == 4
    report = rounding_experiment("komlos", 102, trials=3, rng=RngHandle(70))
    assert report.spec["c_scale"] == 5.0
    assert report.verdicts["feasible_fraction"]["passed"]
    with pytest.raises(ValueError):
        rounding_experiment("other", 102, 1, RngHandle(0))
    with pytest.raises(BadSizeError):
        rounding_experiment("spencer", 100, 1, RngHandle(0))

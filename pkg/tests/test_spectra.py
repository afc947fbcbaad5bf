import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from corpus import CIRCLE, CORPUS, INTERVAL
from semibounded.forms import CoefficientSequence, finite_section, form_direct, from_measure
from semibounded.measure import semibounded_gap
from semibounded.spectra import (
    LanczosNotConverged,
    extreme_eigs,
    gershgorin_bound,
    norm_growth,
    psd_check,
)


def test_all_ones_rank_one():
    for N in (2, 8, 64, 512):
        rep = extreme_eigs(CoefficientSequence.toeplitz(np.ones(N)), N)
        assert rep.lambda_max == pytest.approx(N, abs=1e-10)
        assert abs(rep.lambda_min) <= 1e-10


@pytest.mark.parametrize("N", [2, 10, 64, 200])
def test_tridiagonal_two_plus_cos(N):
    c = CoefficientSequence.toeplitz([2.0, 0.5])
    c = CoefficientSequence.toeplitz(np.r_[c.values, np.zeros(N)])
    rep = extreme_eigs(c, N)
    assert rep.lambda_min == pytest.approx(2 - np.cos(np.pi / (N + 1)), abs=1e-9)
    assert rep.lambda_max == pytest.approx(2 + np.cos(np.pi / (N + 1)), abs=1e-9)
    assert 1 < rep.lambda_min and rep.lambda_max < 3


@pytest.mark.parametrize("N", [4, 10, 20])
def test_rank_one_hankel(N):
    c = CoefficientSequence.hankel(0.5 ** np.arange(2 * N - 1))
    rep = extreme_eigs(c, N)
    assert rep.lambda_max == pytest.approx((1 - 4.0**-N) * 4 / 3, abs=1e-10)
    assert abs(rep.lambda_min) <= 1e-10


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_lanczos_matches_dense_oracle(name):
    M = CORPUS[name]
    A = oracles.dense_section(M, 64)
    for N in (5, 33, 64):
        c = from_measure(M, N)
        w = np.linalg.eigvalsh(A[:N, :N])
        rep = extreme_eigs(c, N)
        assert rep.lambda_min == pytest.approx(w[0], abs=1e-8)
        assert rep.lambda_max == pytest.approx(w[-1], abs=1e-8)
        assert rep.lambda_min <= rep.lambda_max


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_interlacing_and_gap(name):
    M = CORPUS[name]
    gap = semibounded_gap(M) if M.on_circle else 0.0
    c = from_measure(M, 256)
    prev = None
    for N in (1, 2, 4, 16, 64, 128, 256):
        rep = extreme_eigs(c, N)
        assert rep.lambda_min >= gap - 1e-9
        if prev is not None:
            scale = 1e-9 * max(1.0, rep.lambda_max)
            assert rep.lambda_min <= prev.lambda_min + scale
            assert rep.lambda_max >= prev.lambda_max - scale
        prev = rep


def test_residual_meets_tolerance():
    c = from_measure(CIRCLE["degree_eight"], 300)
    rep = extreme_eigs(c, 300, tol=1e-10)
    assert rep.residual_norm <= 1e-10 * (abs(rep.lambda_max) + gershgorin_bound(c, 300))
    A = finite_section(c, 300)
    for lam, v in ((rep.lambda_min, rep.v_min), (rep.lambda_max, rep.v_max)):
        assert np.linalg.norm(A @ v - lam * v) <= 1e-9 * np.abs(lam + 1)


def test_report_json_keys():
    rep = extreme_eigs(CoefficientSequence.toeplitz([2.0, 0.5, 0.0]), 3)
    assert set(rep.to_json()) == {"N", "lambda_min", "lambda_max", "residual", "iterations"}
    json.dumps(rep.to_json())


def test_seed_determinism():
    c = from_measure(INTERVAL["hilbert"], 200)
    a = extreme_eigs(c, 200, seed=5)
    b = extreme_eigs(c, 200, seed=5)
    assert a.to_json() == b.to_json()


def test_non_convergence_raises_with_report():
    c = from_measure(INTERVAL["chebyshev"], 200)
    with pytest.raises(LanczosNotConverged) as info:
        extreme_eigs(c, 200, tol=1e-14, max_iter=3)
    assert info.value.report.N == 200
    assert np.isfinite(info.value.report.lambda_max)


def test_rejects_bad_tol():
    with pytest.raises(ValueError):
        extreme_eigs(CoefficientSequence.toeplitz([1.0]), 1, tol=0.0)


def test_gershgorin_bounds_norm(rng):
    for _ in range(5):
        t = rng.standard_normal(30) + 1j * rng.standard_normal(30)
        t[0] = t[0].real
        c = CoefficientSequence.toeplitz(t)
        assert np.linalg.norm(finite_section(c, 30), 2) <= gershgorin_bound(c, 30) * (1 + 1e-12)
    h = CoefficientSequence.hankel(rng.standard_normal(59))
    assert np.linalg.norm(finite_section(h, 30), 2) <= gershgorin_bound(h, 30) * (1 + 1e-12)


# --- positivity --------------------------------------------------------------


def test_psd_examples():
    assert psd_check(CoefficientSequence.hankel([1.0, 0.0, 0.0]), 2).positive
    res = psd_check(CoefficientSequence.hankel([0.0, 1.0, 0.0]), 2)
    assert not res.positive
    assert res.lambda_min == pytest.approx(-1.0)
    w = res.witness
    assert abs(abs(w[0]) - 1 / np.sqrt(2)) < 1e-10 and abs(w[0] + w[1]) < 1e-10
    assert form_direct(CoefficientSequence.hankel([0.0, 1.0, 0.0]), w) < 0
    ident = psd_check(CoefficientSequence.toeplitz([1.0, 0.0, 0.0]), 3)
    assert ident and ident.lambda_min == pytest.approx(1.0)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_psd_corpus(name):
    c = from_measure(CORPUS[name], 256)
    assert psd_check(c, 256).positive


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_psd_witness_is_negative(N, seed):
    rng = np.random.default_rng(seed)
    c = CoefficientSequence.hankel(rng.standard_normal(2 * N - 1))
    res = psd_check(c, N)
    w = np.linalg.eigvalsh(finite_section(c, N))
    assert res.positive == (w[0] >= -1e-10)
    if not res.positive:
        assert form_direct(c, res.witness) < 0


# --- growth ------------------------------------------------------------------


def test_norm_growth_examples():
    hil = from_measure(INTERVAL["hilbert"], 1024)
    growth = norm_growth(hil, [8, 64, 256, 1024])
    lam = [g[1] for g in growth]
    assert all(b >= a for a, b in zip(lam, lam[1:]))
    assert lam[-1] < np.pi
    ones = CoefficientSequence.toeplitz(np.ones(128))
    assert [round(g[1], 8) for g in norm_growth(ones, [4, 32, 128])] == [4, 32, 128]
    r1 = CoefficientSequence.hankel(0.5 ** np.arange(1023))
    assert norm_growth(r1, [64, 512])[-1][1] == pytest.approx(4 / 3, abs=1e-10)


def test_hilbert_norm_still_creeping():
    """The section norms approach pi from below with shrinking increments."""
    hil = from_measure(INTERVAL["hilbert"], 2048)
    lam = [g[1] for g in norm_growth(hil, [256, 512, 1024, 2048])]
    inc = np.diff(lam)
    assert np.all(inc > 0) and np.all(np.diff(inc) < 0)
    assert lam[-1] < np.pi


def test_norm_growth_requires_ascending():
    with pytest.raises(ValueError):
        norm_growth(CoefficientSequence.toeplitz(np.ones(10)), [8, 4])

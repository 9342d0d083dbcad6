import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from matprof import _fallback
from matprof._backend import BACKEND, get_kernels
from matprof.errors import InvalidBudget, InvalidMerge, InvalidSeries, InvalidWindow
from matprof.profile import (STOP, MatrixProfile, StompiState, anytime_rmse,
                             brute_force_profile, elementwise_min_merge, matrix_profile,
                             pair_distance, predict_runtime, stamp, stomp, stompi_append)
from matprof.series import synth_planted

from conftest import chirp, naive_profile, planted_hit


def test_brute_force_matches_double_loop(walk):
    T = walk(120, seed=1)
    P, I = naive_profile(T, 10)
    mp = brute_force_profile(T, 10)
    np.testing.assert_allclose(mp.P, P, atol=1e-9)
    np.testing.assert_array_equal(mp.I, I)


def test_frozen_tiny_profile():
    # hand-checkable: a repeated ramp and a flat stretch
    T = np.array([0.0, 1.0, 2.0, 0.0, 1.0, 2.0, 5.0, 5.0, 5.0])
    mp = brute_force_profile(T, 3)
    assert mp.P[0] == pytest.approx(0.0, abs=1e-12) and mp.I[0] == 3
    assert mp.P[3] == pytest.approx(0.0, abs=1e-12) and mp.I[3] == 0
    # the flat window [5, 5, 5] has no flat partner: sqrt(2m)
    assert mp.P[6] == pytest.approx(math.sqrt(6.0))


@pytest.mark.parametrize("m", [4, 16, 33])
def test_stomp_and_stamp_match_oracle(walk, m):
    T = walk(300, seed=m)
    ref = brute_force_profile(T, m)
    for mp in (stomp(T, m), stomp(T, m, backend="python"), stamp(T, m, seed=0)):
        np.testing.assert_allclose(mp.P, ref.P, atol=1e-8)
        np.testing.assert_array_equal(mp.I, ref.I)
        assert mp.fraction_done == 1.0


def test_backends_agree_bitwise(walk):
    T = walk(500, seed=3)
    a, b = stomp(T, 20, backend="cython" if BACKEND == "cython" else "python"), \
        stomp(T, 20, backend="python")
    np.testing.assert_allclose(a.P, b.P, atol=1e-12)
    np.testing.assert_array_equal(a.I, b.I)
    assert get_kernels("python") is _fallback


def test_stomp_rebuild_interval_does_not_change_result(walk):
    T = walk(400, seed=5)
    a, b = stomp(T, 16), stomp(T, 16, rebuild_every=37)
    np.testing.assert_allclose(a.P, b.P, atol=1e-9)
    np.testing.assert_array_equal(a.I, b.I)


def test_stomp_valid_mask(walk):
    T = walk(200, seed=6)
    valid = np.ones(200 - 10 + 1, dtype=bool)
    valid[50:80] = False
    mp = stomp(T, 10, valid=valid)
    assert np.isinf(mp.P[50:80]).all() and (mp.I[50:80] == -1).all()
    assert not np.isin(mp.I[valid], np.arange(50, 80)).any()


def test_flat_series_profile():
    mp = stomp(np.ones(50), 8)
    np.testing.assert_array_equal(mp.P, np.zeros(43))


def test_all_excluded_when_series_too_short():
    # l <= ceil(m/2): every pair is a trivial match
    mp = brute_force_profile(np.arange(11.0) ** 2, 8)
    assert np.isinf(mp.P).all() and (mp.I == -1).all()
    mp = stomp(np.arange(11.0) ** 2, 8)
    assert np.isinf(mp.P).all()


@pytest.mark.parametrize("seed", [0, 1, 2, 4])
def test_planted_motif_recovered_with_tie(seed):
    T = synth_planted(seed, 500, chirp(30), [150, 350]).series
    mp = stomp(T, 30)
    i = int(np.argmin(mp.P))
    assert planted_hit((i, mp.I[i]), [150, 350], 30)
    top2 = np.sort(mp.P)[:2]
    assert abs(top2[1] - top2[0]) <= 1e-9


def test_stamp_budget_and_interrupt(walk):
    T = walk(300, seed=2)
    exact = stomp(T, 16)
    part = stamp(T, 16, seed=1, budget=0.1)
    assert part.fraction_done == pytest.approx(29 / 285)
    assert (part.P >= exact.P - 1e-9).all()
    calls = []
    stopped = stamp(T, 16, seed=1, interrupt=lambda f: (calls.append(f), STOP)[1],
                    report_every=10)
    assert len(calls) == 1 and stopped.fraction_done == pytest.approx(10 / 285)
    assert stamp(T, 16, seed=1, budget=5).fraction_done == pytest.approx(5 / 285)


@pytest.mark.parametrize("budget", [0, -1, 1.5, 0.0, "x"])
def test_stamp_rejects_bad_budget(walk, budget):
    with pytest.raises(InvalidBudget):
        stamp(walk(100), 10, budget=budget)


def test_stamp_workers_are_deterministic(walk):
    T = walk(400, seed=8)
    ref = stamp(T, 20, seed=3, workers=1)
    for w in (2, 3):
        mp = stamp(T, 20, seed=3, workers=w)
        assert mp.P.tobytes() == ref.P.tobytes() and mp.I.tobytes() == ref.I.tobytes()


def test_merge_is_elementwise_min_with_index_tiebreak():
    a = MatrixProfile(np.array([1.0, 2.0, 3.0]), np.array([5, 6, 7]), 4, 0.2)
    b = MatrixProfile(np.array([1.0, 1.5, 4.0]), np.array([4, 9, 1]), 4, 0.3)
    c = elementwise_min_merge(a, b)
    np.testing.assert_array_equal(c.P, [1.0, 1.5, 3.0])
    np.testing.assert_array_equal(c.I, [4, 9, 7])
    with pytest.raises(InvalidMerge):
        elementwise_min_merge(a, MatrixProfile(np.zeros(2), np.zeros(2, int), 4))


@given(st.integers(0, 1000))
def test_merge_commutes(seed):
    rng = np.random.default_rng(seed)
    P1, P2 = rng.integers(0, 4, 20).astype(float), rng.integers(0, 4, 20).astype(float)
    a = MatrixProfile(P1, rng.integers(0, 50, 20), 4)
    b = MatrixProfile(P2, rng.integers(0, 50, 20), 4)
    ab, ba = elementwise_min_merge(a, b), elementwise_min_merge(b, a)
    np.testing.assert_array_equal(ab.P, ba.P)
    np.testing.assert_array_equal(ab.I, ba.I)


def test_stompi_matches_batch(walk):
    T = walk(400, seed=12)
    state = StompiState.from_series(T[:300], 30)
    for t in T[300:]:
        stompi_append(state, t)
    ref = stomp(T, 30)
    np.testing.assert_allclose(state.profile.P, ref.P, atol=1e-8)
    np.testing.assert_array_equal(state.profile.I, ref.I)
    np.testing.assert_allclose(state.series, T, atol=1e-9)
    np.testing.assert_allclose(state.stds[-1], T[-30:].std(), atol=1e-9)


def test_stompi_rejects_non_finite_and_keeps_state(walk):
    T = walk(100, seed=1)
    state = StompiState.from_series(T, 10)
    before = state.profile.P.copy()
    with pytest.raises(InvalidSeries):
        state.append(np.nan)
    assert len(state) == 100
    np.testing.assert_array_equal(state.profile.P, before)


def test_stompi_needs_enough_samples():
    with pytest.raises(InvalidWindow):
        StompiState.from_series(np.arange(12.0), 8)


def test_predict_runtime_quadratic():
    assert predict_runtime(2.0, 1000, 2000) == pytest.approx(8.0)
    with pytest.raises(ValueError):
        predict_runtime(1.0, 0, 10)


def test_anytime_rmse_and_dispatch(walk):
    T = walk(200, seed=4)
    exact = matrix_profile(T, 12, "stomp")
    assert anytime_rmse(exact, matrix_profile(T, 12, "brute")) < 1e-8
    with pytest.raises(ValueError):
        matrix_profile(T, 12, "nope")


def test_pair_distance_convention():
    assert pair_distance(np.ones(5), np.full(5, 3.0)) == 0.0
    assert pair_distance(np.ones(5), np.arange(5.0)) == pytest.approx(math.sqrt(10))

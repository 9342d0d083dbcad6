import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from matprof.errors import InvalidWindow
from matprof.simsearch import dist_from_dot, fft_length, mass, sliding_dot_product


def test_fft_length_is_power_of_two_at_least_2n():
    assert [fft_length(n) for n in (1, 2, 3, 5, 8, 9, 1000)] == [2, 4, 8, 16, 16, 32, 2048]


def test_sliding_dot_product_hand_example():
    np.testing.assert_allclose(sliding_dot_product([1.0, 2.0], [1.0, 2.0, 3.0, 4.0]),
                               [5.0, 8.0, 11.0], atol=1e-12)


@given(st.integers(0, 10_000), st.integers(2, 50), st.integers(50, 300))
def test_sliding_dot_product_matches_direct(seed, m, n):
    rng = np.random.default_rng(seed)
    T, Q = rng.standard_normal(n), rng.standard_normal(m)
    W = np.lib.stride_tricks.sliding_window_view(T, m)
    np.testing.assert_allclose(sliding_dot_product(Q, T), W @ Q, atol=1e-9)


def test_dist_from_dot_matches_znormalized_euclidean():
    a = np.array([1.0, 3.0, 2.0, 5.0])
    b = np.array([2.0, 2.5, 4.0, 4.5])
    d, r = dist_from_dot(a @ b, a.mean(), a.std(), b.mean(), b.std(), 4)
    za, zb = (a - a.mean()) / a.std(), (b - b.mean()) / b.std()
    assert d == pytest.approx(np.linalg.norm(za - zb), abs=1e-12)
    assert r == pytest.approx(np.corrcoef(a, b)[0, 1], abs=1e-12)


def test_flat_window_convention():
    assert dist_from_dot(12.0, 2.0, 0.0, 1.5, 0.0, 4) == (0.0, 1.0)
    assert dist_from_dot(12.0, 2.0, 0.0, 1.5, 0.7, 4) == (math.sqrt(8.0), 0.0)
    prof = mass([1.0, 1.0, 1.0], [5.0, 5.0, 5.0, 1.0, 2.0])
    np.testing.assert_allclose(prof.distances, [0.0, math.sqrt(6.0), math.sqrt(6.0)])


def test_mass_self_match_is_zero_and_shape():
    T = np.cumsum(np.random.default_rng(4).standard_normal(400))
    prof = mass(T[100:132], T)
    assert len(prof) == 400 - 32 + 1
    assert prof.distances[100] < 1e-6
    assert prof.correlations[100] == pytest.approx(1.0, abs=1e-12)


@given(st.integers(0, 10_000))
def test_mass_matches_naive_sweep(seed):
    rng = np.random.default_rng(seed)
    T = np.cumsum(rng.standard_normal(200)) + 1e3
    Q = rng.standard_normal(20)
    zq = (Q - Q.mean()) / Q.std()
    W = np.lib.stride_tricks.sliding_window_view(T, 20)
    Z = (W - W.mean(axis=1, keepdims=True)) / W.std(axis=1, keepdims=True)
    np.testing.assert_allclose(mass(Q, T).distances, np.linalg.norm(Z - zq, axis=1),
                               atol=1e-6)


def test_mass_is_affine_invariant():
    rng = np.random.default_rng(9)
    T, Q = np.cumsum(rng.standard_normal(300)), rng.standard_normal(25)
    np.testing.assert_allclose(mass(3.0 * Q + 7.0, T).distances, mass(Q, T).distances,
                               atol=1e-8)


def test_mass_rejects_bad_query():
    with pytest.raises(InvalidWindow):
        mass([1.0, 2.0, 3.0], [1.0, 2.0])
    with pytest.raises(InvalidWindow):
        mass([1.0], [1.0, 2.0])

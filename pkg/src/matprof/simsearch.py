"""FFT sliding dot products and MASS distance profiles."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidWindow
from .series import as_series, rolling_stats


def fft_length(n):
    """Smallest power of two that is at least ``2 * n``."""
    return 1 << max(1, (2 * int(n) - 1).bit_length())


def sliding_dot_product(Q, T):
    """Dot product of ``Q`` with every length-``len(Q)`` window of ``T``.

    The query is reversed and both vectors are zero padded to a common FFT
    length, so the valid cells of the circular convolution are the
    ``n - m + 1`` in-order products.
    """
    Q = np.asarray(Q, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    n, m = len(T), len(Q)
    if m < 1 or m > n:
        raise InvalidWindow(f"query length {m} exceeds series length {n}")
    nfft = fft_length(n)
    prod = np.fft.rfft(T, nfft) * np.fft.rfft(Q[::-1], nfft)
    return np.fft.irfft(prod, nfft)[m - 1:n]


def dist_from_dot(qt, mu_q, sigma_q, mu_i, sigma_i, m):
    """Z-normalized Euclidean distance and Pearson correlation from a dot product.

    Returns ``(distance, correlation)``.  A window with zero standard
    deviation is uncorrelated with any non-flat window and identical to any
    other flat one.
    """
    if m < 2:
        raise InvalidWindow("m must be at least 2")
    if sigma_q == 0.0 or sigma_i == 0.0:
        if sigma_q == 0.0 and sigma_i == 0.0:
            return 0.0, 1.0
        return math.sqrt(2.0 * m), 0.0
    r = (qt - m * mu_q * mu_i) / (m * sigma_q * sigma_i)
    r = min(1.0, max(-1.0, r))
    return math.sqrt(max(2.0 * m * (1.0 - r), 0.0)), r


def correlations_to_distances(r, m):
    return np.sqrt(np.maximum(2.0 * m * (1.0 - r), 0.0))


def apply_flat_convention(r, q_constant, t_constant):
    """Overwrite correlations in place for flat query and/or flat windows."""
    if q_constant:
        r[:] = np.where(t_constant, 1.0, 0.0)
    else:
        r[t_constant] = 0.0
    return r


@dataclass
class DistanceProfile:
    distances: np.ndarray
    correlations: np.ndarray
    query_start: int = None

    def __len__(self):
        return len(self.distances)


class MassPlan:
    """Cached spectrum and window statistics of one series.

    Repeated queries against the same series (STAMP rows, dictionary
    prediction) reuse the forward transform of ``T``.
    """

    def __init__(self, T, m, stats=None):
        self.T = as_series(T)
        self.m = int(m)
        self.stats = stats if stats is not None else rolling_stats(self.T, self.m)
        if self.stats.m != self.m:
            raise InvalidWindow(f"stats computed for m={self.stats.m}, not {self.m}")
        self.n = len(self.T)
        self.nfft = fft_length(self.n)
        self._tf = np.fft.rfft(self.T - self.stats.offset, self.nfft)

    def centered_dots(self, Q):
        """Sliding dot products of the mean-removed query with the shifted series."""
        q = np.asarray(Q, dtype=np.float64)
        q = q - q.mean()
        prod = self._tf * np.fft.rfft(q[::-1], self.nfft)
        return np.fft.irfft(prod, self.nfft)[self.m - 1:self.n]

    def correlations(self, Q, q_std=None, q_constant=None):
        Q = np.asarray(Q, dtype=np.float64)
        if q_constant is None:
            q_constant = bool(np.all(Q == Q[0]))
        if q_std is None:
            q_std = 0.0 if q_constant else float(Q.std())
        st = self.stats
        with np.errstate(divide="ignore", invalid="ignore"):
            r = self.centered_dots(Q) / (self.m * q_std * st.stds)
        np.clip(r, -1.0, 1.0, out=r)
        return apply_flat_convention(r, q_constant, st.constant)

    def profile(self, Q, query_start=None, q_std=None, q_constant=None):
        r = self.correlations(Q, q_std=q_std, q_constant=q_constant)
        return DistanceProfile(correlations_to_distances(r, self.m), r, query_start)

    def row(self, i):
        """Distance profile of the series' own window starting at ``i``."""
        st = self.stats
        q = self.T[i:i + self.m]
        return self.profile(q, query_start=i, q_std=float(st.stds[i]),
                            q_constant=bool(st.constant[i]))


def mass(Q, T, stats=None):
    """Distance profile of query ``Q`` against every window of ``T``.

    Parameters
    ----------
    Q : array_like
        Query of length ``m >= 2``.
    T : array_like
        Series of length ``n >= m``.
    stats : RollingStats, optional
        Precomputed window statistics of ``T`` for length ``m``.

    Returns
    -------
    DistanceProfile
    """
    Q = np.asarray(Q, dtype=np.float64)
    T = as_series(T)
    m = len(Q)
    if m < 2 or m > len(T):
        raise InvalidWindow(f"query length {m} outside [2, {len(T)}]")
    if stats is not None and stats.m != m:
        raise InvalidWindow(f"stats computed for m={stats.m}, query has length {m}")
    return MassPlan(T, m, stats).profile(Q)

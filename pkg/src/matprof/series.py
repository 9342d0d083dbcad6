"""Series validation, windowed statistics, exclusion zones and synthetic data.

Series are plain ``numpy`` float64 arrays: 1-D for a single channel and
``(d, n)`` for multidimensional data.  The helpers here validate them once at
the boundary so downstream kernels can assume finite values.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from .errors import InvalidPlant, InvalidSeries, InvalidWindow


def as_series(values, name="T"):
    """Return ``values`` as a finite, contiguous 1-D float64 array."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidSeries(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise InvalidSeries(f"{name} is empty")
    bad = ~np.isfinite(arr)
    if bad.any():
        pos = int(np.flatnonzero(bad)[0])
        raise InvalidSeries(f"{name} contains a non-finite value at index {pos}")
    return arr


def as_multi_series(values, name="T"):
    """Return ``values`` as a finite ``(d, n)`` float64 array.

    A 1-D input is promoted to a single row.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidSeries(f"{name} must have shape (d, n), got {arr.shape}")
    bad = ~np.isfinite(arr)
    if bad.any():
        dim, pos = (int(v) for v in np.argwhere(bad)[0])
        raise InvalidSeries(
            f"{name} contains a non-finite value at dimension {dim}, index {pos}"
        )
    return np.ascontiguousarray(arr)


def check_window(m, n):
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool):
        raise InvalidWindow(f"window length must be an integer, got {m!r}")
    if m < 2 or m > n:
        raise InvalidWindow(f"window length m={m} outside [2, {n}]")
    return int(m)


def exclusion_radius(m):
    """Half-width of the trivial-match zone: ``ceil(m / 2)``."""
    return (int(m) + 1) // 2


@dataclass(frozen=True)
class ExclusionZone:
    center: int
    radius: int

    @classmethod
    def for_window(cls, center, m):
        return cls(int(center), exclusion_radius(m))

    def __contains__(self, j):
        return abs(int(j) - self.center) < self.radius

    @property
    def bounds(self):
        """Half-open index range ``[lo, hi)`` covered by the zone (unclipped)."""
        return self.center - self.radius + 1, self.center + self.radius


@dataclass
class RollingStats:
    """Per-window means and population standard deviations.

    ``constant`` marks windows whose values are all identical; for those
    ``stds`` is exactly zero regardless of floating-point cancellation in the
    cumulative sums.
    """

    m: int
    means: np.ndarray
    stds: np.ndarray
    cumsum: np.ndarray
    cumsum_sq: np.ndarray
    offset: float = 0.0
    constant: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.means)


ILL_CONDITIONED = 1e6


def rolling_stats(T, m):
    """Compute window means and standard deviations in O(n).

    The series is shifted by its global mean before accumulating so the
    sum-of-squares identity loses as few digits as possible; ``cumsum`` and
    ``cumsum_sq`` are over the shifted values (``offset`` records the shift).
    """
    T = as_series(T)
    m = check_window(m, len(T))
    offset = float(T.mean())
    x = T - offset
    cs = np.concatenate(([0.0], np.cumsum(x)))
    cs2 = np.concatenate(([0.0], np.cumsum(x * x)))
    s = cs[m:] - cs[:-m]
    s2 = cs2[m:] - cs2[:-m]
    mu = s / m
    var = s2 / m - mu * mu
    np.maximum(var, 0.0, out=var)
    _refine_ill_conditioned(x, m, mu, var, s2 / m)
    stds = np.sqrt(var)

    # exact flatness test; cumulative sums alone leave ~1e-8 residue
    constant = _window_ptp_zero(T, m)
    stds[constant] = 0.0
    return RollingStats(
        m=m,
        means=mu + offset,
        stds=stds,
        cumsum=cs,
        cumsum_sq=cs2,
        offset=offset,
        constant=constant,
    )


def _refine_ill_conditioned(x, m, mu, var, mean_sq, chunk=4096):
    # E[x^2] - mu^2 loses ~log10(mean_sq / var) digits; recompute those
    # windows with the two-pass formula (in place).
    idx = np.flatnonzero(var * ILL_CONDITIONED < mean_sq)
    W = np.lib.stride_tricks.sliding_window_view(x, m)
    for start in range(0, len(idx), chunk):
        rows = idx[start:start + chunk]
        block = W[rows]
        local = block.mean(axis=1)
        mu[rows] = local
        var[rows] = ((block - local[:, None]) ** 2).mean(axis=1)


def _window_ptp_zero(T, m):
    # centred filters: the window centred at c covers [c - m//2, c - m//2 + m)
    n = len(T)
    l = n - m + 1
    center = m // 2
    mx = maximum_filter1d(T, size=m, mode="nearest")
    mn = minimum_filter1d(T, size=m, mode="nearest")
    return (mx[center:center + l] - mn[center:center + l]) == 0.0


def znormalize(x):
    """Z-normalize a vector with the population standard deviation.

    A constant vector maps to all zeros.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or len(x) < 2:
        raise InvalidWindow("z-normalization needs a vector of length >= 2")
    if np.all(x == x[0]):
        return np.zeros_like(x)
    mu = x.mean()
    sigma = x.std()
    if sigma == 0.0:
        return np.zeros_like(x)
    return (x - mu) / sigma


# ---------------------------------------------------------------------------
# synthetic data


def random_walk(rng, n, d=1):
    return np.cumsum(rng.standard_normal((d, n)), axis=1)


def _fade_weights(m):
    ramp = max(1, m // 8)
    w = np.ones(m)
    if 2 * ramp < m:
        up = (np.arange(ramp) + 1) / (ramp + 1)
        w[:ramp] = up
        w[m - ramp:] = up[::-1]
    return w


@dataclass
class Planted:
    values: np.ndarray  # (d, n)
    positions: list
    dims: list
    pattern: np.ndarray

    @property
    def series(self):
        if self.values.shape[0] != 1:
            raise InvalidSeries("series is multidimensional; use .values")
        return self.values[0]


def synth_planted(seed, n, pattern, positions, dims=None, d=None):
    """Seeded random walk(s) with ``pattern`` blended in at ``positions``.

    Parameters
    ----------
    seed : int
    n : int
        Length of every dimension.
    pattern : array_like
        The planted shape; added on top of the walk with a linear fade over
        ``len(pattern) // 8`` samples at each end.
    positions : list of int
        Start indices of the plants.  Windows may not overlap.
    dims : list of int, optional
        Dimensions receiving the plant (default: all).
    d : int, optional
        Number of dimensions (default ``max(dims) + 1`` or 1).

    Returns
    -------
    Planted
    """
    pattern = np.asarray(pattern, dtype=np.float64)
    m = len(pattern)
    if d is None:
        d = (max(dims) + 1) if dims else 1
    if dims is None:
        dims = list(range(d))
    if any(k < 0 or k >= d for k in dims):
        raise InvalidPlant(f"plant dimensions {dims} outside [0, {d})")
    ordered = sorted(int(p) for p in positions)
    for p in ordered:
        if p < 0 or p + m > n:
            raise InvalidPlant(f"plant at {p} with length {m} does not fit in n={n}")
    for a, b in zip(ordered, ordered[1:]):
        if b < a + m:
            raise InvalidPlant(f"plants at {a} and {b} overlap")
    rng = np.random.default_rng(seed)
    values = random_walk(rng, n, d)
    blended = pattern * _fade_weights(m)
    for p in ordered:
        for k in dims:
            values[k, p:p + m] += blended
    return Planted(values=values, positions=ordered, dims=sorted(dims), pattern=pattern)


def trace_like_pattern(length, amplitude=1.0):
    """A transient resembling an industrial process disturbance.

    Ramp up, a damped oscillation, then a slow relaxation back to baseline.
    """
    t = np.linspace(0.0, 1.0, length)
    rise = np.tanh(12 * (t - 0.15))
    osc = 0.6 * np.exp(-5 * t) * np.sin(2 * np.pi * 6 * t)
    fall = -np.tanh(10 * (t - 0.8))
    return amplitude * 0.5 * (rise + fall + 2 * osc)


@dataclass
class WeakLabelData:
    series: np.ndarray
    labels: np.ndarray
    pattern_starts: list
    segment_bounds: list


def synth_weakly_labeled(seed, events, pattern, slop=0.7, false_pos=0.0,
                         false_neg=0.0, gap=(1.0, 2.0), second_pattern=None):
    """Random walk with labelled events carrying an embedded pattern.

    ``slop`` is the fraction of each labelled segment that is not pattern;
    ``false_pos`` is the fraction of labelled segments that contain no
    pattern; ``false_neg`` is the fraction of embedded patterns whose label is
    dropped.  Gaps between segments are drawn uniformly from ``gap`` times the
    segment length.  With ``second_pattern`` every other event uses it.
    """
    if not 0.0 <= slop < 1.0:
        raise InvalidPlant("slop must lie in [0, 1)")
    if not 0.0 <= false_pos < 1.0 or not 0.0 <= false_neg <= 1.0:
        raise InvalidPlant("label noise fractions out of range")
    pattern = np.asarray(pattern, dtype=np.float64)
    patterns = [pattern] if second_pattern is None else [
        pattern, np.asarray(second_pattern, dtype=np.float64)]
    L = max(len(p) for p in patterns)
    seg = int(math.ceil(L / (1.0 - slop)))
    rng = np.random.default_rng(seed)
    n_fake = int(round(events * false_pos / (1.0 - false_pos)))
    kinds = np.array([0] * events + [1] * n_fake)
    rng.shuffle(kinds)
    n_drop = int(round(events * false_neg))
    real_ids = np.arange(events)
    dropped = set(rng.choice(real_ids, size=n_drop, replace=False).tolist()) if n_drop else set()

    gaps = rng.uniform(gap[0], gap[1], size=len(kinds) + 1) * seg
    n = int(gaps.sum()) + seg * len(kinds) + 1
    values = random_walk(rng, n)[0]
    labels = np.zeros(n, dtype=np.uint8)
    starts, bounds = [], []
    pos = 0
    real = 0
    for idx, kind in enumerate(kinds):
        pos += int(gaps[idx])
        lo, hi = pos, pos + seg
        if kind == 0:
            pat = patterns[real % len(patterns)]
            off = int(rng.integers(0, seg - len(pat) + 1))
            s = lo + off
            values[s:s + len(pat)] += pat * _fade_weights(len(pat))
            starts.append(s)
            if real not in dropped:
                labels[lo:hi] = 1
                bounds.append((lo, hi))
            real += 1
        else:
            labels[lo:hi] = 1
            bounds.append((lo, hi))
        pos = hi
    return WeakLabelData(series=values, labels=labels, pattern_starts=starts,
                         segment_bounds=bounds)

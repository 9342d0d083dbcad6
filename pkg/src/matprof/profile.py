"""Single-dimensional matrix profile engines.

``brute_force_profile`` is the O(n^2 m) reference; ``stamp`` is the anytime
engine (one MASS call per query window, any order, interruptible and
row-parallel); ``stomp`` is the ordered O(n^2) engine; ``StompiState``
maintains a profile while samples stream in.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from ._backend import get_kernels
from .errors import InvalidBudget, InvalidMerge, InvalidSeries, InvalidWindow
from .series import as_series, check_window, exclusion_radius, rolling_stats, znormalize
from .simsearch import MassPlan, correlations_to_distances, sliding_dot_product

logger = logging.getLogger(__name__)

REBUILD_EVERY = 4096
STOP = "stop"


@dataclass
class MatrixProfile:
    """Nearest-neighbour distances ``P`` and indices ``I`` for window length ``m``.

    Entries with no admissible neighbour hold ``P = inf`` and ``I = -1``.
    """

    P: np.ndarray
    I: np.ndarray
    m: int
    fraction_done: float = 1.0
    algorithm: str = ""
    exclusion: int = field(default=None)

    def __post_init__(self):
        if self.exclusion is None:
            self.exclusion = exclusion_radius(self.m)

    def __len__(self):
        return len(self.P)

    def copy(self):
        return MatrixProfile(self.P.copy(), self.I.copy(), self.m,
                             self.fraction_done, self.algorithm, self.exclusion)

    @classmethod
    def empty(cls, length, m, algorithm=""):
        return cls(np.full(length, np.inf), np.full(length, -1, dtype=np.int64),
                   m, 0.0, algorithm)


def _profile_length(T, m):
    T = as_series(T)
    m = check_window(m, len(T))
    l = len(T) - m + 1
    if l < 2:
        raise InvalidWindow(f"window length {m} leaves fewer than two windows")
    return T, m, l


def pair_distance(a, b):
    """Z-normalized Euclidean distance between two equal-length windows.

    Flat windows follow the same convention as the fast engines: two flat
    windows are identical, a flat and a non-flat window sit at ``sqrt(2m)``.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    fa, fb = bool(np.all(a == a[0])), bool(np.all(b == b[0]))
    if fa or fb:
        return 0.0 if (fa and fb) else math.sqrt(2.0 * len(a))
    return float(np.sqrt(np.sum((znormalize(a) - znormalize(b)) ** 2)))


def brute_force_profile(T, m):
    """Reference profile by direct comparison of every pair of windows.

    Ties go to the smallest neighbour index.
    """
    T, m, l = _profile_length(T, m)
    excl = exclusion_radius(m)
    windows = np.lib.stride_tricks.sliding_window_view(T, m)
    flat = np.all(windows == windows[:, :1], axis=1)
    Z = np.zeros((l, m))
    live = ~flat
    Z[live] = ((windows[live] - windows[live].mean(axis=1, keepdims=True))
               / windows[live].std(axis=1, keepdims=True))
    P = np.full(l, np.inf)
    I = np.full(l, -1, dtype=np.int64)
    far = math.sqrt(2.0 * m)
    for i in range(l):
        d = np.sqrt(np.sum((Z - Z[i]) ** 2, axis=1))
        if flat[i]:
            d = np.where(flat, 0.0, far)
        else:
            d[flat] = far
        d[max(0, i - excl + 1):i + excl] = np.inf
        j = int(np.argmin(d))
        if np.isfinite(d[j]):
            P[i], I[i] = d[j], j
    return MatrixProfile(P, I, m, 1.0, "brute")


# ---------------------------------------------------------------------------
# merging and anytime STAMP


def elementwise_min_merge(a, b, fraction_done=None):
    """Combine two partial profiles of the same series.

    The smaller distance wins; on an exact tie the smaller neighbour index
    wins, which makes the merge commutative and associative.  The merged
    ``fraction_done`` defaults to the larger of the two.
    """
    if a.m != b.m or len(a) != len(b):
        raise InvalidMerge(
            f"cannot merge profiles of shape ({a.m}, {len(a)}) and ({b.m}, {len(b)})")
    take = (b.P < a.P) | ((b.P == a.P) & (b.I < a.I) & (b.I >= 0))
    P = np.where(take, b.P, a.P)
    I = np.where(take, b.I, a.I)
    if fraction_done is None:
        fraction_done = max(a.fraction_done, b.fraction_done)
    return MatrixProfile(P, I, a.m, fraction_done, a.algorithm or b.algorithm,
                         a.exclusion)


def _fold_row(P, I, idx, D, excl):
    D[max(0, idx - excl + 1):idx + excl] = np.inf
    upd = (D < P) | ((D == P) & (idx < I))
    P[upd] = D[upd]
    I[upd] = idx


def _stamp_rows(plan, rows, length, excl):
    P = np.full(length, np.inf)
    I = np.full(length, -1, dtype=np.int64)
    for idx in rows:
        _fold_row(P, I, int(idx), plan.row(int(idx)).distances, excl)
    return P, I


def _resolve_budget(budget, length):
    if budget is None:
        return length
    if isinstance(budget, bool):
        raise InvalidBudget("budget must be a fraction or an iteration count")
    if isinstance(budget, (int, np.integer)):
        if budget <= 0:
            raise InvalidBudget(f"budget must be positive, got {budget}")
        return min(int(budget), length)
    try:
        budget = float(budget)
    except (TypeError, ValueError):
        raise InvalidBudget(f"budget must be a fraction or an iteration count, got {budget!r}") from None
    if not 0.0 < budget <= 1.0:
        raise InvalidBudget(f"fractional budget must lie in (0, 1], got {budget}")
    return min(length, max(1, int(math.ceil(budget * length))))


def stamp_order(length, order="shuffled", seed=None):
    if order == "sequential":
        return np.arange(length)
    if order == "shuffled":
        return np.random.default_rng(seed).permutation(length)
    raise ValueError(f"unknown order {order!r}")


def stamp(T, m, order="shuffled", seed=None, budget=None, interrupt=None,
          workers=1, report_every=None):
    """Anytime matrix profile by folding one distance profile per query window.

    Parameters
    ----------
    T : array_like
    m : int
        Window length.
    order : {"shuffled", "sequential"}
        Query order; shuffled order (seeded by ``seed``) gives the anytime
        behaviour.
    budget : int or float, optional
        An ``int`` caps the number of query windows, a ``float`` in (0, 1]
        is a fraction of them.  Default: all.
    interrupt : callable, optional
        Called as ``interrupt(fraction_done)`` every ``report_every`` rows;
        returning ``"stop"`` ends the run and returns the current snapshot.
    workers : int
        Threads sharing each batch of rows.  Results do not depend on it.

    Returns
    -------
    MatrixProfile
        With ``fraction_done < 1`` when stopped early; every entry is then
        an upper bound on the exact profile.
    """
    T, m, l = _profile_length(T, m)
    excl = exclusion_radius(m)
    n_rows = _resolve_budget(budget, l)
    rows = stamp_order(l, order, seed)[:n_rows]
    plan = MassPlan(T, m)
    if report_every is None:
        report_every = max(1, l // 100)
    workers = max(1, int(workers))
    result = MatrixProfile.empty(l, m, "stamp")
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        done = 0
        while done < n_rows:
            batch = rows[done:done + report_every]
            if pool is None:
                parts = [_stamp_rows(plan, batch, l, excl)]
            else:
                chunks = np.array_split(batch, workers)
                parts = list(pool.map(lambda c: _stamp_rows(plan, c, l, excl), chunks))
            for P, I in parts:
                result = elementwise_min_merge(result, MatrixProfile(P, I, m))
            done += len(batch)
            result.fraction_done = done / l
            if interrupt is not None and interrupt(result.fraction_done) == STOP:
                logger.debug("stamp interrupted at %.3f", result.fraction_done)
                break
    finally:
        if pool is not None:
            pool.shutdown()
    result.algorithm = "stamp"
    return result


def anytime_rmse(snapshot, reference):
    """Root-mean-square gap between a snapshot and a reference profile.

    Only positions finite in both are compared.
    """
    ok = np.isfinite(snapshot.P) & np.isfinite(reference.P)
    if not ok.any():
        return math.inf
    return float(np.sqrt(np.mean((snapshot.P[ok] - reference.P[ok]) ** 2)))


# ---------------------------------------------------------------------------
# ordered STOMP


def _centered_inputs(T, m):
    stats = rolling_stats(T, m)
    Tc = T - stats.offset
    mu = stats.means - stats.offset
    return stats, Tc, mu


def stomp(T, m, valid=None, rebuild_every=REBUILD_EVERY, backend=None):
    """Exact matrix profile with the O(n^2) diagonal dot-product recurrence.

    Parameters
    ----------
    T : array_like
    m : int
    valid : array_like of bool, optional
        Windows marked ``False`` are neither queried nor matched; their
        entries stay at ``inf``/``-1``.
    rebuild_every : int
        Rows between exact FFT restarts of the dot-product recurrence.
    backend : {"cython", "python"}, optional
        Force a kernel implementation.

    Returns
    -------
    MatrixProfile
    """
    T, m, l = _profile_length(T, m)
    k = get_kernels(backend)
    excl = exclusion_radius(m)
    stats, Tc, mu = _centered_inputs(T, m)
    flat = stats.constant.astype(np.uint8)
    if valid is None:
        ok = np.ones(l, dtype=np.uint8)
    else:
        ok = np.ascontiguousarray(valid, dtype=np.uint8)
        if len(ok) != l:
            raise InvalidWindow(f"valid mask has length {len(ok)}, expected {l}")
    P = np.full(l, np.inf)
    I = np.full(l, -1, dtype=np.int64)
    rebuild_every = max(1, int(rebuild_every))
    for start in range(0, l, rebuild_every):
        qt = np.ascontiguousarray(sliding_dot_product(Tc[start:start + m], Tc))
        k.stomp_block(Tc, mu, stats.stds, flat, ok, m, excl, qt,
                      start, min(l, start + rebuild_every), P, I)
    return MatrixProfile(P, I, m, 1.0, "stomp")


def matrix_profile(T, m, algorithm="stomp", **kwargs):
    """Dispatch to ``"stomp"``, ``"stamp"`` or ``"brute"``."""
    engines = {"stomp": stomp, "stamp": stamp, "brute": brute_force_profile}
    try:
        engine = engines[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}") from None
    return engine(T, m, **kwargs)


# ---------------------------------------------------------------------------
# incremental STOMPI


class _Buffer:
    """Append-only float/int buffer with amortised O(1) growth."""

    def __init__(self, values, dtype):
        values = np.asarray(values, dtype=dtype)
        self._data = np.empty(max(16, 2 * len(values)), dtype=dtype)
        self._data[:len(values)] = values
        self.size = len(values)

    def append(self, value):
        if self.size == len(self._data):
            grown = np.empty(2 * len(self._data), dtype=self._data.dtype)
            grown[:self.size] = self._data[:self.size]
            self._data = grown
        self._data[self.size] = value
        self.size += 1

    @property
    def view(self):
        return self._data[:self.size]


class StompiState:
    """Matrix profile of a growing series, updated in O(n) per sample.

    Construct with :meth:`from_series` (runs a batch ``stomp``), then feed
    samples to :meth:`append`.  Not safe for concurrent use.
    """

    def __init__(self, T, m, profile, backend=None):
        T = as_series(T)
        m = check_window(m, len(T))
        excl = exclusion_radius(m)
        if len(T) < m + excl + 1:
            raise InvalidWindow(
                f"incremental state needs at least m + ceil(m/2) + 1 = {m + excl + 1} samples")
        self.m = m
        self.exclusion = excl
        stats = rolling_stats(T, m)
        self.offset = stats.offset
        Tc = T - self.offset
        self._T = _Buffer(Tc, np.float64)
        self._mu = _Buffer(stats.means - self.offset, np.float64)
        self._sig = _Buffer(stats.stds, np.float64)
        self._flat = _Buffer(stats.constant, bool)
        self._P = _Buffer(profile.P, np.float64)
        self._I = _Buffer(profile.I, np.int64)
        l = len(T) - m + 1
        self.qt = sliding_dot_product(Tc[l - 1:], Tc)

    @classmethod
    def from_series(cls, T, m, backend=None):
        return cls(T, m, stomp(T, m, backend=backend))

    @property
    def series(self):
        return self._T.view + self.offset

    @property
    def means(self):
        return self._mu.view + self.offset

    @property
    def stds(self):
        return self._sig.view

    @property
    def profile(self):
        return MatrixProfile(self._P.view.copy(), self._I.view.copy(), self.m,
                             1.0, "stompi", self.exclusion)

    def __len__(self):
        return self._T.size

    def append(self, t):
        """Extend the series by one sample and update the profile."""
        t = float(t)
        if not math.isfinite(t):
            raise InvalidSeries(f"cannot append non-finite value {t!r}")
        m = self.m
        x = t - self.offset
        l_old = self._P.size
        self._T.append(x)
        T = self._T.view
        t_drop = T[l_old - 1]
        qt = np.empty(l_old + 1)
        qt[1:] = self.qt - T[:l_old] * t_drop + T[m:m + l_old] * x
        window = T[l_old:l_old + m]
        qt[0] = float(np.dot(T[:m], window))
        self.qt = qt

        mu_prev = self._mu.view[l_old - 1]
        sig_prev = self._sig.view[l_old - 1]
        mu_new = mu_prev + (x - t_drop) / m
        var_new = sig_prev * sig_prev + mu_prev * mu_prev + (x * x - t_drop * t_drop) / m - mu_new * mu_new
        flat_new = bool(np.all(window == window[0]))
        sig_new = 0.0 if flat_new else math.sqrt(max(var_new, 0.0))
        self._mu.append(mu_new)
        self._sig.append(sig_new)
        self._flat.append(flat_new)

        mu, sig, flat = self._mu.view, self._sig.view, self._flat.view
        with np.errstate(divide="ignore", invalid="ignore"):
            r = (qt - (m * mu_new) * mu) / ((m * sig_new) * sig)
        np.clip(r, -1.0, 1.0, out=r)
        D = correlations_to_distances(r, m)
        if flat_new:
            D = np.where(flat, 0.0, math.sqrt(2.0 * m))
        else:
            D[flat] = math.sqrt(2.0 * m)
        D[max(0, l_old - self.exclusion + 1):] = np.inf

        P, I = self._P.view, self._I.view
        head = D[:l_old]
        upd = (head < P) | ((head == P) & (l_old < I))
        P[upd] = head[upd]
        I[upd] = l_old
        j = int(np.argmin(D))
        if np.isfinite(D[j]):
            self._P.append(D[j])
            self._I.append(j)
        else:
            self._P.append(np.inf)
            self._I.append(-1)
        return self


def stompi_append(state, t):
    return state.append(t)


def predict_runtime(delta_cal, n_cal, n_new):
    """Quadratic extrapolation of a calibrated profile runtime to a new length."""
    if n_cal <= 0:
        raise ValueError("calibration length must be positive")
    return delta_cal / (n_cal * n_cal) * (n_new * n_new)

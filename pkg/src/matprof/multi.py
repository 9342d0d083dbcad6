"""Multidimensional (k-of-d) matrix profiles and lazy subspace recovery."""

from dataclasses import dataclass, field

import numpy as np

from ._backend import get_kernels
from .errors import InvalidPair, InvalidWindow
from .profile import REBUILD_EVERY, _resolve_budget, pair_distance, stamp_order
from .series import as_multi_series, check_window, exclusion_radius, rolling_stats
from .simsearch import MassPlan, sliding_dot_product


@dataclass
class MultiProfile:
    """Row ``k - 1`` of ``P`` is the k-dimensional matrix profile.

    ``dims`` maps row dimensions back to the caller's dimension indices (it
    differs from ``range(d)`` once dimensions have been excluded) and
    ``include`` lists the dimensions every motif is forced to span, in the
    caller's numbering.
    """

    P: np.ndarray
    I: np.ndarray
    m: int
    fraction_done: float = 1.0
    algorithm: str = ""
    exclusion: int = field(default=None)
    dims: list = None
    include: list = field(default_factory=list)

    def __post_init__(self):
        if self.exclusion is None:
            self.exclusion = exclusion_radius(self.m)
        if self.dims is None:
            self.dims = list(range(self.P.shape[0]))

    @property
    def d(self):
        return self.P.shape[0]

    def row(self, k):
        """The k-dimensional profile as a 1-D array (``k`` is 1-based)."""
        return self.P[k - 1]

    def available(self, k):
        return k >= max(1, len(self.include))

    def copy(self):
        return MultiProfile(self.P.copy(), self.I.copy(), self.m, self.fraction_done,
                            self.algorithm, self.exclusion, list(self.dims),
                            list(self.include))


@dataclass
class SubspaceResult:
    k: int
    i: int
    j: int
    dims: list
    distances: np.ndarray  # per-dimension distances for ``dims``
    all_distances: np.ndarray = None

    @property
    def mean_distance(self):
        return float(np.mean(self.distances))


def _include_mask(include, d):
    mask = np.zeros(d, dtype=np.uint8)
    for k in include or ():
        mask[k] = 1
    return mask


def _k_profiles(D, inc):
    """Prefix averages of the per-dimension distance columns of ``D``.

    Included dimensions are summed first; the rest are sorted ascending.
    Returns the rows for ``k = max(1, n_inc) .. d``.
    """
    n_inc = int(inc.sum())
    free = D[~inc.astype(bool)]
    parts = []
    if n_inc:
        acc = np.zeros(D.shape[1])
        for k in np.flatnonzero(inc):
            acc = acc + D[k]
        parts.append(acc[np.newaxis])
    parts.append(np.sort(free, axis=0))
    prefix = np.cumsum(np.vstack(parts), axis=0)
    first = max(1, n_inc)
    return first, prefix / np.arange(first, first + prefix.shape[0])[:, np.newaxis]


def mstamp(T, m, order="sequential", seed=None, budget=None, include=None,
           rebuild_every=REBUILD_EVERY, backend=None):
    """k-dimensional matrix profiles for every k in one pass.

    Parameters
    ----------
    T : array_like, shape (d, n)
    m : int
    order : {"sequential", "shuffled"}
        Sequential order without a budget uses the ordered dot-product
        recurrence in every dimension; otherwise each query window runs one
        MASS call per dimension in the given order (anytime).
    budget : int or float, optional
        As for :func:`matprof.profile.stamp`.
    include : list of int, optional
        Dimensions every motif must span.  Rows ``k < len(include)`` stay at
        ``inf``.

    Returns
    -------
    MultiProfile
    """
    T = as_multi_series(T)
    d, n = T.shape
    m = check_window(m, n)
    l = n - m + 1
    if l < 2:
        raise InvalidWindow(f"window length {m} leaves fewer than two windows")
    excl = exclusion_radius(m)
    include = sorted(set(int(k) for k in (include or ())))
    inc = _include_mask(include, d)
    stats = [rolling_stats(T[k], m) for k in range(d)]
    P = np.full((d, l), np.inf)
    I = np.full((d, l), -1, dtype=np.int64)

    if order == "sequential" and budget is None:
        kern = get_kernels(backend)
        Tc = np.ascontiguousarray([T[k] - stats[k].offset for k in range(d)])
        mu = np.ascontiguousarray([stats[k].means - stats[k].offset for k in range(d)])
        sig = np.ascontiguousarray([s.stds for s in stats])
        flat = np.ascontiguousarray([s.constant for s in stats], dtype=np.uint8)
        step = max(1, int(rebuild_every))
        for start in range(0, l, step):
            qt = np.ascontiguousarray(
                [sliding_dot_product(Tc[k, start:start + m], Tc[k]) for k in range(d)])
            kern.mstomp_block(Tc, mu, sig, flat, inc, m, excl, qt, start,
                              min(l, start + step), P, I)
        return MultiProfile(P, I, m, 1.0, "mstomp", excl, include=include)

    n_rows = _resolve_budget(budget, l)
    rows = stamp_order(l, order, seed)[:n_rows]
    plans = [MassPlan(T[k], m, stats[k]) for k in range(d)]
    D = np.empty((d, l))
    for idx in rows:
        idx = int(idx)
        for k in range(d):
            D[k] = plans[k].row(idx).distances
        first, rows_k = _k_profiles(D, inc)
        lo, hi = max(0, idx - excl + 1), idx + excl
        for t, row in enumerate(rows_k):
            kk = first - 1 + t
            row[lo:hi] = np.inf
            upd = (row < P[kk]) | ((row == P[kk]) & (idx < I[kk]))
            P[kk, upd] = row[upd]
            I[kk, upd] = idx
    return MultiProfile(P, I, m, n_rows / l, "mstamp", excl, include=include)


def dimension_distances(T, m, i, j):
    """Per-dimension z-normalized distances between windows ``i`` and ``j``."""
    T = as_multi_series(T)
    return np.array([pair_distance(T[k, i:i + m], T[k, j:j + m])
                     for k in range(T.shape[0])])


def subspace(T, m, i, j, k, include=None):
    """The ``k`` dimensions on which windows ``i`` and ``j`` match best.

    Included dimensions are always chosen first; the remaining slots go to
    the smallest per-dimension distances, ties to the lower dimension index.
    """
    T = as_multi_series(T)
    d, n = T.shape
    m = check_window(m, n)
    i, j = int(i), int(j)
    l = n - m + 1
    if not (0 <= i < l and 0 <= j < l):
        raise InvalidPair(f"pair ({i}, {j}) outside [0, {l})")
    if abs(i - j) < exclusion_radius(m):
        raise InvalidPair(f"pair ({i}, {j}) lies inside the exclusion zone")
    include = sorted(set(include or ()))
    if not max(1, len(include)) <= k <= d:
        raise InvalidPair(f"k={k} outside [{max(1, len(include))}, {d}]")
    dist = dimension_distances(T, m, i, j)
    free = [q for q in np.argsort(dist, kind="stable") if q not in include]
    dims = sorted(list(include) + [int(q) for q in free[:k - len(include)]])
    return SubspaceResult(k=k, i=i, j=j, dims=dims, distances=dist[dims],
                          all_distances=dist)

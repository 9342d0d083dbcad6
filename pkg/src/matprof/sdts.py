"""Shape-dictionary learning from weakly labelled series.

A dictionary is a set of (shape, threshold) pairs.  A window of the series
is positive when its z-normalized distance to any shape falls below that
shape's threshold.  Training mines candidate shapes from the positively
labelled segments with the matrix profile, tunes each threshold by
golden-section search on the F-beta score, and grows the dictionary
greedily.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import json
import math
import warnings

import numpy as np

from .errors import (InvalidAnnotation, InvalidInterval, InvalidLag, InvalidShape,
                     NoCandidates, NoPositives)
from .profile import stomp
from .series import as_series, rolling_stats
from .simsearch import MassPlan

WINDOW = "window"
START = "start"
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
N_PROBES = 16


def as_annotation(B, n=None, name="B"):
    """Validate a Boolean annotation and return it as a ``uint8`` array."""
    arr = np.asarray(B)
    if arr.ndim != 1:
        raise InvalidAnnotation(f"{name} must be one-dimensional")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise InvalidAnnotation(f"{name} must contain only 0 and 1")
    if n is not None and len(arr) != n:
        raise InvalidAnnotation(f"{name} has length {len(arr)}, expected {n}")
    return arr.astype(np.uint8)


def f_beta(B, B_pred, beta=1.0):
    """Point-wise F-beta score of a predicted annotation against the truth.

    Parameters
    ----------
    B, B_pred : array_like of {0, 1}
        Ground truth and prediction, equal length.
    beta : float
        Weight of recall relative to precision; must be positive.

    Returns
    -------
    float
        ``(1 + beta**2) P R / (beta**2 P + R)``, or 0 when ``P + R = 0``.
    """
    B = as_annotation(B)
    B_pred = as_annotation(B_pred, len(B), "B_pred")
    if not beta > 0:
        raise InvalidAnnotation(f"beta must be positive, got {beta}")
    return _f_beta_counts(*_counts(B.astype(bool), B_pred.astype(bool)), beta)


def _counts(truth, pred):
    tp = int(np.count_nonzero(truth & pred))
    fp = int(np.count_nonzero(pred)) - tp
    fn = int(np.count_nonzero(truth)) - tp
    return tp, fp, fn


def _f_beta_counts(tp, fp, fn, beta):
    if tp == 0:
        return 0.0
    p = tp / (tp + fp)
    r = tp / (tp + fn)
    b2 = beta * beta
    return (1 + b2) * p * r / (b2 * p + r)


def _flags(dist, h, m, n, mode=WINDOW):
    """Annotation marking windows whose distance is below ``h``."""
    hits = dist < h
    if mode == START:
        out = np.zeros(n, dtype=bool)
        out[:len(hits)] = hits
        return out
    # window mode: every sample covered by a hit window is positive
    cover = np.zeros(n + 1, dtype=np.int64)
    cover[:len(hits)] += hits
    cover[m:m + len(hits)] -= hits
    return np.cumsum(cover[:n]) > 0


@dataclass(frozen=True)
class Shape:
    values: np.ndarray
    threshold: float

    @property
    def m(self):
        return len(self.values)


@dataclass
class ShapeDictionary:
    """Learned shapes with per-shape thresholds.

    ``history`` records the training F-beta after each accepted addition.
    """

    shapes: list = field(default_factory=list)
    beta: float = 1.0
    m_set: list = field(default_factory=list)
    history: list = field(default_factory=list)

    def __len__(self):
        return len(self.shapes)

    @property
    def thresholds(self):
        return [s.threshold for s in self.shapes]

    @property
    def max_length(self):
        return max((s.m for s in self.shapes), default=0)

    def to_dict(self):
        return {
            "beta": float(self.beta),
            "m_set": [int(m) for m in self.m_set],
            "shapes": [{"values": [float(v) for v in s.values],
                        "threshold": float(s.threshold), "m": int(s.m)}
                       for s in self.shapes],
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            shapes = []
            for entry in doc["shapes"]:
                values = np.asarray(entry["values"], dtype=np.float64)
                if "m" in entry and int(entry["m"]) != len(values):
                    raise InvalidShape(f"shape declares m={entry['m']} but has "
                                       f"{len(values)} values")
                h = float(entry["threshold"])
                if not 0 < h <= 2 * math.sqrt(len(values)):
                    raise InvalidShape(f"threshold {h} outside (0, 2*sqrt(m)]")
                shapes.append(Shape(values, h))
            return cls(shapes, float(doc.get("beta", 1.0)),
                       [int(m) for m in doc.get("m_set", [])])
        except (KeyError, TypeError) as exc:
            raise InvalidShape(f"malformed dictionary document: {exc}") from None

    def dumps(self):
        # json writes floats with repr(), which round-trips binary64 exactly
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# thresholds


def _default_interval(m):
    return (0.0, 2.0 * math.sqrt(m))


def _check_interval(interval):
    lo, hi = (float(v) for v in interval)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo < 0 or hi <= lo:
        raise InvalidInterval(f"threshold interval [{lo}, {hi}] is degenerate")
    return lo, hi


def _search_threshold(dist, m, truth, beta, interval, base=None, mode=WINDOW):
    """Golden-section maximisation of F-beta over the threshold.

    ``base`` is the annotation contributed by the other shapes of the
    dictionary (OR-ed with this shape's flags).  Sixteen uniform probes,
    endpoints included, pick the bracket; golden-section narrows it to
    ``1e-3`` of the interval.  Among equally scoring thresholds the middle
    one is returned, which keeps the decision boundary away from the
    training extremes.
    """
    lo, hi = interval
    n = len(truth)
    n_true = int(np.count_nonzero(truth))
    cache = {}

    def score(h):
        if h not in cache:
            pred = _flags(dist, h, m, n, mode)
            if base is not None:
                pred = pred | base
            tp = int(np.count_nonzero(truth & pred))
            cache[h] = _f_beta_counts(tp, int(np.count_nonzero(pred)) - tp,
                                      n_true - tp, beta)
        return cache[h]

    probes = np.linspace(lo, hi, N_PROBES)
    values = [score(float(h)) for h in probes]
    best = int(np.argmax(values))
    a = float(probes[max(0, best - 1)])
    b = float(probes[min(N_PROBES - 1, best + 1)])
    tol = 1e-3 * (hi - lo)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    while b - a > tol:
        if score(c) >= score(d):
            b, d = d, c
            c = b - GOLDEN * (b - a)
        else:
            a, c = c, d
            d = a + GOLDEN * (b - a)
    top = max(cache.values())
    if top == 0.0:
        return 0.5 * (lo + hi), 0.0
    winners = sorted(h for h, f in cache.items() if f == top and h > 0)
    mid = winners[len(winners) // 2]
    return mid, top


def golden_section_threshold(shape, T, B, beta=1.0, interval=None, mode=WINDOW,
                             distances=None):
    """Best single-shape threshold for annotation ``B``.

    Parameters
    ----------
    shape : array_like
    T : array_like
        Series of length ``n >= len(shape)``.
    B : array_like of {0, 1}
        Labels for ``T``.
    beta : float
    interval : (float, float), optional
        Search range; defaults to ``(0, 2 sqrt(m))``, the full range of
        z-normalized distances.
    mode : {"window", "start"}
        Whether a match flags its whole window or only its start.
    distances : ndarray, optional
        Precomputed distance profile of ``shape`` against ``T``.

    Returns
    -------
    (float, float)
        The threshold and the F-beta score it achieves.  When no threshold
        scores above zero, the midpoint of the interval and 0.
    """
    shape = np.asarray(shape, dtype=np.float64)
    T = as_series(T)
    m = len(shape)
    if m < 2 or m > len(T):
        raise InvalidShape(f"shape length {m} outside [2, {len(T)}]")
    B = as_annotation(B, len(T))
    lo, hi = _check_interval(interval if interval is not None else _default_interval(m))
    if distances is None:
        distances = MassPlan(T, m).profile(shape).distances
    return _search_threshold(distances, m, B.astype(bool), beta, (lo, hi), mode=mode)


# ---------------------------------------------------------------------------
# training


def positive_segments(B):
    """``(start, stop)`` of every maximal run of ones."""
    B = as_annotation(B).astype(np.int8)
    edges = np.diff(np.concatenate(([0], B, [0])))
    return list(zip(np.flatnonzero(edges == 1).tolist(),
                    np.flatnonzero(edges == -1).tolist()))


@dataclass
class _Candidate:
    values: np.ndarray
    m: int
    segment: int
    position: int  # start in the original series
    distances: np.ndarray = None
    threshold: float = 0.0
    score: float = 0.0


def _mine_candidates(T, segments, m_set):
    """One lowest-profile window per (segment, m) from the joined positives."""
    joined = np.concatenate([T[a:b] for a, b in segments])
    starts = np.cumsum([0] + [b - a for a, b in segments])
    out = []
    for m in m_set:
        usable = [s for s, (a, b) in enumerate(segments) if b - a >= m]
        skipped = len(segments) - len(usable)
        if skipped:
            warnings.warn(f"{skipped} positive segment(s) shorter than m={m} skipped",
                          stacklevel=3)
        if not usable or len(joined) - m + 1 < 2:
            continue
        l = len(joined) - m + 1
        # windows crossing a junction between segments are not real data
        valid = np.zeros(l, dtype=bool)
        for s in usable:
            valid[starts[s]:starts[s + 1] - m + 1] = True
        if valid.sum() < 2:
            continue
        P = stomp(joined, m, valid=valid).P
        for s in usable:
            lo, hi = starts[s], starts[s + 1] - m + 1
            seg = P[lo:hi]
            if not np.isfinite(seg).any():
                continue
            off = int(np.argmin(seg))
            pos = segments[s][0] + off
            out.append(_Candidate(T[pos:pos + m].copy(), m, s, pos))
    return out


def _predict_from(cands, thresholds, n, mode):
    pred = np.zeros(n, dtype=bool)
    for c, h in zip(cands, thresholds):
        pred |= _flags(c.distances, h, c.m, n, mode)
    return pred


def train(T, B, m_set, beta=1.0, mode=WINDOW, workers=1, min_gain=1e-3):
    """Learn a shape dictionary from a weakly labelled series.

    Parameters
    ----------
    T : array_like
    B : array_like of {0, 1}
        Labels, same length as ``T``.  Positive segments are the maximal
        runs of ones.
    m_set : iterable of int
        Shape lengths to mine.
    beta : float
        F-beta weight used for every selection decision.
    mode : {"window", "start"}
        Flagging mode used when scoring.
    workers : int
        Threads for the independent per-candidate threshold searches.
    min_gain : float
        Smallest training-score gain that counts as an improvement; smaller
        gains end the greedy growth (they fit label noise, not shapes).

    Returns
    -------
    ShapeDictionary

    Notes
    -----
    Candidates are added greedily, each time the one that most improves the
    joint training score; after every addition all thresholds get one pass
    of coordinate ascent.  Growth stops when nothing improves the score or
    when the dictionary holds half of the candidates.
    """
    T = as_series(T)
    n = len(T)
    B = as_annotation(B, n)
    m_set = sorted(set(int(m) for m in m_set))
    if not m_set or m_set[0] < 2:
        raise InvalidShape(f"shape lengths must be >= 2, got {m_set}")
    segments = positive_segments(B)
    if not segments:
        raise NoPositives("annotation has no positive segment")
    cands = _mine_candidates(T, segments, [m for m in m_set if m <= n])
    if not cands:
        raise NoCandidates(f"no positive segment is long enough for m in {m_set}")
    truth = B.astype(bool)

    plans = {m: MassPlan(T, m, rolling_stats(T, m)) for m in {c.m for c in cands}}
    for c in cands:
        c.distances = plans[c.m].profile(c.values).distances

    def solo(c):
        return _search_threshold(c.distances, c.m, truth, beta,
                                 _default_interval(c.m), mode=mode)

    with ThreadPoolExecutor(max_workers=max(1, int(workers))) as pool:
        for c, (h, f) in zip(cands, pool.map(solo, cands)):
            c.threshold, c.score = h, f

    cap = max(1, len(cands) // 2)
    chosen, thresholds, history = [], [], []
    current = 0.0
    remaining = list(range(len(cands)))
    while len(chosen) < cap and remaining:
        base = _predict_from([cands[k] for k in chosen], thresholds, n, mode)
        best = None
        for k in remaining:
            c = cands[k]
            h, f = _search_threshold(c.distances, c.m, truth, beta,
                                     _default_interval(c.m), base=base, mode=mode)
            if best is None or f > best[2]:
                best = (k, h, f)
        k, h, f = best
        if f <= current + min_gain:
            break
        chosen.append(k)
        thresholds.append(h)
        remaining.remove(k)
        current = f
        # one coordinate-ascent pass over every threshold
        for t, kk in enumerate(chosen):
            others = [cands[q] for q in chosen if q != kk]
            rest = [thresholds[s] for s, q in enumerate(chosen) if q != kk]
            base = _predict_from(others, rest, n, mode)
            c = cands[kk]
            h2, f2 = _search_threshold(c.distances, c.m, truth, beta,
                                       _default_interval(c.m), base=base, mode=mode)
            if f2 > current:
                thresholds[t], current = h2, f2
        assert not history or current >= history[-1]
        history.append(current)

    shapes = [Shape(cands[k].values, float(h)) for k, h in zip(chosen, thresholds)]
    return ShapeDictionary(shapes, float(beta), m_set, history)


# ---------------------------------------------------------------------------
# prediction


def predict(T, dictionary, mode=WINDOW):
    """Annotate ``T`` with a learned dictionary.

    Every shape's distance profile is thresholded; in window mode a match
    flags all ``m`` samples of the matched window, in start mode only its
    first sample.  The result is the union over shapes.
    """
    T = as_series(T)
    n = len(T)
    pred = np.zeros(n, dtype=bool)
    for s in dictionary.shapes:
        if s.m > n:
            raise InvalidShape(f"shape of length {s.m} is longer than the series ({n})")
        dist = MassPlan(T, s.m).profile(s.values).distances
        pred |= _flags(dist, s.threshold, s.m, n, mode)
    return pred.astype(np.uint8)


class StreamingPredictor:
    """Sample-at-a-time prediction with a fixed dictionary.

    :meth:`push` returns 1 when the window ending at the new sample matches
    any shape and 0 otherwise (always 0 until ``max_length`` samples have
    arrived).  :attr:`annotation` is the running annotation in the chosen
    flagging mode; matches extend backwards over their window, so it equals
    :func:`predict` on the samples seen so far.
    """

    def __init__(self, dictionary, mode=WINDOW):
        self.dictionary = dictionary
        self.mode = mode
        self._warmup = dictionary.max_length
        self._buf = np.zeros(max(1, self._warmup))
        self._bits = []
        self._n = 0
        self._shapes = []
        for s in dictionary.shapes:
            v = np.asarray(s.values, dtype=np.float64)
            flat = bool(np.all(v == v[0]))
            z = np.zeros_like(v) if flat else (v - v.mean()) / v.std()
            self._shapes.append((s.m, z, flat, s.threshold))

    def __len__(self):
        return self._n

    @property
    def annotation(self):
        return np.array(self._bits, dtype=np.uint8)

    def _distance(self, window, z, flat):
        m = len(window)
        w_flat = bool(np.all(window == window[0]))
        if flat or w_flat:
            return 0.0 if flat and w_flat else math.sqrt(2.0 * m)
        w = window - window.mean()
        r = float(np.dot(z, w)) / (m * w.std())
        r = min(1.0, max(-1.0, r))
        return math.sqrt(max(2.0 * m * (1.0 - r), 0.0))

    def push(self, x):
        x = float(x)
        if not math.isfinite(x):
            raise InvalidAnnotation(f"non-finite sample {x!r}")
        self._buf = np.roll(self._buf, -1)
        self._buf[-1] = x
        self._n += 1
        self._bits.append(0)
        if self._n < self._warmup or not self._shapes:
            return 0
        hit = 0
        for m, z, flat, h in self._shapes:
            if self._distance(self._buf[-m:], z, flat) < h:
                hit = 1
                start = self._n - m
                if self.mode == START:
                    self._bits[start] = 1
                else:
                    self._bits[start:] = [1] * m
        return hit

    def extend(self, xs):
        return [self.push(x) for x in xs]


def apply_lag(B, L):
    """Drop the first ``L`` labels so shapes are learned ``L`` samples early.

    The caller truncates the series by ``L`` at its tail (see
    :func:`lag_pair`).
    """
    B = as_annotation(B)
    if not isinstance(L, (int, np.integer)) or not 0 <= L < len(B):
        raise InvalidLag(f"lag {L!r} outside [0, {len(B)})")
    return B[L:].copy()


def lag_pair(T, B, L):
    """``(T[:n - L], B[L:])`` — series and labels aligned for precursor learning."""
    T = as_series(T)
    B = apply_lag(as_annotation(B, len(T)), L)
    return T[:len(T) - L], B


def shapelet_transform(X, shapes):
    """Feature matrix of best correlation and best distance per shape.

    Parameters
    ----------
    X : sequence of array_like
        Series, each longer than every shape.
    shapes : sequence of array_like

    Returns
    -------
    ndarray, shape (len(X), 2 * len(shapes))
        Column ``2j`` is the maximum Pearson correlation of shape ``j`` with
        any window of the series and column ``2j + 1`` the minimum
        z-normalized distance.
    """
    shapes = [np.asarray(s, dtype=np.float64) for s in shapes]
    F = np.empty((len(X), 2 * len(shapes)))
    for r, x in enumerate(X):
        x = as_series(x)
        for j, s in enumerate(shapes):
            if len(s) < 2 or len(s) > len(x):
                raise InvalidShape(f"shape {j} of length {len(s)} does not fit "
                                   f"series {r} of length {len(x)}")
            prof = MassPlan(x, len(s)).profile(s)
            F[r, 2 * j] = prof.correlations.max()
            F[r, 2 * j + 1] = prof.distances.min()
    return F

"""Motifs, discords, constrained search and MDL-based dimensionality selection."""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import InvalidBits, InvalidConstraint, InvalidCount, InvalidPair
from .multi import MultiProfile, mstamp, subspace
from .series import as_multi_series, check_window, exclusion_radius, znormalize


@dataclass
class MotifResult:
    pair: tuple
    distance: float
    k: int = 1
    dims: list = field(default_factory=lambda: [0])
    rank: int = 0
    bits: float = None


@dataclass
class DiscordResult:
    position: int
    distance: float
    rank: int = 0


def _mask_zone(masked, center, excl):
    masked[max(0, center - excl + 1):center + excl] = True


def _next_pair(P, I, masked):
    """Smallest unmasked entry of ``P`` whose neighbour is also unmasked.

    Entries pointing into a masked zone are dropped on the way (set to inf
    in the working copy ``P``).  Returns ``None`` when nothing is left.
    """
    while True:
        i = int(np.argmin(P))
        if not np.isfinite(P[i]):
            return None
        j = int(I[i])
        if j < 0 or masked[j]:
            P[i] = np.inf
            continue
        return i


def extract_motifs(profile, T, count, k=1):
    """Top-``count`` motif pairs from a completed profile.

    After each pick, the exclusion zones around both members are masked; a
    position whose nearest neighbour falls inside a masked zone is skipped.

    Parameters
    ----------
    profile : MatrixProfile or MultiProfile
    T : array_like
        The profiled series (``(d, n)`` for a multidimensional profile).
    count : int
    k : int
        Row to read from a ``MultiProfile``.
    """
    if count < 1:
        raise InvalidCount(f"count must be >= 1, got {count}")
    multi = isinstance(profile, MultiProfile)
    if multi:
        P = profile.P[k - 1].copy()
        I = profile.I[k - 1]
    else:
        P = profile.P.copy()
        I = profile.I
        k = 1
    excl = profile.exclusion
    masked = np.zeros(len(P), dtype=bool)
    out = []
    Tm = as_multi_series(T)
    while len(out) < count:
        P[masked] = np.inf
        i = _next_pair(P, I, masked)
        if i is None:
            break
        j = int(I[i])
        if multi:
            sub = subspace(Tm[profile.dims], profile.m, i, j, k,
                           include=[profile.dims.index(q) for q in profile.include])
            dims = [profile.dims[q] for q in sub.dims]
        else:
            dims = [0]
        out.append(MotifResult(pair=(i, j), distance=float(P[i]), k=k, dims=dims,
                               rank=len(out)))
        _mask_zone(masked, i, excl)
        _mask_zone(masked, j, excl)
    return out


def extract_discords(profile, count):
    """Top-``count`` discords: largest finite profile values, zone-masked."""
    if count < 1:
        raise InvalidCount(f"count must be >= 1, got {count}")
    P = np.where(np.isfinite(profile.P), profile.P, -np.inf)
    out = []
    while len(out) < count:
        i = int(np.argmax(P))
        if not np.isfinite(P[i]):
            break
        out.append(DiscordResult(position=i, distance=float(P[i]), rank=len(out)))
        P[max(0, i - profile.exclusion + 1):i + profile.exclusion] = -np.inf
    return out


def constrained_mstamp(T, m, include=(), exclude=(), **kwargs):
    """Multidimensional profile with whitelisted and blacklisted dimensions.

    Excluded dimensions are dropped before profiling; included ones are
    forced into every k-dimensional match, so rows ``k < len(include)`` are
    unavailable (``inf``).  Returned ``dims``/``include`` use the caller's
    dimension numbering.
    """
    T = as_multi_series(T)
    d = T.shape[0]
    include, exclude = set(int(q) for q in include), set(int(q) for q in exclude)
    if include & exclude:
        raise InvalidConstraint(
            f"dimensions {sorted(include & exclude)} are both included and excluded")
    bad = [q for q in include | exclude if not 0 <= q < d]
    if bad:
        raise InvalidConstraint(f"dimensions {bad} outside [0, {d})")
    keep = [q for q in range(d) if q not in exclude]
    if not keep:
        raise InvalidConstraint("every dimension is excluded")
    local_inc = [keep.index(q) for q in sorted(include)]
    mp = mstamp(T[keep], m, include=local_inc, **kwargs)
    mp.dims = keep
    mp.include = sorted(include)
    return mp


# ---------------------------------------------------------------------------
# minimum description length


@dataclass(frozen=True)
class BitCost:
    direct: int
    encoded: int


def discretize(a, b, bits):
    """Jointly min-max scale two vectors onto ``bits``-bit integers."""
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    top = (1 << bits) - 1
    if hi == lo:
        return np.zeros(len(a), dtype=np.int64), np.zeros(len(b), dtype=np.int64)
    scale = top / (hi - lo)
    return (np.rint((a - lo) * scale).astype(np.int64),
            np.rint((b - lo) * scale).astype(np.int64))


def difference_width(delta):
    """Bits per cell needed to store a difference vector.

    An all-zero difference costs one bit per cell; otherwise enough bits for
    the largest magnitude, plus a sign bit only when both signs occur.
    """
    delta = np.asarray(delta)
    peak = int(np.abs(delta).max()) if len(delta) else 0
    if peak == 0:
        return 1
    width = int(math.ceil(math.log2(peak + 1)))
    if delta.min() < 0 < delta.max():
        width += 1
    return width


def pair_encoding(ref, other, bits):
    """Cost of storing two ``bits``-bit integer vectors directly vs. as reference + difference."""
    ref = np.asarray(ref, dtype=np.int64)
    other = np.asarray(other, dtype=np.int64)
    m = len(ref)
    return BitCost(direct=2 * m * bits,
                   encoded=m * bits + m * difference_width(other - ref))


def _check_pair(m, i, j, l):
    if not (0 <= i < l and 0 <= j < l):
        raise InvalidPair(f"pair ({i}, {j}) outside [0, {l})")
    if abs(i - j) < exclusion_radius(m):
        raise InvalidPair(f"pair ({i}, {j}) lies inside the exclusion zone")


def mdl_bits(T, m, pair, dims, b=4, discretized=False):
    """Description length of a motif pair over ``dims``.

    Each dimension's two windows are z-normalized, jointly discretized to
    ``b``-bit integers and stored as one reference window plus the
    difference.  With ``discretized=True`` the raw values are taken to be
    ``b``-bit integers already.

    Returns
    -------
    BitCost
        ``direct`` (both windows stored verbatim) and ``encoded`` totals.
    """
    if b < 2:
        raise InvalidBits(f"bit depth must be >= 2, got {b}")
    T = as_multi_series(T)
    m = check_window(m, T.shape[1])
    i, j = (int(v) for v in pair)
    _check_pair(m, i, j, T.shape[1] - m + 1)
    direct = encoded = 0
    for q in dims:
        a, c = T[q, i:i + m], T[q, j:j + m]
        if discretized:
            ia, ic = np.rint(a).astype(np.int64), np.rint(c).astype(np.int64)
            if ia.min() < 0 or ic.min() < 0 or max(ia.max(), ic.max()) >= (1 << b):
                raise InvalidBits(f"values do not fit in {b} bits")
        else:
            ia, ic = discretize(znormalize(a), znormalize(c), b)
        cost = pair_encoding(ia, ic, b)
        direct += cost.direct
        encoded += cost.encoded
    return BitCost(direct, encoded)


def description_length(T, m, pair, dims, b=4, all_dims=None):
    """Bits for every dimension in ``all_dims``: motif dims encoded, the rest verbatim."""
    T = as_multi_series(T)
    if all_dims is None:
        all_dims = range(T.shape[0])
    rest = len([q for q in all_dims if q not in set(dims)])
    return mdl_bits(T, m, pair, dims, b).encoded + rest * 2 * m * b


@dataclass
class MdlEntry:
    k: int
    pair: tuple
    dims: list
    profile_value: float
    bits: int


@dataclass
class MdlReport:
    entries: list
    chosen_k: int

    @property
    def chosen(self):
        for e in self.entries:
            if e.k == self.chosen_k:
                return e
        return None

    def elbow(self):
        """``(k, profile value)`` pairs for plotting."""
        return [(e.k, e.profile_value) for e in self.entries]


def _candidate(T, mp, k, P_row, I_row, masked, b):
    i = _next_pair(P_row, I_row, masked)
    if i is None:
        return None
    j = int(I_row[i])
    local_inc = [mp.dims.index(q) for q in mp.include]
    sub = subspace(T[mp.dims], mp.m, i, j, k, include=local_inc)
    dims = [mp.dims[q] for q in sub.dims]
    bits = description_length(T, mp.m, (i, j), dims, b, all_dims=mp.dims)
    return MdlEntry(k=k, pair=(i, j), dims=dims, profile_value=float(P_row[i]),
                    bits=bits)


def select_natural_k(T, m, profile=None, b=4):
    """Choose the motif dimensionality whose best pair compresses the data most."""
    if b < 2:
        raise InvalidBits(f"bit depth must be >= 2, got {b}")
    T = as_multi_series(T)
    mp = profile if profile is not None else mstamp(T, m)
    masked = np.zeros(mp.P.shape[1], dtype=bool)
    entries = []
    for k in range(1, mp.d + 1):
        if not mp.available(k):
            continue
        e = _candidate(T, mp, k, mp.P[k - 1].copy(), mp.I[k - 1], masked, b)
        if e is not None:
            entries.append(e)
    chosen = min(entries, key=lambda e: (e.bits, e.k)).k if entries else None
    return MdlReport(entries, chosen)


def iterative_mdl_motifs(T, m, iterations, b=4, profile=None):
    """Repeatedly take the cheapest k-dimensional motif and mask it out.

    Stops after ``iterations`` rounds or when no admissible pair is left.
    """
    if iterations < 1:
        raise InvalidCount(f"iterations must be >= 1, got {iterations}")
    T = as_multi_series(T)
    mp = profile if profile is not None else mstamp(T, m)
    P = mp.P.copy()
    masked = np.zeros(P.shape[1], dtype=bool)
    out = []
    for _ in range(iterations):
        P[:, masked] = np.inf
        best = None
        for k in range(1, mp.d + 1):
            if not mp.available(k):
                continue
            e = _candidate(T, mp, k, P[k - 1], mp.I[k - 1], masked, b)
            if e is not None and (best is None or (e.bits, e.k) < (best.bits, best.k)):
                best = e
        if best is None:
            break
        i, j = best.pair
        out.append(MotifResult(pair=best.pair, distance=best.profile_value, k=best.k,
                               dims=best.dims, rank=len(out), bits=best.bits))
        _mask_zone(masked, i, mp.exclusion)
        _mask_zone(masked, j, mp.exclusion)
    return out

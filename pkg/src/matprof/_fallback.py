"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Semantics are identical; each row is vectorised instead of looped.
"""

import numpy as np


def _row_distances(qt, mu_i, mu_j, sig_i, sig_j, flat_i, flat_j, m):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (qt - (m * mu_i) * mu_j) / ((m * sig_i) * sig_j)
    np.clip(r, -1.0, 1.0, out=r)
    d = np.sqrt(np.maximum(2.0 * m * (1.0 - r), 0.0))
    if flat_i:
        d = np.where(flat_j, 0.0, np.sqrt(2.0 * m))
    else:
        d[flat_j] = np.sqrt(2.0 * m)
    return d


def _fold_pairs(P, I, i, js, d):
    """Fold distances between window ``i`` and windows ``js`` into both ends."""
    if len(js) == 0:
        return
    t = int(np.argmin(d))
    if d[t] < P[i] or (d[t] == P[i] and js[t] < I[i]):
        P[i] = d[t]
        I[i] = js[t]
    cur = P[js]
    upd = (d < cur) | ((d == cur) & (i < I[js]))
    P[js[upd]] = d[upd]
    I[js[upd]] = i


def stomp_block(T, mu, sig, flat, valid, m, excl, qt, row_start, row_end, P, I):
    l = len(mu)
    flat = flat.astype(bool)
    valid = valid.astype(bool)
    for i in range(row_start, row_end):
        if i > row_start:
            qt[i:l] = (qt[i - 1:l - 1] - T[i - 1] * T[i - 1:l - 1]
                       + T[i + m - 1] * T[i + m - 1:l + m - 1])
        if not valid[i]:
            continue
        js = np.arange(i + excl, l)
        js = js[valid[i + excl:]]
        d = _row_distances(qt[js], mu[i], mu[js], sig[i], sig[js],
                           flat[i], flat[js], float(m))
        _fold_pairs(P, I, i, js, d)


def mstomp_block(T, mu, sig, flat, include, m, excl, qt, row_start, row_end, P, I):
    d_dim, l = mu.shape
    flat = flat.astype(bool)
    inc = include.astype(bool)
    n_inc = int(inc.sum())
    free = np.flatnonzero(~inc)
    for i in range(row_start, row_end):
        if i > row_start:
            qt[:, i:l] = (qt[:, i - 1:l - 1] - T[:, i - 1:i] * T[:, i - 1:l - 1]
                          + T[:, i + m - 1:i + m] * T[:, i + m - 1:l + m - 1])
        js = np.arange(i + excl, l)
        if len(js) == 0:
            continue
        D = np.empty((d_dim, len(js)))
        for k in range(d_dim):
            D[k] = _row_distances(qt[k, js], mu[k, i], mu[k, js], sig[k, i],
                                  sig[k, js], flat[k, i], flat[k, js], float(m))
        head = D[inc].sum(axis=0, keepdims=True) if n_inc else np.zeros((0, len(js)))
        if n_inc > 1:
            # sequential sum, matching the compiled accumulation order
            acc = np.zeros(len(js))
            for k in np.flatnonzero(inc):
                acc = acc + D[k]
            head = acc[np.newaxis]
        stacked = np.vstack([head, np.sort(D[free], axis=0)])
        prefix = np.cumsum(stacked, axis=0)
        for t in range(prefix.shape[0]):
            k = (n_inc - 1) + t if n_inc else t
            _fold_pairs(P[k], I[k], i, js, prefix[t] / (k + 1))

"""Series files, converters and the JSON profile document.

Two series formats are supported:

``csv``
    One column per dimension, one sample per row, optional header row.
``tsbin``
    ``b"MPTS"``, a ``u8`` version (1), ``u32`` dimension count ``d``,
    ``u64`` length ``n``, then ``d * n`` float64 values, dimension-major.
    All integers and floats are little-endian.
"""

import csv
from dataclasses import dataclass, field
import datetime
import hashlib
import json
import math
import os
import struct

import numpy as np

from .errors import InvalidSeries, ParseError
from .multi import MultiProfile
from .profile import MatrixProfile

MAGIC = b"MPTS"
TSBIN_VERSION = 1
_HEADER = struct.Struct("<4sBIQ")
SCHEMA_VERSION = 1
DNA_STEPS = {"A": 2.0, "G": 1.0, "C": -1.0, "T": -2.0}


def _format_for(path, format):
    if format is not None:
        if format not in ("csv", "tsbin"):
            raise ValueError(f"unknown series format {format!r}")
        return format
    return "tsbin" if str(path).endswith((".tsbin", ".bin")) else "csv"


def _squeeze(values):
    return values[0] if values.shape[0] == 1 else values


def _read_csv(path):
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, fields in enumerate(csv.reader(fh), start=1):
            if not fields or all(not f.strip() for f in fields):
                continue
            try:
                row = [float(f) for f in fields]
            except ValueError:
                if not rows and lineno == 1:
                    continue  # header
                bad = next(f for f in fields if not _is_float(f))
                raise ParseError(f"{path}:{lineno}: cannot parse {bad.strip()!r} as a number",
                                 lineno) from None
            if not all(math.isfinite(v) for v in row):
                raise ParseError(f"{path}:{lineno}: non-finite value", lineno)
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError(f"{path}:{lineno}: expected {width} columns, got {len(row)}",
                                 lineno)
            rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no samples")
    return np.asarray(rows, dtype=np.float64).T.copy()


def _is_float(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def _read_tsbin(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ParseError(f"{path}: truncated header", len(raw))
    magic, version, d, n = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ParseError(f"{path}: bad magic {magic!r}", 0)
    if version != TSBIN_VERSION:
        raise ParseError(f"{path}: unsupported version {version}", 4)
    expected = _HEADER.size + 8 * d * n
    if len(raw) != expected:
        raise ParseError(f"{path}: expected {expected} bytes, found {len(raw)}",
                         min(len(raw), expected))
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(d, n)
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(np.flatnonzero(bad.ravel())[0])
        offset = _HEADER.size + 8 * k
        raise ParseError(f"{path}: non-finite value at byte offset {offset}", offset)
    return values.astype(np.float64)


def load_series(path, format=None):
    """Read a series; 1-D for a single dimension, ``(d, n)`` otherwise.

    ``format`` is ``"csv"`` or ``"tsbin"``; by default it is inferred from
    the extension (``.tsbin``/``.bin`` are binary, anything else CSV).
    """
    fmt = _format_for(path, format)
    values = _read_tsbin(path) if fmt == "tsbin" else _read_csv(path)
    return _squeeze(values)


def save_series(path, T, format=None):
    """Write ``T`` (1-D or ``(d, n)``) in the given or inferred format."""
    values = np.asarray(T, dtype=np.float64)
    if values.ndim == 1:
        values = values[np.newaxis]
    if values.ndim != 2 or not np.isfinite(values).all():
        raise InvalidSeries("series must be finite with shape (n,) or (d, n)")
    fmt = _format_for(path, format)
    if fmt == "tsbin":
        d, n = values.shape
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, TSBIN_VERSION, d, n))
            fh.write(values.astype("<f8").tobytes())
    else:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            for row in values.T:
                w.writerow([repr(float(v)) for v in row])


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def array_digest(values):
    return "sha256:" + hashlib.sha256(
        np.ascontiguousarray(values, dtype="<f8").tobytes()).hexdigest()


# ---------------------------------------------------------------------------
# converters


def dna_to_ts(sequence, strict=True):
    """Cumulative walk over a DNA string: A +2, G +1, C -1, T -2.

    The walk starts at 0, so the result has ``len(sequence) + 1`` values
    (fewer when invalid symbols are skipped with ``strict=False``).
    Case and surrounding whitespace are ignored.
    """
    steps = [0.0]
    for pos, ch in enumerate(sequence.strip().upper()):
        step = DNA_STEPS.get(ch)
        if step is None:
            if strict:
                raise ParseError(f"invalid DNA symbol {ch!r} at position {pos}", pos)
            continue
        steps.append(step)
    return np.cumsum(steps)


def downsample(T, factor):
    """Means of consecutive ``factor``-sized blocks; a short tail is averaged too."""
    if not isinstance(factor, (int, np.integer)) or factor < 1:
        raise ValueError(f"downsampling factor must be an integer >= 1, got {factor!r}")
    T = np.asarray(T, dtype=np.float64)
    n = T.shape[-1]
    full = n // factor * factor
    head = T[..., :full].reshape(T.shape[:-1] + (-1, factor)).mean(axis=-1)
    if full == n:
        return head
    return np.concatenate([head, T[..., full:].mean(axis=-1, keepdims=True)], axis=-1)


# ---------------------------------------------------------------------------
# profile documents


def now_timestamp():
    """UTC ISO timestamp; honours ``SOURCE_DATE_EPOCH`` for reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = datetime.datetime.fromtimestamp(int(epoch), datetime.timezone.utc)
    else:
        moment = datetime.datetime.now(datetime.timezone.utc)
    return moment.isoformat()


def _encode_p(P):
    if P.ndim == 1:
        return [float(v) if np.isfinite(v) else None for v in P]
    return [_encode_p(row) for row in P]


def _decode_p(P):
    return np.asarray([[np.inf if v is None else v for v in row] for row in P]
                      if P and isinstance(P[0], list)
                      else [np.inf if v is None else v for v in P], dtype=np.float64)


@dataclass
class ProfileDocument:
    """A serialisable matrix profile (1-D or per-k rows) with provenance.

    ``P`` entries that are ``inf`` are written as JSON ``null``; floats use
    the shortest repr that round-trips binary64, so loading reproduces ``P``
    and ``I`` exactly.
    """

    m: int
    exclusion: int
    algorithm: str
    fraction_done: float
    P: np.ndarray
    I: np.ndarray
    provenance: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_profile(cls, profile, digest=None, seed=None, timestamp=None):
        if timestamp is None:
            timestamp = now_timestamp()
        prov = {"input_digest": digest, "seed": seed, "timestamp": timestamp}
        if isinstance(profile, MultiProfile):
            prov["dims"] = list(profile.dims)
            prov["include"] = list(profile.include)
        return cls(profile.m, profile.exclusion, profile.algorithm,
                   float(profile.fraction_done), np.asarray(profile.P),
                   np.asarray(profile.I), prov)

    def to_profile(self):
        if self.P.ndim == 2:
            return MultiProfile(self.P, self.I, self.m, self.fraction_done,
                                self.algorithm, self.exclusion,
                                self.provenance.get("dims"),
                                list(self.provenance.get("include", [])))
        return MatrixProfile(self.P, self.I, self.m, self.fraction_done,
                             self.algorithm, self.exclusion)

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "m": int(self.m),
            "exclusion": int(self.exclusion),
            "algorithm": self.algorithm,
            "fraction_done": float(self.fraction_done),
            "P": _encode_p(np.asarray(self.P, dtype=np.float64)),
            "I": np.asarray(self.I).astype(int).tolist(),
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            version = int(doc["schema_version"])
            if version != SCHEMA_VERSION:
                raise ParseError(f"unsupported profile schema version {version}")
            P = _decode_p(doc["P"])
            I = np.asarray(doc["I"], dtype=np.int64)
            if P.shape != I.shape:
                raise ParseError(f"P has shape {P.shape} but I has shape {I.shape}")
            return cls(int(doc["m"]), int(doc["exclusion"]), str(doc["algorithm"]),
                       float(doc["fraction_done"]), P, I, dict(doc.get("provenance", {})),
                       version)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed profile document: {exc}") from None

    def dumps(self):
        return json.dumps(self.to_dict(), allow_nan=False)

    @classmethod
    def loads(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
        return cls.from_dict(doc)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())
            fh.write("\n")

    @classmethod
    def load(cls, path):
        if not os.path.exists(path):
            raise ParseError(f"{path}: no such file")
        with open(path) as fh:
            return cls.loads(fh.read())

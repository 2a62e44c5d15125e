"""Dataset model: records x channels x samples, single features and segments.

Sample indices are 1-based everywhere a user can see them.  Arrays held by a
:class:`Dataset` are flagged read-only; every mutation returns a new dataset
that shares the untouched arrays with the old one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import BoundsError, NamingError, ParameterError, ShapeError


@dataclass(frozen=True)
class SampleGrid:
    k_count: int
    sample_rate: float = 1.0

    def __post_init__(self):
        if int(self.k_count) != self.k_count or self.k_count < 1:
            raise ParameterError(f"k_count must be a positive integer, got {self.k_count!r}")
        if not (self.sample_rate > 0) or not np.isfinite(self.sample_rate):
            raise ParameterError(f"sample_rate must be > 0, got {self.sample_rate!r}")
        object.__setattr__(self, "k_count", int(self.k_count))
        object.__setattr__(self, "sample_rate", float(self.sample_rate))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


def check_segment(bounds, n_records: int, k_count: int, name: str = "segment") -> np.ndarray:
    """Validate per-record ``(start, end)`` pairs and return them as an int array (N, 2)."""
    b = np.asarray(bounds)
    if b.ndim == 1 and b.shape == (2,):
        b = np.tile(b, (n_records, 1))
    if b.ndim != 2 or b.shape != (n_records, 2):
        raise ShapeError(f"{name}: expected {n_records} (start, end) pairs, got shape {b.shape}")
    if not np.all(np.equal(np.mod(b, 1), 0)):
        raise ParameterError(f"{name}: segment bounds must be integers")
    b = b.astype(np.int64)
    bad = ~((b[:, 0] >= 1) & (b[:, 0] <= b[:, 1]) & (b[:, 1] <= k_count))
    if bad.any():
        r = int(np.argmax(bad))
        raise BoundsError(
            f"{name}: record {r + 1} has invalid bounds ({b[r, 0]}, {b[r, 1]}) for K={k_count}"
        )
    b.flags.writeable = False
    return b


def slice_segment(values: np.ndarray, segment, record_index: int) -> np.ndarray:
    """Samples ``start..end`` (inclusive, 1-based) of one record of a channel.

    ``values`` is the N x K channel matrix, ``segment`` either an (N, 2) bound
    array or a single ``(start, end)`` pair applied to every record.
    """
    values = np.asarray(values)
    n, k = values.shape
    if not 1 <= record_index <= n:
        raise BoundsError(f"record index {record_index} outside 1..{n}")
    seg = check_segment(segment, n, k)
    start, end = seg[record_index - 1]
    return values[record_index - 1, start - 1 : end]


@dataclass(frozen=True)
class Dataset:
    """N records of S named channels sharing one :class:`SampleGrid`.

    ``channels`` maps name -> (N, K) array, ``features`` name -> (N,) array and
    ``segments`` name -> (N, 2) array of 1-based inclusive bounds.  Insertion
    order of the mappings is preserved and is the output order on export.
    """

    grid: SampleGrid
    channels: Mapping[str, np.ndarray] = field(default_factory=dict)
    features: Mapping[str, np.ndarray] = field(default_factory=dict)
    segments: Mapping[str, np.ndarray] = field(default_factory=dict)
    n_records: int | None = None

    def __post_init__(self):
        n = self.n_records
        chans = {}
        for name, vals in self.channels.items():
            _check_name(name, chans, "channel")
            a = np.asarray(vals, dtype=float)
            if a.ndim == 1:
                a = a[None, :]
            if a.ndim != 2 or a.shape[1] != self.grid.k_count:
                raise ShapeError(
                    f"channel {name!r}: expected N x {self.grid.k_count}, got shape {a.shape}"
                )
            if n is None:
                n = a.shape[0]
            elif a.shape[0] != n:
                raise ShapeError(f"channel {name!r}: expected {n} records, got {a.shape[0]}")
            chans[name] = a if not a.flags.writeable and a.dtype == float else _frozen(a)
        feats = {}
        for name, vals in self.features.items():
            if name in feats or name in chans:
                raise NamingError(f"duplicate name {name!r}")
            _check_name(name, feats, "feature")
            a = np.asarray(vals, dtype=float)
            if n is None:
                n = a.shape[0] if a.ndim == 1 else -1
            if a.ndim != 1 or a.shape[0] != n:
                raise ShapeError(f"feature {name!r}: expected length {n}, got shape {a.shape}")
            feats[name] = a if not a.flags.writeable and a.dtype == float else _frozen(a)
        if n is None:
            raise ShapeError("cannot infer record count: dataset has no channels or features")
        if n < 1:
            raise ShapeError("a dataset needs at least one record")
        segs = {}
        for name, b in self.segments.items():
            _check_name(name, segs, "segment")
            segs[name] = check_segment(b, n, self.grid.k_count, f"segment {name!r}")
        object.__setattr__(self, "n_records", int(n))
        object.__setattr__(self, "channels", MappingProxyType(chans))
        object.__setattr__(self, "features", MappingProxyType(feats))
        object.__setattr__(self, "segments", MappingProxyType(segs))

    @property
    def k_count(self) -> int:
        return self.grid.k_count

    @property
    def sample_rate(self) -> float:
        return self.grid.sample_rate

    @property
    def channel_names(self) -> list[str]:
        return list(self.channels)

    @property
    def feature_names(self) -> list[str]:
        return list(self.features)

    @property
    def segment_names(self) -> list[str]:
        return list(self.segments)

    def channel(self, name: str) -> np.ndarray:
        try:
            return self.channels[name]
        except KeyError:
            raise NamingError(f"unknown channel {name!r}") from None

    def feature(self, name: str) -> np.ndarray:
        try:
            return self.features[name]
        except KeyError:
            raise NamingError(f"unknown feature {name!r}") from None

    def segment(self, name: str) -> np.ndarray:
        try:
            return self.segments[name]
        except KeyError:
            raise NamingError(f"unknown segment {name!r}") from None

    def add_channel(self, name: str, values) -> "Dataset":
        if name in self.channels or name in self.features:
            raise NamingError(f"duplicate name {name!r}")
        a = np.asarray(values, dtype=float)
        if a.shape != (self.n_records, self.k_count):
            raise ShapeError(
                f"channel {name!r}: expected shape {(self.n_records, self.k_count)}, got {a.shape}"
            )
        return Dataset(self.grid, {**self.channels, name: a}, self.features, self.segments)

    def add_feature(self, name: str, values) -> "Dataset":
        if name in self.channels or name in self.features:
            raise NamingError(f"duplicate name {name!r}")
        a = np.asarray(values, dtype=float)
        if a.shape != (self.n_records,):
            raise ShapeError(f"feature {name!r}: expected length {self.n_records}, got shape {a.shape}")
        return Dataset(self.grid, self.channels, {**self.features, name: a}, self.segments)

    def add_segment(self, name: str, bounds) -> "Dataset":
        if name in self.segments:
            raise NamingError(f"duplicate segment name {name!r}")
        return Dataset(self.grid, self.channels, self.features, {**self.segments, name: bounds})

    def select_records(self, indices) -> "Dataset":
        """Subset/reorder records by 0-based index."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.grid,
            {k: v[idx] for k, v in self.channels.items()},
            {k: v[idx] for k, v in self.features.items()},
            {k: v[idx] for k, v in self.segments.items()},
        )


def _check_name(name, seen, what):
    if not isinstance(name, str) or not name:
        raise NamingError(f"{what} name must be a nonempty string, got {name!r}")
    if name in seen:
        raise NamingError(f"duplicate {what} name {name!r}")

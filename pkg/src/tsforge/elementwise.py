"""Stateless time-series transforms: per-sample maps, combiners, binarization,
shifting, sorting, normalization and detrending."""

from __future__ import annotations

import enum
from typing import Sequence

import numpy as np

from .errors import DegenerateError, DomainError, ParameterError, ShapeError


class UnaryKind(enum.Enum):
    ABS = "ABS"
    NEGATE = "SIGNIN"
    SQRT = "ROOT"
    SQUARE = "SQR"
    LOG10 = "LOG10"
    SCALE = "CONST"


class CombineKind(enum.Enum):
    ADD = "ADDTS"
    MULT = "MULTTS"
    MIN = "MINTS"
    MAX = "MAXTS"
    MEAN = "MEANTS"


class NormalizeKind(enum.Enum):
    MINMAX_01 = "MINMAX_01"
    ZSCORE = "ZSCORE"
    MAXABS = "MAXABS"
    MEAN_DIVIDE = "MEAN_DIVIDE"


class DetrendMode(enum.Enum):
    LINEAR = "LINEAR"
    CONSTANT = "CONSTANT"


def _vec(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeError(f"expected a 1-D vector, got shape {x.shape}")
    return x


def _first(mask: np.ndarray) -> int:
    return int(np.argmax(mask)) + 1


def unary(x, kind: UnaryKind | str, c: float = 1.0) -> np.ndarray:
    """Elementwise map.  ``c`` is the gain used by ``SCALE``."""
    kind = UnaryKind(kind)
    x = _vec(x)
    if kind is UnaryKind.ABS:
        return np.abs(x)
    if kind is UnaryKind.NEGATE:
        return -x
    if kind is UnaryKind.SQUARE:
        return x * x
    if kind is UnaryKind.SCALE:
        return x * float(c)
    if kind is UnaryKind.SQRT:
        bad = x < 0
        if bad.any():
            raise DomainError(f"square root of negative value at sample {_first(bad)}")
        return np.sqrt(x)
    bad = x <= 0
    if bad.any():
        raise DomainError(f"log10 of non-positive value at sample {_first(bad)}")
    return np.log10(x)


def combine(xs: Sequence, kind: CombineKind | str) -> np.ndarray:
    kind = CombineKind(kind)
    arrs = [_vec(x) for x in xs]
    if not arrs:
        raise ShapeError("combine needs at least one input series")
    if any(a.shape != arrs[0].shape for a in arrs):
        raise ShapeError(f"input lengths differ: {[a.size for a in arrs]}")
    stack = np.stack(arrs)
    if kind is CombineKind.ADD:
        return stack.sum(axis=0)
    if kind is CombineKind.MULT:
        return stack.prod(axis=0)
    if kind is CombineKind.MIN:
        return stack.min(axis=0)
    if kind is CombineKind.MAX:
        return stack.max(axis=0)
    return stack.sum(axis=0) / len(arrs)


def _pair(x1, x2):
    x1, x2 = _vec(x1), _vec(x2)
    if x1.shape != x2.shape:
        raise ShapeError(f"input lengths differ: {x1.size} vs {x2.size}")
    return x1, x2


def diff_pair(x1, x2) -> np.ndarray:
    x1, x2 = _pair(x1, x2)
    return x1 - x2


def relative_ratio(x1, x2) -> np.ndarray:
    """``x1 / (x1 + x2)``; samples where the sum is exactly zero give 0.5."""
    x1, x2 = _pair(x1, x2)
    total = x1 + x2
    zero = total == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        r = x1 / np.where(zero, 1.0, total)
    r[zero] = 0.5
    return r


def threshold(x, t: float) -> np.ndarray:
    return (_vec(x) > t).astype(float)


def region(x, lo: float, hi: float) -> np.ndarray:
    if lo > hi:
        raise ParameterError(f"region lower bound {lo} exceeds upper bound {hi}")
    x = _vec(x)
    return ((x >= lo) & (x <= hi)).astype(float)


def zero_jump(x) -> np.ndarray:
    """1 where the series jumps from a nonzero value to zero, else 0."""
    x = _vec(x)
    y = np.zeros_like(x)
    y[1:] = (x[:-1] != 0) & (x[1:] == 0)
    return y


def shift(x, d: int) -> np.ndarray:
    """Move samples ``d`` steps into the future (negative: past), replicating the edge."""
    x = _vec(x)
    if int(d) != d:
        raise ParameterError(f"shift must be an integer, got {d!r}")
    d = int(d)
    if abs(d) >= x.size:
        raise ParameterError(f"|shift| = {abs(d)} must be smaller than the record length {x.size}")
    if d == 0:
        return x.copy()
    y = np.empty_like(x)
    if d > 0:
        y[d:] = x[:-d]
        y[:d] = x[0]
    else:
        y[:d] = x[-d:]
        y[d:] = x[-1]
    return y


def sort_values(x) -> np.ndarray:
    # numpy's stable sort already places NaN last
    return np.sort(_vec(x), kind="stable")


def normalize(x, kind: NormalizeKind | str) -> np.ndarray:
    kind = NormalizeKind(kind)
    x = _vec(x)
    if kind is NormalizeKind.MINMAX_01:
        lo, hi = np.min(x), np.max(x)
        if hi - lo == 0:
            raise DegenerateError("min-max normalization of a constant series")
        return (x - lo) / (hi - lo)
    if kind is NormalizeKind.ZSCORE:
        m = np.mean(x)
        s = np.sqrt(np.mean((x - m) ** 2))
        if s == 0:
            raise DegenerateError("z-score normalization of a constant series")
        return (x - m) / s
    if kind is NormalizeKind.MAXABS:
        s = np.max(np.abs(x))
        if s == 0:
            raise DegenerateError("max-abs normalization of an all-zero series")
        return x / s
    m = np.mean(x)
    if m == 0:
        raise DegenerateError("mean normalization of a zero-mean series")
    return x / m


def detrend(x, mode: DetrendMode | str = DetrendMode.LINEAR) -> np.ndarray:
    """Remove the mean (CONSTANT) or the least-squares line over the record (LINEAR)."""
    mode = DetrendMode(mode)
    x = _vec(x)
    if mode is DetrendMode.CONSTANT:
        return x - np.mean(x)
    if x.size < 2:
        raise ParameterError("linear detrend needs at least 2 samples")
    t = np.arange(x.size, dtype=float)
    t -= t.mean()
    xc = x - np.mean(x)
    slope = np.dot(t, xc) / np.dot(t, t)
    return xc - slope * t

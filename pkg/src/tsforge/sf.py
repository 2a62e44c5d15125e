"""Single-feature kernels: map one record (or segment) to scalars."""

from __future__ import annotations

import enum

import numpy as np

from .errors import BoundsError, DegenerateError, EmptyDataError, ShapeError
from .multiscale.membership import discretization_frequencies  # noqa: F401  (re-export)

# Relative threshold below which the COG denominator counts as zero.
COG_DEGENERACY = 1e-12


class BasicStatKind(enum.Enum):
    MAX = "MAX"
    MIN = "MIN"
    MEAN = "MEAN"
    MEAN_NAN = "MEAN-NaN"
    MEDIAN = "MEDIAN"
    MEDIAN_NAN = "MEDIAN-NaN"
    SUM = "SUM"
    STD_K = "STD SF"
    ROM = "ROM"
    MAPO = "MAPO"
    MIPO = "MIPO"
    COG = "COG"


class NormDeviationKind(enum.Enum):
    ABS = "ABS"
    DIR = "DIR"
    SIGN = "SIGN"


def _vector(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ShapeError(f"expected a nonempty 1-D vector, got shape {x.shape}")
    return x


def std_k(x: np.ndarray) -> float:
    """Standard deviation with divisor L (not L - 1)."""
    x = _vector(x)
    m = np.mean(x)
    m = m + np.mean(x - m)  # refine the rounded mean so constant input gives exactly 0
    return float(np.sqrt(np.mean((x - m) ** 2)))


def _cog(x: np.ndarray) -> float:
    total = np.sum(x)
    if np.isnan(total):
        return float("nan")
    scale = np.max(np.abs(x))
    if abs(total) <= COG_DEGENERACY * x.size * scale:
        raise DegenerateError(f"center of gravity undefined: sum of values is {total!r}")
    pos = np.arange(1, x.size + 1, dtype=float)
    return float(np.sum(pos * x) / total)


def basic_sf(x, kind: BasicStatKind | str) -> float:
    """Evaluate one basic statistic on a sample vector.

    MAPO/MIPO/COG report 1-based positions inside ``x``.  Only the ``*_NAN``
    kinds skip NaN entries; every other kind returns NaN if one is present.
    """
    kind = BasicStatKind(kind)
    x = _vector(x)
    if kind in (BasicStatKind.MEAN_NAN, BasicStatKind.MEDIAN_NAN):
        finite = x[~np.isnan(x)]
        if finite.size == 0:
            raise EmptyDataError(f"{kind.value}: all values are NaN")
        return float(np.mean(finite) if kind is BasicStatKind.MEAN_NAN else np.median(finite))
    has_nan = bool(np.isnan(x).any())
    if kind is BasicStatKind.MAX:
        return float(np.max(x))
    if kind is BasicStatKind.MIN:
        return float(np.min(x))
    if kind is BasicStatKind.MEAN:
        return float(np.mean(x))
    if kind is BasicStatKind.MEDIAN:
        return float(np.median(x))
    if kind is BasicStatKind.SUM:
        return float(np.sum(x))
    if kind is BasicStatKind.STD_K:
        return std_k(x)
    if kind is BasicStatKind.ROM:
        return float(np.max(x) - np.min(x))
    if kind is BasicStatKind.MAPO:
        return float("nan") if has_nan else float(np.argmax(x) + 1)
    if kind is BasicStatKind.MIPO:
        return float("nan") if has_nan else float(np.argmin(x) + 1)
    return _cog(x)


def sample_at(x, n: int) -> float:
    x = _vector(x)
    if int(n) != n or not 1 <= n <= x.size:
        raise BoundsError(f"sample point {n} outside 1..{x.size}")
    return float(x[int(n) - 1])


def norm_deviation_sf(x, mu, sigma, kind: NormDeviationKind | str) -> float:
    """Mean (signed, absolute or sign-only) deviation of ``x`` from a norm curve.

    ``sigma`` must already be floored; see :func:`tsforge.multiscale.norm.fit_norm`.
    """
    kind = NormDeviationKind(kind)
    x, mu, sigma = _vector(x), _vector(mu), _vector(sigma)
    if not x.shape == mu.shape == sigma.shape:
        raise ShapeError(f"length mismatch: x {x.size}, mu {mu.size}, sigma {sigma.size}")
    if kind is NormDeviationKind.SIGN:
        return float(np.mean(np.sign(x - mu)))
    d = (x - mu) / sigma
    if kind is NormDeviationKind.ABS:
        d = np.abs(d)
    return float(np.mean(d))


def pca_scores_sf(x, model, s_d: int | None = None) -> np.ndarray:
    """First two principal-component scores of one record; slot 2 is 0 when s_d = 1."""
    x = _vector(x)
    if x.size != model.dimension:
        raise ShapeError(f"record length {x.size} does not match the PCA model ({model.dimension})")
    s_d = model.n_components if s_d is None else int(s_d)
    if not 1 <= s_d <= min(2, model.n_components):
        raise ShapeError(f"s_d={s_d} not available from a {model.n_components}-component model")
    out = np.zeros(2)
    out[:s_d] = model.transform(x)[:s_d]
    return out


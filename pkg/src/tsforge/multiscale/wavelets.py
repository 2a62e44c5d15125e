"""Multilevel Daubechies decomposition split into per-band reconstructions.

Analysis keeps coefficient ``i`` of a level at ``sum_j h[j] * x[2i + 1 - j]``
over the extended signal; synthesis is the matching transposed operator, so
the filter bank reconstructs perfectly in both extension modes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError

N_BANDS = 5
MAX_LEVELS = 4

_S3 = np.sqrt(3.0)

# Scaling (lowpass reconstruction) filters, orthonormal: sum h = sqrt(2), sum h^2 = 1.
_SCALING = {
    "HAAR": np.array([1.0, 1.0]) / np.sqrt(2.0),
    "DB2": np.array([1 + _S3, 3 + _S3, 3 - _S3, 1 - _S3]) / (4 * np.sqrt(2.0)),
    "DB4": np.array([
        0.23037781330889650086,
        0.71484657055291564709,
        0.63088076792985890788,
        -0.027983769416859854211,
        -0.18703481171909308408,
        0.030841381835560763627,
        0.032883011666885199735,
        -0.010597401785069032105,
    ]),
}


class WaveletFamily(enum.Enum):
    HAAR = "HAAR"
    DB2 = "DB2"
    DB4 = "DB4"

    @classmethod
    def _missing_(cls, value):
        aliases = {"DB1": "HAAR"}
        key = str(value).upper()
        return cls(aliases.get(key, key)) if key in aliases or key in cls.__members__ else None


class BoundaryMode(enum.Enum):
    SYMMETRIC = "SYMMETRIC"
    PERIODIZATION = "PERIODIZATION"


@dataclass(frozen=True)
class FilterBank:
    dec_lo: np.ndarray
    dec_hi: np.ndarray
    rec_lo: np.ndarray
    rec_hi: np.ndarray

    @property
    def length(self) -> int:
        return self.rec_lo.size


def filter_bank(family: WaveletFamily | str) -> FilterBank:
    rec_lo = _SCALING[WaveletFamily(family).value]
    n = rec_lo.size
    rec_hi = np.array([(-1) ** k * rec_lo[n - 1 - k] for k in range(n)])
    return FilterBank(rec_lo[::-1].copy(), rec_hi[::-1].copy(), rec_lo, rec_hi)


@dataclass(frozen=True)
class WaveletSpec:
    family: WaveletFamily = WaveletFamily.HAAR
    levels: int = 4
    mode: BoundaryMode = BoundaryMode.SYMMETRIC

    def __post_init__(self):
        object.__setattr__(self, "family", WaveletFamily(self.family))
        object.__setattr__(self, "mode", BoundaryMode(self.mode))
        if int(self.levels) != self.levels or not 1 <= self.levels <= MAX_LEVELS:
            raise ParameterError(f"wavelet levels must be in 1..{MAX_LEVELS}, got {self.levels}")


def _symmetric_index(idx: np.ndarray, n: int) -> np.ndarray:
    """Half-sample symmetric reflection: x[-1] = x[0], x[n] = x[n-1], ..."""
    period = 2 * n
    m = np.mod(idx, period)
    return np.where(m < n, m, period - 1 - m)


def _analysis_index(n_in: int, n_out: int, flen: int, mode: BoundaryMode) -> np.ndarray:
    i = np.arange(n_out)[:, None]
    j = np.arange(flen)[None, :]
    raw = 2 * i + 1 - j
    if mode is BoundaryMode.PERIODIZATION:
        return np.mod(raw, n_in)
    return _symmetric_index(raw, n_in)


def coeff_length(n: int, flen: int, mode: BoundaryMode) -> int:
    if mode is BoundaryMode.PERIODIZATION:
        return n // 2
    return (n + flen - 1) // 2


def dwt(x, bank: FilterBank, mode: BoundaryMode) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    n_out = coeff_length(x.size, bank.length, mode)
    taps = x[_analysis_index(x.size, n_out, bank.length, mode)]
    return taps @ bank.dec_lo, taps @ bank.dec_hi


def idwt(approx, detail, bank: FilterBank, mode: BoundaryMode, n_out: int) -> np.ndarray:
    """Inverse of :func:`dwt` back to ``n_out`` samples."""
    approx = np.asarray(approx, dtype=float)
    detail = np.asarray(detail, dtype=float)
    flen = bank.length
    if mode is BoundaryMode.PERIODIZATION:
        y = np.zeros(n_out)
        idx = _analysis_index(n_out, approx.size, flen, mode)
        contrib = approx[:, None] * bank.dec_lo[None, :] + detail[:, None] * bank.dec_hi[None, :]
        np.add.at(y, idx.ravel(), contrib.ravel())
        return y
    up_a = np.zeros(2 * approx.size)
    up_d = np.zeros(2 * detail.size)
    up_a[::2], up_d[::2] = approx, detail
    full = np.convolve(up_a, bank.rec_lo) + np.convolve(up_d, bank.rec_hi)
    # output sample n sits at index n + flen - 2 of the full convolution
    return full[flen - 2 : flen - 2 + n_out]


def wavedec(x, spec: WaveletSpec) -> tuple[list[np.ndarray], list[int]]:
    """Coefficients ``[cA_L, cD_L, ..., cD_1]`` and the signal length before each level."""
    x = np.asarray(x, dtype=float)
    _check_length(x.size, spec)
    bank = filter_bank(spec.family)
    lengths, details = [], []
    a = x
    for _ in range(spec.levels):
        lengths.append(a.size)
        a, d = dwt(a, bank, spec.mode)
        details.append(d)
    return [a] + details[::-1], lengths


def _check_length(k: int, spec: WaveletSpec) -> None:
    need = 2 ** spec.levels
    if k < need:
        raise ParameterError(f"{spec.levels} wavelet levels need at least {need} samples, got {k}")
    if spec.mode is BoundaryMode.PERIODIZATION and k % need:
        raise ParameterError(
            f"periodized decomposition over {spec.levels} levels needs a length divisible by {need}"
        )


def _climb(a: np.ndarray, d: np.ndarray, level: int, lengths, bank, mode) -> np.ndarray:
    """Synthesize from ``level`` up to the original length, with zero details above."""
    sig = idwt(a, d, bank, mode, lengths[level - 1])
    for lvl in range(level - 1, 0, -1):
        sig = idwt(sig, np.zeros_like(sig), bank, mode, lengths[lvl - 1])
    return sig


def wavedec_bands(x, spec: WaveletSpec) -> np.ndarray:
    """Split ``x`` into 5 length-K bands that sum back to ``x``.

    Row 0 is the level-L approximation, rows 1..L the details of levels
    1..L; rows beyond L stay zero.
    """
    coeffs, lengths = wavedec(x, spec)
    bank = filter_bank(spec.family)
    k = len(x)
    levels = spec.levels
    out = np.zeros((N_BANDS, k))
    approx = coeffs[0]
    out[0] = _climb(approx, np.zeros_like(approx), levels, lengths, bank, spec.mode)
    for level in range(1, levels + 1):
        d = coeffs[levels - level + 1]
        out[level] = _climb(np.zeros_like(d), d, level, lengths, bank, spec.mode)
    return out

"""Band filtering by convolution with a real Morlet kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError

# Ratio between eigenfrequency and the Gaussian frequency width: sigma_f = eigen_freq / GAMMA.
GAMMA = 5.0
ENVELOPE_CUTOFF = 1e-4


@dataclass(frozen=True)
class MorletSpec:
    center_freq: float
    eigen_freq: float
    causal: bool = False


def morlet_kernel(spec: MorletSpec, sample_rate: float) -> tuple[np.ndarray, int]:
    """Return ``(taps, origin)``; ``taps[origin]`` is the lag-0 coefficient.

    The kernel is zero-mean and scaled so a unit cosine at ``center_freq``
    passes with unit amplitude.
    """
    if not spec.center_freq > 0 or not spec.eigen_freq > 0:
        raise ParameterError("Morlet frequencies must be positive")
    if not spec.center_freq < sample_rate / 2:
        raise ParameterError(
            f"center frequency {spec.center_freq} Hz must be below Nyquist ({sample_rate / 2} Hz)"
        )
    dt = 1.0 / sample_rate
    sigma_t = GAMMA / (2 * np.pi * spec.eigen_freq)
    half = int(np.floor(sigma_t * np.sqrt(-2.0 * np.log(ENVELOPE_CUTOFF)) / dt))
    n = np.arange(-half, half + 1)
    t = n * dt
    w = np.exp(-0.5 * (t / sigma_t) ** 2) * np.cos(2 * np.pi * spec.center_freq * t)
    origin = half
    if spec.causal:
        w, n, origin = w[half:], n[half:], 0
    w = w - w.mean()
    gain = abs(np.sum(w * np.exp(-2j * np.pi * spec.center_freq * n * dt)))
    if gain == 0:
        raise ParameterError("Morlet kernel has no gain at its center frequency")
    return w / gain, origin


def morlet_filter(x, spec: MorletSpec, sample_rate: float) -> np.ndarray:
    """``y[k] = sum_n w[n] x[k - n]`` with edge-replicated borders."""
    x = np.asarray(x, dtype=float)
    w, origin = morlet_kernel(spec, sample_rate)
    if w.size > x.size:
        raise ParameterError(
            f"Morlet kernel ({w.size} taps) is longer than the record ({x.size} samples)"
        )
    before = w.size - 1 - origin  # largest positive lag
    after = origin                # largest negative lag
    padded = np.concatenate([np.full(before, x[0]), x, np.full(after, x[-1])])
    return np.convolve(padded, w, mode="valid")

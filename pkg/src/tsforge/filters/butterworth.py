"""Butterworth design by bilinear transform, realized as second-order sections.

The analog prototype (poles on the left unit half circle) is frequency
transformed to lowpass/highpass/bandpass at prewarped edges, mapped to z with
``z = (2 fs + s) / (2 fs - s)`` and split into biquads, each scaled to unit
gain at the passband reference frequency.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError, ShapeError

MAX_ORDER = 8


class FilterType(enum.Enum):
    LOWPASS = "LOWPASS"
    HIGHPASS = "HIGHPASS"
    BANDPASS = "BANDPASS"


class InitMode(enum.Enum):
    ZERO = "ZERO"
    STEADY_STATE = "STEADY_STATE"


@dataclass(frozen=True)
class ButterworthSpec:
    filter_type: FilterType
    f1: float
    f2: float | None = None
    order: int = 4
    init: InitMode = InitMode.STEADY_STATE

    def __post_init__(self):
        object.__setattr__(self, "filter_type", FilterType(self.filter_type))
        object.__setattr__(self, "init", InitMode(self.init))

    def check(self, sample_rate: float) -> None:
        nyq = sample_rate / 2.0
        if int(self.order) != self.order or not 1 <= self.order <= MAX_ORDER:
            raise ParameterError(f"filter order must be an integer in 1..{MAX_ORDER}, got {self.order}")
        if not 0 < self.f1 < nyq:
            raise ParameterError(f"cutoff {self.f1} Hz must lie in (0, {nyq}) Hz (Nyquist)")
        if self.filter_type is FilterType.BANDPASS:
            if self.f2 is None or not self.f1 < self.f2 < nyq:
                raise ParameterError(
                    f"bandpass needs f1 < f2 < {nyq} Hz, got f1={self.f1}, f2={self.f2}"
                )


def _analog_poles(order: int) -> np.ndarray:
    k = np.arange(1, order + 1)
    return np.exp(1j * np.pi * (2 * k + order - 1) / (2 * order))


def _pair_roots(roots: np.ndarray, tol: float = 1e-9) -> list[list[complex]]:
    """Group roots into conjugate pairs, then pair the leftover real roots."""
    upper = sorted((r for r in roots if r.imag > tol), key=lambda r: (abs(r), r.real))
    real = sorted((r.real for r in roots if abs(r.imag) <= tol))
    groups = [[r, np.conj(r)] for r in upper]
    groups += [real[i : i + 2] for i in range(0, len(real), 2)]
    return groups


def design_sos(spec: ButterworthSpec, sample_rate: float) -> np.ndarray:
    """Return an (n_sections, 6) array of rows ``[b0, b1, b2, 1, a1, a2]``."""
    spec.check(sample_rate)
    fs2 = 2.0 * sample_rate
    warp = lambda f: fs2 * np.tan(np.pi * f / sample_rate)  # noqa: E731
    proto = _analog_poles(int(spec.order))
    ftype = spec.filter_type
    if ftype is FilterType.LOWPASS:
        poles = proto * warp(spec.f1)
        zeros_z = [-1.0] * len(poles)
        w_ref = 0.0
    elif ftype is FilterType.HIGHPASS:
        poles = warp(spec.f1) / proto
        zeros_z = [1.0] * len(poles)
        w_ref = np.pi
    else:
        w1, w2 = warp(spec.f1), warp(spec.f2)
        bw, w0sq = w2 - w1, w1 * w2
        disc = np.sqrt((proto * bw) ** 2 - 4 * w0sq + 0j)
        poles = np.concatenate([(proto * bw + disc) / 2, (proto * bw - disc) / 2])
        zeros_z = [1.0, -1.0] * int(spec.order)
        w_ref = 2.0 * np.arctan(np.sqrt(w0sq) / fs2)
    pz = (fs2 + poles) / (fs2 - poles)

    sections = []
    zeros_iter = iter(zeros_z)
    for group in _pair_roots(pz):
        zs = [next(zeros_iter) for _ in group]
        a = np.real(np.poly(group))
        b = np.real(np.poly(zs))
        if len(group) == 1:
            a, b = np.append(a, 0.0), np.append(b, 0.0)
        sections.append((b, a))

    zref = np.exp(-1j * w_ref * np.arange(3))
    sos = np.zeros((len(sections), 6))
    total = 1.0 + 0j
    for i, (b, a) in enumerate(sections):
        h = np.dot(b, zref) / np.dot(a, zref)
        b = b / abs(h)
        total *= h / abs(h)
        sos[i, :3], sos[i, 3:] = b, a
    if total.real < 0:
        sos[0, :3] *= -1
    return sos


def sos_to_ba(sos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Expand sections into one transfer function, trimming trailing zero taps
    introduced by padded first-order sections."""
    b, a = np.array([1.0]), np.array([1.0])
    for row in np.asarray(sos):
        bs, as_ = row[:3], row[3:]
        if bs[2] == 0 and as_[2] == 0:
            bs, as_ = bs[:2], as_[:2]
        b, a = np.convolve(b, bs), np.convolve(a, as_)
    return b, a


def frequency_response(sos: np.ndarray, freqs, sample_rate: float) -> np.ndarray:
    """Complex response at the given frequencies in Hz."""
    w = 2 * np.pi * np.asarray(freqs, dtype=float) / sample_rate
    zinv = np.exp(-1j * w)
    h = np.ones_like(zinv)
    for b0, b1, b2, a0, a1, a2 in np.asarray(sos):
        h *= (b0 + b1 * zinv + b2 * zinv**2) / (a0 + a1 * zinv + a2 * zinv**2)
    return h


def steady_state_zi(sos: np.ndarray, x0: float) -> np.ndarray:
    """Transposed direct-form II states as if ``x0`` had been applied forever."""
    zi = np.zeros((len(sos), 2))
    u = float(x0)
    for i, (b0, b1, b2, _, a1, a2) in enumerate(sos):
        y = (b0 + b1 + b2) / (1.0 + a1 + a2) * u
        zi[i] = (y - b0 * u, b2 * u - a2 * y)
        u = y
    return zi


def sosfilt(sos: np.ndarray, x, zi: np.ndarray | None = None) -> np.ndarray:
    """Run the cascade over ``x`` (transposed direct-form II per section)."""
    y = np.array(x, dtype=float)
    if y.ndim != 1:
        raise ShapeError(f"expected a 1-D vector, got shape {y.shape}")
    sos = np.asarray(sos, dtype=float)
    for i, (b0, b1, b2, _, a1, a2) in enumerate(sos):
        z1, z2 = (0.0, 0.0) if zi is None else (float(zi[i, 0]), float(zi[i, 1]))
        out = np.empty_like(y)
        for k, u in enumerate(y.tolist()):
            v = b0 * u + z1
            z1 = b1 * u - a1 * v + z2
            z2 = b2 * u - a2 * v
            out[k] = v
        y = out
    return y


def butterworth_filter(x, spec: ButterworthSpec, sample_rate: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    sos = design_sos(spec, sample_rate)
    zi = steady_state_zi(sos, x[0]) if spec.init is InitMode.STEADY_STATE and x.size else None
    return sosfilt(sos, x, zi)

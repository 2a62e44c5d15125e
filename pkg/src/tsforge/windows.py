"""Sliding-window statistics, exponential-forgetting envelopes and derivatives."""

from __future__ import annotations

import enum

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import CapabilityError, ParameterError, ShapeError

DEFAULT_FORGETTING = 0.95


class WindowStatKind(enum.Enum):
    MAX = "MAX"
    MIN = "MIN"
    MEAN = "MEAN"
    MEDIAN = "MEDIAN"
    ROM = "ROM"


class Causality(enum.Enum):
    CAUSAL = "CAUSAL"
    ACAUSAL = "ACAUSAL"


class TimeScaling(enum.Enum):
    PER_SAMPLE = "PER_SAMPLE"
    PER_SECOND = "PER_SECOND"


_REDUCERS = {
    WindowStatKind.MAX: lambda w, axis=None: np.max(w, axis=axis),
    WindowStatKind.MIN: lambda w, axis=None: np.min(w, axis=axis),
    WindowStatKind.MEAN: lambda w, axis=None: np.mean(w, axis=axis),
    WindowStatKind.MEDIAN: lambda w, axis=None: np.median(w, axis=axis),
    WindowStatKind.ROM: lambda w, axis=None: np.max(w, axis=axis) - np.min(w, axis=axis),
}


def _vec(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ShapeError(f"expected a nonempty 1-D vector, got shape {x.shape}")
    return x


def window_stat(x, kind: WindowStatKind | str, length: int,
                causality: Causality | str = Causality.CAUSAL) -> np.ndarray:
    """Replace every sample by a statistic of its window.

    Causal windows cover ``x[k-L+1..k]``; the acausal median window is centred
    with half width ``L // 2``.  Windows are truncated at the record edges.
    """
    kind, causality = WindowStatKind(kind), Causality(causality)
    x = _vec(x)
    n = x.size
    if int(length) != length or not 1 <= length <= n:
        raise ParameterError(f"window length {length} outside 1..{n}")
    length = int(length)
    reduce = _REDUCERS[kind]
    y = np.empty(n)
    if causality is Causality.ACAUSAL:
        if kind is not WindowStatKind.MEDIAN:
            raise CapabilityError(f"acausal windows are only available for MEDIAN, not {kind.value}")
        h = length // 2
        for k in range(n):
            y[k] = np.median(x[max(0, k - h) : min(n, k + h + 1)])
        return y
    head = min(length - 1, n)
    for k in range(head):
        y[k] = reduce(x[: k + 1])
    if length <= n:
        y[length - 1 :] = reduce(sliding_window_view(x, length), axis=1)
    return y


def forgetting_envelope(x, kind: str, lam: float = DEFAULT_FORGETTING) -> np.ndarray:
    """Running MAX/MIN envelope whose held extreme decays towards the signal.

    ``y[k] = max(x[k], lam * y[k-1] + (1 - lam) * x[k])`` (``min`` for MIN).
    """
    kind = str(kind).upper()
    if kind not in ("MAX", "MIN"):
        raise ParameterError(f"envelope kind must be MAX or MIN, got {kind!r}")
    if not 0 <= lam < 1:
        raise ParameterError(f"forgetting factor must lie in [0, 1), got {lam}")
    x = _vec(x)
    # np.maximum/np.minimum propagate NaN, builtin max/min would not
    pick = np.maximum if kind == "MAX" else np.minimum
    y = np.empty_like(x)
    prev = y[0] = x[0]
    for k in range(1, x.size):
        # prev + (1 - lam) * (x - prev) == lam * prev + (1 - lam) * x, exact for constants
        prev = pick(x[k], prev + (1.0 - lam) * (x[k] - prev))
        y[k] = prev
    return y


def _central(x: np.ndarray) -> np.ndarray:
    v = np.empty_like(x)
    v[1:-1] = (x[2:] - x[:-2]) / 2.0
    v[0] = x[1] - x[0]
    v[-1] = x[-1] - x[-2]
    return v


def _backward(x: np.ndarray) -> np.ndarray:
    v = np.empty_like(x)
    v[1:] = x[1:] - x[:-1]
    v[0] = v[1]
    return v


def derivative(x, order: int = 1, causality: Causality | str = Causality.ACAUSAL,
               scaling: TimeScaling | str = TimeScaling.PER_SAMPLE,
               sample_rate: float = 1.0) -> np.ndarray:
    """Velocity (order 1), acceleration (2) or jerk (3) by repeated differencing.

    Acausal differences are central with one-sided edges; the causal variant
    (order 1 only) is a backward difference with the first value replicated.
    ``PER_SECOND`` multiplies each differencing stage by ``sample_rate``.
    """
    causality, scaling = Causality(causality), TimeScaling(scaling)
    x = _vec(x)
    if order not in (1, 2, 3):
        raise CapabilityError(f"derivative order must be 1, 2 or 3, got {order}")
    if causality is Causality.CAUSAL and order != 1:
        raise CapabilityError("only the first derivative has a causal variant")
    if x.size < order + 1:
        raise ParameterError(f"order-{order} derivative needs at least {order + 1} samples")
    if scaling is TimeScaling.PER_SECOND and not sample_rate > 0:
        raise ParameterError("PER_SECOND scaling needs a positive sample rate")
    step = _backward if causality is Causality.CAUSAL else _central
    gain = float(sample_rate) if scaling is TimeScaling.PER_SECOND else 1.0
    for _ in range(order):
        x = step(x)
        if gain != 1.0:
            x = x * gain
    return x

"""First-order exponential smoothing and the estimators built on it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError, ShapeError


def _check_a(name: str, a: float) -> float:
    a = float(a)
    if not 0.0 <= a < 1.0:
        raise ParameterError(f"{name} must lie in [0, 1), got {a}")
    return a


@dataclass(frozen=True)
class TrendStdParams:
    a_fast: float
    a_slow: float
    a_sigma: float = 0.0

    def __post_init__(self):
        _check_a("a_fast", self.a_fast)
        _check_a("a_slow", self.a_slow)
        _check_a("a_sigma", self.a_sigma)
        if not self.a_slow > self.a_fast:
            raise ParameterError(
                f"a_slow ({self.a_slow}) must be greater than a_fast ({self.a_fast})"
            )


def iir_first_order(x, a: float) -> np.ndarray:
    """``xf[k+1] = a * xf[k] + (1 - a) * x[k]`` started at ``xf[1] = x[1]``.

    ``a`` near 0 means little smoothing, near 1 strong smoothing.  Note the one
    sample delay: the output at k+1 has only seen the input up to k.
    """
    a = _check_a("a", a)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ShapeError(f"expected a nonempty 1-D vector, got shape {x.shape}")
    b = 1.0 - a
    y = np.empty_like(x)
    acc = y[0] = x[0]
    for k in range(x.size - 1):
        # same recurrence written as an increment, so a constant input stays exact
        acc = acc + b * (x[k] - acc)
        y[k + 1] = acc
    return y


def trend_estimate(x, p: TrendStdParams) -> np.ndarray:
    return iir_first_order(x, p.a_fast) - iir_first_order(x, p.a_slow)


def std_estimate(x, p: TrendStdParams) -> np.ndarray:
    """Running standard deviation from the squared fast/slow filter gap.

    ``v[k+1] = a_sigma * v[k] + (1 - a_sigma) * d[k]**2`` with ``v[1] = 0``.
    """
    d = trend_estimate(x, p)
    a = p.a_sigma
    b = 1.0 - a
    v = np.empty_like(d)
    acc = v[0] = 0.0
    for k in range(d.size - 1):
        acc = a * acc + b * d[k] * d[k]
        v[k + 1] = acc
    return np.sqrt(v)


def individual_norm_deviation(x, p: TrendStdParams) -> np.ndarray:
    """Deviation from the fast-smoothed signal in units of the running std."""
    x = np.asarray(x, dtype=float)
    sigma = std_estimate(x, p)
    rom = float(np.max(x) - np.min(x)) if x.size else 0.0
    eps = 1e-9 * (rom if rom > 0 else 1.0)
    if np.isnan(eps):
        eps = 1e-9
    return (x - iir_first_order(x, p.a_fast)) / np.maximum(sigma, eps)

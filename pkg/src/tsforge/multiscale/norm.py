"""Norm curves (pointwise mean and std over reference records) and the
deviation series measured against them."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyDataError, ModelStateError, ShapeError

SIGMA_FLOOR_FACTOR = 1e-9


class NormDeviationSeriesKind(enum.Enum):
    SIGNED = "SIGNED"
    ABS = "ABS"


@dataclass(frozen=True)
class NormModel:
    mu: np.ndarray
    sigma: np.ndarray
    epsilon: float
    floored: int = 0  # how many sigma entries were raised to epsilon

    def to_dict(self) -> dict:
        return {
            "type": "norm",
            "mu": self.mu.tolist(),
            "sigma": self.sigma.tolist(),
            "epsilon": self.epsilon,
            "floored": self.floored,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormModel":
        if d.get("type") != "norm":
            raise ModelStateError(f"not a norm model record: {d.get('type')!r}")
        return cls(np.asarray(d["mu"], dtype=float), np.asarray(d["sigma"], dtype=float),
                   float(d["epsilon"]), int(d.get("floored", 0)))


def fit_norm(reference_rows) -> NormModel:
    """Pointwise mean and divisor-N std of the reference records.

    Sigma values below ``1e-9 * std(all reference values)`` are raised to
    that floor (``1e-9`` if the whole reference set is constant).
    """
    r = np.asarray(reference_rows, dtype=float)
    if r.ndim != 2:
        raise ShapeError(f"expected reference rows as a 2-D array, got shape {r.shape}")
    if r.shape[0] < 2:
        raise EmptyDataError(f"a norm curve needs at least 2 reference records, got {r.shape[0]}")
    mu = r.mean(axis=0)
    sigma = np.sqrt(((r - mu) ** 2).mean(axis=0))
    global_std = float(np.sqrt(np.mean((r - r.mean()) ** 2)))
    eps = SIGMA_FLOOR_FACTOR * (global_std if global_std > 0 else 1.0)
    if not np.isfinite(eps):
        eps = SIGMA_FLOOR_FACTOR
    low = ~(sigma >= eps)  # also catches NaN
    sigma = np.where(low, eps, sigma)
    return NormModel(mu, sigma, eps, int(low.sum()))


def norm_deviation_series(x, model: NormModel,
                          kind: NormDeviationSeriesKind | str = NormDeviationSeriesKind.SIGNED) -> np.ndarray:
    kind = NormDeviationSeriesKind(kind)
    x = np.asarray(x, dtype=float)
    if x.shape != model.mu.shape:
        raise ShapeError(f"series length {x.shape} does not match norm curve {model.mu.shape}")
    d = (x - model.mu) / model.sigma
    return np.abs(d) if kind is NormDeviationSeriesKind.ABS else d

"""Membership-function design and evaluation for discretization/fuzzification.

Terms are triangles peaking at ascending breakpoints ``c_1 < ... < c_m``
with shoulders outside ``[c_1, c_m]``; neighbouring triangles cross linearly,
so memberships always sum to one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateError, EmptyDataError, ModelStateError, ParameterError

MIN_TERMS, MAX_TERMS = 2, 5
MAX_SLOTS = 5
KMEANS_SEED = 42
KMEANS_MAX_ITER = 100
KMEANS_TOL = 1e-10


class MembershipDesign(enum.Enum):
    MEDIAN = "MEDIAN"
    EQUAL_DISTRIBUTION = "EQUAL_DISTRIBUTION"
    CLUSTERING = "CLUSTERING"
    FIX = "FIX"


class DiscretizationMode(enum.Enum):
    CRISP = "CRISP"
    FUZZY = "FUZZY"


@dataclass(frozen=True)
class MembershipModel:
    breakpoints: np.ndarray
    design: MembershipDesign
    interpretable_rounding: bool = False

    def __post_init__(self):
        c = np.asarray(self.breakpoints, dtype=float)
        if c.ndim != 1 or not MIN_TERMS <= c.size <= MAX_TERMS:
            raise ParameterError(f"need {MIN_TERMS}..{MAX_TERMS} breakpoints, got {c.size}")
        if not np.all(np.isfinite(c)) or np.any(np.diff(c) <= 0):
            raise DegenerateError(f"breakpoints must be finite and strictly ascending: {c.tolist()}")
        object.__setattr__(self, "breakpoints", c)
        object.__setattr__(self, "design", MembershipDesign(self.design))

    @property
    def term_count(self) -> int:
        return self.breakpoints.size

    def to_dict(self) -> dict:
        return {
            "type": "membership",
            "breakpoints": self.breakpoints.tolist(),
            "design": self.design.value,
            "interpretable_rounding": self.interpretable_rounding,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MembershipModel":
        if d.get("type") != "membership":
            raise ModelStateError(f"not a membership model record: {d.get('type')!r}")
        return cls(np.asarray(d["breakpoints"], dtype=float), d["design"],
                   bool(d.get("interpretable_rounding", False)))


def _round_sig(v: float, digits: int = 2) -> float:
    if v == 0 or not np.isfinite(v):
        return float(v)
    return float(round(v, digits - 1 - int(np.floor(np.log10(abs(v))))))


def kmeans_1d(values: np.ndarray, k: int, seed: int = KMEANS_SEED) -> np.ndarray:
    """Lloyd iterations on a 1-D sample with k-means++ seeding; centers ascending."""
    v = np.asarray(values, dtype=float)
    rng = np.random.default_rng(seed)
    centers = [v[rng.integers(v.size)]]
    for _ in range(1, k):
        d2 = np.min((v[:, None] - np.asarray(centers)[None, :]) ** 2, axis=1)
        total = d2.sum()
        if total == 0:
            raise DegenerateError("k-means++ seeding found fewer distinct values than clusters")
        pick = np.searchsorted(np.cumsum(d2), rng.random() * total, side="right")
        centers.append(v[min(pick, v.size - 1)])
    centers = np.sort(np.asarray(centers))
    for _ in range(KMEANS_MAX_ITER):
        labels = np.argmin(np.abs(v[:, None] - centers[None, :]), axis=1)
        new = centers.copy()
        for j in range(k):
            members = v[labels == j]
            if members.size:
                new[j] = members.mean()
        new = np.sort(new)
        moved = np.max(np.abs(new - centers))
        centers = new
        if moved <= KMEANS_TOL:
            break
    return centers


def fit_membership(values, m: int, design: MembershipDesign | str = MembershipDesign.MEDIAN,
                   fix_params=None, interpretable_rounding: bool = False) -> MembershipModel:
    """Place ``m`` term peaks from a training sample (NaN values are ignored).

    MEDIAN uses the quantiles ``(t - 0.5) / m`` with linear interpolation,
    EQUAL_DISTRIBUTION spaces peaks evenly over ``[min, max]``, CLUSTERING
    takes sorted 1-D k-means centers and FIX takes ``fix_params`` verbatim.
    """
    design = MembershipDesign(design)
    if int(m) != m or not MIN_TERMS <= m <= MAX_TERMS:
        raise ParameterError(f"number of terms must be in {MIN_TERMS}..{MAX_TERMS}, got {m}")
    m = int(m)
    if design is MembershipDesign.FIX:
        if fix_params is None:
            raise ParameterError("FIX design needs explicit membership parameters")
        c = np.asarray(fix_params, dtype=float)
        if c.shape != (m,):
            raise ParameterError(f"FIX design needs {m} parameters, got {c.size}")
        if np.any(np.diff(c) <= 0):
            raise ParameterError(f"FIX parameters must be strictly ascending: {c.tolist()}")
    else:
        v = np.asarray(values, dtype=float).ravel()
        v = v[~np.isnan(v)]
        if v.size == 0:
            raise EmptyDataError("no training values for membership design")
        if design is MembershipDesign.EQUAL_DISTRIBUTION:
            c = np.linspace(v.min(), v.max(), m)
        else:
            if np.unique(v).size < m:
                raise DegenerateError(f"{design.value} design needs at least {m} distinct values")
            if design is MembershipDesign.MEDIAN:
                c = np.quantile(v, (np.arange(1, m + 1) - 0.5) / m)
            else:
                c = kmeans_1d(v, m)
    if interpretable_rounding:
        rounded = np.array([_round_sig(x) for x in c])
        if np.unique(rounded).size < m:
            raise DegenerateError(f"rounding merged breakpoints {c.tolist()} -> {rounded.tolist()}")
        c = np.sort(rounded)
    return MembershipModel(c, design, bool(interpretable_rounding))


def membership_eval(v, model: MembershipModel) -> np.ndarray:
    """Memberships of scalar or array ``v``; the term axis is last (length m)."""
    c = model.breakpoints
    v = np.asarray(v, dtype=float)
    mu = np.zeros(v.shape + (c.size,))
    nan = np.isnan(v)
    idx = np.clip(np.searchsorted(c, v, side="right") - 1, 0, c.size - 2)
    lo, hi = c[idx], c[idx + 1]
    right = np.clip((v - lo) / (hi - lo), 0.0, 1.0)
    np.put_along_axis(mu, idx[..., None], (1.0 - right)[..., None], axis=-1)
    np.put_along_axis(mu, idx[..., None] + 1, right[..., None], axis=-1)
    mu[nan] = np.nan
    return mu


def discretize_series(x, model: MembershipModel) -> np.ndarray:
    """Replace each sample by the peak of its winning term (ties: lower term)."""
    x = np.asarray(x, dtype=float)
    win = np.argmax(membership_eval(x, model), axis=-1)
    y = model.breakpoints[win]
    return np.where(np.isnan(x), np.nan, y)


def discretization_frequencies(x, model: MembershipModel | None,
                               mode: DiscretizationMode | str = DiscretizationMode.CRISP) -> np.ndarray:
    """Per-term share of samples, padded with zeros to 5 slots.

    CRISP counts samples by winning term; FUZZY averages memberships.  Any
    NaN sample makes every slot NaN.
    """
    if model is None:
        raise ModelStateError("membership model has not been fitted")
    mode = DiscretizationMode(mode)
    x = np.asarray(x, dtype=float)
    out = np.zeros(MAX_SLOTS)
    if np.isnan(x).any():
        out[:] = np.nan
        return out
    mu = membership_eval(x, model)
    m = model.term_count
    if mode is DiscretizationMode.CRISP:
        counts = np.bincount(np.argmax(mu, axis=-1), minlength=m)
        out[:m] = counts / x.size
    else:
        out[:m] = mu.mean(axis=0)
    return out

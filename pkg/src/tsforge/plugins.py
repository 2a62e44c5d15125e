"""Executable bindings from registry ids to kernels.

Each plugin has a per-record ``apply`` and, for the model-based plugins, a
dataset-level ``fit``.  ``apply`` always receives full-length records plus
the record's segment as a Python slice, and returns exactly
``ts_outputs + sf_outputs`` values (floats for SF, length-K arrays for TS).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from . import elementwise as ew
from . import sf
from .errors import ModelStateError, ParameterError, ShapeError
from .filters import (
    ButterworthSpec,
    MorletSpec,
    TrendStdParams,
    butterworth_filter,
    iir_first_order,
    individual_norm_deviation,
    morlet_filter,
    std_estimate,
    trend_estimate,
)
from .multiscale import (
    MembershipModel,
    NormModel,
    PcaModel,
    WaveletSpec,
    discretization_frequencies,
    discretize_series,
    fit_membership,
    fit_norm,
    fit_pca,
    norm_deviation_series,
    pca_transform_channels,
    wavedec_bands,
)
from .registry import NORM_PLUGINS, REGISTRY
from .windows import DEFAULT_FORGETTING, derivative, forgetting_envelope, window_stat

LAMBDA_ENV = "TSFORGE_ENGINE_LAMBDA"

MODEL_TYPES = {"pca": PcaModel, "membership": MembershipModel, "norm": NormModel}


@dataclass(frozen=True)
class Env:
    sample_rate: float = 1.0
    constants: Mapping[str, Any] = field(default_factory=dict)

    @property
    def forgetting(self) -> float:
        return float(self.constants.get("forgetting_lambda", DEFAULT_FORGETTING))


def resolve_constants(constants: Mapping | None = None, environ: Mapping | None = None) -> dict:
    """Engine constants with precedence: pipeline config > environment > built-in default."""
    environ = os.environ if environ is None else environ
    out: dict[str, Any] = {"forgetting_lambda": DEFAULT_FORGETTING}
    raw = environ.get(LAMBDA_ENV)
    if raw not in (None, ""):
        try:
            out["forgetting_lambda"] = float(raw)
        except ValueError:
            raise ParameterError(f"{LAMBDA_ENV}={raw!r} is not a number") from None
    out.update(dict(constants or {}))
    lam = out["forgetting_lambda"]
    if isinstance(lam, bool) or not isinstance(lam, (int, float)) or not 0 <= lam < 1:
        raise ParameterError(f"forgetting_lambda must lie in [0, 1), got {lam!r}")
    out["forgetting_lambda"] = float(lam)
    if out.get("mbf_fix") is not None:
        out["mbf_fix"] = [float(v) for v in out["mbf_fix"]]
    return out


def model_from_dict(d: Mapping):
    try:
        cls = MODEL_TYPES[d["type"]]
    except KeyError:
        raise ModelStateError(f"unknown model record type {d.get('type')!r}") from None
    return cls.from_dict(dict(d))


@dataclass(frozen=True)
class PluginImpl:
    apply: Callable[..., list]
    # fit(mats, segments, train_idx, params, env) -> model; mats are N x K arrays
    fit: Callable[..., Any] | None = None
    model_type: type | None = None


def _sl(sl):
    return slice(None) if sl is None else sl


def _rows(mat: np.ndarray, segments, idx) -> list[np.ndarray]:
    if segments is None:
        return [mat[i] for i in idx]
    return [mat[i, segments[i, 0] - 1 : segments[i, 1]] for i in idx]


# ---------------------------------------------------------------------------
# SF plugins

def _basic(kind):
    return PluginImpl(lambda xs, sl, p, m, env: [sf.basic_sf(xs[0][_sl(sl)], kind)])


def _nd(kind):
    def apply(xs, sl, p, model, env):
        s = _sl(sl)
        return [sf.norm_deviation_sf(xs[0][s], model.mu[s], model.sigma[s], kind)]
    return PluginImpl(apply, _fit_norm, NormModel)


def _fit_norm(mats, segments, idx, p, env):
    # the norm curve is always fitted on full records; segments apply at evaluation
    return fit_norm(mats[0][np.asarray(idx)])


def _design(p):
    design = p["design"]
    rounding = design.endswith("_INTERPRETABLE")
    return design.removesuffix("_INTERPRETABLE"), rounding


def _fit_membership(mats, segments, idx, p, env):
    design, rounding = _design(p)
    values = np.concatenate(_rows(mats[0], segments, idx))
    return fit_membership(values, p["terms"], design, env.constants.get("mbf_fix"), rounding)


def _discr_sf(mode):
    def apply(xs, sl, p, model, env):
        return list(discretization_frequencies(xs[0][_sl(sl)], model, mode))
    return PluginImpl(apply, _fit_membership, MembershipModel)


def _fit_pca_sf(mats, segments, idx, p, env):
    rows = _rows(mats[0], segments, idx)
    if len({r.size for r in rows}) > 1:
        raise ShapeError("TS->PC SF needs segments of equal length in every record")
    return fit_pca(np.vstack(rows), p["components"], p["normalize"] == "true")


def _pca_sf(xs, sl, p, model, env):
    return list(sf.pca_scores_sf(xs[0][_sl(sl)], model, p["components"]))


# ---------------------------------------------------------------------------
# TS plugins

def _unary(kind, param=None):
    def apply(xs, sl, p, m, env):
        return [ew.unary(xs[0], kind, p[param] if param else 1.0)]
    return PluginImpl(apply)


def _combine(kind):
    return PluginImpl(lambda xs, sl, p, m, env: [ew.combine(xs, kind)])


def _window(kind, causality="CAUSAL"):
    return PluginImpl(lambda xs, sl, p, m, env: [window_stat(xs[0], kind, p["window"], causality)])


def _deriv(order, causality="ACAUSAL"):
    def apply(xs, sl, p, m, env):
        return [derivative(xs[0], order, causality, p["time"], env.sample_rate)]
    return PluginImpl(apply)


def _triple(p):
    return TrendStdParams(*p["a_fast_slow_sigma"])


def _fil(xs, sl, p, m, env):
    f1, f2 = p["frequencies"]
    spec = ButterworthSpec(p["filter_type"], f1, f2, p["order"], p["init"])
    return [butterworth_filter(xs[0], spec, env.sample_rate)]


def _morl(xs, sl, p, m, env):
    spec = MorletSpec(p["center_freq"], p["eigen_freq"], p["causal"] == "true")
    return [morlet_filter(xs[0], spec, env.sample_rate)]


def _ndts(kind):
    return PluginImpl(lambda xs, sl, p, model, env: [norm_deviation_series(xs[0], model, kind)],
                      _fit_norm, NormModel)


def _discr_ts(xs, sl, p, model, env):
    x = xs[0]
    if sl is None:
        return [discretize_series(x, model)]
    y = np.full(x.size, np.nan)
    y[sl] = discretize_series(x[sl], model)
    return [y]


def _fit_pca_ts(mats, segments, idx, p, env):
    if p["shared"] == "false":
        return None
    # one row per (record, sample), records in index order
    rows = np.concatenate([np.stack([m[i] for m in mats], axis=1) for i in idx])
    return fit_pca(rows, p["components"], p["normalize"] == "true")


def _pca_ts(xs, sl, p, model, env):
    chans = np.stack(xs)
    if model is None:
        model = fit_pca(chans.T, p["components"], p["normalize"] == "true")
    out = pca_transform_channels(chans, model)
    if p["components"] == 1:
        out[1] = 0.0
    return [out[0], out[1]]


def _wavedec(xs, sl, p, m, env):
    bands = wavedec_bands(xs[0], WaveletSpec(p["wavelet"], p["levels"], p["implementation"]))
    return list(bands)


IMPLEMENTATIONS: dict[str, PluginImpl] = {
    "COG": _basic("COG"),
    "MAX": _basic("MAX"),
    "MAPO": _basic("MAPO"),
    "MEAN": _basic("MEAN"),
    "MEAN-NaN": _basic("MEAN-NaN"),
    "MEDIAN": _basic("MEDIAN"),
    "MEDIAN-NaN": _basic("MEDIAN-NaN"),
    "MIN": _basic("MIN"),
    "MIPO": _basic("MIPO"),
    "ND Abs": _nd("ABS"),
    "ND Dir": _nd("DIR"),
    "ROM": _basic("ROM"),
    "STD SF": _basic("STD SF"),
    "SUM": _basic("SUM"),
    "TS->DISCR SF": _discr_sf("CRISP"),
    "TS->FUZZY SF": _discr_sf("FUZZY"),
    "TS->PC SF": PluginImpl(_pca_sf, _fit_pca_sf, PcaModel),
    "TS->SF": PluginImpl(lambda xs, sl, p, m, env: [sf.sample_at(xs[0], p["sample"])]),
    "ND Sign": _nd("SIGN"),
    "ABS": _unary("ABS"),
    "FE-MED-AC": _window("MEDIAN", "ACAUSAL"),
    "A": _deriv(2),
    "ADDTS": _combine("ADDTS"),
    "SIGNIN": _unary("SIGNIN"),
    "ROOT": _unary("ROOT"),
    "Trend": PluginImpl(lambda xs, sl, p, m, env: [trend_estimate(xs[0], TrendStdParams(*p["a_fast_slow"]))]),
    "DIFF": PluginImpl(lambda xs, sl, p, m, env: [ew.diff_pair(xs[0], xs[1])]),
    "StdTS": PluginImpl(lambda xs, sl, p, m, env: [std_estimate(xs[0], _triple(p))]),
    "Fil-MAX": PluginImpl(lambda xs, sl, p, m, env: [forgetting_envelope(xs[0], "MAX", env.forgetting)]),
    "Fil-MIN": PluginImpl(lambda xs, sl, p, m, env: [forgetting_envelope(xs[0], "MIN", env.forgetting)]),
    "FIL": PluginImpl(_fil),
    "Morl": PluginImpl(_morl),
    "IIR": PluginImpl(lambda xs, sl, p, m, env: [iir_first_order(xs[0], p["a"])]),
    "NABW": PluginImpl(lambda xs, sl, p, m, env: [individual_norm_deviation(xs[0], _triple(p))]),
    "J": _deriv(3),
    "ZEROJump": PluginImpl(lambda xs, sl, p, m, env: [ew.zero_jump(xs[0])]),
    "LOG10": _unary("LOG10"),
    "FE-MAX": _window("MAX"),
    "MAXTS": _combine("MAXTS"),
    "FE-MEAN": _window("MEAN"),
    "MEANTS": _combine("MEANTS"),
    "FE-MED": _window("MEDIAN"),
    "FE-MIN": _window("MIN"),
    "MINTS": _combine("MINTS"),
    "MULTTS": _combine("MULTTS"),
    "CONST": _unary("CONST", "gain"),
    "NDTS ABS": _ndts("ABS"),
    "NDTS": _ndts("SIGNED"),
    "NORM": PluginImpl(lambda xs, sl, p, m, env: [ew.normalize(xs[0], p["type"])]),
    "NORMMEAN": PluginImpl(lambda xs, sl, p, m, env: [ew.normalize(xs[0], "MEAN_DIVIDE")]),
    "FE-ROM": _window("ROM"),
    "RELRAT": PluginImpl(lambda xs, sl, p, m, env: [ew.relative_ratio(xs[0], xs[1])]),
    "DETREND": PluginImpl(lambda xs, sl, p, m, env: [ew.detrend(xs[0], p["method"])]),
    "SORT TS": PluginImpl(lambda xs, sl, p, m, env: [ew.sort_values(xs[0])]),
    "SQR": _unary("SQR"),
    "TS->DISCR TS": PluginImpl(_discr_ts, _fit_membership, MembershipModel),
    "TS->PC TS": PluginImpl(_pca_ts, _fit_pca_ts, PcaModel),
    "SHIFT": PluginImpl(lambda xs, sl, p, m, env: [ew.shift(xs[0], p["shift"])]),
    "REGION": PluginImpl(lambda xs, sl, p, m, env: [ew.region(xs[0], p["lower"], p["upper"])]),
    "THRES": PluginImpl(lambda xs, sl, p, m, env: [ew.threshold(xs[0], p["threshold"])]),
    "V": _deriv(1),
    "V_kausal": _deriv(1, "CAUSAL"),
    "Wavedec": PluginImpl(_wavedec),
}

assert set(IMPLEMENTATIONS) == set(REGISTRY), set(IMPLEMENTATIONS) ^ set(REGISTRY)


def model_key(plugin_id: str, inputs: list[str], base_name: str) -> str:
    """Key under which a fitted model is stored.

    All norm-curve plugins on the same channel share one model, so e.g. the
    segment mean of NDTS ABS and ND Abs see identical floored sigmas.
    """
    if plugin_id in NORM_PLUGINS:
        return f"norm:{inputs[0]}"
    return base_name

"""Plugin contracts and invocation validation.

Every plugin is described by a :class:`PluginDescriptor`: kind (SF or TS),
time-series input/output arity, single-feature output count, whether a
segment may restrict it, and a parameter schema.  :func:`validate_invocation`
checks an :class:`Invocation` against a dataset and reports *all* problems.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

from .errors import PluginNotFoundError
from .filters.morlet import MorletSpec, morlet_kernel

UNBOUNDED = "unbounded"
PARAM_KINDS = ("real", "positive-real", "positive-integer", "integer", "enum", "real-pair", "real-triple")
BOOL_VALUES = ("false", "true")


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str
    enum_values: tuple[str, ...] | None = None
    default: Any = None
    low: float | None = None
    high: float | None = None
    high_open: bool = False
    at_most_k: bool = False
    description: str = ""

    def __post_init__(self):
        if self.kind not in PARAM_KINDS:
            raise ValueError(f"unknown parameter kind {self.kind!r}")
        if self.kind == "enum" and not self.enum_values:
            raise ValueError(f"enum parameter {self.name!r} needs enum_values")
        if self.enum_values is not None:
            object.__setattr__(self, "enum_values", tuple(self.enum_values))
        if isinstance(self.default, list):
            object.__setattr__(self, "default", tuple(self.default))

    @property
    def required(self) -> bool:
        return self.default is None

    def to_dict(self) -> dict:
        d = {"name": self.name, "kind": self.kind}
        for key in ("enum_values", "default", "low", "high"):
            val = getattr(self, key)
            if val is not None:
                d[key] = list(val) if isinstance(val, tuple) else val
        if self.high_open:
            d["high_open"] = True
        if self.at_most_k:
            d["at_most_k"] = True
        if self.description:
            d["description"] = self.description
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "ParamSpec":
        return cls(**dict(d))

    def coerce(self, value, k_count: int | None = None) -> tuple[Any, list[str]]:
        """Return the canonical value and a list of problems (empty if valid)."""
        problems: list[str] = []
        kind = self.kind
        if kind == "enum":
            if isinstance(value, bool) and self.enum_values == BOOL_VALUES:
                value = BOOL_VALUES[int(value)]
            matches = [e for e in self.enum_values if str(value).upper() == e.upper()]
            if not matches:
                return value, [f"{self.name}: {value!r} is not one of {list(self.enum_values)}"]
            return matches[0], []
        if kind in ("real-pair", "real-triple"):
            n = 2 if kind == "real-pair" else 3
            vals = [value] if isinstance(value, (int, float)) and not isinstance(value, bool) else value
            try:
                vals = [float(v) for v in vals]
            except (TypeError, ValueError):
                return value, [f"{self.name}: expected {n} numbers, got {value!r}"]
            if kind == "real-pair" and len(vals) == 1:
                vals = vals * 2
            if len(vals) != n:
                return value, [f"{self.name}: expected {n} numbers, got {len(vals)}"]
            for v in vals:
                problems += self._range(v, k_count)
            return tuple(vals), problems
        if isinstance(value, bool):
            return value, [f"{self.name}: expected a number, got {value!r}"]
        try:
            num = float(value)
        except (TypeError, ValueError):
            return value, [f"{self.name}: expected a number, got {value!r}"]
        if math.isnan(num) or math.isinf(num):
            return value, [f"{self.name}: must be finite, got {value!r}"]
        if kind in ("positive-integer", "integer"):
            if num != int(num):
                return value, [f"{self.name}: expected an integer, got {value!r}"]
            num = int(num)
            if kind == "positive-integer" and num < 1:
                problems.append(f"{self.name}: must be >= 1, got {num}")
        elif kind == "positive-real" and not num > 0:
            problems.append(f"{self.name}: must be > 0, got {num}")
        return num, problems + self._range(num, k_count)

    def _range(self, v: float, k_count: int | None) -> list[str]:
        out = []
        if self.low is not None and v < self.low:
            out.append(f"{self.name}: {v} is below the minimum {self.low}")
        if self.high is not None:
            if self.high_open and not v < self.high:
                out.append(f"{self.name}: {v} must be smaller than {self.high}")
            elif not self.high_open and v > self.high:
                out.append(f"{self.name}: {v} exceeds the maximum {self.high}")
        if self.at_most_k and k_count is not None and v > k_count:
            out.append(f"{self.name}: {v} exceeds the record length K={k_count}")
        return out


@dataclass(frozen=True)
class PluginDescriptor:
    id: str
    display_name: str
    kind: str
    ts_inputs: int | str
    ts_outputs: int
    sf_outputs: int
    segment_capable: bool
    params: tuple[ParamSpec, ...] = ()
    function_name: str = ""
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if self.kind == "SF" and not (self.ts_outputs == 0 and self.sf_outputs >= 1):
            raise ValueError(f"{self.id}: SF plugins emit single features only")
        if self.kind == "TS" and not (self.sf_outputs == 0 and self.ts_outputs >= 1):
            raise ValueError(f"{self.id}: TS plugins emit time series only")
        if self.kind not in ("SF", "TS"):
            raise ValueError(f"{self.id}: unknown kind {self.kind!r}")

    @property
    def n_outputs(self) -> int:
        return self.ts_outputs + self.sf_outputs

    def param(self, name: str) -> ParamSpec:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "display_name": self.display_name,
            "kind": self.kind,
            "ts_inputs": self.ts_inputs,
            "ts_outputs": self.ts_outputs,
            "sf_outputs": self.sf_outputs,
            "segment_capable": self.segment_capable,
            "params": [p.to_dict() for p in self.params],
            "function_name": self.function_name,
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "PluginDescriptor":
        d = dict(d)
        d["params"] = tuple(ParamSpec.from_dict(p) for p in d.get("params", ()))
        return cls(**d)


@dataclass
class Invocation:
    plugin_id: str
    inputs: list[str]
    params: dict = field(default_factory=dict)
    segment: str | None = None
    output: str | None = None


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str
    step: int | None = None

    def __str__(self) -> str:
        where = f"step {self.step}: " if self.step is not None else ""
        return f"{where}[{self.code}] {self.message}"


# ---------------------------------------------------------------------------
# parameter building blocks

def _smoothing(name, default, description):
    return ParamSpec(name, "real-pair" if len(default) == 2 else "real-triple", default=default,
                     low=0.0, high=1.0, high_open=True, description=description)


_WINDOW = ParamSpec("window", "positive-integer", default=5, at_most_k=True,
                    description="window length in sample points")
_TIME = ParamSpec("time", "enum", ("PER_SAMPLE", "PER_SECOND"), default="PER_SAMPLE",
                  description="derivative scaling: per sample point or per second")
_TERMS = ParamSpec("terms", "positive-integer", default=5, low=2, high=5,
                   description="number of linguistic terms")
_DESIGN = ParamSpec(
    "design", "enum",
    ("MEDIAN", "MEDIAN_INTERPRETABLE", "EQUAL_DISTRIBUTION", "EQUAL_DISTRIBUTION_INTERPRETABLE",
     "CLUSTERING", "CLUSTERING_INTERPRETABLE", "FIX"),
    default="MEDIAN",
    description="membership function design; *_INTERPRETABLE rounds peaks to 2 significant digits; "
                "FIX takes the engine constant mbf_fix",
)
_COMPONENTS = ParamSpec("components", "positive-integer", default=2, low=1, high=2,
                        description="number of principal components s_d")
_NORMALIZE = ParamSpec("normalize", "enum", BOOL_VALUES, default="false",
                       description="standardize each dimension to unit variance before PCA")
_TREND = _smoothing("a_fast_slow", (0.9, 0.99), "smoothing factors (a_fast, a_slow), a_slow > a_fast")
_TRIPLE = _smoothing("a_fast_slow_sigma", (0.9, 0.99, 0.99),
                     "smoothing factors (a_fast, a_slow, a_sigma), a_slow > a_fast")


def _d(pid, name, kind, ts_in, ts_out, sf_out, seg, fn, params=(), description=""):
    return PluginDescriptor(pid, name, kind, ts_in, ts_out, sf_out, seg, tuple(params), fn, description)


def _sf(pid, name, fn, description, params=(), sf_out=1, seg=True):
    return _d(pid, name, "SF", 1, 0, sf_out, seg, fn, params, description)


def _ts(pid, name, fn, description, params=(), ts_in=1, ts_out=1, seg=False):
    return _d(pid, name, "TS", ts_in, ts_out, 0, seg, fn, params, description)


_PLUGINS = [
    _sf("COG", "COG SF", "plugin_cog_em.m", "center of gravity (1-based sample position)"),
    _sf("MAX", "Maximum", "plugin_max.m", "maximum value"),
    _sf("MAPO", "Maximum position", "plugin_mapo.m", "1-based position of the first maximum"),
    _sf("MEAN", "Mean value SF", "plugin_mean_em.m", "mean value"),
    _sf("MEAN-NaN", "Mean value SF NaN", "plugin_mean_em_nan.m", "mean value ignoring NaN"),
    _sf("MEDIAN", "Median SF", "plugin_median_em.m", "median"),
    _sf("MEDIAN-NaN", "Median SF NaN", "plugin_median_em_nan.m", "median ignoring NaN"),
    _sf("MIN", "Minimum", "plugin_min.m", "minimum value"),
    _sf("MIPO", "Minimum position", "plugin_mipo.m", "1-based position of the first minimum"),
    _sf("ND Abs", "Norm deviation (absolute value)", "plugin_normzahl_betrag.m",
        "mean |x - mu| / sigma against the reference norm curve"),
    _sf("ND Dir", "Norm deviation (direction)", "plugin_normzahl_richtung.m",
        "mean (x - mu) / sigma against the reference norm curve"),
    _sf("ROM", "Range of Motion", "plugin_rom.m", "max - min"),
    _sf("STD SF", "STD SF", "plugin_std_em.m", "standard deviation, divisor K"),
    _sf("SUM", "Sum SF", "plugin_sum_em.m", "sum of values"),
    _sf("TS->DISCR SF", "TS->DISCR SF MEAN", "plugin_discr_em.m",
        "share of samples per crisp term", (_TERMS, _DESIGN), sf_out=5),
    _sf("TS->FUZZY SF", "TS->FUZZY SF MEAN", "plugin_fuzzy_em.m",
        "mean membership per fuzzy term", (_TERMS, _DESIGN), sf_out=5),
    _sf("TS->PC SF", "TS->PC SF", "plugin_zrhkem.m",
        "principal component scores of the record (K -> s_d)", (_COMPONENTS, _NORMALIZE), sf_out=2),
    _sf("TS->SF", "TS->SF", "plugin_zr_em.m", "value at one sample point",
        (ParamSpec("sample", "positive-integer", default=1, at_most_k=True,
                   description="1-based sample point"),), seg=False),
    _sf("ND Sign", "below/above norm mean value", "plugin_normzahl_mittelwert.m",
        "mean sign(x - mu) against the reference norm curve"),
    _ts("ABS", "Absolute value", "plugin_abs.m", "absolute value"),
    _ts("FE-MED-AC", "Acausal median of a window", "plugin_zr_fenster_medac.m",
        "centred sliding median", (_WINDOW,)),
    _ts("A", "Acceleration", "plugin_beschleunigung.m", "second derivative (acausal)", (_TIME,)),
    _ts("ADDTS", "Addition of time series", "plugin_add_zr.m", "sum of all inputs", ts_in=UNBOUNDED),
    _ts("SIGNIN", "Change sign", "plugin_vorzeichen_umkehr.m", "multiply by -1"),
    _ts("ROOT", "Compute square root", "plugin_root.m", "square root"),
    _ts("Trend", "Compute trend", "plugin_iirfilter_trend.m",
        "difference of a fast and a slow first-order IIR filter", (_TREND,)),
    _ts("DIFF", "Difference of two time series", "plugin_diffzr.m", "first minus second input", ts_in=2),
    _ts("StdTS", "Estimate standard deviation", "plugin_iirfilter_stdschaetzer.m",
        "running standard deviation from IIR filters", (_TRIPLE,)),
    _ts("Fil-MAX", "Filtered maximum", "plugin_zr_gefiltert_max.m",
        "causal maximum envelope with exponential forgetting (engine constant forgetting_lambda)"),
    _ts("Fil-MIN", "Filtered minimum", "plugin_zr_gefiltert_min.m",
        "causal minimum envelope with exponential forgetting (engine constant forgetting_lambda)"),
    _ts("FIL", "Filtering", "plugin_filter.m", "Butterworth filter", (
        ParamSpec("filter_type", "enum", ("LOWPASS", "HIGHPASS", "BANDPASS"), default="LOWPASS",
                  description="frequency characteristic"),
        ParamSpec("frequencies", "real-pair", low=0.0,
                  description="critical frequencies in Hz; the second is used by BANDPASS only"),
        ParamSpec("order", "positive-integer", default=4, low=1, high=8, description="filter order"),
        ParamSpec("init", "enum", ("ZERO", "STEADY_STATE"), default="STEADY_STATE",
                  description="initial filter state; STEADY_STATE assumes x[1] held forever"),
    )),
    _ts("Morl", "Filtering with Morlet wavelet", "plugin_morletfilter.m", "Morlet band filter", (
        ParamSpec("center_freq", "positive-real", description="center of the pass region in Hz"),
        ParamSpec("eigen_freq", "positive-real", description="eigenfrequency setting the band width in Hz"),
        ParamSpec("causal", "enum", BOOL_VALUES, default="false", description="one-sided kernel"),
    )),
    _ts("IIR", "IIR filter", "plugin_iirfilter.m", "first-order lowpass x_f[k+1] = a x_f[k] + (1-a) x[k]",
        (ParamSpec("a", "real", default=0.9, low=0.0, high=1.0, high_open=True,
                   description="0: no smoothing, towards 1: strong smoothing"),)),
    _ts("NABW", "Individual norm deviation", "plugin_normabweichung.m",
        "deviation from the fast IIR output in units of the running std", (_TRIPLE,)),
    _ts("J", "Jerk", "plugin_ruck.m", "third derivative (acausal)", (_TIME,)),
    _ts("ZEROJump", "Jump to zero", "plugin_nsprung.m", "1 where a nonzero value drops to zero"),
    _ts("LOG10", "Logarithm 10 TS", "plugin_log10_zr.m", "base-10 logarithm"),
    _ts("FE-MAX", "Maximum of a window", "plugin_zr_fenster_max.m", "causal sliding maximum", (_WINDOW,)),
    _ts("MAXTS", "Maximum of multiple time series", "plugin_max_zr.m", "samplewise maximum", ts_in=UNBOUNDED),
    _ts("FE-MEAN", "Mean of a window", "plugin_zr_fenster_mean.m", "causal sliding mean", (_WINDOW,)),
    _ts("MEANTS", "Mean value of multiple time series", "plugin_mean_zr.m", "samplewise mean",
        ts_in=UNBOUNDED),
    _ts("FE-MED", "Median of a window", "plugin_zr_fenster_median.m", "causal sliding median", (_WINDOW,)),
    _ts("FE-MIN", "Minimum of a window", "plugin_zr_fenster_min.m", "causal sliding minimum", (_WINDOW,)),
    _ts("MINTS", "Minimum of multiple time series", "plugin_min_zr.m", "samplewise minimum", ts_in=UNBOUNDED),
    _ts("MULTTS", "Multiplication of time series", "plugin_mult_zr.m", "samplewise product",
        ts_in=UNBOUNDED),
    _ts("CONST", "Multiplication with a constant", "plugin_mult_const.m", "multiply by a constant gain",
        (ParamSpec("gain", "real", default=1.0, description="constant gain"),)),
    _ts("NDTS ABS", "Norm deviation time series absolute value", "plugin_normzeitreihe_abs.m",
        "|x - mu| / sigma per sample"),
    _ts("NDTS", "Norm time series", "plugin_normzeitreihe.m", "(x - mu) / sigma per sample"),
    _ts("NORM", "Normalized time series", "plugin_normalized_ts.m", "normalize the record", (
        ParamSpec("type", "enum", ("MINMAX_01", "ZSCORE", "MAXABS", "MEAN_DIVIDE"), default="MINMAX_01",
                  description="normalization type"),)),
    _ts("NORMMEAN", "Normalized to mean value", "plugin_mean_norm_ts.m", "divide by the record mean"),
    _ts("FE-ROM", "ROM of a window", "plugin_zr_fenster_rom.m", "causal sliding range", (_WINDOW,)),
    _ts("RELRAT", "Relative ratio of two time series", "plugin_verhzr.m", "x1 / (x1 + x2)", ts_in=2),
    _ts("DETREND", "Remove trend", "plugin_detrend.m", "remove linear trend or mean", (
        ParamSpec("method", "enum", ("LINEAR", "CONSTANT"), default="LINEAR",
                  description="LINEAR removes the least-squares line, CONSTANT the mean"),)),
    _ts("SORT TS", "Sorted time series", "plugin_sort_zr.m", "values in ascending order"),
    _ts("SQR", "Square", "plugin_square.m", "square"),
    _ts("TS->DISCR TS", "TS->DISCR TS MEAN", "plugin_discr_zr.m",
        "replace samples by the peak of their winning term", (_TERMS, _DESIGN), seg=True),
    _ts("TS->PC TS", "TS->PC TS", "plugin_zrhkzr.m", "principal components across input series", (
        _COMPONENTS, _NORMALIZE,
        ParamSpec("shared", "enum", BOOL_VALUES, default="true",
                  description="one transformation matrix for all records (false: refit per record)"),
    ), ts_in=UNBOUNDED, ts_out=2),
    _ts("SHIFT", "Time shift", "plugin_shift_ts.m", "shift by whole samples, edge replicated", (
        ParamSpec("shift", "integer", default=0, description="positive: to the future, negative: to the past"),)),
    _ts("REGION", "Value in region", "plugin_timeseries_region.m", "1 inside [lower, upper], else 0", (
        ParamSpec("lower", "real", default=0.0, description="lower threshold (inclusive)"),
        ParamSpec("upper", "real", default=1.0, description="upper threshold (inclusive)"),
    )),
    _ts("THRES", "Value larger than threshold", "plugin_timeseries_threshold.m", "1 above threshold, else 0", (
        ParamSpec("threshold", "real", default=0.0, description="strict threshold"),)),
    _ts("V", "Velocity", "plugin_geschwindigkeit.m", "first derivative (acausal)", (_TIME,)),
    _ts("V_kausal", "Velocity (causal)", "plugin_geschwindigkeit_kausal.m", "first derivative (causal)",
        (_TIME,)),
    _ts("Wavedec", "Wavedec", "plugin_wavedec.m",
        "wavelet band split: approximation at the last level, then details of levels 1..4", (
            ParamSpec("wavelet", "enum", ("HAAR", "DB2", "DB4"), default="HAAR", description="wavelet type"),
            ParamSpec("levels", "positive-integer", default=4, low=1, high=4, description="number of levels"),
            ParamSpec("implementation", "enum", ("SYMMETRIC", "PERIODIZATION"), default="SYMMETRIC",
                      description="boundary handling"),
        ), ts_out=5),
]

REGISTRY: Mapping[str, PluginDescriptor] = {p.id: p for p in _PLUGINS}

# Norm-curve plugins share one fitted reference model per input channel.
NORM_PLUGINS = frozenset({"ND Abs", "ND Dir", "ND Sign", "NDTS", "NDTS ABS"})


def registry_lookup(plugin_id: str) -> PluginDescriptor:
    try:
        return REGISTRY[plugin_id]
    except KeyError:
        raise PluginNotFoundError(f"unknown plugin {plugin_id!r}") from None


def registry_to_json(descriptors: Iterable[PluginDescriptor] | None = None) -> str:
    descs = REGISTRY.values() if descriptors is None else descriptors
    return json.dumps([d.to_dict() for d in descs], indent=2)


def registry_from_json(text: str) -> dict[str, PluginDescriptor]:
    return {d["id"]: PluginDescriptor.from_dict(d) for d in json.loads(text)}


def registry_table() -> list[dict]:
    """One row per plugin, in the order of the plugin listing."""
    rows = []
    for d in REGISTRY.values():
        rows.append({
            "id": d.id,
            "name": d.display_name,
            "type": d.kind,
            "ts_inputs": d.ts_inputs,
            "ts_outputs": d.ts_outputs,
            "sf_outputs": d.sf_outputs,
            "segments": "yes" if d.segment_capable else "none",
            "n_params": len(d.params),
            "params": " ".join(p.name for p in d.params),
            "function": d.function_name,
        })
    return rows


# ---------------------------------------------------------------------------
# validation

def output_base_name(plugin_id: str, inputs: list[str], base: str | None = None,
                     segment: str | None = None) -> str:
    if base is not None:
        return base
    name = f"{plugin_id}({','.join(inputs)})"
    return f"{name}@{segment}" if segment else name


def default_output_names(desc: PluginDescriptor, inputs: list[str], base: str | None = None,
                         segment: str | None = None) -> list[str]:
    """``ID(in1,in2)`` (``@segment`` appended when restricted), ``#i`` for multi-output plugins."""
    base = output_base_name(desc.id, inputs, base, segment)
    n = desc.n_outputs
    return [base] if n == 1 else [f"{base}#{i}" for i in range(1, n + 1)]


def _cross_checks(pid: str, p: dict, k: int | None, fs: float | None, n_inputs: int,
                  constants: Mapping) -> list[tuple[str, str]]:
    out = []
    if pid == "Trend" or pid in ("StdTS", "NABW"):
        vals = p.get("a_fast_slow") or p.get("a_fast_slow_sigma")
        if vals is not None and not vals[1] > vals[0]:
            out.append(("param-range", f"a_slow ({vals[1]}) must be greater than a_fast ({vals[0]})"))
    elif pid == "REGION":
        if p.get("lower") is not None and p.get("upper") is not None and p["lower"] > p["upper"]:
            out.append(("param-range", f"lower ({p['lower']}) exceeds upper ({p['upper']})"))
    elif pid == "SHIFT":
        if k is not None and p.get("shift") is not None and abs(p["shift"]) >= k:
            out.append(("param-range", f"|shift| = {abs(p['shift'])} must be smaller than K={k}"))
    elif pid == "FIL" and fs is not None and p.get("frequencies") is not None:
        f1, f2 = p["frequencies"]
        nyq = fs / 2
        if not 0 < f1 < nyq:
            out.append(("param-range", f"cutoff {f1} Hz must lie in (0, {nyq}) Hz"))
        if p.get("filter_type") == "BANDPASS" and not f1 < f2 < nyq:
            out.append(("param-range", f"bandpass needs f1 < f2 < {nyq} Hz, got ({f1}, {f2})"))
    elif pid == "Morl" and fs is not None and p.get("center_freq") is not None:
        if not p["center_freq"] < fs / 2:
            out.append(("param-range", f"center_freq {p['center_freq']} Hz must be below {fs / 2} Hz"))
        elif p.get("eigen_freq") is not None and p.get("causal") is not None and k is not None:
            taps, _ = morlet_kernel(MorletSpec(p["center_freq"], p["eigen_freq"], p["causal"] == "true"), fs)
            if taps.size > k:
                out.append(("param-range", f"Morlet kernel needs {taps.size} samples, K={k}; "
                                           "raise eigen_freq or use longer records"))
    elif pid == "Wavedec" and k is not None and p.get("levels") is not None:
        need = 2 ** p["levels"]
        if k < need:
            out.append(("param-range", f"{p['levels']} levels need K >= {need}, K={k}"))
        elif p.get("implementation") == "PERIODIZATION" and k % need:
            out.append(("param-range", f"PERIODIZATION over {p['levels']} levels needs K divisible by {need}"))
    elif pid == "TS->PC TS" and p.get("components") is not None and p["components"] > n_inputs:
        out.append(("param-range", f"{p['components']} components need at least as many input series"))
    elif pid in ("TS->DISCR SF", "TS->FUZZY SF", "TS->DISCR TS") and p.get("design") == "FIX":
        fix = constants.get("mbf_fix")
        terms = p.get("terms")
        if fix is None:
            out.append(("param-missing", "FIX design needs the engine constant 'mbf_fix'"))
        elif terms is not None and len(fix) != terms:
            out.append(("param-range", f"mbf_fix has {len(fix)} values, {terms} terms requested"))
        elif any(b <= a for a, b in zip(fix, fix[1:])):
            out.append(("param-range", "mbf_fix values must be strictly ascending"))
    if pid in ("V", "V_kausal", "A", "J") and k is not None:
        order = {"V": 1, "V_kausal": 1, "A": 2, "J": 3}[pid]
        if k < order + 1:
            out.append(("param-range", f"derivative of order {order} needs K >= {order + 1}, K={k}"))
    return out


def resolve_params(desc: PluginDescriptor, params: Mapping | None, k_count: int | None = None,
                   sample_rate: float | None = None, n_inputs: int = 1,
                   constants: Mapping | None = None) -> tuple[dict, list[tuple[str, str]]]:
    """Fill defaults, coerce values, and collect ``(code, message)`` problems."""
    params = dict(params or {})
    resolved, problems = {}, []
    known = {p.name for p in desc.params}
    for name in params:
        if name not in known:
            problems.append(("param-unknown", f"{desc.id} has no parameter {name!r} (expects {sorted(known)})"))
    for spec in desc.params:
        if spec.name in params:
            value, errs = spec.coerce(params[spec.name], k_count)
            problems += [("param-range", e) for e in errs]
            resolved[spec.name] = value if not errs else None
        elif spec.required:
            problems.append(("param-missing", f"{desc.id} needs parameter {spec.name!r}"))
            resolved[spec.name] = None
        else:
            value, errs = spec.coerce(spec.default, k_count)
            problems += [("param-range", f"default {e}") for e in errs]
            resolved[spec.name] = value if not errs else None
    problems += _cross_checks(desc.id, resolved, k_count, sample_rate, n_inputs, constants or {})
    return resolved, problems


def validate_invocation(inv: Invocation, dataset, constants: Mapping | None = None,
                        step: int | None = None) -> list[ValidationIssue]:
    """All problems with running ``inv`` on ``dataset``; an empty list means valid.

    ``dataset`` only needs ``channel_names``, ``feature_names``,
    ``segment_names``, ``k_count`` and ``sample_rate``.
    """
    issues: list[ValidationIssue] = []

    def add(code, msg):
        issues.append(ValidationIssue(code, msg, step))

    try:
        desc = registry_lookup(inv.plugin_id)
    except PluginNotFoundError as exc:
        add("unknown-plugin", str(exc))
        return issues
    inputs = list(inv.inputs or [])
    if desc.ts_inputs == UNBOUNDED:
        if len(inputs) < 1:
            add("arity", f"{desc.id} needs at least 1 input series, got 0")
    elif len(inputs) != desc.ts_inputs:
        add("arity", f"{desc.id} takes {desc.ts_inputs} input series, got {len(inputs)}")
    channels = set(dataset.channel_names)
    for name in inputs:
        if name not in channels:
            add("unknown-channel", f"unknown channel {name!r}")
    if len(set(inputs)) != len(inputs) and desc.ts_inputs == UNBOUNDED and desc.id == "TS->PC TS":
        add("arity", "TS->PC TS inputs must be distinct")
    if inv.segment is not None:
        if not desc.segment_capable:
            add("segment-capability",
                f"{desc.id} does not accept a segment (plugin listing: 'Segments possible: none')")
        elif inv.segment not in set(dataset.segment_names):
            add("unknown-segment", f"unknown segment {inv.segment!r}")
    _, problems = resolve_params(desc, inv.params, dataset.k_count, dataset.sample_rate,
                                 len(inputs), constants)
    for code, msg in problems:
        add(code, msg)
    taken = set(dataset.channel_names) | set(dataset.feature_names)
    names = default_output_names(desc, inputs, inv.output, inv.segment)
    for name in names:
        if name in taken:
            add("output-name", f"output name {name!r} already exists")
    if len(set(names)) != len(names):
        add("output-name", f"duplicate output names {names}")
    return issues


ParamCheck = Callable[[dict], list[str]]

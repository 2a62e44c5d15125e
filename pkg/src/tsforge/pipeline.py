"""Ordered execution of plugin invocations over a dataset."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .core import Dataset
from .errors import RECORD_LEVEL_ERRORS, PipelineError, TsforgeError, ValidationError
from .plugins import IMPLEMENTATIONS, Env, model_key, resolve_constants
from .registry import (
    NORM_PLUGINS,
    Invocation,
    ValidationIssue,
    default_output_names,
    output_base_name,
    registry_lookup,
    resolve_params,
    validate_invocation,
)


@dataclass
class Pipeline:
    steps: list[Invocation]
    reference_records: list[int] | None = None  # 1-based record numbers for norm curves
    engine_constants: dict = field(default_factory=dict)


@dataclass
class StepReport:
    step: int
    plugin_id: str
    outputs: list[str]
    wall_time: float
    warnings: list[str] = field(default_factory=list)
    model_key: str | None = None
    model_fitted: bool = False


@dataclass
class ExecutionReport:
    steps: list[StepReport] = field(default_factory=list)

    @property
    def warnings(self) -> list[str]:
        return [f"step {s.step}: {w}" for s in self.steps for w in s.warnings]


@dataclass(frozen=True)
class PlanRow:
    step: int
    plugin_id: str
    output: str
    kind: str  # "channel" or "feature"
    shape: tuple[int, ...]


@dataclass
class _Names:
    """Name-only view of a dataset, enough for validation."""

    channel_names: list[str]
    feature_names: list[str]
    segment_names: list[str]
    k_count: int
    sample_rate: float


def _reference_issues(pipeline: Pipeline, n_records: int) -> list[ValidationIssue]:
    refs = pipeline.reference_records
    if refs is None:
        return []
    issues = []
    for r in refs:
        if isinstance(r, bool) or not isinstance(r, (int, np.integer)) or not 1 <= r <= n_records:
            issues.append(ValidationIssue("reference-records", f"reference record {r!r} outside 1..{n_records}"))
    if len(set(refs)) != len(refs):
        issues.append(ValidationIssue("reference-records", "reference records contain duplicates"))
    return issues


def dry_run(pipeline: Pipeline, dataset: Dataset, constants: Mapping | None = None) -> list[PlanRow]:
    """Validate every step against the dataset state it would see.

    Returns one plan row per declared output, or raises
    :class:`ValidationError` with all issues (each citing its 1-based step).
    """
    if constants is None:
        try:
            constants = resolve_constants(pipeline.engine_constants)
        except TsforgeError as exc:
            raise ValidationError([ValidationIssue("engine-constants", str(exc))]) from None
    names = _Names(list(dataset.channel_names), list(dataset.feature_names), dataset.segment_names,
                   dataset.k_count, dataset.sample_rate)
    issues = _reference_issues(pipeline, dataset.n_records)
    plan = []
    for step, inv in enumerate(pipeline.steps, start=1):
        problems = validate_invocation(inv, names, constants, step)
        issues += problems
        try:
            desc = registry_lookup(inv.plugin_id)
        except TsforgeError:
            continue
        outs = default_output_names(desc, list(inv.inputs or []), inv.output, inv.segment)
        kind = "channel" if desc.kind == "TS" else "feature"
        shape = (dataset.n_records, dataset.k_count) if kind == "channel" else (dataset.n_records,)
        for name in outs:
            plan.append(PlanRow(step, desc.id, name, kind, shape))
        # later steps may reference these names even if this step is invalid
        target = names.channel_names if kind == "channel" else names.feature_names
        target.extend(n for n in outs if n not in target)
    if issues:
        raise ValidationError(issues)
    return plan


def _record_slices(dataset: Dataset, segment: str | None):
    if segment is None:
        return [None] * dataset.n_records
    seg = dataset.segment(segment)
    return [slice(int(s) - 1, int(e)) for s, e in seg]


def _run_records(impl, mats, slices, params, model, env, jobs):
    n = len(slices)

    def one(i):
        xs = [m[i] for m in mats]
        try:
            return impl.apply(xs, slices[i], params, model, env), None
        except RECORD_LEVEL_ERRORS as exc:
            return None, f"record {i + 1}: {type(exc).__name__}: {exc}"

    if jobs > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, range(n)))
    return [one(i) for i in range(n)]


def execute(pipeline: Pipeline, dataset: Dataset, models: Mapping[str, Any] | None = None,
            jobs: int = 1) -> tuple[Dataset, ExecutionReport, dict[str, Any]]:
    """Run all steps in order and return ``(dataset, report, models)``.

    Models found in ``models`` (keyed as in the returned dict) are reused
    instead of refitted.  The fit phase is sequential; only the per-record
    transform phase uses ``jobs`` worker threads, and the outputs do not
    depend on the worker count.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    constants = resolve_constants(pipeline.engine_constants)
    dry_run(pipeline, dataset, constants)
    env = Env(dataset.sample_rate, constants)
    given = dict(models or {})
    used: dict[str, Any] = {}
    refs = pipeline.reference_records
    ref_idx = np.arange(dataset.n_records) if refs is None else np.asarray(refs, dtype=np.int64) - 1
    all_idx = np.arange(dataset.n_records)
    report = ExecutionReport()
    ds = dataset
    for step, inv in enumerate(pipeline.steps, start=1):
        t0 = time.perf_counter()
        desc = registry_lookup(inv.plugin_id)
        impl = IMPLEMENTATIONS[desc.id]
        inputs = list(inv.inputs)
        outs = default_output_names(desc, inputs, inv.output, inv.segment)
        base = output_base_name(desc.id, inputs, inv.output, inv.segment)
        params, _ = resolve_params(desc, inv.params, ds.k_count, ds.sample_rate, len(inputs), constants)
        entry = StepReport(step, desc.id, outs, 0.0)
        try:
            mats = [ds.channel(name) for name in inputs]
            segs = ds.segment(inv.segment) if inv.segment else None
            model = None
            if impl.fit is not None:
                key = model_key(desc.id, inputs, base)
                entry.model_key = key
                if key in used:
                    model = used[key]
                elif key in given:
                    model = given[key]
                    if impl.model_type is not None and not isinstance(model, impl.model_type):
                        raise TypeError(f"model {key!r} is a {type(model).__name__}, "
                                        f"expected {impl.model_type.__name__}")
                else:
                    train = ref_idx if desc.id in NORM_PLUGINS else all_idx
                    model = impl.fit(mats, segs, train, params, env)
                    entry.model_fitted = True
                if model is not None:
                    used[key] = model
                    if getattr(model, "floored", 0):
                        entry.warnings.append(f"{model.floored} sigma values raised to the floor {model.epsilon:.3g}")
            results = _run_records(impl, mats, _record_slices(ds, inv.segment), params, model, env, jobs)
            # segment-restricted series are NaN outside the segment by design
            count_nan = not (desc.kind == "TS" and inv.segment)
            ds = _assemble(ds, desc, outs, results, entry, count_nan)
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError(step, desc.id, exc) from exc
        entry.wall_time = time.perf_counter() - t0
        report.steps.append(entry)
    return ds, report, used


def _assemble(ds: Dataset, desc, outs, results, entry: StepReport, count_nan: bool = True) -> Dataset:
    n, k = ds.n_records, ds.k_count
    n_out = desc.n_outputs
    if desc.kind == "TS":
        cols = [np.full((n, k), np.nan) for _ in range(n_out)]
    else:
        cols = [np.full(n, np.nan) for _ in range(n_out)]
    nan_records = 0
    for i, (vals, warning) in enumerate(results):
        if warning is not None:
            entry.warnings.append(f"{warning}; outputs set to NaN")
            continue
        if len(vals) != n_out:
            raise RuntimeError(f"{desc.id} returned {len(vals)} outputs, declared {n_out}")
        for j, v in enumerate(vals):
            cols[j][i] = v
        if count_nan and any(np.isnan(np.asarray(v, dtype=float)).any() for v in vals):
            nan_records += 1
    if nan_records:
        entry.warnings.append(f"{nan_records} of {n} records produced NaN values")
    for name, col in zip(outs, cols):
        ds = ds.add_channel(name, col) if desc.kind == "TS" else ds.add_feature(name, col)
    return ds

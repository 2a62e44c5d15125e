"""Project manifests, CSV channel/feature files and pipeline configs.

A manifest is a JSON object::

    {"format_version": 1, "sample_rate": 100.0, "k_count": 256,
     "header": false,
     "channels": {"x": "x.csv"},
     "features": "features.csv",
     "segments": {"stance": [[10, 120], ...] or [10, 120]},
     "models": {"<key>": {"type": "pca", ...}}}

Relative paths resolve against the manifest's directory.  Channel files hold
N rows of K comma-separated values (a ``1..K`` header row when ``header`` is
true); empty cells and ``NaN`` read as NaN.
"""

from __future__ import annotations

import csv
import json
import math
import re
import shutil
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from .core import Dataset, SampleGrid
from .errors import NamingError, ShapeError, TsforgeError, ValidationError
from .pipeline import Pipeline
from .plugins import model_from_dict
from .registry import Invocation, ValidationIssue

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"
FEATURES_NAME = "features.csv"

_STEP_KEYS = {"plugin", "inputs", "params", "segment", "output"}
_PIPELINE_KEYS = {"steps", "reference_records", "engine_constants"}


class OutputExistsError(TsforgeError, FileExistsError):
    pass


class ManifestError(TsforgeError, ValueError):
    pass


def format_float(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return "NaN"
    return format(v, ".17g")


def _parse_cell(cell: str, path, row: int, col: int) -> float:
    s = cell.strip()
    if s == "" or s.lower() == "nan":
        return math.nan
    try:
        return float(s)
    except ValueError:
        raise ShapeError(f"{path}: row {row}, column {col}: cannot parse {cell!r} as a number") from None


def read_matrix(path, k_count: int | None = None, header: bool = False) -> np.ndarray:
    """Read an N x K numeric CSV; shape problems name the file and 1-based row."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if header:
        if not rows:
            raise ShapeError(f"{path}: missing header row")
        head = rows[0]
        if k_count is not None and [h.strip() for h in head] != [str(i) for i in range(1, k_count + 1)]:
            raise ShapeError(f"{path}: row 1: header must list sample indices 1..{k_count}")
        rows = rows[1:]
    offset = 2 if header else 1
    out = []
    for r, cells in enumerate(rows):
        if not cells:
            continue
        if k_count is not None and len(cells) != k_count:
            raise ShapeError(f"{path}: row {r + offset}: expected {k_count} values, got {len(cells)}")
        out.append([_parse_cell(c, path, r + offset, j + 1) for j, c in enumerate(cells)])
    if not out:
        raise ShapeError(f"{path}: no data rows")
    widths = {len(r) for r in out}
    if len(widths) > 1:
        raise ShapeError(f"{path}: rows have differing lengths {sorted(widths)}")
    return np.asarray(out, dtype=float)


def write_matrix(path, values: np.ndarray, header: bool = True) -> None:
    values = np.atleast_2d(values)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(range(1, values.shape[1] + 1))
        for row in values:
            w.writerow(format_float(v) for v in row)


def read_features(path, n_records: int | None = None) -> dict[str, np.ndarray]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] == []:
        return {}
    names = rows[0]
    if len(set(names)) != len(names):
        raise NamingError(f"{path}: duplicate feature names in header")
    data = []
    for r, cells in enumerate(rows[1:], start=2):
        if len(cells) != len(names):
            raise ShapeError(f"{path}: row {r}: expected {len(names)} values, got {len(cells)}")
        data.append([_parse_cell(c, path, r, j + 1) for j, c in enumerate(cells)])
    if n_records is not None and len(data) != n_records:
        raise ShapeError(f"{path}: expected {n_records} rows, got {len(data)}")
    arr = np.asarray(data, dtype=float).reshape(len(data), len(names))
    return {name: arr[:, j] for j, name in enumerate(names)}


def write_features(path, dataset: Dataset) -> None:
    names = dataset.feature_names
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        if names:
            cols = [dataset.feature(n) for n in names]
            for i in range(dataset.n_records):
                w.writerow(format_float(c[i]) for c in cols)


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise NamingError(f"duplicate key {k!r} in manifest")
        out[k] = v
    return out


def read_manifest(path) -> dict:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            m = json.load(fh, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(m, dict):
        raise ManifestError(f"{path}: manifest must be a JSON object")
    version = m.get("format_version")
    if version != FORMAT_VERSION:
        raise ManifestError(f"{path}: unsupported format_version {version!r} (expected {FORMAT_VERSION})")
    for key in ("sample_rate", "k_count", "channels"):
        if key not in m:
            raise ManifestError(f"{path}: missing key {key!r}")
    return m


def load_dataset(manifest_path) -> Dataset:
    dataset, _ = load_project(manifest_path)
    return dataset


def load_project(manifest_path) -> tuple[Dataset, dict[str, Any]]:
    """Dataset plus any fitted models stored in the manifest."""
    manifest_path = Path(manifest_path)
    m = read_manifest(manifest_path)
    root = manifest_path.parent
    grid = SampleGrid(m["k_count"], m["sample_rate"])
    header = bool(m.get("header", False))
    channels = {}
    for name, rel in m["channels"].items():
        channels[name] = read_matrix(root / rel, grid.k_count, header)
    n = None
    if channels:
        n = next(iter(channels.values())).shape[0]
        for name, a in channels.items():
            if a.shape[0] != n:
                raise ShapeError(f"{root / m['channels'][name]}: expected {n} records, got {a.shape[0]}")
    features = read_features(root / m["features"], n) if m.get("features") else {}
    segments = {}
    for name, spec in (m.get("segments") or {}).items():
        segments[name] = spec
    ds = Dataset(grid, channels, features, segments)
    models = {k: model_from_dict(v) for k, v in (m.get("models") or {}).items()}
    return ds, models


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name).strip("_") or "channel"


def save_outputs(dataset: Dataset, out_dir, source: Dataset | None = None,
                 source_manifest: Path | None = None, models: Mapping[str, Any] | None = None,
                 force: bool = False) -> list[Path]:
    """Write features.csv, one CSV per generated channel and a resolved manifest.

    Channels already present in ``source`` are referenced from their original
    files (when ``source_manifest`` is known) instead of being rewritten.
    """
    out = Path(out_dir)
    if out.exists():
        if not out.is_dir():
            raise OutputExistsError(f"{out} exists and is not a directory")
        if any(out.iterdir()):
            if not force:
                raise OutputExistsError(f"{out} is not empty; use --force to overwrite")
            # only remove what a previous run would have written
            shutil.rmtree(out / "channels", ignore_errors=True)
            for name in (FEATURES_NAME, MANIFEST_NAME):
                (out / name).unlink(missing_ok=True)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    src_files: dict[str, str] = {}
    src_header = False
    if source is not None and source_manifest is not None:
        m = read_manifest(source_manifest)
        src_header = bool(m.get("header", False))
        for name, rel in m["channels"].items():
            src_files[name] = str((Path(source_manifest).parent / rel).resolve())
    existing = set(source.channel_names) if source is not None else set()
    chan_entries: dict[str, str] = {}
    chan_dir = out / "channels"
    for name in dataset.channel_names:
        if name in existing and name in src_files and not src_header:
            chan_entries[name] = src_files[name]
            continue
        idx = dataset.channel_names.index(name) + 1
        path = chan_dir / f"{idx:03d}_{_safe(name)}.csv"
        chan_dir.mkdir(exist_ok=True)
        write_matrix(path, dataset.channel(name), header=False)
        chan_entries[name] = str(path.relative_to(out))
        written.append(path)
    feat_path = out / FEATURES_NAME
    write_features(feat_path, dataset)
    written.append(feat_path)
    manifest = {
        "format_version": FORMAT_VERSION,
        "sample_rate": dataset.sample_rate,
        "k_count": dataset.k_count,
        "header": False,
        "channels": chan_entries,
        "features": FEATURES_NAME,
        "segments": {k: v.tolist() for k, v in dataset.segments.items()},
        "models": {k: v.to_dict() for k, v in (models or {}).items()},
    }
    man_path = out / MANIFEST_NAME
    with open(man_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    written.append(man_path)
    return written


# ---------------------------------------------------------------------------
# pipeline configs

def pipeline_from_dict(doc: Any) -> Pipeline:
    """Build a :class:`Pipeline`; structural problems raise :class:`ValidationError`."""
    issues = []
    if not isinstance(doc, dict):
        raise ValidationError([ValidationIssue("config", "pipeline config must be a mapping")])
    for key in doc:
        if key not in _PIPELINE_KEYS:
            issues.append(ValidationIssue("config", f"unknown top-level key {key!r}"))
    raw_steps = doc.get("steps")
    if not isinstance(raw_steps, list) or not raw_steps:
        issues.append(ValidationIssue("config", "'steps' must be a nonempty list"))
        raw_steps = []
    steps = []
    for i, s in enumerate(raw_steps, start=1):
        if not isinstance(s, dict):
            issues.append(ValidationIssue("config", "step must be a mapping", i))
            continue
        bad = set(s) - _STEP_KEYS
        if bad:
            issues.append(ValidationIssue("config", f"unknown step keys {sorted(bad)}", i))
        if "plugin" not in s:
            issues.append(ValidationIssue("config", "step needs a 'plugin' key", i))
            continue
        inputs = s.get("inputs", [])
        if isinstance(inputs, str):
            inputs = [inputs]
        params = s.get("params") or {}
        if not isinstance(params, dict):
            issues.append(ValidationIssue("config", "'params' must be a mapping", i))
            params = {}
        steps.append(Invocation(str(s["plugin"]), [str(x) for x in inputs], dict(params),
                                s.get("segment"), s.get("output")))
    refs = doc.get("reference_records")
    constants = doc.get("engine_constants") or {}
    if not isinstance(constants, dict):
        issues.append(ValidationIssue("config", "'engine_constants' must be a mapping"))
        constants = {}
    if issues:
        raise ValidationError(issues)
    return Pipeline(steps, list(refs) if refs is not None else None, dict(constants))


def load_pipeline(path) -> Pipeline:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ValidationError([ValidationIssue("config", f"{path}: invalid YAML: {exc}")]) from None
    return pipeline_from_dict(doc)


def pipeline_to_dict(p: Pipeline) -> dict:
    steps = []
    for inv in p.steps:
        s: dict[str, Any] = {"plugin": inv.plugin_id, "inputs": list(inv.inputs)}
        if inv.params:
            s["params"] = {k: list(v) if isinstance(v, tuple) else v for k, v in inv.params.items()}
        if inv.segment is not None:
            s["segment"] = inv.segment
        if inv.output is not None:
            s["output"] = inv.output
        steps.append(s)
    doc: dict[str, Any] = {"steps": steps}
    if p.reference_records is not None:
        doc["reference_records"] = list(p.reference_records)
    if p.engine_constants:
        doc["engine_constants"] = dict(p.engine_constants)
    return doc

"""Batch time-series feature extraction: a plugin registry and a pipeline engine."""

from .core import Dataset, SampleGrid, check_segment, slice_segment
from .errors import (
    PipelineError,
    PluginNotFoundError,
    TsforgeError,
    ValidationError,
)
from .io import load_dataset, load_pipeline, load_project, pipeline_from_dict, save_outputs
from .pipeline import ExecutionReport, Pipeline, dry_run, execute
from .registry import REGISTRY, Invocation, PluginDescriptor, ParamSpec, registry_lookup, validate_invocation

__version__ = "0.1.0"

__all__ = [
    "Dataset", "SampleGrid", "check_segment", "slice_segment",
    "PipelineError", "PluginNotFoundError", "TsforgeError", "ValidationError",
    "load_dataset", "load_pipeline", "load_project", "pipeline_from_dict", "save_outputs",
    "ExecutionReport", "Pipeline", "dry_run", "execute",
    "REGISTRY", "Invocation", "PluginDescriptor", "ParamSpec", "registry_lookup", "validate_invocation",
]

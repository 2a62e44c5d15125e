import csv
from pathlib import Path

import numpy as np
import pytest

from tsforge.core import Dataset, SampleGrid
from tsforge.errors import PluginNotFoundError
from tsforge.registry import (
    REGISTRY,
    UNBOUNDED,
    Invocation,
    ParamSpec,
    PluginDescriptor,
    default_output_names,
    registry_from_json,
    registry_lookup,
    registry_to_json,
    validate_invocation,
)

APPENDIX = Path(__file__).parent / "data" / "appendix_plugins.csv"


def _appendix():
    with open(APPENDIX, newline="") as fh:
        return list(csv.DictReader(fh))


def _ds(k=32, fs=100.0):
    rng = np.random.default_rng(3)
    return Dataset(SampleGrid(k, fs), {"x": rng.normal(size=(2, k)), "y": rng.normal(size=(2, k))},
                   segments={"s": (2, 10)})


def test_matches_appendix_table():
    rows = _appendix()
    assert [r["id"] for r in rows] == list(REGISTRY)
    for r in rows:
        d = REGISTRY[r["id"]]
        assert d.kind == r["type"], r["id"]
        ts_in = UNBOUNDED if r["ts_inputs"] in ("Inf", "unbounded") else int(r["ts_inputs"])
        assert d.ts_inputs == ts_in, r["id"]
        assert d.ts_outputs == int(r["ts_outputs"]), r["id"]
        assert d.sf_outputs == int(r["sf_outputs"]), r["id"]
        assert d.segment_capable == (r["segments"] == "True"), r["id"]
        assert len(d.params) == int(r["n_params"]), r["id"]


def test_lookup_examples():
    assert len(registry_lookup("FIL").params) == 4
    assert registry_lookup("ADDTS").ts_inputs == UNBOUNDED
    with pytest.raises(PluginNotFoundError):
        registry_lookup("NOPE")


def test_unbounded_only_for_combiners():
    unbounded = {d.id for d in REGISTRY.values() if d.ts_inputs == UNBOUNDED}
    assert unbounded == {"ADDTS", "MULTTS", "MINTS", "MAXTS", "MEANTS", "TS->PC TS"}


def test_json_round_trip():
    again = registry_from_json(registry_to_json())
    assert again == dict(REGISTRY)
    assert registry_to_json(again.values()) == registry_to_json()


def test_descriptor_invariants():
    with pytest.raises(ValueError):
        PluginDescriptor("X", "x", "SF", 1, 1, 1, True)
    with pytest.raises(ValueError):
        PluginDescriptor("X", "x", "TS", 1, 0, 0, True)
    with pytest.raises(ValueError):
        ParamSpec("e", "enum")


def test_validation_examples():
    ds = _ds()
    issues = validate_invocation(Invocation("DIFF", ["x", "y", "x"]), ds)
    assert [i.code for i in issues] == ["arity"]
    issues = validate_invocation(Invocation("TS->SF", ["x"], {"sample": 3}, segment="s"), ds)
    assert [i.code for i in issues] == ["segment-capability"]
    assert "Segments possible: none" in issues[0].message
    issues = validate_invocation(Invocation("IIR", ["x"], {"a": 1.5}), ds)
    assert [i.code for i in issues] == ["param-range"]
    assert validate_invocation(Invocation("IIR", ["x"], {"a": 0.0}), ds) == []
    assert [i.code for i in validate_invocation(Invocation("NOPE", ["x"]), ds)] == ["unknown-plugin"]


def test_errors_are_collected():
    ds = _ds()
    inv = Invocation("DIFF", ["x", "nope", "y"], {"bogus": 1}, segment="s")
    codes = sorted(i.code for i in validate_invocation(inv, ds, step=4))
    assert codes == ["arity", "param-unknown", "segment-capability", "unknown-channel"]
    assert all(i.step == 4 for i in validate_invocation(inv, ds, step=4))


@pytest.mark.parametrize("inv", [
    Invocation("Trend", ["x"], {"a_fast_slow": [0.9, 0.9]}),
    Invocation("StdTS", ["x"], {"a_fast_slow_sigma": [0.95, 0.9, 0.5]}),
    Invocation("REGION", ["x"], {"lower": 2, "upper": 1}),
    Invocation("SHIFT", ["x"], {"shift": -32}),
    Invocation("FE-MEAN", ["x"], {"window": 33}),
    Invocation("FE-MEAN", ["x"], {"window": 0}),
    Invocation("FE-MAX", ["x"], {"window": 2.5}),
    Invocation("FIL", ["x"], {"frequencies": 50}),
    Invocation("FIL", ["x"], {"filter_type": "BANDPASS", "frequencies": [20, 10]}),
    Invocation("FIL", ["x"], {"frequencies": 10, "order": 9}),
    Invocation("Morl", ["x"], {"center_freq": 60, "eigen_freq": 30}),
    Invocation("TS->SF", ["x"], {"sample": 33}),
    Invocation("TS->DISCR SF", ["x"], {"terms": 6}),
    Invocation("TS->DISCR SF", ["x"], {"design": "FIX"}),
    Invocation("TS->PC TS", ["x"], {"components": 2}),
    Invocation("Wavedec", ["x"], {"levels": 5}),
    Invocation("NORM", ["x"], {"type": "WHATEVER"}),
    Invocation("IIR", ["x"], {"a": "abc"}),
])
def test_parameter_rules(inv):
    issues = validate_invocation(inv, _ds())
    assert issues and all(i.code.startswith("param") for i in issues), issues


def test_required_parameter():
    issues = validate_invocation(Invocation("FIL", ["x"]), _ds())
    assert [i.code for i in issues] == ["param-missing"]


def test_fix_design_uses_engine_constant():
    inv = Invocation("TS->DISCR SF", ["x"], {"terms": 3, "design": "FIX"})
    assert validate_invocation(inv, _ds(), {"mbf_fix": [0.0, 1.0, 2.0]}) == []
    assert validate_invocation(inv, _ds(), {"mbf_fix": [0.0, 1.0]})


def test_boolean_and_case_coercion():
    inv = Invocation("TS->PC SF", ["x"], {"normalize": True, "components": 1})
    assert validate_invocation(inv, _ds()) == []
    inv = Invocation("FIL", ["x"], {"filter_type": "highpass", "frequencies": 5})
    assert validate_invocation(inv, _ds()) == []


def test_output_names():
    d = REGISTRY["Wavedec"]
    assert default_output_names(d, ["x"]) == [f"Wavedec(x)#{i}" for i in range(1, 6)]
    assert default_output_names(REGISTRY["ADDTS"], ["x", "y"]) == ["ADDTS(x,y)"]
    assert default_output_names(REGISTRY["MEAN"], ["x"], segment="s") == ["MEAN(x)@s"]
    assert default_output_names(REGISTRY["MEAN"], ["x"], "m") == ["m"]
    ds = _ds().add_feature("MEAN(x)", [0.0, 0.0])
    assert [i.code for i in validate_invocation(Invocation("MEAN", ["x"]), ds)] == ["output-name"]

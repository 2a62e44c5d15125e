"""Dataset files, output writing, pipeline configs and the command line."""

import csv
import io
import json
import shutil
from pathlib import Path

import numpy as np
import pytest
import yaml

from tsforge.cli import main
from tsforge.errors import NamingError, ShapeError, ValidationError
from tsforge.io import (
    ManifestError,
    OutputExistsError,
    format_float,
    load_dataset,
    load_pipeline,
    load_project,
    pipeline_from_dict,
    pipeline_to_dict,
    read_features,
    read_matrix,
    save_outputs,
    write_matrix,
)
from tsforge.pipeline import execute
from tsforge.registry import REGISTRY

GOLDEN = Path(__file__).parent / "golden"


def _project(tmp_path, n=3, k=8, header=False, seed=0):
    rng = np.random.default_rng(seed)
    (tmp_path / "ch").mkdir()
    chans = {}
    for name in ("a", "b"):
        chans[name] = rng.normal(size=(n, k))
        write_matrix(tmp_path / "ch" / f"{name}.csv", chans[name], header=header)
    m = {"format_version": 1, "sample_rate": 10.0, "k_count": k, "header": header,
         "channels": {"a": "ch/a.csv", "b": "ch/b.csv"}, "segments": {"s": [[2, 5]] * n}}
    (tmp_path / "manifest.json").write_text(json.dumps(m))
    return tmp_path / "manifest.json", chans


def _write_pipeline(path, doc):
    path.write_text(yaml.safe_dump(doc, sort_keys=False))
    return path


def _run(argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


# ---------------------------------------------------------------------------
# loading

def test_load_two_channels_three_records(tmp_path):
    man, chans = _project(tmp_path)
    ds = load_dataset(man)
    assert (ds.n_records, ds.k_count, len(ds.channel_names)) == (3, 8, 2)
    assert np.array_equal(ds.channel("a"), chans["a"])


def test_load_with_header_row(tmp_path):
    man, chans = _project(tmp_path, header=True)
    assert np.array_equal(load_dataset(man).channel("b"), chans["b"])


def test_short_row_names_file_and_row(tmp_path):
    man, _ = _project(tmp_path)
    path = tmp_path / "ch" / "b.csv"
    lines = path.read_text().splitlines()
    lines[1] = ",".join(lines[1].split(",")[:7])
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ShapeError) as exc:
        load_dataset(man)
    assert "b.csv" in str(exc.value) and "row 2" in str(exc.value)


def test_empty_cell_and_nan_token(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1,,3\nNaN,5,6\n")
    x = read_matrix(path, 3)
    assert np.isnan(x[0, 1]) and np.isnan(x[1, 0]) and x[1, 2] == 6


def test_unparsable_cell(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1,x,3\n")
    with pytest.raises(ShapeError, match="column 2"):
        read_matrix(path, 3)


def test_duplicate_channel_names_rejected(tmp_path):
    man, _ = _project(tmp_path)
    text = man.read_text().replace('"b": "ch/b.csv"', '"a": "ch/b.csv"')
    man.write_text(text)
    with pytest.raises(NamingError):
        load_dataset(man)


def test_record_count_mismatch(tmp_path):
    man, _ = _project(tmp_path)
    write_matrix(tmp_path / "ch" / "b.csv", np.zeros((4, 8)), header=False)
    with pytest.raises(ShapeError, match="b.csv"):
        load_dataset(man)


def test_manifest_version_checked(tmp_path):
    man, _ = _project(tmp_path)
    m = json.loads(man.read_text())
    m["format_version"] = 2
    man.write_text(json.dumps(m))
    with pytest.raises(ManifestError):
        load_dataset(man)


# ---------------------------------------------------------------------------
# writing

def test_format_float_round_trip():
    rng = np.random.default_rng(1)
    vals = np.concatenate([rng.normal(size=1000) * 10.0 ** rng.integers(-300, 300, 1000),
                           [0.1, 1 / 3, 2 ** -1074, np.finfo(float).max, -0.0]])
    for v in vals:
        assert float(format_float(v)) == v
    assert format_float(np.nan) == "NaN"


def test_run_then_reload_features_bitwise(tmp_path):
    man, _ = _project(tmp_path)
    pipe = _write_pipeline(tmp_path / "p.yaml", {"steps": [
        {"plugin": "IIR", "inputs": ["a"], "params": {"a": 0.3}},
        {"plugin": "MEAN", "inputs": ["IIR(a)"]},
        {"plugin": "STD SF", "inputs": ["b"], "segment": "s"},
        {"plugin": "ND Abs", "inputs": ["a"]},
    ]})
    ds = load_dataset(man)
    result, _, models = execute(load_pipeline(pipe), ds)
    save_outputs(result, tmp_path / "out", source=ds, source_manifest=man, models=models)
    feats = read_features(tmp_path / "out" / "features.csv", 3)
    assert list(feats) == result.feature_names
    for name in feats:
        assert np.array_equal(feats[name], result.feature(name))
    back, back_models = load_project(tmp_path / "out" / "manifest.json")
    assert np.array_equal(back.channel("IIR(a)"), result.channel("IIR(a)"))
    assert np.array_equal(back.channel("a"), ds.channel("a"))
    assert set(back_models) == set(models)


def test_saved_models_are_reused(tmp_path):
    man, _ = _project(tmp_path)
    pipe = _write_pipeline(tmp_path / "p.yaml", {"steps": [{"plugin": "ND Abs", "inputs": ["a"]}]})
    assert _run(["run", man, pipe, "-o", tmp_path / "o1"])[0] == 0
    # apply the fitted norm to a different dataset
    other = tmp_path / "other"
    other.mkdir()
    man2, _ = _project(other, seed=5)
    m2 = json.loads(man2.read_text())
    m2["models"] = json.loads((tmp_path / "o1" / "manifest.json").read_text())["models"]
    man2.write_text(json.dumps(m2))
    ds2, models = load_project(man2)
    fresh, _, _ = execute(load_pipeline(pipe), ds2)
    reused, report, _ = execute(load_pipeline(pipe), ds2, models)
    assert not report.steps[0].model_fitted
    assert not np.array_equal(fresh.feature("ND Abs(a)"), reused.feature("ND Abs(a)"))


def test_no_outputs_gives_header_only(tmp_path):
    man, _ = _project(tmp_path)
    ds = load_dataset(man)
    save_outputs(ds, tmp_path / "out", source=ds, source_manifest=man)
    assert (tmp_path / "out" / "features.csv").read_text() == "\n"
    assert read_features(tmp_path / "out" / "features.csv") == {}


def test_overwrite_refused_without_force(tmp_path):
    man, _ = _project(tmp_path)
    ds = load_dataset(man)
    out = tmp_path / "out"
    out.mkdir()
    (out / "keep.txt").write_text("x")
    with pytest.raises(OutputExistsError):
        save_outputs(ds, out)
    save_outputs(ds, out, force=True)
    assert (out / "keep.txt").read_text() == "x"
    assert (out / "features.csv").exists()


def test_generated_channel_files(tmp_path):
    man, _ = _project(tmp_path)
    ds = load_dataset(man)
    result = ds.add_channel("x/y z", np.ones((3, 8)))
    save_outputs(result, tmp_path / "out", source=ds, source_manifest=man)
    m = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert m["channels"]["x/y z"] == "channels/003_x_y_z.csv"
    assert Path(m["channels"]["a"]).is_absolute()
    assert (tmp_path / "out" / "channels" / "003_x_y_z.csv").read_text().splitlines()[0] == ",".join(["1"] * 8)


# ---------------------------------------------------------------------------
# pipeline configs

def test_pipeline_dict_round_trip():
    doc = {"steps": [{"plugin": "Trend", "inputs": ["a"], "params": {"a_fast_slow": [0.5, 0.9]}},
                     {"plugin": "MEAN", "inputs": ["Trend(a)"], "segment": "s", "output": "m"}],
           "reference_records": [1, 2], "engine_constants": {"forgetting_lambda": 0.5}}
    assert pipeline_to_dict(pipeline_from_dict(doc)) == doc


@pytest.mark.parametrize("doc", [
    [],
    {"steps": []},
    {"steps": [{"inputs": ["a"]}]},
    {"steps": [{"plugin": "MEAN", "inputs": ["a"], "colour": 1}]},
    {"steps": [{"plugin": "MEAN"}], "extra": 1},
])
def test_pipeline_structure_errors(doc):
    with pytest.raises(ValidationError):
        pipeline_from_dict(doc)


# ---------------------------------------------------------------------------
# command line

def test_plugins_lists_every_id():
    code, text = _run(["plugins", "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["id"] for r in rows] == list(REGISTRY)
    assert {"type", "ts_inputs", "segments"} <= set(rows[0])


def test_plugins_table():
    code, text = _run(["plugins"])
    assert code == 0
    assert f"{len(REGISTRY)} plugins" in text
    for d in REGISTRY:
        assert d in text


def test_check_prints_plan(tmp_path):
    man, _ = _project(tmp_path)
    pipe = _write_pipeline(tmp_path / "p.yaml", {"steps": [
        {"plugin": "V", "inputs": ["a"]}, {"plugin": "MAX", "inputs": ["V(a)"]}]})
    code, text = _run(["check", man, pipe])
    assert code == 0
    assert "V(a)" in text and "MAX(V(a))" in text and "OK: 2 steps" in text


def test_check_bad_parameter_cites_step(tmp_path, capsys):
    man, _ = _project(tmp_path)
    pipe = _write_pipeline(tmp_path / "p.yaml", {"steps": [
        {"plugin": "V", "inputs": ["a"]},
        {"plugin": "IIR", "inputs": ["a"], "params": {"a": 1.5}}]})
    code, _ = _run(["check", man, pipe])
    assert code == 1
    assert "step 2" in capsys.readouterr().err


def test_unknown_flag_exits_1(capsys):
    code, _ = _run(["plugins", "--colour"])
    assert code == 1
    assert "usage" in capsys.readouterr().err


def test_missing_subcommand_exits_1():
    assert _run([])[0] == 1


def test_runtime_error_exits_2(tmp_path):
    assert _run(["check", tmp_path / "missing.json", tmp_path / "p.yaml"])[0] == 2


def test_run_refuses_existing_output(tmp_path):
    man, _ = _project(tmp_path)
    pipe = _write_pipeline(tmp_path / "p.yaml", {"steps": [{"plugin": "MEAN", "inputs": ["a"]}]})
    out = tmp_path / "out"
    assert _run(["run", man, pipe, "-o", out])[0] == 0
    assert _run(["run", man, pipe, "-o", out])[0] == 2
    assert _run(["run", man, pipe, "-o", out, "--force"])[0] == 0


def test_run_jobs_bitwise(tmp_path):
    outs = []
    for jobs in (1, 4):
        out = tmp_path / f"j{jobs}"
        code, _ = _run(["run", GOLDEN / "manifest.json", GOLDEN / "pipeline.yaml", "-o", out, "--jobs", jobs])
        assert code == 0
        outs.append(out)
    files = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*") if p.is_file())
    assert files == sorted(p.relative_to(outs[1]) for p in outs[1].rglob("*") if p.is_file())
    for rel in files:
        assert (outs[0] / rel).read_bytes() == (outs[1] / rel).read_bytes()


def test_lambda_env_var(tmp_path, monkeypatch):
    man, _ = _project(tmp_path)
    pipe = _write_pipeline(tmp_path / "p.yaml", {"steps": [
        {"plugin": "Fil-MAX", "inputs": ["a"]}, {"plugin": "SUM", "inputs": ["Fil-MAX(a)"]}]})
    ds = load_dataset(man)
    p = load_pipeline(pipe)
    base = execute(p, ds)[0].feature("SUM(Fil-MAX(a))")
    monkeypatch.setenv("TSFORGE_ENGINE_LAMBDA", "0.5")
    changed = execute(p, ds)[0].feature("SUM(Fil-MAX(a))")
    assert not np.array_equal(base, changed)
    p.engine_constants["forgetting_lambda"] = 0.95
    assert np.array_equal(execute(p, ds)[0].feature("SUM(Fil-MAX(a))"), base)


def test_filter_response_coefficients(tmp_path):
    code, text = _run(["filter-response", "--f1", "25", "--fs", "100", "--order", "1", "--what", "coefficients"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["section", "b0", "b1", "b2", "a0", "a1", "a2"]
    b0, b1, b2, a0, a1, a2 = map(float, rows[1][1:])
    assert abs(b0 - 0.5) < 1e-12 and abs(b1 - 0.5) < 1e-12 and abs(b2) < 1e-12
    assert a0 == 1 and abs(a1) < 1e-12 and abs(a2) < 1e-12


def test_filter_response_curve(tmp_path):
    out = tmp_path / "r.csv"
    code, _ = _run(["filter-response", "--type", "BANDPASS", "--f1", "5", "--f2", "15", "--fs", "100",
                    "--points", "101", "-o", out])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 101
    mags = [float(r["magnitude"]) for r in rows]
    assert float(rows[0]["magnitude"]) < 1e-6
    assert max(mags) == pytest.approx(1.0, abs=1e-3)


def test_filter_response_bad_band_exits_1():
    assert _run(["filter-response", "--f1", "60", "--fs", "100"])[0] == 1


def test_golden_project_copy_runs(tmp_path):
    # the golden manifest uses relative paths, so a copied project must run too
    proj = tmp_path / "proj"
    shutil.copytree(GOLDEN, proj, ignore=shutil.ignore_patterns("expected", "*.py", "__pycache__"))
    assert _run(["check", proj / "manifest.json", proj / "pipeline.yaml"])[0] == 0

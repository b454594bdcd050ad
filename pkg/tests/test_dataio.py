import json
from pathlib import Path

import numpy as np
import pytest

from metsizer import dataio
from metsizer.dataio import PilotFileSchema, load_pilot_csv
from metsizer.errors import PilotDataError
from metsizer.types import EstimationConfig, FdrCurvePoint, SampleSizeResult


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# ------------------------------------------------------------ load_pilot_csv

def test_load_pilot_fixture(pilot_189):
    assert pilot_189.n == 18
    assert pilot_189.p == 189
    assert pilot_189.covariates.shape == (18, 1)
    assert pilot_189.n1 == 9 and pilot_189.n2 == 9
    assert pilot_189.provenance == "experimental"


def test_load_empty_file(tmp_path):
    path = _write(tmp_path, "empty.csv", "")
    with pytest.raises(PilotDataError, match="empty"):
        load_pilot_csv(path, PilotFileSchema(label_column=0, has_header=False))


def test_label_mapping_first_appearance(tmp_path):
    path = _write(
        tmp_path, "ab.csv",
        "group,x1,x2\nB,1,2\nB,2,3\nA,3,4\nA,4,5\n",
    )
    pm = load_pilot_csv(path, PilotFileSchema())
    assert list(pm.group) == [1, 1, 2, 2]  # B first -> 1


def test_ragged_row_reports_line(tmp_path):
    path = _write(tmp_path, "ragged.csv", "group,x1,x2\na,1,2\nb,1\na,2,3\nb,3,4\n")
    with pytest.raises(PilotDataError, match="line 3"):
        load_pilot_csv(path, PilotFileSchema())


def test_non_numeric_cell_reports_coordinates(tmp_path):
    path = _write(tmp_path, "bad.csv", "group,x1,x2\na,1,2\nb,oops,3\na,2,3\nb,3,4\n")
    with pytest.raises(PilotDataError, match=r"row 3, column 2"):
        load_pilot_csv(path, PilotFileSchema())


def test_too_many_labels(tmp_path):
    path = _write(tmp_path, "three.csv", "group,x\na,1\na,2\nb,3\nb,4\nc,5\n")
    with pytest.raises(PilotDataError, match="c"):
        load_pilot_csv(path, PilotFileSchema())


def test_small_group_rejected(tmp_path):
    path = _write(tmp_path, "small.csv", "group,x\na,1\na,2\nb,3\n")
    with pytest.raises(PilotDataError, match=">= 2"):
        load_pilot_csv(path, PilotFileSchema())


def test_orientation_transpose_identity(tmp_path):
    rows = "group,w,x1,x2\na,10,1.5,2.5\na,11,2.5,3.5\nb,12,3.5,4.5\nb,13,4.5,5.5\n"
    path_rows = _write(tmp_path, "rows.csv", rows)
    cells = [line.split(",") for line in rows.strip().splitlines()]
    transposed = "\n".join(",".join(col) for col in zip(*cells)) + "\n"
    path_cols = _write(tmp_path, "cols.csv", transposed)

    schema_rows = PilotFileSchema(label_column="group", covariate_columns=["w"])
    schema_cols = PilotFileSchema(
        label_column="group", covariate_columns=["w"], orientation="samples_as_columns"
    )
    a = load_pilot_csv(path_rows, schema_rows)
    b = load_pilot_csv(path_cols, schema_cols)
    assert np.array_equal(a.data, b.data)
    assert np.array_equal(a.group, b.group)
    assert np.array_equal(a.covariates, b.covariates)


def test_write_load_roundtrip_values(tmp_path):
    rng = np.random.default_rng(0)
    data = rng.normal(size=(5, 4))
    labels = ["a", "a", "b", "b", "b"]
    lines = ["group," + ",".join(f"v{j}" for j in range(4))]
    for lab, row in zip(labels, data):
        lines.append(lab + "," + ",".join(repr(float(v)) for v in row))
    path = _write(tmp_path, "rt.csv", "\n".join(lines) + "\n")
    pm = load_pilot_csv(path, PilotFileSchema())
    assert np.array_equal(pm.data, data)


def test_schema_validation():
    with pytest.raises(PilotDataError):
        PilotFileSchema(label_column="g", covariate_columns=["g"]).validate()
    with pytest.raises(PilotDataError):
        PilotFileSchema(orientation="diagonal").validate()


def test_index_columns_without_header(tmp_path):
    path = _write(tmp_path, "nohdr.csv", "a,1,2\na,2,3\nb,3,4\nb,4,5\n")
    pm = load_pilot_csv(path, PilotFileSchema(label_column=0, has_header=False))
    assert pm.p == 2
    with pytest.raises(PilotDataError, match="no header"):
        load_pilot_csv(path, PilotFileSchema(label_column="group", has_header=False))


# ---------------------------------------------------------------- artifacts

def _result():
    cfg = EstimationConfig(p=60, n_min=6, n_max=30, seed=5)
    curve = [
        FdrCurvePoint(n=6, n1=3, n2=3, fdr10=0.1, fdr50=0.2, fdr90=0.4),
        FdrCurvePoint(n=8, n1=4, n2=4, fdr10=0.05, fdr50=0.04, fdr90=0.2),
    ]
    return SampleSizeResult(
        config=cfg, curve=curve, n_hat=8, n1_hat=4, n2_hat=4,
        converged=True, points_evaluated=2, wall_time_s=1.23,
    )


def test_write_result_roundtrip(tmp_path):
    res = _result()
    dataio.write_result(res, tmp_path / "r.json", tmp_path / "c.csv")
    back = dataio.load_result(tmp_path / "r.json")
    assert back.to_json_dict() == res.to_json_dict()


def test_curve_csv_shape(tmp_path):
    res = _result()
    dataio.write_result(res, tmp_path / "r.json", tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().strip().splitlines()
    assert lines[0] == "n,n1,n2,fdr10,fdr50,fdr90"
    assert len(lines) == len(res.curve) + 1


def test_absent_estimate_serializes_null_and_reason():
    res = _result()
    res.n_hat = res.n1_hat = res.n2_hat = None
    res.converged = False
    res.no_estimate_reason = "grid-exhausted"
    d = res.to_json_dict()
    assert d["n_hat"] is None
    assert d["no_estimate_reason"] == "grid-exhausted"
    assert "n_hat" in d  # key present, not dropped


def test_wall_time_not_serialized():
    d = _result().to_json_dict()
    assert "wall_time" not in json.dumps(d)


# ---------------------------------------------------------------- SVG render

def test_svg_contains_declared_groups(tmp_path):
    res = _result()
    path = tmp_path / "curve.svg"
    dataio.render_curve_svg(res, 0.05, path)
    text = path.read_text()
    for gid in ("fdr50-line", "fdr10-line", "fdr90-line", "target-line", "nhat-marker"):
        assert text.count(f'<g id="{gid}"') == 1
    assert "Sample size (n)" in text
    assert ">FDR<" in text


def test_svg_without_estimate_has_no_marker(tmp_path):
    res = _result()
    res.n_hat = None
    path = tmp_path / "curve.svg"
    dataio.render_curve_svg(res, 0.05, path)
    assert "nhat-marker" not in path.read_text()


def test_svg_single_point_curve(tmp_path):
    res = _result()
    res.curve = res.curve[:1]
    res.n_hat = None
    dataio.render_curve_svg(res, 0.05, tmp_path / "one.svg")
    assert (tmp_path / "one.svg").read_text().startswith("<svg")


def test_svg_byte_stable(tmp_path):
    res = _result()
    dataio.render_curve_svg(res, 0.05, tmp_path / "a.svg")
    dataio.render_curve_svg(res, 0.05, tmp_path / "b.svg")
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_svg_matches_committed_golden_render(tmp_path):
    # a full seeded run rendered today must reproduce the committed bytes
    from metsizer.search import estimate_sample_size
    from metsizer.types import EstimationConfig

    cfg = EstimationConfig(p=60, n_min=6, n_max=30, permutations=5, simulations=4, seed=11)
    res = estimate_sample_size(cfg)
    dataio.render_curve_svg(res, cfg.target_fdr, tmp_path / "render.svg")
    golden = Path(__file__).parent / "data" / "golden" / "curve_seed11.svg"
    assert (tmp_path / "render.svg").read_bytes() == golden.read_bytes()


def test_sweep_csv_and_svg(tmp_path):
    records = [
        {"n": 10, "m": 0.1, "fdr10": 0.1, "fdr50": 0.2, "fdr90": 0.3},
        {"n": 10, "m": 0.2, "fdr10": 0.05, "fdr50": 0.1, "fdr90": 0.2},
        {"n": 20, "m": 0.1, "fdr10": 0.02, "fdr50": 0.05, "fdr90": 0.1},
        {"n": 20, "m": 0.2, "fdr10": 0.01, "fdr50": 0.02, "fdr90": 0.05},
    ]
    text = dataio.sweep_csv_text(records)
    assert text.splitlines()[0] == "n,m,fdr10,fdr50,fdr90"
    assert len(text.strip().splitlines()) == 5
    dataio.render_sweep_svg(records, 0.05, tmp_path / "sweep.svg")
    svg = (tmp_path / "sweep.svg").read_text()
    assert svg.count("<polyline") == 2  # one median line per sample size

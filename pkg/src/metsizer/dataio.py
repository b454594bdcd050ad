"""Pilot-data ingestion and result artifacts (JSON, CSV, SVG).

CSV is the sole ingestion format: both binned NMR tables and targeted-MS
quantification tables export to it.  All parse and validation failures carry
file coordinates; nothing is silently coerced.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .errors import PilotDataError
from .types import FittedModel, PilotMatrix, SampleSizeResult

CURVE_CSV_HEADER = "n,n1,n2,fdr10,fdr50,fdr90"


@dataclass
class PilotFileSchema:
    """How to read a pilot CSV: which column holds labels, which hold covariates.

    Columns are referenced by header name (``has_header=True``) or 0-based
    index.  With ``orientation="samples_as_columns"`` the cell grid is
    transposed before any interpretation, so a file and its literal transpose
    load identically under flipped orientations.
    """

    label_column: Union[str, int] = "group"
    covariate_columns: List[Union[str, int]] = field(default_factory=list)
    delimiter: str = ","
    has_header: bool = True
    orientation: str = "samples_as_rows"

    def validate(self) -> None:
        if self.label_column in self.covariate_columns:
            raise PilotDataError(
                f"label column {self.label_column!r} cannot also be a covariate column"
            )
        if self.orientation not in ("samples_as_rows", "samples_as_columns"):
            raise PilotDataError(
                f"orientation must be 'samples_as_rows' or 'samples_as_columns', got {self.orientation!r}"
            )
        if len(self.delimiter) != 1:
            raise PilotDataError(f"delimiter must be a single character, got {self.delimiter!r}")

    def to_json_dict(self) -> dict:
        return {
            "label_column": self.label_column,
            "covariate_columns": list(self.covariate_columns),
            "delimiter": self.delimiter,
            "has_header": self.has_header,
            "orientation": self.orientation,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "PilotFileSchema":
        return PilotFileSchema(
            label_column=d.get("label_column", "group"),
            covariate_columns=list(d.get("covariate_columns", [])),
            delimiter=str(d.get("delimiter", ",")),
            has_header=bool(d.get("has_header", True)),
            orientation=str(d.get("orientation", "samples_as_rows")),
        )


def load_pilot_schema(path: Union[str, Path]) -> PilotFileSchema:
    with open(path, encoding="utf-8") as fh:
        return PilotFileSchema.from_json_dict(json.load(fh))


def _resolve_column(
    ref: Union[str, int], header: Optional[List[str]], n_cols: int, role: str
) -> int:
    if isinstance(ref, int):
        if not (0 <= ref < n_cols):
            raise PilotDataError(f"{role} column index {ref} out of range (file has {n_cols} columns)")
        return ref
    if header is None:
        raise PilotDataError(f"{role} column {ref!r} referenced by name but the file has no header")
    try:
        return header.index(ref)
    except ValueError:
        raise PilotDataError(f"{role} column {ref!r} not found in header {header}") from None


def load_pilot_csv(path: Union[str, Path], schema: PilotFileSchema) -> PilotMatrix:
    """Read and validate a pilot CSV into a PilotMatrix.

    Group labels are mapped to {1, 2} in order of first appearance; more than
    two distinct labels, fewer than two samples in either group, ragged rows
    and non-numeric cells are all hard errors with coordinates.
    """
    schema.validate()
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh, delimiter=schema.delimiter)]
    rows = [row for row in rows if row]  # drop completely blank lines
    if not rows:
        raise PilotDataError(f"{path}: file is empty")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise PilotDataError(
                f"{path}: line {i + 1} has {len(row)} fields, expected {width}"
            )

    transposed = schema.orientation == "samples_as_columns"
    if transposed:
        rows = [list(col) for col in zip(*rows)]

    def coords(r: int, c: int) -> str:
        # report 1-based coordinates in the file's own geometry
        if transposed:
            r, c = c, r
        return f"row {r + 1}, column {c + 1}"

    header: Optional[List[str]] = None
    body_start = 0
    if schema.has_header:
        header = [cell.strip() for cell in rows[0]]
        body_start = 1
    body = rows[body_start:]
    if not body:
        raise PilotDataError(f"{path}: no data rows after the header")

    n_cols = len(rows[0])
    label_idx = _resolve_column(schema.label_column, header, n_cols, "label")
    cov_idx = [
        _resolve_column(ref, header, n_cols, "covariate") for ref in schema.covariate_columns
    ]
    feature_idx = [j for j in range(n_cols) if j != label_idx and j not in cov_idx]
    if not feature_idx:
        raise PilotDataError(f"{path}: no intensity columns left after labels/covariates")

    label_order: List[str] = []
    groups = np.empty(len(body), dtype=int)
    data = np.empty((len(body), len(feature_idx)))
    covariates = np.empty((len(body), len(cov_idx))) if cov_idx else None

    for i, row in enumerate(body):
        raw_label = row[label_idx].strip()
        if raw_label not in label_order:
            label_order.append(raw_label)
        if len(label_order) > 2:
            raise PilotDataError(
                f"{path}: more than two distinct group labels: {label_order}"
            )
        groups[i] = label_order.index(raw_label) + 1
        for k, j in enumerate(feature_idx):
            try:
                data[i, k] = float(row[j])
            except ValueError:
                raise PilotDataError(
                    f"{path}: non-numeric intensity {row[j]!r} at {coords(i + body_start, j)}"
                ) from None
        for k, j in enumerate(cov_idx):
            try:
                covariates[i, k] = float(row[j])
            except ValueError:
                raise PilotDataError(
                    f"{path}: non-numeric covariate {row[j]!r} at {coords(i + body_start, j)}"
                ) from None

    if len(label_order) < 2:
        raise PilotDataError(f"{path}: only one group label present: {label_order}")
    n1 = int(np.sum(groups == 1))
    n2 = int(np.sum(groups == 2))
    if n1 < 2 or n2 < 2:
        raise PilotDataError(
            f"{path}: both groups need >= 2 samples, got {label_order[0]!r}: {n1}, {label_order[1]!r}: {n2}"
        )
    try:
        return PilotMatrix(
            data=data, group=groups, covariates=covariates, provenance="experimental"
        )
    except ValueError as exc:
        raise PilotDataError(f"{path}: {exc}") from exc


def result_json_text(result: SampleSizeResult) -> str:
    """Canonical JSON form of a result; identical bytes for identical runs."""
    return json.dumps(result.to_json_dict(), indent=2, sort_keys=True) + "\n"


def curve_csv_text(result: SampleSizeResult) -> str:
    lines = [CURVE_CSV_HEADER]
    for pt in result.curve:
        lines.append(
            f"{pt.n},{pt.n1},{pt.n2},{pt.fdr10!r},{pt.fdr50!r},{pt.fdr90!r}"
        )
    return "\n".join(lines) + "\n"


def write_result(
    result: SampleSizeResult,
    json_path: Union[str, Path],
    csv_path: Union[str, Path],
) -> None:
    """Write the result JSON and the curve CSV."""
    Path(json_path).write_text(result_json_text(result), encoding="utf-8")
    Path(csv_path).write_text(curve_csv_text(result), encoding="utf-8")


def load_result(path: Union[str, Path]) -> SampleSizeResult:
    with open(path, encoding="utf-8") as fh:
        return SampleSizeResult.from_json_dict(json.load(fh))


def write_fitted_model(fit: FittedModel, path: Union[str, Path]) -> None:
    Path(path).write_text(
        json.dumps(fit.to_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_fitted_model(path: Union[str, Path]) -> FittedModel:
    with open(path, encoding="utf-8") as fh:
        return FittedModel.from_json_dict(json.load(fh))


# Deterministic SVG layout: fixed canvas, fixed margins, fixed float formatting,
# so renders are byte-comparable.
_SVG_W, _SVG_H = 800, 600
_MARGIN = 10
_GUTTER_LEFT, _GUTTER_BOTTOM = 60, 50
_PLOT_X0 = _MARGIN + _GUTTER_LEFT
_PLOT_Y0 = _MARGIN
_PLOT_X1 = _SVG_W - _MARGIN
_PLOT_Y1 = _SVG_H - _MARGIN - _GUTTER_BOTTOM


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_curve_svg(
    result: SampleSizeResult, target_fdr: float, path: Union[str, Path]
) -> None:
    """Self-contained SVG of the FDR curve.

    Solid median line, dashed 10th/90th percentile lines, a dashed horizontal
    target line, and a vertical marker at the estimate when present.
    """
    curve = result.curve
    if not curve:
        raise ValueError("cannot render an empty curve")
    xs = [pt.n for pt in curve]
    x_lo, x_hi = min(xs), max(xs)
    if result.n_hat is not None:
        x_lo, x_hi = min(x_lo, result.n_hat), max(x_hi, result.n_hat)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    y_hi = max(max(pt.fdr90 for pt in curve), target_fdr) * 1.05
    if y_hi <= 0:
        y_hi = 1.0

    def sx(n: float) -> float:
        return _PLOT_X0 + (n - x_lo) / (x_hi - x_lo) * (_PLOT_X1 - _PLOT_X0)

    def sy(v: float) -> float:
        return _PLOT_Y1 - v / y_hi * (_PLOT_Y1 - _PLOT_Y0)

    def polyline(values, color: str, dash: str) -> str:
        pts = " ".join(f"{_fmt(sx(pt.n))},{_fmt(sy(v))}" for pt, v in zip(curve, values))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        return (
            f'<polyline fill="none" stroke="{color}" stroke-width="2"{dash_attr} '
            f'points="{pts}"/>'
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_SVG_W} {_SVG_H}" '
        f'width="{_SVG_W}" height="{_SVG_H}">',
        f'<rect x="0" y="0" width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
    ]

    # axes, ticks and labels
    axis = [
        f'<g id="axes" stroke="black" stroke-width="1" font-family="sans-serif" font-size="14">',
        f'<line x1="{_PLOT_X0}" y1="{_PLOT_Y1}" x2="{_PLOT_X1}" y2="{_PLOT_Y1}"/>',
        f'<line x1="{_PLOT_X0}" y1="{_PLOT_Y0}" x2="{_PLOT_X0}" y2="{_PLOT_Y1}"/>',
    ]
    tick_every = max(1, (len(xs) + 9) // 10)
    for i, n in enumerate(xs):
        if i % tick_every:
            continue
        x = _fmt(sx(n))
        axis.append(f'<line x1="{x}" y1="{_PLOT_Y1}" x2="{x}" y2="{_PLOT_Y1 + 5}"/>')
        axis.append(
            f'<text x="{x}" y="{_PLOT_Y1 + 20}" text-anchor="middle" stroke="none">{n}</text>'
        )
    for k in range(6):
        v = y_hi * k / 5
        y = _fmt(sy(v))
        axis.append(f'<line x1="{_PLOT_X0 - 5}" y1="{y}" x2="{_PLOT_X0}" y2="{y}"/>')
        axis.append(
            f'<text x="{_PLOT_X0 - 8}" y="{y}" text-anchor="end" dominant-baseline="middle" '
            f'stroke="none">{v:.3f}</text>'
        )
    axis.append(
        f'<text x="{(_PLOT_X0 + _PLOT_X1) // 2}" y="{_SVG_H - _MARGIN - 5}" '
        f'text-anchor="middle" stroke="none">Sample size (n)</text>'
    )
    axis.append(
        f'<text x="{_MARGIN + 12}" y="{(_PLOT_Y0 + _PLOT_Y1) // 2}" text-anchor="middle" '
        f'stroke="none" transform="rotate(-90 {_MARGIN + 12} {(_PLOT_Y0 + _PLOT_Y1) // 2})">FDR</text>'
    )
    axis.append("</g>")
    parts.extend(axis)

    parts.append(f'<g id="fdr10-line">{polyline([pt.fdr10 for pt in curve], "#cc0000", "6,4")}</g>')
    parts.append(f'<g id="fdr90-line">{polyline([pt.fdr90 for pt in curve], "#cc0000", "6,4")}</g>')
    parts.append(f'<g id="fdr50-line">{polyline([pt.fdr50 for pt in curve], "#cc0000", "")}</g>')
    ty = _fmt(sy(target_fdr))
    parts.append(
        f'<g id="target-line"><line x1="{_PLOT_X0}" y1="{ty}" x2="{_PLOT_X1}" y2="{ty}" '
        f'stroke="black" stroke-width="1.5" stroke-dasharray="8,5"/></g>'
    )
    if result.n_hat is not None:
        nx = _fmt(sx(result.n_hat))
        parts.append(
            f'<g id="nhat-marker"><line x1="{nx}" y1="{_PLOT_Y0}" x2="{nx}" y2="{_PLOT_Y1}" '
            f'stroke="#555555" stroke-width="1.5" stroke-dasharray="3,3"/>'
            f'<text x="{nx}" y="{_PLOT_Y0 + 16}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="14">n&#770; = {result.n_hat}</text></g>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def render_sweep_svg(
    records: List[dict], target_fdr: float, path: Union[str, Path]
) -> None:
    """SVG of median FDR against the expected significant proportion, one line
    per sample size."""
    if not records:
        raise ValueError("cannot render an empty sweep")
    totals = sorted({r["n"] for r in records})
    ms = sorted({r["m"] for r in records})
    x_lo, x_hi = min(ms), max(ms)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.05, x_hi + 0.05
    y_hi = max(max(r["fdr50"] for r in records), target_fdr) * 1.05 or 1.0

    def sx(m: float) -> float:
        return _PLOT_X0 + (m - x_lo) / (x_hi - x_lo) * (_PLOT_X1 - _PLOT_X0)

    def sy(v: float) -> float:
        return _PLOT_Y1 - v / y_hi * (_PLOT_Y1 - _PLOT_Y0)

    colors = ["#cc0000", "#0044cc", "#007700", "#aa6600", "#660066"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_SVG_W} {_SVG_H}" '
        f'width="{_SVG_W}" height="{_SVG_H}">',
        f'<rect x="0" y="0" width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<g id="axes" stroke="black" stroke-width="1" font-family="sans-serif" font-size="14">',
        f'<line x1="{_PLOT_X0}" y1="{_PLOT_Y1}" x2="{_PLOT_X1}" y2="{_PLOT_Y1}"/>',
        f'<line x1="{_PLOT_X0}" y1="{_PLOT_Y0}" x2="{_PLOT_X0}" y2="{_PLOT_Y1}"/>',
        f'<text x="{(_PLOT_X0 + _PLOT_X1) // 2}" y="{_SVG_H - _MARGIN - 5}" text-anchor="middle" '
        f'stroke="none">Expected proportion of significant features (m)</text>',
        f'<text x="{_MARGIN + 12}" y="{(_PLOT_Y0 + _PLOT_Y1) // 2}" text-anchor="middle" stroke="none" '
        f'transform="rotate(-90 {_MARGIN + 12} {(_PLOT_Y0 + _PLOT_Y1) // 2})">FDR</text>',
    ]
    for m in ms:
        x = _fmt(sx(m))
        parts.append(f'<line x1="{x}" y1="{_PLOT_Y1}" x2="{x}" y2="{_PLOT_Y1 + 5}"/>')
        parts.append(
            f'<text x="{x}" y="{_PLOT_Y1 + 20}" text-anchor="middle" stroke="none">{m:g}</text>'
        )
    parts.append("</g>")
    for i, n in enumerate(totals):
        color = colors[i % len(colors)]
        pts = " ".join(
            f"{_fmt(sx(r['m']))},{_fmt(sy(r['fdr50']))}"
            for r in records
            if r["n"] == n
        )
        parts.append(
            f'<g id="n-{n}-line"><polyline fill="none" stroke="{color}" stroke-width="2" '
            f'points="{pts}"/>'
            f'<text x="{_PLOT_X1 - 60}" y="{_PLOT_Y0 + 20 + 18 * i}" fill="{color}" stroke="none" '
            f'font-family="sans-serif" font-size="14">n = {n}</text></g>'
        )
    ty = _fmt(sy(target_fdr))
    parts.append(
        f'<g id="target-line"><line x1="{_PLOT_X0}" y1="{ty}" x2="{_PLOT_X1}" y2="{ty}" '
        f'stroke="black" stroke-width="1.5" stroke-dasharray="8,5"/></g>'
    )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def sweep_csv_text(records: List[dict]) -> str:
    lines = ["n,m,fdr10,fdr50,fdr90"]
    for r in records:
        lines.append(f"{r['n']},{r['m']!r},{r['fdr10']!r},{r['fdr50']!r},{r['fdr90']!r}")
    return "\n".join(lines) + "\n"

"""Readers for the solver's CSV/JSON output files.

Headers must match the producer's contract exactly; a malformed data row
aborts with its line number.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


FIBER_HEADER = ["t", "Qn", "Qe"]
SWEEP_HEADER = ["lambda", "E1", "E2", "sign_E2", "norm_u", "norm_v",
                "iter_u", "iter_v", "residual_u", "residual_v"]


class SchemaError(ValueError):
    pass


@dataclass
class Table:
    columns: list[str]
    rows: list[list[float]]
    markers: dict = field(default_factory=dict)
    comments: list[str] = field(default_factory=list)

    def column(self, name: str) -> list[float]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def _parse_markers(comment: str) -> dict:
    out = {}
    for token in comment.removeprefix("markers").split():
        if "=" in token:
            key, val = token.split("=", 1)
            out[key] = float(val)
    return out


def read_table(path: str, expected_header: list[str]) -> Table:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    if header != expected_header:
        raise SchemaError(f"{path}: header {header} != expected {expected_header}")
    table = Table(columns=header, rows=[])
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.startswith("#"):
            comment = line.lstrip("# ").strip()
            table.comments.append(comment)
            if comment.startswith("markers"):
                table.markers = _parse_markers(comment)
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}:{lineno}: expected {len(header)} cells, "
                              f"got {len(cells)}")
        try:
            table.rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise SchemaError(f"{path}:{lineno}: {exc}") from exc
    if not table.rows:
        raise SchemaError(f"{path}: no data rows")
    return table


def read_fiber_csv(path: str) -> Table:
    table = read_table(path, FIBER_HEADER)
    for key in ("t_n", "t_e", "lambda_n_u", "lambda_e_u"):
        if key not in table.markers:
            raise SchemaError(f"{path}: missing marker {key}")
    return table


def read_sweep_csv(path: str) -> Table:
    return read_table(path, SWEEP_HEADER)


def read_extremal_json(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    for key in ("lambda_n", "lambda_e"):
        if key not in data:
            raise SchemaError(f"{path}: missing field {key}")
    return data


def crossings(xs: list[float], ys: list[float]) -> list[float]:
    """Abscissas where ys changes sign, by linear interpolation."""
    out = []
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if y0 == 0.0:
            out.append(x0)
        elif (y0 > 0) != (y1 > 0):
            out.append(x0 + (x1 - x0) * y0 / (y0 - y1))
    if ys[-1] == 0.0:
        out.append(xs[-1])
    return out

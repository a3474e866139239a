"""File formats: point clouds, surfaces, run configurations, sampled grids.

Clouds travel as XYZ ascii (three whitespace-separated numbers per line) or
CSV with a header row and a configurable column mapping.  Surfaces persist
as self-describing JSON (degrees, knot vectors, coefficient grid).  Run
configurations are line-oriented ``key = value`` text and round-trip
losslessly.  All floats are written with 17 significant digits, enough to
reproduce the binary value exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .clouds import as_cloud
from .pipeline import FitConfig
from .splines import KnotVector, TensorSplineSpace, WqisaSurface
from .weights import WeightSpec


class CloudParseError(ValueError):
    """A cloud file could not be parsed; the message names the line."""


class ConfigError(ValueError):
    """A run configuration is malformed or inconsistent."""


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _parse_floats(fields_: list[str], line_no: int, path) -> tuple[float, float, float]:
    try:
        x, y, z = (float(f) for f in fields_)
    except ValueError:
        raise CloudParseError(f"{path}: line {line_no}: cannot parse {fields_!r} as numbers") from None
    if not all(np.isfinite(v) for v in (x, y, z)):
        raise CloudParseError(f"{path}: line {line_no}: non-finite value")
    return x, y, z


def read_cloud(path, fmt: str | None = None, columns: tuple[str, str, str] = ("x", "y", "z")) -> np.ndarray:
    """Read a point cloud, preserving row order.

    *fmt* is ``"xyz"`` or ``"csv"``; by default it is inferred from the file
    extension (``.csv`` means CSV, anything else means XYZ ascii).  For CSV,
    *columns* names the header columns holding x, y and z.
    """
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "xyz"
    if fmt not in ("xyz", "csv"):
        raise ValueError(f"unknown cloud format {fmt!r}")
    rows: list[tuple[float, float, float]] = []
    text = path.read_text()
    if fmt == "xyz":
        for line_no, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped:
                continue
            parts = stripped.split()
            if len(parts) != 3:
                raise CloudParseError(
                    f"{path}: line {line_no}: expected 3 values, got {len(parts)}"
                )
            rows.append(_parse_floats(parts, line_no, path))
    else:
        reader = csv.reader(text.splitlines())
        try:
            header = next(reader)
        except StopIteration:
            raise CloudParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        try:
            idx = [header.index(c) for c in columns]
        except ValueError:
            raise CloudParseError(
                f"{path}: header {header!r} is missing one of the columns {columns!r}"
            ) from None
        for line_no, record in enumerate(reader, start=2):
            if not record or all(not f.strip() for f in record):
                continue
            if max(idx) >= len(record):
                raise CloudParseError(f"{path}: line {line_no}: too few fields")
            rows.append(_parse_floats([record[i] for i in idx], line_no, path))
    if not rows:
        raise CloudParseError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def write_cloud(path, cloud, fmt: str | None = None) -> None:
    """Write a cloud as XYZ ascii or CSV (inferred from the extension)."""
    path = Path(path)
    cloud = as_cloud(cloud)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "xyz"
    lines = []
    if fmt == "csv":
        lines.append("x,y,z")
        join = ","
    elif fmt == "xyz":
        join = " "
    else:
        raise ValueError(f"unknown cloud format {fmt!r}")
    for row in cloud:
        lines.append(join.join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def surface_to_dict(surface: WqisaSurface) -> dict:
    return {
        "format": "wqisa-surface",
        "version": 1,
        "degree_x": surface.space.knots_x.degree,
        "degree_y": surface.space.knots_y.degree,
        "knots_x": [float(t) for t in surface.space.knots_x.knots],
        "knots_y": [float(t) for t in surface.space.knots_y.knots],
        "coefficients": [[float(c) for c in row] for row in surface.coefficients],
    }


def surface_from_dict(payload: dict) -> WqisaSurface:
    try:
        space = TensorSplineSpace(
            KnotVector(int(payload["degree_x"]), np.asarray(payload["knots_x"], dtype=float)),
            KnotVector(int(payload["degree_y"]), np.asarray(payload["knots_y"], dtype=float)),
        )
        coefficients = np.asarray(payload["coefficients"], dtype=float)
    except KeyError as exc:
        raise ValueError(f"surface payload is missing field {exc}") from None
    return WqisaSurface(space, coefficients)


def save_surface(surface: WqisaSurface, path) -> None:
    Path(path).write_text(json.dumps(surface_to_dict(surface), sort_keys=True) + "\n")


def load_surface(path) -> WqisaSurface:
    return surface_from_dict(json.loads(Path(path).read_text()))


def write_surface_grid(surface: WqisaSurface, resolution: tuple[int, int], path) -> None:
    """Sample the surface on a uniform grid and write ``x,y,z`` CSV rows.

    Row-major: x varies slowest.  Values carry 17 significant digits, so
    re-reading the grid and re-evaluating the surface reproduces the z
    column exactly.
    """
    rx, ry = resolution
    if rx < 2 or ry < 2:
        raise ValueError(f"resolution must be at least 2 per axis, got {resolution}")
    xmin, xmax, ymin, ymax = surface.space.domain
    xs = np.linspace(xmin, xmax, rx)
    ys = np.linspace(ymin, ymax, ry)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    gx = gx.ravel()
    gy = gy.ravel()
    gz = surface.evaluate_many(gx, gy)
    lines = ["x,y,z"]
    for x, y, z in zip(gx, gy, gz):
        lines.append(f"{_fmt(x)},{_fmt(y)},{_fmt(z)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_report(payload: dict, path) -> None:
    """Serialize a report deterministically (sorted keys, no timestamps)."""
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


_WEIGHT_CHOICES = ("indicator", "gaussian", "knn", "idw", "idw_truncated")


@dataclass(frozen=True)
class RunConfig:
    """Flat, human-editable description of one fitting run."""

    degree_x: int = 2
    degree_y: int = 2
    weight: str = "knn"
    k_grid: tuple[int, ...] = tuple(range(1, 11))
    radius_grid: tuple[float, ...] = ()
    sigma_grid: tuple[float, ...] = ()
    truncation: int = 500
    coincidence_tolerance: float | None = None
    gaussian_squared: bool = False
    outlier_filter: bool = False
    fence: float = 1.5
    epsilon: float | None = None
    max_iterations: int = 15
    train_fraction: float = 0.5
    validation_fraction: float = 0.25
    test_fraction: float = 0.25
    seed: int = 0

    def __post_init__(self) -> None:
        if self.weight not in _WEIGHT_CHOICES:
            raise ConfigError(f"weight must be one of {_WEIGHT_CHOICES}, got {self.weight!r}")

    def to_fit_config(self) -> FitConfig:
        common = {"outlier_filter": self.outlier_filter, "fence": self.fence}
        if self.weight == "knn":
            if not self.k_grid:
                raise ConfigError("weight 'knn' needs a nonempty k_grid")
            grid = tuple(WeightSpec.knn(k, **common) for k in self.k_grid)
        elif self.weight == "indicator":
            if not self.radius_grid:
                raise ConfigError("weight 'indicator' needs a nonempty radius_grid")
            grid = tuple(WeightSpec.indicator(r, **common) for r in self.radius_grid)
        elif self.weight == "gaussian":
            if not self.sigma_grid:
                raise ConfigError("weight 'gaussian' needs a nonempty sigma_grid")
            grid = tuple(
                WeightSpec.gaussian(s, squared=self.gaussian_squared, **common)
                for s in self.sigma_grid
            )
        elif self.weight == "idw":
            grid = (WeightSpec.idw(self.coincidence_tolerance, **common),)
        else:
            grid = (
                WeightSpec.truncated_idw(self.truncation, self.coincidence_tolerance, **common),
            )
        return FitConfig(
            weight_grid=grid,
            degrees=(self.degree_x, self.degree_y),
            epsilon=self.epsilon,
            max_iterations=self.max_iterations,
            fractions=(self.train_fraction, self.validation_fraction, self.test_fraction),
            seed=self.seed,
        )

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _format_value(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _fmt(value)
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    return str(value)


def format_config(config: RunConfig) -> str:
    lines = [f"{f.name} = {_format_value(getattr(config, f.name))}" for f in fields(config)]
    return "\n".join(lines) + "\n"


def _parse_value(name: str, text: str, kind):
    text = text.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "optional_float":
            return None if text == "auto" else float(text)
        if kind == "bool":
            if text not in ("true", "false"):
                raise ValueError
            return text == "true"
        if kind == "int_tuple":
            return tuple(int(f) for f in text.split(",")) if text else ()
        if kind == "float_tuple":
            return tuple(float(f) for f in text.split(",")) if text else ()
        return text
    except ValueError:
        raise ConfigError(f"cannot parse {name} = {text!r}") from None


_FIELD_KINDS = {
    "degree_x": "int",
    "degree_y": "int",
    "weight": "str",
    "k_grid": "int_tuple",
    "radius_grid": "float_tuple",
    "sigma_grid": "float_tuple",
    "truncation": "int",
    "coincidence_tolerance": "optional_float",
    "gaussian_squared": "bool",
    "outlier_filter": "bool",
    "fence": "float",
    "epsilon": "optional_float",
    "max_iterations": "int",
    "train_fraction": "float",
    "validation_fraction": "float",
    "test_fraction": "float",
    "seed": "int",
}


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines; blank lines and ``#`` comments allowed."""
    values = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {stripped!r}")
        name, _, raw = stripped.partition("=")
        name = name.strip()
        if name not in _FIELD_KINDS:
            raise ConfigError(f"line {line_no}: unknown key {name!r}")
        if name in values:
            raise ConfigError(f"line {line_no}: duplicate key {name!r}")
        values[name] = _parse_value(name, raw, _FIELD_KINDS[name])
    return RunConfig(**values)


def read_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def write_config(config: RunConfig, path) -> None:
    Path(path).write_text(format_config(config))

"""Grid sampling with second-order central stencils, and CSV/JSON tables."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Sequence, TextIO

import numpy as np

from .errors import EmptyGrid, SingularDenominator, SingularElement
from .lm import worker_count

BASE_COLUMNS = ("x", "y", "z", "F1", "F2", "F3")
STENCIL_COLUMNS = ("div", "curl1", "curl2", "curl3", "lap1", "lap2", "lap3")


@dataclass(frozen=True)
class GridSpec:
    lo: tuple[float, float, float]
    hi: tuple[float, float, float]
    n: tuple[int, int, int]

    @classmethod
    def of(cls, lo: Sequence[float], hi: Sequence[float], n: Sequence[int] | int) -> "GridSpec":
        if isinstance(n, int):
            n = (n, n, n)
        spec = cls(tuple(map(float, lo)), tuple(map(float, hi)), tuple(int(v) for v in n))  # type: ignore[arg-type]
        if len(spec.lo) != 3 or len(spec.hi) != 3 or len(spec.n) != 3:
            raise ValueError("grid spec needs three bounds and three resolutions")
        if any(v <= 0 for v in spec.n):
            raise EmptyGrid(f"resolution {spec.n} has an empty axis")
        return spec

    @classmethod
    def from_json(cls, data: dict) -> "GridSpec":
        return cls.of(data["min"], data["max"], data["n"])

    def to_json(self) -> dict:
        return {"min": list(self.lo), "max": list(self.hi), "n": list(self.n)}

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(self.lo[a], self.hi[a], self.n[a]) if self.n[a] > 1 else np.array([self.lo[a]])
                for a in range(3)]

    def steps(self) -> tuple[float, float, float]:
        return tuple((self.hi[a] - self.lo[a]) / (self.n[a] - 1) if self.n[a] > 1 else math.nan
                     for a in range(3))  # type: ignore[return-value]

    def points(self) -> np.ndarray:
        """All nodes, x varying fastest."""
        ax, ay, az = self.axes()
        Z, Y, X = np.meshgrid(az, ay, ax, indexing="ij")
        return np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)

    @property
    def size(self) -> int:
        return self.n[0] * self.n[1] * self.n[2]


@dataclass
class GridTable:
    points: np.ndarray  # (N, 3)
    values: np.ndarray  # (N, 3)
    stencils: np.ndarray | None = None  # (N, 7): div, curl1..3, lap1..3
    spec: GridSpec | None = None
    singular: int = 0

    @property
    def columns(self) -> tuple[str, ...]:
        return BASE_COLUMNS + (STENCIL_COLUMNS if self.stencils is not None else ())

    def rows(self) -> np.ndarray:
        parts = [self.points, self.values]
        if self.stencils is not None:
            parts.append(self.stencils)
        return np.hstack(parts)

    def stats(self) -> dict[str, float]:
        """Max ``|.|`` of each stencil group over interior nodes."""
        if self.stencils is None:
            return {}
        S = self.stencils
        out = {}
        for name, cols in (("div", [0]), ("curl", [1, 2, 3]), ("lap", [4, 5, 6])):
            block = np.abs(S[:, cols])
            block = block[~np.isnan(block).any(axis=1)]
            out[name] = float(block.max()) if block.size else math.nan
        return out


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else format(float(v), ".17g")


def evaluate(field: Any, pts: np.ndarray, workers: int | None = None) -> tuple[np.ndarray, int]:
    """Values at ``pts``; singular points become NaN rows and are counted."""
    if hasattr(field, "eval_array"):
        return np.asarray(field.eval_array(pts), dtype=float), 0

    def one(q):
        try:
            return [float(c) for c in field(tuple(q))], False
        except (SingularDenominator, SingularElement):
            return [math.nan] * 3, True

    n = worker_count(workers)
    if n > 1 and len(pts) > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            res = list(pool.map(one, pts))
    else:
        res = [one(q) for q in pts]
    vals = np.array([r[0] for r in res], dtype=float).reshape(len(pts), 3)
    return vals, sum(r[1] for r in res)


def stencils(values: np.ndarray, spec: GridSpec) -> np.ndarray:
    """Second-order central div, curl and Laplacian; NaN off the interior."""
    nx, ny, nz = spec.n
    hx, hy, hz = spec.steps()
    F = values.reshape(nz, ny, nx, 3)
    out = np.full((nz, ny, nx, 7), np.nan)
    if min(spec.n) < 3:
        return out.reshape(-1, 7)
    c = F[1:-1, 1:-1, 1:-1]

    def d(axis: int, h: float) -> np.ndarray:
        # axis 0 = x (last array axis)
        if axis == 0:
            return (F[1:-1, 1:-1, 2:] - F[1:-1, 1:-1, :-2]) / (2 * h)
        if axis == 1:
            return (F[1:-1, 2:, 1:-1] - F[1:-1, :-2, 1:-1]) / (2 * h)
        return (F[2:, 1:-1, 1:-1] - F[:-2, 1:-1, 1:-1]) / (2 * h)

    def dd(axis: int, h: float) -> np.ndarray:
        if axis == 0:
            return (F[1:-1, 1:-1, 2:] - 2 * c + F[1:-1, 1:-1, :-2]) / h**2
        if axis == 1:
            return (F[1:-1, 2:, 1:-1] - 2 * c + F[1:-1, :-2, 1:-1]) / h**2
        return (F[2:, 1:-1, 1:-1] - 2 * c + F[:-2, 1:-1, 1:-1]) / h**2

    Dx, Dy, Dz = d(0, hx), d(1, hy), d(2, hz)
    inner = out[1:-1, 1:-1, 1:-1]
    inner[..., 0] = Dx[..., 0] + Dy[..., 1] + Dz[..., 2]
    inner[..., 1] = Dy[..., 2] - Dz[..., 1]
    inner[..., 2] = Dz[..., 0] - Dx[..., 2]
    inner[..., 3] = Dx[..., 1] - Dy[..., 0]
    inner[..., 4:7] = dd(0, hx) + dd(1, hy) + dd(2, hz)
    return out.reshape(-1, 7)


def sample_grid(field: Any, spec: GridSpec, *, with_stencils: bool = False,
                workers: int | None = None) -> GridTable:
    """Evaluate ``field`` (a PolyField or any point callable) on every node."""
    pts = spec.points()
    vals, singular = evaluate(field, pts, workers)
    S = stencils(vals, spec) if with_stencils else None
    return GridTable(pts, vals, S, spec, singular)


def apply_pointwise(table: GridTable, f: Callable[[np.ndarray], np.ndarray]) -> GridTable:
    """New table with values ``f(values)`` (row-wise), stencils recomputed if present."""
    vals = np.asarray(f(table.values), dtype=float)
    S = stencils(vals, table.spec) if table.stencils is not None and table.spec else None
    return GridTable(table.points, vals, S, table.spec, table.singular)


# -- serialization --------------------------------------------------------------


def write_csv(table: GridTable, out: TextIO) -> None:
    out.write(",".join(table.columns) + "\n")
    for row in table.rows():
        out.write(",".join(_fmt(v) for v in row) + "\n")


def to_csv(table: GridTable) -> str:
    buf = io.StringIO()
    write_csv(table, buf)
    return buf.getvalue()


def to_json(table: GridTable) -> str:
    rows = [[None if math.isnan(v) else float(v) for v in r] for r in table.rows()]
    doc = {
        "columns": list(table.columns),
        "grid": table.spec.to_json() if table.spec else None,
        "singular": table.singular,
        "rows": rows,
    }
    if table.stencils is not None:
        doc["stats"] = table.stats()
    return json.dumps(doc, indent=1) + "\n"


def infer_spec(points: np.ndarray) -> GridSpec:
    """Recover the grid spec of an x-fastest node table."""
    axes = [np.unique(points[:, a]) for a in range(3)]
    spec = GridSpec.of([ax[0] for ax in axes], [ax[-1] for ax in axes], [len(ax) for ax in axes])
    if spec.size != len(points) or not np.allclose(spec.points(), points, rtol=0, atol=1e-12 * (1 + np.abs(points).max())):
        raise ValueError("points do not form a complete x-fastest grid")
    return spec


def _table_from_rows(columns: Sequence[str], data: np.ndarray) -> GridTable:
    idx = {c: i for i, c in enumerate(columns)}
    missing = [c for c in BASE_COLUMNS if c not in idx]
    if missing:
        raise ValueError(f"missing columns {missing}")
    pts = data[:, [idx[c] for c in ("x", "y", "z")]]
    vals = data[:, [idx[c] for c in ("F1", "F2", "F3")]]
    S = data[:, [idx[c] for c in STENCIL_COLUMNS]] if all(c in idx for c in STENCIL_COLUMNS) else None
    return GridTable(pts, vals, S, infer_spec(pts), int(np.isnan(vals).any(axis=1).sum()))


def read_csv(src: TextIO) -> GridTable:
    reader = csv.reader(src)
    header = next(reader)
    data = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    if data.size == 0:
        raise EmptyGrid("table has no rows")
    return _table_from_rows(header, data)


def read_json(src: TextIO) -> GridTable:
    doc = json.load(src)
    data = np.array([[math.nan if v is None else v for v in r] for r in doc["rows"]], dtype=float)
    if data.size == 0:
        raise EmptyGrid("table has no rows")
    return _table_from_rows(doc["columns"], data)

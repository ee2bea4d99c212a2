"""Force predictions from correlation scores, and comparison with measurements."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError
from .matrix import PixelMatrix
from .scoring import _fmt, cross_correlate

#: Measured peak attraction of two 25 mm faces at full overlap (N).
PEAK_ATTRACTION_N = 1.09
#: Empirical factor applied to predicted repulsion.
REPULSION_SCALE = 0.09
FACE_SIDE_MM = 25.0


@dataclass(frozen=True)
class ForceMap:
    """Predicted force in newtons per offset, laid out like InteractionMap.sums."""

    order: int
    forces: np.ndarray
    peak_attraction_n: float
    repulsion_scale: float
    side_mm: float = FACE_SIDE_MM

    def at(self, dx: int, dy: int) -> float:
        n = self.order - 1
        return float(self.forces[dy + n, dx + n])

    def to_csv(self) -> str:
        return _grid_csv(self.order, self.forces)

    def metadata(self) -> dict:
        return {
            "order": self.order,
            "side_mm": self.side_mm,
            "peak_attraction_n": self.peak_attraction_n,
            "repulsion_scale": self.repulsion_scale,
            "units": "N",
        }

    def write(self, csv_path) -> tuple[Path, Path]:
        """Write the CSV and a ``.json`` metadata sidecar next to it."""
        csv_path = Path(csv_path)
        csv_path.write_text(self.to_csv())
        side = csv_path.with_suffix(".json")
        side.write_text(json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n")
        return csv_path, side


@dataclass(frozen=True)
class MeasurementGrid:
    order: int
    forces: np.ndarray

    @classmethod
    def from_csv(cls, text: str, source: str = "<csv>") -> "MeasurementGrid":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [h.strip() for h in rows[0]] != ["dx", "dy", "force_newtons"]:
            raise ValueError(f"{source}: header must be dx,dy,force_newtons")
        body = [r for r in rows[1:] if r]
        values = {}
        for r in body:
            if len(r) != 3:
                raise ValueError(f"{source}: expected 3 columns, got {r}")
            values[(int(r[0]), int(r[1]))] = float(r[2])
        span = max((max(abs(dx), abs(dy)) for dx, dy in values), default=-1)
        order = span + 1
        if order < 1 or len(values) != (2 * order - 1) ** 2:
            raise ValueError(f"{source}: expected a full (2N-1)x(2N-1) grid of offsets")
        grid = np.zeros((2 * order - 1, 2 * order - 1))
        for (dx, dy), f in values.items():
            grid[dy + order - 1, dx + order - 1] = f
        if not np.isfinite(grid).all():
            raise ValueError(f"{source}: non-finite force values")
        return cls(order, grid)

    @classmethod
    def read(cls, path) -> "MeasurementGrid":
        path = Path(path)
        return cls.from_csv(path.read_text(), str(path))

    def to_csv(self) -> str:
        return _grid_csv(self.order, self.forces)


def _grid_csv(order: int, grid: np.ndarray) -> str:
    lines = ["dx,dy,force_newtons"]
    r = range(-(order - 1), order)
    for dy in r:
        for dx in r:
            lines.append(f"{dx},{dy},{_fmt(float(grid[dy + order - 1, dx + order - 1]))}")
    return "\n".join(lines) + "\n"


def predict_force_map(a: PixelMatrix, b: PixelMatrix, peak_attraction_newtons: float = PEAK_ATTRACTION_N,
                      repulsion_scale: float = REPULSION_SCALE, side_mm: float = FACE_SIDE_MM) -> ForceMap:
    """Scale the normalized interaction map to newtons.

    Attractive (negative) entries are multiplied by the peak attraction;
    repulsive entries additionally by ``repulsion_scale``.
    """
    if not peak_attraction_newtons > 0:
        raise ValueError("peak attraction must be positive")
    if not 0 < repulsion_scale <= 1:
        raise ValueError("repulsion scale must lie in (0, 1]")
    scores = cross_correlate(a, b).scores
    forces = np.where(scores > 0, scores * repulsion_scale, scores) * peak_attraction_newtons
    return ForceMap(a.order, forces, peak_attraction_newtons, repulsion_scale, side_mm)


def normalized_ssd(predicted: ForceMap | np.ndarray, measured: MeasurementGrid | np.ndarray) -> float:
    """Sum of squared differences divided by the measured energy sum(m**2)."""
    p = np.asarray(getattr(predicted, "forces", predicted), dtype=float)
    m = np.asarray(getattr(measured, "forces", measured), dtype=float)
    if p.shape != m.shape:
        raise DimensionError(f"grid shapes differ: {p.shape} vs {m.shape}")
    energy = float(np.sum(m * m))
    if energy == 0:
        raise ValueError("measured grid is all zero; normalization undefined")
    return float(np.sum((p - m) ** 2)) / energy


def pressure_pa(force_newtons: float, side_mm: float = FACE_SIDE_MM) -> float:
    """Force spread over a square face of the given side length."""
    if not side_mm > 0:
        raise ValueError("side length must be positive")
    side_m = side_mm / 1000.0
    return force_newtons / (side_m * side_m)

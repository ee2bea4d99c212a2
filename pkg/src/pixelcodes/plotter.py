"""Magnetic plotter programs (write path) and hall-sensor scan classification (read path).

Plotter frame: origin at the top-left pixel centre, +x to the right (columns),
+y down (rows). Z is zero at the travel height set by ``G92`` at program start;
the tip descends to ``-z_lift`` to touch the sheet.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .matrix import PixelMatrix

PIXEL_PITCH_MM = 3.0
Z_LIFT_MM = 3.0
DWELL_S = 0.7
DEAD_BAND = 0.1


@dataclass(frozen=True)
class Move:
    x_mm: float
    y_mm: float


@dataclass(frozen=True)
class SetPolarity:
    pole: str  # "N" or "S"


@dataclass(frozen=True)
class LowerZ:
    pass


@dataclass(frozen=True)
class RaiseZ:
    pass


@dataclass(frozen=True)
class Energize:
    dwell_s: float


@dataclass(frozen=True)
class Off:
    pass


Command = Union[Move, SetPolarity, LowerZ, RaiseZ, Energize, Off]


@dataclass
class PlotterProgram:
    order: int
    pitch_mm: float = PIXEL_PITCH_MM
    z_lift_mm: float = Z_LIFT_MM
    dwell_s: float = DWELL_S
    commands: list = field(default_factory=list)

    @property
    def total_dwell_s(self) -> float:
        return math.fsum(c.dwell_s for c in self.commands if isinstance(c, Energize))

    def pixel_count(self) -> int:
        return sum(isinstance(c, Energize) for c in self.commands)

    def check(self) -> None:
        """Raise ValueError if the command stream is not a sequence of well-formed pixel visits."""
        lowered, pole = False, None
        for c in self.commands:
            if isinstance(c, Move):
                if lowered:
                    raise ValueError("move while the tip is down")
                pole = None
            elif isinstance(c, SetPolarity):
                pole = c.pole
            elif isinstance(c, LowerZ):
                lowered = True
            elif isinstance(c, RaiseZ):
                lowered = False
            elif isinstance(c, Energize):
                if not lowered or pole is None:
                    raise ValueError("energize without lowered tip and polarity")
        if lowered:
            raise ValueError("program ends with the tip down")


def emit_program(m: PixelMatrix, pitch_mm: float = PIXEL_PITCH_MM, z_lift_mm: float = Z_LIFT_MM,
                 dwell_s: float = DWELL_S) -> PlotterProgram:
    """Visit the nonzero cells row by row, alternating direction (boustrophedon).

    Each visit is: move, set polarity (+1 -> N, -1 -> S), lower, energize,
    off, raise. Zero cells are skipped.
    """
    for name, v in (("pitch", pitch_mm), ("z lift", z_lift_mm), ("dwell", dwell_s)):
        if not v > 0:
            raise ValueError(f"{name} must be positive")
    prog = PlotterProgram(m.order, pitch_mm, z_lift_mm, dwell_s)
    cells = m.cells
    for i in range(m.order):
        cols = range(m.order) if i % 2 == 0 else range(m.order - 1, -1, -1)
        for j in cols:
            v = int(cells[i, j])
            if v == 0:
                continue
            prog.commands += [
                Move(j * pitch_mm, i * pitch_mm),
                SetPolarity("N" if v > 0 else "S"),
                LowerZ(),
                Energize(dwell_s),
                Off(),
                RaiseZ(),
            ]
    return prog


def _mm(v: float) -> str:
    return f"{v + 0.0:.3f}"


def _ms(seconds: float) -> str:
    return f"{seconds * 1000.0:.3f}".rstrip("0").rstrip(".")


def render_gcode(p: PlotterProgram) -> str:
    lines = [
        "; magnetic pixel plotter program",
        f"; order={p.order} pitch_mm={_mm(p.pitch_mm)} z_lift_mm={_mm(p.z_lift_mm)} dwell_s={p.dwell_s!r}",
        "; origin=top-left x=right y=down; polarity via ;POL side channel",
    ]
    if p.commands:
        lines += ["G21", "G90", "G92 X0 Y0 Z0"]
    for c in p.commands:
        if isinstance(c, Move):
            lines.append(f"G0 X{_mm(c.x_mm)} Y{_mm(c.y_mm)}")
        elif isinstance(c, SetPolarity):
            lines.append(f";POL {c.pole}")
        elif isinstance(c, LowerZ):
            lines.append(f"G0 Z{_mm(-p.z_lift_mm)}")
        elif isinstance(c, RaiseZ):
            lines.append(f"G0 Z{_mm(0.0)}")
        elif isinstance(c, Energize):
            lines.append(f"G4 P{_ms(c.dwell_s)}")
        elif isinstance(c, Off):
            lines.append(";POL OFF")
        else:
            raise TypeError(f"unknown command {c!r}")
    return "\n".join(lines) + "\n"


def parse_gcode(text: str) -> PlotterProgram:
    """Inverse of :func:`render_gcode`."""
    prog = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("; order="):
            fields = dict(tok.split("=", 1) for tok in line[1:].split())
            prog = PlotterProgram(int(fields["order"]), float(fields["pitch_mm"]),
                                  float(fields["z_lift_mm"]), float(fields["dwell_s"]))
            continue
        if line.startswith("; ") or line in ("G21", "G90", "G92 X0 Y0 Z0"):
            continue
        if prog is None:
            raise ValueError(f"line {lineno}: command before the program header")
        words = line.split()
        if line.startswith(";POL"):
            prog.commands.append(Off() if words[1] == "OFF" else SetPolarity(words[1]))
        elif words[0] == "G4":
            prog.commands.append(Energize(float(words[1][1:]) / 1000.0))
        elif words[0] == "G0" and words[1].startswith("Z"):
            z = float(words[1][1:])
            prog.commands.append(RaiseZ() if z == 0 else LowerZ())
        elif words[0] == "G0" and len(words) == 3:
            prog.commands.append(Move(float(words[1][1:]), float(words[2][1:])))
        else:
            raise ValueError(f"line {lineno}: unrecognised command {line!r}")
    if prog is None:
        raise ValueError("missing program header")
    return prog


def program_to_matrix(p: PlotterProgram) -> PixelMatrix:
    """Rebuild the encoding a program writes; unvisited cells are 0."""
    cells = np.zeros((p.order, p.order), dtype=np.int64)
    pos = None
    for c in p.commands:
        if isinstance(c, Move):
            pos = (round(c.y_mm / p.pitch_mm), round(c.x_mm / p.pitch_mm))
        elif isinstance(c, SetPolarity):
            cells[pos] = 1 if c.pole == "N" else -1
    return PixelMatrix(cells)


def write_gcode(p: PlotterProgram, path) -> Path:
    path = Path(path)
    path.write_text(render_gcode(p))
    return path


# -- read path ----------------------------------------------------------------

class AmbiguousPixelWarning(UserWarning):
    """Some scanned pixels fell inside the dead band and were read as 0."""


def classify_scan(scan, dead_band: float = DEAD_BAND) -> PixelMatrix:
    """Threshold normalized hall readings: > dead_band -> +1, < -dead_band -> -1, else 0.

    Cells inside the dead band are reported through AmbiguousPixelWarning.
    """
    s = np.asarray(scan, dtype=float)
    if not np.isfinite(s).all():
        raise ValueError("scan contains non-finite readings")
    out = np.where(s > dead_band, 1, np.where(s < -dead_band, -1, 0))
    ambiguous = int(np.count_nonzero(out == 0))
    if ambiguous:
        warnings.warn(f"{ambiguous} scanned pixel(s) inside the dead band +/-{dead_band}",
                      AmbiguousPixelWarning, stacklevel=2)
    return PixelMatrix(out)


def read_scan_csv(path) -> np.ndarray:
    """N lines of N comma-separated readings."""
    path = Path(path)
    rows = [line for line in path.read_text().splitlines() if line.strip()]
    grid = np.array([[float(v) for v in line.split(",")] for line in rows])
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
        raise ValueError(f"{path}: scan must be square, got shape {grid.shape}")
    return grid


def synthetic_scan(m: PixelMatrix, noise: float = 0.0, rng: np.random.Generator | None = None) -> np.ndarray:
    """Ideal readings (+/-1 per programmed pixel, 0 elsewhere) plus optional Gaussian noise."""
    s = m.cells.astype(float)
    if noise:
        rng = rng or np.random.default_rng(0)
        s = s + rng.normal(0.0, noise, size=s.shape) * (s != 0)
    return s

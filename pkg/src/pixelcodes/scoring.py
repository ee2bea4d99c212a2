"""Translation and rotation interaction scores.

Conventions
-----------
Offsets: ``(dx, dy)`` shifts ``b`` by ``dx`` columns and ``dy`` rows relative
to ``a``; the entry is ``sum a[i][j] * b[i + dy][j + dx]`` over the cells that
overlap, divided by N**2.

Rotations: positive angles are counter-clockwise with x pointing right and y
pointing up (rows are drawn top to bottom). A quarter turn is
``numpy.rot90(cells, 1)``.

All translation and cardinal-rotation scores are computed as exact integer
sums and divided once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError
from .matrix import PixelMatrix, _check_orders

#: Upsampling factor used for arbitrary-angle rotation.
FINE_FACTOR = 10
#: Angles reported by :func:`rotation_profile` by default.
DEFAULT_ANGLES = tuple(range(-180, 181, 10))


@dataclass(frozen=True)
class InteractionMap:
    """Interaction over all integer translations.

    ``sums[dy + N - 1, dx + N - 1]`` is the integer interaction at offset
    ``(dx, dy)``; offsets with no overlap are not stored.
    """

    order: int
    sums: np.ndarray

    @property
    def scores(self) -> np.ndarray:
        return self.sums / (self.order * self.order)

    @property
    def offsets(self) -> range:
        return range(-(self.order - 1), self.order)

    def sum_at(self, dx: int, dy: int) -> int:
        n = self.order - 1
        if abs(dx) > n or abs(dy) > n:
            return 0
        return int(self.sums[dy + n, dx + n])

    def at(self, dx: int, dy: int) -> float:
        return self.sum_at(dx, dy) / (self.order * self.order)

    def to_csv(self) -> str:
        lines = ["dx,dy,score"]
        for dy in self.offsets:
            for dx in self.offsets:
                lines.append(f"{dx},{dy},{_fmt(self.at(dx, dy))}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_csv())
        return path


@dataclass(frozen=True)
class RotationProfile:
    angles: tuple[float, ...]
    scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.angles) != len(self.scores):
            raise ValueError("angles and scores differ in length")
        if any(b <= a for a, b in zip(self.angles, self.angles[1:])):
            raise ValueError("angles must be strictly increasing")

    def to_csv(self) -> str:
        lines = ["angle_deg,score"]
        lines.extend(f"{_fmt_angle(a)},{_fmt(s)}" for a, s in zip(self.angles, self.scores))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_csv())
        return path


def _fmt(value: float) -> str:
    # + 0.0 folds -0.0 into 0.0
    return f"{value + 0.0:.9f}"


def _fmt_angle(angle: float) -> str:
    return str(int(angle)) if float(angle).is_integer() else repr(float(angle))


# -- single-pair operations -------------------------------------------------

def rotate90(m: PixelMatrix, k: int = 1) -> PixelMatrix:
    """Exact rotation by ``k`` quarter turns (counter-clockwise)."""
    return PixelMatrix(np.rot90(m.cells, k % 4))


def _correlation_sums(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    a = a.astype(np.int64)
    b = b.astype(np.int64)
    out = np.zeros(a.shape[:-2] + (2 * n - 1, 2 * n - 1), dtype=np.int64)
    for dy in range(-(n - 1), n):
        ra, rb = _span(n, dy)
        for dx in range(-(n - 1), n):
            ca, cb = _span(n, dx)
            out[..., dy + n - 1, dx + n - 1] = np.sum(a[..., ra, ca] * b[..., rb, cb], axis=(-2, -1))
    return out


def _span(n: int, d: int) -> tuple[slice, slice]:
    """Index ranges of ``a`` and of ``b`` that overlap when ``b`` is offset by ``d``."""
    lo, hi = max(0, -d), min(n, n - d)
    return slice(lo, hi), slice(lo + d, hi + d)


def cross_correlate(a: PixelMatrix, b: PixelMatrix) -> InteractionMap:
    """Normalized interaction of ``a`` with ``b`` at every integer translation."""
    _check_orders(a, b)
    return InteractionMap(a.order, _correlation_sums(a.cells, b.cells))


def rotation_sums_cardinal(a: PixelMatrix, b: PixelMatrix) -> tuple[int, int, int, int]:
    _check_orders(a, b)
    x = a.cells.astype(np.int64)
    return tuple(int(np.sum(x * np.rot90(b.cells, k))) for k in range(4))


def rotation_scores_cardinal(a: PixelMatrix, b: PixelMatrix) -> tuple[float, float, float, float]:
    """Centered scores of ``a`` against ``b`` turned by 0, 90, 180 and 270 degrees."""
    denom = a.order * a.order
    return tuple(s / denom for s in rotation_sums_cardinal(a, b))


def local_sum(a: PixelMatrix, rotated_translations: bool = True) -> int:
    """Integer form of :func:`local_score` (multiply by N**-2 to normalize)."""
    a.require_binary()
    return int(local_sums_batch(a.cells[None], rotated_translations)[0])


def local_score(a: PixelMatrix, rotated_translations: bool = True) -> float:
    """Most attractive interaction of ``a`` with its mate outside the mating configuration.

    The mating configuration is offset (0, 0) at 0 degrees. Every other
    translation at 0 degrees is scanned, plus the three non-trivial quarter
    turns. With ``rotated_translations`` (the default) every translation of
    each quarter-turned mate is scanned as well; with it off, quarter turns
    are scored only at the centered position. 0 is optimal.
    """
    return local_sum(a, rotated_translations) / (a.order * a.order)


def pair_sum(a: PixelMatrix, b: PixelMatrix) -> int:
    """Largest |interaction| of ``a`` with ``b`` over all translations of every quarter turn."""
    _check_orders(a, b)
    a.require_binary()
    b.require_binary()
    best = 0
    for k in range(4):
        sums = _correlation_sums(a.cells, np.rot90(b.cells, k))
        best = max(best, int(np.abs(sums).max()))
    return best


def pair_score(a: PixelMatrix, b: PixelMatrix) -> float:
    """Worst (most negative) interaction between two distinct encodings.

    Physically both faces carry either the code or its mate, so the four
    encounters {a, a'} x {b, b'} are all possible. Negating one side negates
    the score, so the minimum over encounters is ``-max |score(a, rot(b))|``
    over translations and quarter turns.
    """
    if a == b:
        raise ValueError("pair_score needs two distinct matrices (a vs itself is the mating pair)")
    return -pair_sum(a, b) / (a.order * a.order)


# -- arbitrary-angle rotation -------------------------------------------------

def _cos_sin(theta_deg: float) -> tuple[float, float]:
    t = float(theta_deg) % 360.0
    exact = {0.0: (1.0, 0.0), 90.0: (0.0, 1.0), 180.0: (-1.0, 0.0), 270.0: (0.0, -1.0)}
    if t in exact:
        return exact[t]
    r = math.radians(t)
    return math.cos(r), math.sin(r)


def rotate_fine(b: PixelMatrix, theta_deg: float, factor: int = FINE_FACTOR,
                smoothing: str = "fill") -> np.ndarray:
    """Rotate ``b`` on a grid upsampled by ``factor`` and return the float image.

    Each fine cell centre is moved about the grid centre by the 2-D rotation
    matrix and dropped into the fine cell containing it (nearest neighbour;
    collisions are averaged). Cells that receive nothing are 0.

    ``smoothing`` removes the resulting discretization artefacts:

    ``"fill"``
        holes inside the rotated footprint take the 3x3 mean of their filled
        neighbours; filled cells are left untouched, so quarter turns are exact.
    ``"box"``
        the whole image is replaced by its 3x3 box average with zero padding.
    ``"none"``
        no smoothing.
    """
    if smoothing not in ("fill", "box", "none"):
        raise ValueError(f"unknown smoothing {smoothing!r}")
    size = b.order * factor
    src = np.kron(b.cells.astype(np.float64), np.ones((factor, factor)))
    half = size / 2.0
    centres = np.arange(size) + 0.5 - half
    x = np.broadcast_to(centres[None, :], (size, size))
    y = np.broadcast_to(-centres[:, None], (size, size))
    c, s = _cos_sin(theta_deg)
    xr = x * c - y * s
    yr = x * s + y * c
    col = np.floor(xr + half).astype(np.int64)
    row = np.floor(half - yr).astype(np.int64)
    inside = (col >= 0) & (col < size) & (row >= 0) & (row < size)
    flat = row[inside] * size + col[inside]
    total = np.bincount(flat, weights=src[inside], minlength=size * size).reshape(size, size)
    count = np.bincount(flat, minlength=size * size).reshape(size, size)
    filled = count > 0
    image = np.where(filled, total / np.maximum(count, 1), 0.0)

    if smoothing == "box":
        return _box3(image) / 9.0
    if smoothing == "fill":
        # holes are fine cells whose centre maps back inside the source square
        xb = x * c + y * s
        yb = -x * s + y * c
        in_footprint = (np.abs(xb) < half) & (np.abs(yb) < half)
        holes = in_footprint & ~filled
        if holes.any():
            neigh_sum = _box3(image)
            neigh_cnt = _box3(filled.astype(np.float64))
            fill = np.divide(neigh_sum, neigh_cnt, out=np.zeros_like(image), where=neigh_cnt > 0)
            image = np.where(holes, fill, image)
    return image


def _box3(img: np.ndarray) -> np.ndarray:
    """3x3 neighbourhood sum with zero padding."""
    p = np.pad(img, 1)
    h, w = img.shape
    return sum(p[i:i + h, j:j + w] for i in range(3) for j in range(3))


def rotation_score_fine(a: PixelMatrix, b: PixelMatrix, theta: float,
                        factor: int = FINE_FACTOR, smoothing: str = "fill") -> float:
    """Centered interaction of ``a`` with ``b`` rotated by ``theta`` degrees.

    Both matrices are upsampled by ``factor``; the result is normalized by the
    fine cell count, so ``theta = 0`` reproduces :func:`normalized_score`.
    """
    _check_orders(a, b)
    a.require_binary()
    b.require_binary()
    fine_a = np.kron(a.cells.astype(np.float64), np.ones((factor, factor)))
    rotated = rotate_fine(b, theta, factor, smoothing)
    return float(np.sum(fine_a * rotated) / fine_a.size)


def rotation_profile(a: PixelMatrix, b: PixelMatrix, angles: Sequence[float] = DEFAULT_ANGLES,
                     factor: int = FINE_FACTOR, smoothing: str = "fill") -> RotationProfile:
    scores = tuple(rotation_score_fine(a, b, t, factor, smoothing) for t in angles)
    return RotationProfile(tuple(float(t) for t in angles), scores)


# -- batched kernels used by the search ---------------------------------------

def correlation_sums_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer translation sums for stacked pairs: ``a[i]`` against ``b[i]``.

    Returns an ``(n, 2N-1, 2N-1)`` array laid out like :attr:`InteractionMap.sums`.
    """
    if a.shape != b.shape:
        raise DimensionError(f"stack shapes differ: {a.shape} vs {b.shape}")
    return _correlation_sums(a, b)


def local_sums_batch(stack: np.ndarray, rotated_translations: bool = True) -> np.ndarray:
    """:func:`local_sum` for every matrix of an ``(n, N, N)`` stack."""
    a = stack.astype(np.int64)
    n = a.shape[-1]
    centre = n - 1
    best = np.full(a.shape[0], np.iinfo(np.int64).max, dtype=np.int64)
    for k in range(4):
        rotated_mate = -np.rot90(a, k, axes=(-2, -1))
        if k == 0 or rotated_translations:
            sums = _correlation_sums(a, rotated_mate).reshape(a.shape[0], -1)
            if k == 0:
                sums = np.delete(sums, centre * (2 * n - 1) + centre, axis=1)
            if sums.shape[1]:  # an order-1 matrix has no off-centre translations
                best = np.minimum(best, sums.min(axis=1))
        else:
            best = np.minimum(best, np.sum(a * rotated_mate, axis=(-2, -1)))
    return best


def _shifted(stack: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """``out[..., i, j] = stack[..., i + dy, j + dx]`` with zero fill."""
    n = stack.shape[-1]
    out = np.zeros_like(stack)
    ra, rb = _span(n, dy)
    ca, cb = _span(n, dx)
    out[..., ra, ca] = stack[..., rb, cb]
    return out


def pair_sum_matrix(stack: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """:func:`pair_sum` for all pairs of an ``(n, N, N)`` stack.

    Each (quarter turn, offset) configuration is one matrix product of the
    flattened stack against its shifted copy. Sums are bounded by N**2, so
    float32 products are exact for N <= 16 and are converted back to ints.
    The diagonal holds N**2 (a matrix against itself).
    """
    stack = np.asarray(stack)
    count, n = stack.shape[0], stack.shape[-1]
    dtype = np.float32 if n * n < (1 << 24) else np.float64
    flat = stack.reshape(count, n * n).astype(dtype)
    best = np.zeros((count, count), dtype=np.int32)
    offsets = range(-(n - 1), n)
    for k in range(4):
        turned = np.rot90(stack, k, axes=(-2, -1))
        for dy in offsets:
            for dx in offsets:
                shifted = _shifted(turned, dx, dy).reshape(count, n * n).astype(dtype)
                for lo in range(0, count, chunk):
                    block = np.abs(flat[lo:lo + chunk] @ shifted.T)
                    np.maximum(best[lo:lo + chunk], np.rint(block).astype(np.int32),
                               out=best[lo:lo + chunk])
    return best


def iter_offsets(order: int) -> Iterable[tuple[int, int]]:
    r = range(-(order - 1), order)
    return ((dx, dy) for dy in r for dx in r)


__all__ = [
    "InteractionMap",
    "RotationProfile",
    "cross_correlate",
    "local_score",
    "local_sum",
    "pair_score",
    "pair_sum",
    "pair_sum_matrix",
    "local_sums_batch",
    "rotate90",
    "rotate_fine",
    "rotation_profile",
    "rotation_score_fine",
    "rotation_scores_cardinal",
]

"""Binary pixel matrices: construction, enumeration and basic algebra.

Cells are trits in {-1, 0, +1}: +1 is a North pixel, -1 a South pixel and 0
an unprogrammed (or non-overlapping) cell.
"""

from __future__ import annotations

import itertools
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import CapacityError, DimensionError, GridFormatError, InvalidMatrixError

#: Largest Sylvester exponent accepted by :func:`sylvester` (order 2**MAX_SYLVESTER_EXPONENT).
MAX_SYLVESTER_EXPONENT = 10
#: Largest cell count for which :func:`enumerate_binary` will run.
MAX_ENUMERATION_CELLS = 25


class PixelMatrix:
    """Immutable square grid of trits.

    Equality and hashing are by value, so matrices can be used as dict keys
    and deduplicated with a set.
    """

    __slots__ = ("_cells",)

    def __init__(self, cells):
        arr = np.array(cells, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DimensionError(f"pixel matrix must be square and non-empty, got shape {arr.shape}")
        if not np.isin(arr, (-1, 0, 1)).all():
            raise InvalidMatrixError("cells must be -1, 0 or +1")
        arr = arr.astype(np.int8)
        arr.setflags(write=False)
        self._cells = arr

    @classmethod
    def zeros(cls, order: int) -> "PixelMatrix":
        return cls(np.zeros((order, order), dtype=np.int8))

    @property
    def order(self) -> int:
        return self._cells.shape[0]

    @property
    def cells(self) -> np.ndarray:
        """Read-only ``int8`` view of the cells."""
        return self._cells

    @property
    def binary(self) -> bool:
        """True when no cell is 0."""
        return bool((self._cells != 0).all())

    def require_binary(self) -> None:
        if not self.binary:
            raise InvalidMatrixError("matrix contains unprogrammed (0) cells where +/-1 is required")

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self._cells))

    def tolist(self) -> list[list[int]]:
        return self._cells.tolist()

    def key(self) -> bytes:
        return bytes([self.order]) + self._cells.tobytes()

    def __neg__(self) -> "PixelMatrix":
        return mate(self)

    def __eq__(self, other):
        if not isinstance(other, PixelMatrix):
            return NotImplemented
        return self._cells.shape == other._cells.shape and bool((self._cells == other._cells).all())

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        rows = "; ".join(" ".join(f"{v:+d}" if v else " 0" for v in row) for row in self.tolist())
        return f"PixelMatrix(order={self.order}, [{rows}])"


def _check_orders(a: PixelMatrix, b: PixelMatrix) -> None:
    if a.order != b.order:
        raise DimensionError(f"order mismatch: {a.order} vs {b.order}")


def elementwise_product(a: PixelMatrix, b: PixelMatrix) -> PixelMatrix:
    """Cell-wise (Hadamard) product of two equal-order matrices."""
    _check_orders(a, b)
    return PixelMatrix(a.cells.astype(np.int64) * b.cells)


def interaction_sum(a: PixelMatrix, b: PixelMatrix) -> int:
    """Integer sum of the cell-wise product: the un-normalized interaction."""
    _check_orders(a, b)
    return int(np.sum(a.cells.astype(np.int64) * b.cells))


def normalized_score(a: PixelMatrix, b: PixelMatrix) -> float:
    """Interaction sum divided by N**2.

    -1 is full attraction (a meets its mate), +1 full repulsion, 0 agnostic.
    The denominator is always the full cell count, even when ``a`` or ``b``
    contain zeros.
    """
    return interaction_sum(a, b) / (a.order * a.order)


def mate(a: PixelMatrix) -> PixelMatrix:
    """The maximally attractive partner: every cell negated."""
    return PixelMatrix(-a.cells.astype(np.int64))


def is_hadamard(a: PixelMatrix) -> bool:
    """True iff ``A @ A.T == N * I``.

    Raises InvalidMatrixError for matrices containing 0 cells.
    """
    a.require_binary()
    m = a.cells.astype(np.int64)
    return bool((m @ m.T == a.order * np.eye(a.order, dtype=np.int64)).all())


def sylvester(k: int, max_exponent: int = MAX_SYLVESTER_EXPONENT) -> PixelMatrix:
    """Normalized Hadamard matrix of order 2**k by block doubling from H_1 = [1]."""
    if k < 0:
        raise ValueError("exponent must be non-negative")
    if k > max_exponent:
        raise CapacityError(f"order 2**{k} exceeds the limit 2**{max_exponent}")
    h = np.ones((1, 1), dtype=np.int64)
    for _ in range(k):
        h = np.block([[h, h], [h, -h]])
    return PixelMatrix(h)


def enumerate_binary(order: int) -> Iterator[PixelMatrix]:
    """Yield every +/-1 matrix of the given order exactly once.

    Matrix number ``n`` (n = 0 .. 2**(order**2) - 1) takes cell ``(r, c)`` from
    bit ``r * order + c`` of ``n``: bit 0 gives -1, bit 1 gives +1.
    """
    for block in _binary_blocks(order):
        for cells in block:
            yield PixelMatrix(cells)


def enumerate_binary_array(order: int) -> np.ndarray:
    """All binary matrices of ``order`` as one ``(2**(order**2), order, order)`` int8 stack.

    Same ordering as :func:`enumerate_binary`.
    """
    return np.concatenate(list(_binary_blocks(order)))


def _binary_blocks(order: int, block_size: int = 1 << 14) -> Iterator[np.ndarray]:
    cells = order * order
    if order < 1:
        raise ValueError("order must be positive")
    if cells > MAX_ENUMERATION_CELLS:
        raise CapacityError(f"refusing to enumerate 2**{cells} matrices (limit 2**{MAX_ENUMERATION_CELLS})")
    total = 1 << cells
    weights = np.arange(cells, dtype=np.int64)
    for start in range(0, total, block_size):
        n = np.arange(start, min(total, start + block_size), dtype=np.int64)
        bits = (n[:, None] >> weights) & 1
        yield (2 * bits - 1).astype(np.int8).reshape(-1, order, order)


def row_permutations(h: PixelMatrix) -> Iterator[PixelMatrix]:
    """All N! row orderings of ``h`` in lexicographic permutation order (identity first)."""
    h.require_binary()
    for perm in itertools.permutations(range(h.order)):
        yield PixelMatrix(h.cells[list(perm)])


def unique_pool(matrices: Iterable[PixelMatrix], drop_mates: bool = True) -> list[tuple[int, PixelMatrix]]:
    """Deduplicate a pool, keeping first occurrences with their original indices.

    With ``drop_mates`` a matrix whose mate already appeared earlier is also dropped.
    """
    seen: set[bytes] = set()
    kept = []
    for idx, m in enumerate(matrices):
        k = m.key()
        if k in seen:
            continue
        if drop_mates and mate(m).key() in seen:
            continue
        seen.add(k)
        kept.append((idx, m))
    return kept


def stack(matrices: Iterable[PixelMatrix]) -> np.ndarray:
    """Stack equal-order matrices into an ``(n, N, N)`` int8 array."""
    arrays = [m.cells for m in matrices]
    if not arrays:
        raise ValueError("empty matrix list")
    if len({a.shape for a in arrays}) != 1:
        raise DimensionError("matrices in a stack must share one order")
    return np.stack(arrays)


# -- grid text format -------------------------------------------------------

def format_grid(m: PixelMatrix) -> str:
    lines = [f"order {m.order}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in m.cells)
    return "\n".join(lines) + "\n"


def parse_grid(text: str, source: str = "<grid>") -> PixelMatrix:
    """Parse the ``order N`` + N rows format. Any token outside {-1, 0, 1} is rejected."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise GridFormatError(f"{source}: empty grid file")
    head = lines[0].split(" ")
    if len(head) != 2 or head[0] != "order" or not head[1].isdigit() or int(head[1]) < 1:
        raise GridFormatError(f"{source}: first line must be 'order N', got {lines[0]!r}")
    n = int(head[1])
    if len(lines) != n + 1:
        raise GridFormatError(f"{source}: expected {n} rows, found {len(lines) - 1}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split(" ")
        if len(tokens) != n:
            raise GridFormatError(f"{source}:{lineno}: expected {n} tokens, found {len(tokens)}")
        try:
            rows.append([_TOKENS[t] for t in tokens])
        except KeyError as exc:
            raise GridFormatError(f"{source}:{lineno}: invalid token {exc.args[0]!r}") from None
    return PixelMatrix(rows)


_TOKENS = {"-1": -1, "0": 0, "1": 1}


def read_grid(path) -> PixelMatrix:
    path = Path(path)
    return parse_grid(path.read_text(), source=str(path))


def write_grid(m: PixelMatrix, path) -> Path:
    path = Path(path)
    path.write_text(format_grid(m))
    return path

"""Translation of binary encodings into DNA tile edge codes."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence


from .errors import CapacityError, DimensionError
from .matrix import PixelMatrix

ALPHABET = "ATGC"
MAX_EDGE_FEATURES = 10

#: Pair-of-cells -> base table. Bump the version whenever the table changes.
PAIR_TO_BASE = {(1, 1): "A", (1, -1): "T", (-1, 1): "C", (-1, -1): "G"}
BASE_TO_PAIR = {b: p for p, b in PAIR_TO_BASE.items()}
MAPPING_VERSION = "pair-v1"

_WATSON_CRICK = str.maketrans("ATGC", "TACG")

OVERHANG_SIDE = "overhang"
VACANCY_SIDE = "vacancy"
#: literal: overhang per 1, vacancy per 0. mating: vacancies at the 1s, so a code pairs with itself.
MATE_CONVENTIONS = ("literal", "mating")


def validate_sequence(s: str) -> str:
    bad = set(s) - set(ALPHABET)
    if bad:
        raise ValueError(f"invalid bases {sorted(bad)} in {s!r}")
    return s


def complement(s: str) -> str:
    """Reverse complement (A<->T, C<->G, read backwards)."""
    return validate_sequence(s).translate(_WATSON_CRICK)[::-1]


def binary_to_quaternary(row: Sequence[int]) -> str:
    if len(row) % 2:
        raise ValueError("need an even number of cells (two cells per base)")
    try:
        return "".join(PAIR_TO_BASE[(int(row[i]), int(row[i + 1]))] for i in range(0, len(row), 2))
    except KeyError:
        raise ValueError("cells must be +1 or -1") from None


def quaternary_to_binary(s: str) -> list[int]:
    out: list[int] = []
    for base in validate_sequence(s):
        out.extend(BASE_TO_PAIR[base])
    return out


@dataclass(frozen=True)
class Feature:
    kind: str        # "overhang", "vacancy" or "absent"
    sequence: str = ""

    def __post_init__(self):
        if self.kind not in ("overhang", "vacancy", "absent"):
            raise ValueError(f"unknown feature kind {self.kind!r}")
        if self.kind != "absent":
            if not self.sequence:
                raise ValueError(f"{self.kind} needs a non-empty sequence")
            validate_sequence(self.sequence)


ABSENT = Feature("absent")


@dataclass(frozen=True)
class EdgeCode:
    features: tuple[Feature, ...]
    side: str = ""

    def __post_init__(self):
        if len(self.features) > MAX_EDGE_FEATURES:
            raise CapacityError(f"an edge holds at most {MAX_EDGE_FEATURES} features")

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "features": [{"position": i, "kind": f.kind, "sequence": f.sequence or None}
                         for i, f in enumerate(self.features)],
        }


def edge_from_binary(code: Sequence[int], role: str, sequence_pool: Sequence[str],
                     convention: str = "literal", side: str = "") -> EdgeCode:
    """Lay a 0/1 code along a tile edge.

    Overhang side: position i carries ``overhang(pool[i])`` where ``code[i] == 1``.
    Vacancy side: position i carries ``vacancy(complement(pool[i]))`` where
    ``code[i] == 0`` (``literal``) or where ``code[i] == 1`` (``mating``).
    """
    if role not in (OVERHANG_SIDE, VACANCY_SIDE):
        raise ValueError(f"role must be {OVERHANG_SIDE!r} or {VACANCY_SIDE!r}")
    if convention not in MATE_CONVENTIONS:
        raise ValueError(f"convention must be one of {MATE_CONVENTIONS}")
    if len(code) > MAX_EDGE_FEATURES:
        raise CapacityError(f"code of length {len(code)} exceeds {MAX_EDGE_FEATURES} edge positions")
    if len(sequence_pool) < len(code):
        raise CapacityError(f"sequence pool has {len(sequence_pool)} entries, code needs {len(code)}")
    if any(bit not in (0, 1) for bit in code):
        raise ValueError("code must contain only 0 and 1")
    if len(set(sequence_pool[:len(code)])) != len(code):
        raise ValueError("pool sequences must be pairwise distinct")
    features = []
    for i, bit in enumerate(code):
        if role == OVERHANG_SIDE:
            features.append(Feature("overhang", sequence_pool[i]) if bit == 1 else ABSENT)
        else:
            wanted = 0 if convention == "literal" else 1
            features.append(Feature("vacancy", complement(sequence_pool[i])) if bit == wanted else ABSENT)
    return EdgeCode(tuple(features), side)


def binding_score(e1: EdgeCode, e2: EdgeCode) -> int:
    """Positions where an overhang meets a vacancy holding its reverse complement."""
    if len(e1.features) != len(e2.features):
        raise DimensionError(f"edges have {len(e1.features)} and {len(e2.features)} positions")
    score = 0
    for f, g in zip(e1.features, e2.features):
        if f.kind == "vacancy":
            f, g = g, f
        if f.kind == "overhang" and g.kind == "vacancy" and g.sequence == complement(f.sequence):
            score += 1
    return score


def matrix_codes(m: PixelMatrix, traversal: str = "rows") -> list[list[int]]:
    """Serialize a +/-1 matrix into 0/1 edge codes (+1 -> 1, -1 -> 0).

    ``rows``: one code per row. ``columns``: one code per column.
    ``row-major``: the whole matrix as a single code.
    """
    m.require_binary()
    bits = (m.cells > 0).astype(int)
    if traversal == "rows":
        return bits.tolist()
    if traversal == "columns":
        return bits.T.tolist()
    if traversal == "row-major":
        return [bits.reshape(-1).tolist()]
    raise ValueError(f"unknown traversal {traversal!r}")


def read_pool(path) -> list[str]:
    path = Path(path)
    seqs = [line.strip() for line in path.read_text().splitlines() if line.strip()]
    for lineno, s in enumerate(seqs, start=1):
        if s != s.upper():
            raise ValueError(f"{path}:{lineno}: sequences must be uppercase")
        validate_sequence(s)
    if len(set(seqs)) != len(seqs):
        raise ValueError(f"{path}: duplicate sequences in pool")
    return seqs


def design_edges(m: PixelMatrix, pool: Sequence[str], traversal: str = "rows",
                 convention: str = "literal") -> dict:
    """Quaternary strings and overhang/vacancy edge pairs for every code of ``m``."""
    codes = matrix_codes(m, traversal)
    signed = m.cells.tolist() if traversal == "rows" else (
        m.cells.T.tolist() if traversal == "columns" else [m.cells.reshape(-1).tolist()])
    edges = []
    for k, code in enumerate(codes):
        over = edge_from_binary(code, OVERHANG_SIDE, pool, convention, side=f"code{k}-overhang")
        vac = edge_from_binary(code, VACANCY_SIDE, pool, convention, side=f"code{k}-vacancy")
        edges.append({
            "code": code,
            "quaternary": binary_to_quaternary(signed[k]) if len(code) % 2 == 0 else None,
            "overhang_edge": over.to_dict(),
            "vacancy_edge": vac.to_dict(),
            "binding": binding_score(over, vac),
        })
    return {
        "mapping_version": MAPPING_VERSION,
        "pair_to_base": {f"{a:+d},{b:+d}": base for (a, b), base in PAIR_TO_BASE.items()},
        "traversal": traversal,
        "convention": convention,
        "codes": edges,
    }


def write_design(doc: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path

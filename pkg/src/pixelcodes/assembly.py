"""Assigning clique members to the mating faces of a target assembly."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .errors import CapacityError
from .matrix import PixelMatrix, mate
from .scoring import local_score, pair_score

FACE_LABELS = ("+X", "-X", "+Y", "-Y", "+Z", "-Z")

_AXES = {"X": (1, 0, 0), "Y": (0, 1, 0), "Z": (0, 0, 1)}

#: Right-handed in-plane frame (u, v) per face, with u x v = outward normal.
#: Matrix rows run along +u and columns along +v.
FACE_FRAMES = {
    "+X": ("+Y", "+Z"),
    "-X": ("+Z", "+Y"),
    "+Y": ("+Z", "+X"),
    "-Y": ("+X", "+Z"),
    "+Z": ("+X", "+Y"),
    "-Z": ("+Y", "+X"),
}


def face_normal(label: str) -> tuple[int, int, int]:
    sign = 1 if label[0] == "+" else -1
    return tuple(sign * c for c in _AXES[label[1]])


@dataclass(frozen=True)
class Mating:
    module_a: int
    face_a: str
    module_b: int
    face_b: str


@dataclass
class AssemblyTopology:
    positions: dict[int, tuple[int, int, int]]
    matings: list[Mating]

    def __post_init__(self):
        used = set()
        for m in self.matings:
            for key in ((m.module_a, m.face_a), (m.module_b, m.face_b)):
                if key[1] not in FACE_LABELS:
                    raise ValueError(f"unknown face label {key[1]!r}")
                if key in used:
                    raise ValueError(f"face {key} appears in two matings")
                used.add(key)
            pa, pb = self.positions[m.module_a], self.positions[m.module_b]
            na, nb = face_normal(m.face_a), face_normal(m.face_b)
            if tuple(b - a for a, b in zip(pa, pb)) != na or tuple(-c for c in na) != nb:
                raise ValueError(f"mating {m} is not between adjacent opposing faces")

    @property
    def modules(self) -> list[int]:
        return sorted(self.positions)

    def degree(self, module: int) -> int:
        return sum(module in (m.module_a, m.module_b) for m in self.matings)


def metacube_topology() -> AssemblyTopology:
    """Eight cubes on the corners of a 2x2x2 block joined by their 12 internal faces.

    Module ``x + 2y + 4z`` sits at ``(x, y, z)``. Matings are listed by axis
    (X, Y, Z), then by the lower module id.
    """
    positions = {x + 2 * y + 4 * z: (x, y, z) for z in (0, 1) for y in (0, 1) for x in (0, 1)}
    matings = []
    for axis, step in (("X", 1), ("Y", 2), ("Z", 4)):
        for low in sorted(positions):
            if positions[low]["XYZ".index(axis)] == 0:
                matings.append(Mating(low, "+" + axis, low + step, "-" + axis))
    return AssemblyTopology(positions, matings)


@dataclass(frozen=True)
class FaceEncoding:
    matrix: PixelMatrix
    member: int      # index into the clique list
    is_mate: bool


@dataclass
class FaceAssignment:
    topology: AssemblyTopology
    faces: dict[tuple[int, str], FaceEncoding] = field(default_factory=dict)
    members_used: list[int] = field(default_factory=list)

    def encoding(self, module: int, face: str) -> PixelMatrix | None:
        enc = self.faces.get((module, face))
        return None if enc is None else enc.matrix

    def programmed(self) -> list[tuple[int, str]]:
        return sorted(self.faces, key=_face_key)

    def blank(self) -> list[tuple[int, str]]:
        return [(m, f) for m in self.topology.modules for f in FACE_LABELS if (m, f) not in self.faces]


def _face_key(key: tuple[int, str]) -> tuple[int, int]:
    return key[0], FACE_LABELS.index(key[1])


def assign_encodings(topology: AssemblyTopology, clique: Sequence[PixelMatrix]) -> FaceAssignment:
    """Give mating ``k`` clique member ``k``: the member goes on the smaller
    ``(module, face)`` key and its mate on the partner face. Other faces stay blank.
    """
    if len(clique) < len(topology.matings):
        raise CapacityError(f"{len(topology.matings)} matings need {len(topology.matings)} encodings, "
                            f"clique has {len(clique)}")
    if len(set(clique)) != len(clique):
        raise ValueError("clique members must be pairwise distinct")
    out = FaceAssignment(topology)
    for k, m in enumerate(topology.matings):
        first, second = sorted([(m.module_a, m.face_a), (m.module_b, m.face_b)], key=_face_key)
        out.faces[first] = FaceEncoding(clique[k], k, False)
        out.faces[second] = FaceEncoding(mate(clique[k]), k, True)
        out.members_used.append(k)
    return out


@dataclass(frozen=True)
class FluidWindow:
    """Open interval of agitation force (in units of the mating force)."""

    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return self.hi <= self.lo


def fluid_window(assignment: FaceAssignment, rotated_translations: bool = True) -> FluidWindow:
    """Agitation must stay above -1 (keep true mates) and below min(S_L, S_G)."""
    members = [enc.matrix for enc in (assignment.faces.values()) if not enc.is_mate]
    hi = min(local_score(m, rotated_translations) for m in members)
    for a, b in itertools.combinations(members, 2):
        hi = min(hi, pair_score(a, b))
    return FluidWindow(-1.0, hi)


def assignment_to_dict(assignment: FaceAssignment, face_files: dict[tuple[int, str], str],
                       window: FluidWindow | None = None) -> dict:
    topo = assignment.topology
    doc = {
        "modules": [{"id": m, "position": list(topo.positions[m])} for m in topo.modules],
        "face_frames": {label: {"rows": u, "columns": v} for label, (u, v) in FACE_FRAMES.items()},
        "matings": [
            {"a": {"module": m.module_a, "face": m.face_a}, "b": {"module": m.module_b, "face": m.face_b}}
            for m in topo.matings
        ],
        "faces": [
            {"module": mod, "face": face,
             "grid": face_files.get((mod, face)) if (mod, face) in assignment.faces else None,
             "member": assignment.faces[(mod, face)].member if (mod, face) in assignment.faces else None,
             "is_mate": assignment.faces[(mod, face)].is_mate if (mod, face) in assignment.faces else None}
            for mod in topo.modules for face in FACE_LABELS
        ],
    }
    if window is not None:
        doc["window"] = {"lo": window.lo, "hi": window.hi, "empty": window.empty}
    return doc

"""Compatibility graphs over candidate encodings and maximal-clique search."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionError, ExhaustedSearchError
from .matrix import PixelMatrix, stack, unique_pool
from .scoring import local_sums_batch, pair_sum_matrix

log = logging.getLogger(__name__)

# scores live on a 1/N**2 grid; thresholds such as -0.36 are compared with this slack
_EPS = 1e-9


def admits(score_sum: int, denom: int, threshold: float) -> bool:
    """``score_sum / denom >= threshold`` evaluated without float round-off."""
    return score_sum >= math.ceil(threshold * denom - _EPS)


@dataclass
class ScoredPool:
    """Candidate encodings with their local sums and the all-pairs interaction table.

    ``ids[i]`` is the index of vertex ``i`` in the caller's original pool.
    ``pair_sums[i, j]`` is the largest |interaction| between vertices ``i``
    and ``j`` (see :func:`pixelcodes.scoring.pair_sum`).
    """

    ids: list[int]
    matrices: list[PixelMatrix]
    local_sums: np.ndarray
    pair_sums: np.ndarray
    order: int
    s_l_floor: float
    rotated_translations: bool = True
    dropped: int = 0

    @property
    def denom(self) -> int:
        return self.order * self.order

    def __len__(self):
        return len(self.ids)

    def local_score(self, v: int) -> float:
        return int(self.local_sums[v]) / self.denom

    def pair_score(self, u: int, v: int) -> float:
        return -int(self.pair_sums[u, v]) / self.denom


def score_pool(pool: Sequence[PixelMatrix], s_l_floor: float,
               rotated_translations: bool = True) -> ScoredPool:
    """Deduplicate ``pool``, drop exact mates and weak vertices, and tabulate pair scores.

    Vertices whose local score is below ``s_l_floor`` are removed before
    the (expensive) pair table is built.
    """
    if not pool:
        raise ValueError("empty pool")
    orders = {m.order for m in pool}
    if len(orders) != 1:
        raise DimensionError(f"pool mixes orders {sorted(orders)}")
    for m in pool:
        m.require_binary()
    order = orders.pop()
    kept = unique_pool(pool, drop_mates=True)
    dropped = len(pool) - len(kept)
    arr = stack(m for _, m in kept)
    local = local_sums_batch(arr, rotated_translations)
    denom = order * order
    keep = [i for i, s in enumerate(local) if admits(int(s), denom, s_l_floor)]
    log.info("pool: %d matrices, %d after dedup, %d pass S_L >= %g",
             len(pool), len(kept), len(keep), s_l_floor)
    arr = arr[keep]
    pairs = pair_sum_matrix(arr) if keep else np.zeros((0, 0), dtype=np.int32)
    return ScoredPool(
        ids=[kept[i][0] for i in keep],
        matrices=[kept[i][1] for i in keep],
        local_sums=local[keep],
        pair_sums=pairs,
        order=order,
        s_l_floor=s_l_floor,
        rotated_translations=rotated_translations,
        dropped=dropped,
    )


@dataclass
class CompatibilityGraph:
    """Undirected graph; vertex ``i`` stands for pool matrix ``ids[i]``.

    ``adjacency[i]`` is a bitmask over vertex positions.
    """

    ids: list[int]
    threshold: float
    adjacency: list[int]

    def __len__(self):
        return len(self.ids)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return _bits(self.adjacency[v])

    def edge_count(self) -> int:
        return sum(bin(m).count("1") for m in self.adjacency) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, mask in enumerate(self.adjacency):
            for v in _bits(mask >> (u + 1)):
                yield u, u + 1 + v

    @classmethod
    def from_edges(cls, n: int, edges, threshold: float = float("nan"), ids=None):
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError("self-loops are not allowed")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(list(range(n)) if ids is None else list(ids), threshold, adj)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def graph_at(scored: ScoredPool, threshold: float) -> CompatibilityGraph:
    """Edges join vertices whose pair score is at least ``threshold``."""
    n = len(scored)
    limit = -math.ceil(threshold * scored.denom - _EPS)  # largest admissible |interaction|
    ok = scored.pair_sums <= limit
    np.fill_diagonal(ok, False)
    weights = [1 << v for v in range(n)]
    adj = []
    for u in range(n):
        mask = 0
        for v in np.flatnonzero(ok[u]):
            mask |= weights[v]
        adj.append(mask)
    return CompatibilityGraph(list(scored.ids), threshold, adj)


def build_graph(pool: Sequence[PixelMatrix], threshold: float, s_l_floor: float,
                rotated_translations: bool = True) -> CompatibilityGraph:
    return graph_at(score_pool(pool, s_l_floor, rotated_translations), threshold)


def maximal_cliques(g: CompatibilityGraph) -> Iterator[list[int]]:
    """Every maximal clique of ``g`` once, as sorted vertex positions.

    Bron-Kerbosch with Tomita pivoting (pivot = vertex of P | X with most
    neighbours in P, lowest index on ties); candidates are expanded in
    increasing vertex order, so the output order is deterministic.
    """
    n = len(g)
    if n == 0:
        return
    adj = g.adjacency

    def expand(r: list[int], p: int, x: int):
        if not p:
            if not x:
                yield sorted(r)
            return
        best, pivot = -1, 0
        for u in _bits(p | x):
            c = bin(p & adj[u]).count("1")
            if c > best:
                best, pivot = c, u
        for v in _bits(p & ~adj[pivot]):
            bit = 1 << v
            r.append(v)
            yield from expand(r, p & adj[v], x & adj[v])
            r.pop()
            p &= ~bit
            x |= bit

    yield from expand([], (1 << n) - 1, 0)


def clique_census(g: CompatibilityGraph) -> dict[int, int]:
    """Number of maximal cliques of each size."""
    return dict(sorted(Counter(len(c) for c in maximal_cliques(g)).items()))


@dataclass
class SweepStep:
    threshold: float
    edges: int
    max_clique_size: int
    cliques_at_max: int
    census: dict[int, int]


@dataclass
class CliqueReport:
    threshold: float
    max_clique_size: int
    cliques_at_max: int
    census: dict[int, int]
    selected: list[int] | None = None
    selected_s_g: float | None = None
    selected_s_l: float | None = None
    s_l_floor: float | None = None
    vertices: int = 0
    empty_graph: bool = False
    history: list[SweepStep] = field(default_factory=list)

    @property
    def combined_score(self) -> float | None:
        """min(S_G, S_L) of the selected clique."""
        if self.selected_s_l is None:
            return None
        if self.selected_s_g is None:
            return self.selected_s_l
        return min(self.selected_s_g, self.selected_s_l)

    def to_dict(self, names: Sequence[str] | None = None) -> dict:
        sel = self.selected
        if sel is not None and names is not None:
            sel = [names[i] for i in sel]
        return {
            "threshold": round(self.threshold, 10),
            "s_l_floor": self.s_l_floor,
            "vertices": self.vertices,
            "empty_graph": self.empty_graph,
            "max_clique_size": self.max_clique_size,
            "cliques_at_max": self.cliques_at_max,
            "census": {str(k): v for k, v in self.census.items()},
            "selected": sel,
            "selected_s_g": self.selected_s_g,
            "selected_s_l": self.selected_s_l,
            "combined_score": self.combined_score,
            "history": [
                {"threshold": round(h.threshold, 10), "edges": h.edges,
                 "max_clique_size": h.max_clique_size, "cliques_at_max": h.cliques_at_max,
                 "census": {str(k): v for k, v in h.census.items()}}
                for h in self.history
            ],
        }


def _step(scored: ScoredPool, threshold: float) -> tuple[SweepStep, list[int] | None]:
    g = graph_at(scored, threshold)
    census: Counter = Counter()
    best: list[int] | None = None
    for c in maximal_cliques(g):
        census[len(c)] += 1
        if best is None or len(c) > len(best) or (len(c) == len(best) and c < best):
            best = c
    size = max(census) if census else 0
    step = SweepStep(threshold, g.edge_count(), size, census.get(size, 0), dict(sorted(census.items())))
    return step, best


def _selected_scores(scored: ScoredPool, members: list[int]) -> tuple[float | None, float]:
    s_l = min(scored.local_score(v) for v in members)
    if len(members) < 2:
        return None, s_l
    sub = scored.pair_sums[np.ix_(members, members)]
    worst = int(sub[~np.eye(len(members), dtype=bool)].max())
    return -worst / scored.denom, s_l


def threshold_sweep(pool: Sequence[PixelMatrix] | ScoredPool, seed: float = -0.2, step: float = 0.02,
                    target_size: int = 12, rotated_translations: bool = True) -> CliqueReport:
    """Lower the pair threshold from ``seed`` in ``step`` decrements until a clique of ``target_size`` appears.

    The local-score floor stays at ``seed`` for the whole sweep. The reported
    clique is the lexicographically smallest (by pool id) among the largest
    cliques at the stopping threshold.

    Raises ExhaustedSearchError if even threshold -1 gives no such clique.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if target_size < 1:
        raise ValueError("target_size must be at least 1")
    scored = pool if isinstance(pool, ScoredPool) else score_pool(pool, seed, rotated_translations)
    history: list[SweepStep] = []
    k = 0
    while True:
        t = round(seed - k * step, 10)
        if t < -1 - _EPS:
            break
        info, best = _step(scored, t)
        history.append(info)
        log.info("threshold %.2f: %d edges, max clique %d (x%d)", t, info.edges,
                 info.max_clique_size, info.cliques_at_max)
        if info.max_clique_size >= target_size:
            # vertex positions follow pool order, so sorting positions sorts ids
            selected = [scored.ids[v] for v in best]
            s_g, s_l = _selected_scores(scored, best)
            return CliqueReport(
                threshold=t, max_clique_size=info.max_clique_size, cliques_at_max=info.cliques_at_max,
                census=info.census, selected=selected, selected_s_g=s_g, selected_s_l=s_l,
                s_l_floor=seed, vertices=len(scored), empty_graph=len(scored) == 0, history=history,
            )
        k += 1
    last = history[-1] if history else SweepStep(seed, 0, 0, 0, {})
    best_report = CliqueReport(
        threshold=last.threshold, max_clique_size=last.max_clique_size, cliques_at_max=last.cliques_at_max,
        census=last.census, s_l_floor=seed, vertices=len(scored), empty_graph=len(scored) == 0,
        history=history,
    )
    raise ExhaustedSearchError(
        f"no clique of size {target_size} down to threshold {last.threshold} "
        f"(largest {last.max_clique_size}, {len(scored)} vertices)", best_report)

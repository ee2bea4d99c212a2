"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a PASS/FAIL line (shown in the terminal summary) before
asserting, so the block lists every criterion even when some fail.
"""

import itertools
import random
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from pixelcodes.assembly import assign_encodings, fluid_window, metacube_topology
from pixelcodes.cliques import graph_at, maximal_cliques, score_pool, threshold_sweep
from pixelcodes.dna import binary_to_quaternary, binding_score, complement, edge_from_binary, quaternary_to_binary
from pixelcodes.force import predict_force_map, pressure_pa
from pixelcodes.matrix import (
    PixelMatrix,
    enumerate_binary,
    interaction_sum,
    is_hadamard,
    mate,
    normalized_score,
    row_permutations,
    sylvester,
)
from pixelcodes.plotter import Energize, emit_program, parse_gcode, program_to_matrix, render_gcode
from pixelcodes.scoring import (
    cross_correlate,
    local_score,
    pair_score,
    rotation_profile,
    rotation_scores_cardinal,
)

from conftest import ACCEPTANCE_LINES
from oracles import brute_maximal_cliques, brute_pair_score

pytestmark = pytest.mark.acceptance

GOLDEN = Path(__file__).parent / "fixtures" / "single_north_pixel.gcode"


def record(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="session")
def pool8():
    return list(row_permutations(sylvester(3)))


@pytest.fixture(scope="session")
def sweep(pool8):
    t0 = time.perf_counter()
    report = threshold_sweep(pool8, seed=-0.2, step=0.02, target_size=12)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="session")
def clique(pool8, sweep):
    return [pool8[i] for i in sweep[0].selected]


def test_c01_order4_census():
    t0 = time.perf_counter()
    matrices = list(enumerate_binary(4))
    count = sum(1 for m in matrices if is_hadamard(m))
    elapsed = time.perf_counter() - t0
    ok = len(matrices) == 65536 and count == 768 and elapsed < 60
    record(1, ok, f"{count} Hadamard of {len(matrices)} order-4 matrices in {elapsed:.1f} s")


def test_c02_mate_algebra():
    rng = np.random.default_rng(2)
    bad = 0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        a = PixelMatrix(rng.choice((-1, 1), size=(n, n)))
        exact_mate = Fraction(interaction_sum(a, mate(a)), n * n)
        exact_self = Fraction(interaction_sum(a, a), n * n)
        if not (exact_mate == -1 and exact_self == 1
                and normalized_score(a, mate(a)) == -1.0 and normalized_score(a, a) == 1.0):
            bad += 1
    record(2, bad == 0, f"1000 random matrices (orders 2-8), {bad} violations")


def test_c03_pure_axis_agnosticism(pool8):
    sample = random.Random(3).sample(pool8, 600)
    bad = 0
    for a in sample:
        imap = cross_correlate(a, mate(a))
        for d in range(1, 8):
            if any(imap.sum_at(dx, dy) != 0 for dx, dy in ((d, 0), (-d, 0), (0, d), (0, -d))):
                bad += 1
                break
    record(3, bad == 0, f"{len(sample)} sampled order-8 permutations, {bad} with a nonzero pure-axis entry")


def test_c04_threshold_sweep(sweep):
    report, elapsed = sweep
    on_grid = abs((-0.2 - report.threshold) / 0.02 - round((-0.2 - report.threshold) / 0.02)) < 1e-9
    ok = on_grid and report.threshold == -0.36 and report.max_clique_size == 12 and elapsed <= 1800
    soft = "" if report.cliques_at_max == 4 else " (soft target 4 not met)"
    record(4, ok, f"stopped at {report.threshold:g} with max clique {report.max_clique_size}, "
                  f"{report.cliques_at_max} cliques of that size{soft}; "
                  f"{report.vertices} vertices after S_L floor; {elapsed:.0f} s")


def test_c05_local_bound(clique):
    worst_local = min(local_score(m) for m in clique)
    worst_card = min(min(rotation_scores_cardinal(m, mate(m))[1:]) for m in clique)
    worst_fine = 1.0
    for m in clique:
        prof = rotation_profile(m, mate(m))
        worst_fine = min(worst_fine, min(s for t, s in zip(prof.angles, prof.scores) if t != 0))
    ok = worst_local >= -0.25 and worst_card >= -0.25 and worst_fine >= -0.25 - 0.02
    record(5, ok, f"{len(clique)} members: worst S_L {worst_local:g}, worst cardinal turn {worst_card:g}, "
                  f"worst fine-rotation score {worst_fine:.4f} (bound -0.25, tolerance 0.02)")


def test_c06_global_bound(clique):
    scores = [pair_score(a, b) for a, b in itertools.combinations(clique, 2)]
    worst = min(scores)
    violations = sum(s < -0.36 for s in scores)
    record(6, worst >= -0.36, f"{len(scores)} pairs, worst pair score {worst:g}, {violations} below -0.36")


def test_c07_oracle_equivalence():
    had = [m for m in enumerate_binary(4) if is_hadamard(m)]
    scored = score_pool(had, -1.0)
    sub = score_pool(scored.matrices[:16], -1.0)
    graphs_ok = True
    for t in (-0.25, -0.5, -0.75):
        g = graph_at(sub, t)
        graphs_ok &= {frozenset(c) for c in maximal_cliques(g)} == brute_maximal_cliques(16, g.has_edge)
    rng = random.Random(7)
    pairs = [tuple(rng.sample(had, 2)) for _ in range(40)]
    pairs_ok = all(pair_score(a, b) == brute_pair_score(a, b) for a, b in pairs)
    record(7, graphs_ok and pairs_ok,
           f"16-vertex Bron-Kerbosch vs power set at 3 thresholds: {graphs_ok}; "
           f"40 order-4 pairs vs brute force: {pairs_ok}")


def test_c08_force_calibration(clique):
    a = clique[0]
    fmap = predict_force_map(a, mate(a), peak_attraction_newtons=1.09)
    centre = fmap.at(0, 0)
    p_peak = pressure_pa(abs(centre), 25.0)
    p_small = pressure_pa(0.160, 25.0)
    ok = (abs(centre + 1.09) < 1e-12
          and abs(p_peak - 1744.0) / 1744.0 <= 0.005
          and float(f"{p_small:.3g}") == 256.0)
    record(8, ok, f"centred {centre:g} N, {p_peak:.1f} Pa at 25 mm; 0.160 N -> {p_small:.3g} Pa")


def test_c09_plotter_round_trip():
    rng = np.random.default_rng(9)
    bad = 0
    for _ in range(200):
        n = int(rng.integers(1, 9))
        m = PixelMatrix(rng.choice((-1, 0, 1), size=(n, n)))
        prog = emit_program(m)
        back = parse_gcode(render_gcode(prog))
        dwell = sum(Fraction(str(c.dwell_s)) for c in back.commands if isinstance(c, Energize))
        if program_to_matrix(back) != m or dwell != Fraction(7, 10) * m.nonzero_count():
            bad += 1
    first = render_gcode(emit_program(PixelMatrix([[1]])))
    second = render_gcode(emit_program(PixelMatrix([[1]])))
    golden = first.encode() == second.encode() == GOLDEN.read_bytes()
    record(9, bad == 0 and golden, f"200 random matrices, {bad} round-trip or dwell failures; golden file identical: {golden}")


def test_c10_dna_properties():
    rng = random.Random(10)
    strings = ["".join(rng.choice("ATGC") for _ in range(rng.randint(0, 30))) for _ in range(10000)]
    involution = all(complement(complement(s)) == s for s in strings)
    pool = ["AAAC", "AAAG", "AACA", "AACC", "AACG", "AAGA", "AAGC", "AAGG", "AATA", "AATC"]
    over = edge_from_binary([1] * 10, "overhang", pool)
    vac = edge_from_binary([0] * 10, "vacancy", pool)
    ten = binding_score(over, vac)
    pairs = list(itertools.product((1, -1), repeat=2))
    bases = [binary_to_quaternary(list(p)) for p in pairs]
    bijective = len(set(bases)) == 4 and all(quaternary_to_binary(binary_to_quaternary(list(p))) == list(p)
                                             for p in pairs)
    record(10, involution and ten == 10 and bijective,
           f"involution on 10000 strings: {involution}; 10 overhangs vs 10 vacancies bind {ten}; "
           f"pair mapping bijective: {bijective}")


def test_c11_assembly_design(clique):
    topo = metacube_topology()
    degrees = {topo.degree(m) for m in topo.modules}
    assignment = assign_encodings(topo, clique[:12])
    window = fluid_window(assignment)
    ok = len(topo.matings) == 12 and degrees == {3} and window.hi == -0.36
    record(11, ok, f"{len(topo.matings)} matings, module degrees {sorted(degrees)}, "
                   f"fluid window upper bound {window.hi:g} (expected -0.36)")

import json

import pytest

from pixelcodes import cli
from pixelcodes.matrix import enumerate_binary, format_grid, is_hadamard, mate, parse_grid, sylvester, write_grid


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def h8(tmp_path):
    a = write_grid(sylvester(3), tmp_path / "h8.txt")
    b = write_grid(mate(sylvester(3)), tmp_path / "h8_mate.txt")
    return a, b


def _tree(d):
    return {p.relative_to(d).as_posix(): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def test_generate(tmp_path, capsys):
    assert run("generate", 0, "--out-dir", tmp_path / "k0", "--no-figures") == 0
    assert parse_grid((tmp_path / "k0" / "sylvester_1.txt").read_text()).tolist() == [[1]]
    assert run("generate", 2, "--permutations", "--out-dir", tmp_path / "k2") == 0
    assert "24 distinct" in capsys.readouterr().out
    files = list((tmp_path / "k2" / "pool").glob("*.txt"))
    assert len(files) == 24
    assert (tmp_path / "k2" / "sylvester_4.png").stat().st_size > 0
    manifest = json.loads((tmp_path / "k2" / "manifest.json").read_text())
    assert manifest["subcommand"] == "generate" and manifest["parameters"]["count"] == 24
    assert run("generate", 4, "--out-dir", tmp_path / "k4", "--no-figures") == 0
    assert parse_grid((tmp_path / "k4" / "sylvester_16.txt").read_text()) == sylvester(4)


def test_generate_capacity(tmp_path):
    assert run("generate", 11, "--out-dir", tmp_path / "big") == 2
    assert not (tmp_path / "big").exists()


def test_score(h8, tmp_path):
    a, b = h8
    out = tmp_path / "s"
    assert run("score", a, b, "--fine-rotation", "--out-dir", out) == 0
    lines = (out / "translation.csv").read_text().splitlines()
    assert "0,0,-1.000000000" in lines
    assert (out / "rotation.csv").read_text().count("\n") == 38
    summary = json.loads((out / "summary.json").read_text())
    assert summary["centered"] == -1.0 and summary["manifest"]["subcommand"] == "score"
    assert {"translation.png", "rotation.png"} <= set(_tree(out))
    assert run("score", a, a, "--out-dir", tmp_path / "self", "--no-figures") == 0
    assert "0,0,1.000000000" in (tmp_path / "self" / "translation.csv").read_text().splitlines()


def test_score_checkerboard_oscillates(tmp_path):
    c = write_grid(parse_grid("order 4\n1 -1 1 -1\n-1 1 -1 1\n1 -1 1 -1\n-1 1 -1 1\n"), tmp_path / "c.txt")
    m = write_grid(mate(parse_grid(c.read_text())), tmp_path / "cm.txt")
    assert run("score", c, m, "--out-dir", tmp_path / "o", "--no-figures") == 0
    rows = [r.split(",") for r in (tmp_path / "o" / "translation.csv").read_text().splitlines()[1:]]
    along_x = [float(s) for dx, dy, s in rows if dy == "0"]
    signs = [v > 0 for v in along_x]
    assert all(x != y for x, y in zip(signs, signs[1:]))


def test_score_dimension_mismatch(tmp_path, h8):
    small = write_grid(sylvester(1), tmp_path / "h2.txt")
    assert run("score", h8[0], small, "--out-dir", tmp_path / "bad") == 2
    assert not (tmp_path / "bad").exists()


def test_io_errors(tmp_path, h8):
    assert run("score", tmp_path / "missing.txt", h8[1], "--out-dir", tmp_path / "x") == 4
    assert run("search", "--pool-dir", tmp_path / "nowhere", "--out-dir", tmp_path / "x") == 4
    assert not (tmp_path / "x").exists()


def test_bad_grid_is_validation_error(tmp_path, h8):
    bad = tmp_path / "bad.txt"
    bad.write_text("order 2\n1 1\n1 3\n")
    assert run("gcode", bad, "--out-dir", tmp_path / "g") == 2


def test_search_order4(tmp_path):
    pool = tmp_path / "pool"
    pool.mkdir()
    for i, m in enumerate(m for m in enumerate_binary(4) if is_hadamard(m)):
        (pool / f"h{i:03d}.txt").write_text(format_grid(m))
    out = tmp_path / "out"
    code = run("search", "--pool-dir", pool, "--seed-threshold", -0.3125, "--step", 0.0625,
               "--target-size", 2, "--out-dir", out)
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["max_clique_size"] >= 2
    assert report["threshold"] == -0.375
    assert len(list((out / "clique").glob("*.txt"))) == report["max_clique_size"]
    assert all(name.startswith("h") for name in report["selected"])
    assert report["manifest"]["parameters"]["target_size"] == 2
    assert (out / "sweep.png").exists()


def test_search_target_one(tmp_path):
    out = tmp_path / "t1"
    assert run("search", "--sylvester-permutations", 2, "--seed-threshold", -0.5, "--target-size", 1,
               "--out-dir", out, "--no-figures") == 0
    assert json.loads((out / "report.json").read_text())["threshold"] == -0.5


def test_search_exhausted(tmp_path):
    out = tmp_path / "ex"
    assert run("search", "--sylvester-permutations", 2, "--target-size", 5, "--out-dir", out) == 3
    assert not out.exists()


def test_assemble(tmp_path):
    clique = tmp_path / "clique"
    clique.mkdir()
    from pixelcodes.matrix import row_permutations
    for i, m in enumerate(list(row_permutations(sylvester(2)))[:12]):
        write_grid(m, clique / f"m{i:02d}.txt")
    out = tmp_path / "asm"
    assert run("assemble", clique, "--out-dir", out, "--no-figures") == 0
    assert len(list((out / "gcode").glob("*.gcode"))) == 24
    assert len(list((out / "faces").glob("*.txt"))) == 24
    doc = json.loads((out / "assembly.json").read_text())
    assert len(doc["matings"]) == 12
    assert doc["window"]["lo"] == -1.0
    short = tmp_path / "short"
    short.mkdir()
    write_grid(sylvester(2), short / "a.txt")
    assert run("assemble", short, "--out-dir", tmp_path / "asm2") == 2


def test_gcode(tmp_path, h8):
    out = tmp_path / "g"
    assert run("gcode", h8[0], "--pitch-mm", 2.5, "--dwell-s", 0.5, "--out-dir", out) == 0
    text = (out / "h8.gcode").read_text()
    assert text.count("G4 P500") == 64
    assert "G0 X17.500 Y17.500" in text
    assert json.loads((out / "manifest.json").read_text())["parameters"]["total_dwell_s"] == 32.0


def test_nonpositive_flag_rejected(tmp_path, h8):
    with pytest.raises(SystemExit) as info:
        run("gcode", h8[0], "--pitch-mm", 0, "--out-dir", tmp_path)
    assert info.value.code == 2


def test_force(tmp_path, h8):
    out = tmp_path / "f"
    assert run("force", *h8, "--peak-newtons", 1.09, "--out-dir", out, "--no-figures") == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["centered_force_n"] == pytest.approx(-1.09)
    assert summary["centered_pressure_pa"] == pytest.approx(1744.0)
    assert json.loads((out / "force.json").read_text())["peak_attraction_n"] == 1.09
    out2 = tmp_path / "f2"
    assert run("force", *h8, "--measured", out / "force.csv", "--out-dir", out2, "--no-figures") == 0
    assert json.loads((out2 / "summary.json").read_text())["normalized_ssd"] == pytest.approx(0, abs=1e-15)


def test_dna(tmp_path, h8):
    pool = tmp_path / "pool.txt"
    pool.write_text("\n".join(["AAAC", "AAAG", "AACA", "AACC", "AACG", "AAGA", "AAGC", "AAGG"]) + "\n")
    out = tmp_path / "d"
    assert run("dna", h8[0], "--pool", pool, "--mate-convention", "mating", "--out-dir", out) == 0
    doc = json.loads((out / "h8_dna.json").read_text())
    assert doc["pool_involution_ok"] and doc["convention"] == "mating"
    assert doc["manifest"]["parameters"]["mate_convention"] == "mating"
    assert run("dna", h8[0], "--pool", tmp_path / "none.txt", "--out-dir", tmp_path / "d2") == 4


def test_scan(tmp_path, capsys):
    scan = tmp_path / "scan.csv"
    scan.write_text("0.9,-0.8\n0.05,0.7\n")
    out = tmp_path / "sc"
    assert run("scan", scan, "--out-dir", out) == 0
    assert parse_grid((out / "scan.txt").read_text()).tolist() == [[1, -1], [0, 1]]
    assert "dead band" in capsys.readouterr().err


def test_deterministic_outputs(tmp_path, h8):
    for name in ("r1", "r2"):
        assert run("score", *h8, "--fine-rotation", "--out-dir", tmp_path / "same") == 0
        (tmp_path / "same").rename(tmp_path / name)
    assert _tree(tmp_path / "r1") == _tree(tmp_path / "r2")

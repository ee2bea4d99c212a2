"""``pixelcodes`` command-line interface.

Every subcommand computes all of its outputs in memory first and only then
writes them, so a validation error leaves the output directory untouched.
Exit codes: 0 success, 2 invalid input, 3 exhausted clique search, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path
from typing import Callable

from . import __version__
from .assembly import assign_encodings, assignment_to_dict, fluid_window, metacube_topology
from .cliques import threshold_sweep
from .dna import complement, design_edges, read_pool
from .errors import ExhaustedSearchError
from .force import MeasurementGrid, normalized_ssd, predict_force_map, pressure_pa
from .matrix import PixelMatrix, format_grid, parse_grid, row_permutations, sylvester, unique_pool
from .plotter import AmbiguousPixelWarning, classify_scan, emit_program, read_scan_csv, render_gcode
from .scoring import cross_correlate, local_score, pair_score, rotation_profile

log = logging.getLogger("pixelcodes")

EXIT_OK, EXIT_INVALID, EXIT_EXHAUSTED, EXIT_IO = 0, 2, 3, 4


class InputFileError(Exception):
    """An input path could not be read; carries the offending path."""

    def __init__(self, path, cause):
        super().__init__(f"{path}: {cause}")
        self.path = path


class Outputs:
    """Files to write once every computation has succeeded."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.texts: dict[str, str] = {}
        self.figures: list[tuple[str, Callable[[Path], object]]] = []

    def text(self, name: str, content: str):
        self.texts[name] = content

    def json(self, name: str, doc: dict, manifest: dict):
        self.texts[name] = _dumps({**doc, "manifest": manifest})

    def figure(self, name: str, draw: Callable[[Path], object]):
        self.figures.append((name, draw))

    def commit(self, manifest: dict, figures: bool = True) -> list[Path]:
        names = sorted(self.texts) + (sorted(n for n, _ in self.figures) if figures else [])
        manifest["outputs"] = names + ["manifest.json"]
        self.out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name in sorted(self.texts):
            path = self.out_dir / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.texts[name])
            written.append(path)
        if figures:
            for name, draw in self.figures:
                written.append(Path(draw(self.out_dir / name)))
        (self.out_dir / "manifest.json").write_text(_dumps(manifest))
        return written


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _manifest(args, inputs: list[str], params: dict) -> dict:
    return {
        "tool": "pixelcodes",
        "version": __version__,
        "subcommand": args.command,
        "inputs": inputs,
        "out_dir": str(args.out_dir),
        "parameters": params,
    }


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputFileError(path, exc.strerror or exc) from exc


def _load_grid(path) -> PixelMatrix:
    return parse_grid(_read_text(path), str(path))


def _grid_files(directory) -> list[Path]:
    d = Path(directory)
    if not d.is_dir():
        raise InputFileError(directory, "not a directory")
    files = sorted(p for p in d.iterdir() if p.suffix == ".txt")
    if not files:
        raise InputFileError(directory, "no .txt grid files")
    return files


# -- subcommands ----------------------------------------------------------------

def cmd_generate(args) -> Outputs:
    h = sylvester(args.order_exponent)
    out = Outputs(args.out_dir)
    out.text(f"sylvester_{h.order}.txt", format_grid(h))
    count = 1
    if args.permutations:
        pool = unique_pool(row_permutations(h), drop_mates=True)
        width = len(str(len(pool) - 1))
        for idx, m in pool:
            out.text(f"pool/perm_{idx:0{width}d}.txt", format_grid(m))
        count = len(pool)
        print(f"{len(pool)} distinct row permutations of the order-{h.order} matrix")
    out.figure(f"sylvester_{h.order}.png", lambda p: _plots().plot_matrix(h, p, f"order {h.order}"))
    args.params = {"order_exponent": args.order_exponent, "permutations": args.permutations, "count": count}
    return out


def _sylvester_pool(k: int) -> tuple[list[str], list[PixelMatrix]]:
    perms = list(row_permutations(sylvester(k)))
    width = len(str(len(perms) - 1))
    return [f"perm_{i:0{width}d}" for i in range(len(perms))], perms


def cmd_search(args) -> Outputs:
    if args.pool_dir is not None:
        files = _grid_files(args.pool_dir)
        names = [p.stem for p in files]
        pool = [_load_grid(p) for p in files]
        args.inputs = [str(args.pool_dir)]
    else:
        names, pool = _sylvester_pool(args.sylvester_permutations)
    report = threshold_sweep(pool, seed=args.seed_threshold, step=args.step,
                             target_size=args.target_size,
                             rotated_translations=args.local_mode == "rotated")
    out = Outputs(args.out_dir)
    doc = report.to_dict(names)
    doc["pool_size"] = len(pool)
    doc["local_mode"] = args.local_mode
    args.params = {"seed_threshold": args.seed_threshold, "step": args.step,
                   "target_size": args.target_size, "local_mode": args.local_mode,
                   "sylvester_permutations": args.sylvester_permutations}
    out.json("report.json", doc, _manifest(args, args.inputs, args.params))
    for rank, idx in enumerate(report.selected or []):
        out.text(f"clique/member_{rank:02d}_{names[idx]}.txt", format_grid(pool[idx]))
    out.figure("sweep.png", lambda p: _plots().plot_sweep(report, p))
    print(f"threshold {report.threshold:g}: max clique {report.max_clique_size} "
          f"({report.cliques_at_max} at that size), S_G {report.selected_s_g}, S_L {report.selected_s_l}")
    return out


def cmd_score(args) -> Outputs:
    a, b = _load_grid(args.a), _load_grid(args.b)
    imap = cross_correlate(a, b)
    out = Outputs(args.out_dir)
    out.text("translation.csv", imap.to_csv())
    summary = {"centered": imap.at(0, 0)}
    if a != b:
        summary["pair_score"] = pair_score(a, b)
    if a.binary and b.binary and b == -a:
        summary["local_score"] = local_score(a, args.local_mode == "rotated")
    out.figure("translation.png", lambda p: _plots().plot_interaction_map(imap, p))
    if args.fine_rotation:
        prof = rotation_profile(a, b)
        out.text("rotation.csv", prof.to_csv())
        summary["rotation_min"] = min(prof.scores)
        out.figure("rotation.png", lambda p: _plots().plot_rotation_profile(prof, p))
    args.params = {"fine_rotation": args.fine_rotation, "local_mode": args.local_mode}
    out.json("summary.json", summary, _manifest(args, args.inputs, args.params))
    print(f"centered score {imap.at(0, 0):g}")
    return out


def cmd_assemble(args) -> Outputs:
    files = _grid_files(args.clique_dir)
    clique = [_load_grid(p) for p in files]
    topo = metacube_topology()
    assignment = assign_encodings(topo, clique)
    window = fluid_window(assignment, args.local_mode == "rotated")
    out = Outputs(args.out_dir)
    face_files = {}
    for (mod, face), enc in sorted(assignment.faces.items()):
        stem = f"module{mod}_{face.replace('+', 'p').replace('-', 'm')}"
        face_files[(mod, face)] = f"faces/{stem}.txt"
        out.text(f"faces/{stem}.txt", format_grid(enc.matrix))
        prog = emit_program(enc.matrix, args.pitch_mm, args.z_lift_mm, args.dwell_s)
        out.text(f"gcode/{stem}.gcode", render_gcode(prog))
    doc = assignment_to_dict(assignment, face_files, window)
    doc["members"] = [p.name for p in files[:len(assignment.members_used)]]
    args.params = {"pitch_mm": args.pitch_mm, "z_lift_mm": args.z_lift_mm, "dwell_s": args.dwell_s,
                   "local_mode": args.local_mode}
    out.json("assembly.json", doc, _manifest(args, args.inputs, args.params))
    print(f"{len(topo.matings)} matings, {len(assignment.faces)} programmed faces, "
          f"fluid window ({window.lo:g}, {window.hi:g})")
    return out


def cmd_gcode(args) -> Outputs:
    m = _load_grid(args.grid)
    prog = emit_program(m, args.pitch_mm, args.z_lift_mm, args.dwell_s)
    out = Outputs(args.out_dir)
    out.text(Path(args.grid).stem + ".gcode", render_gcode(prog))
    args.params = {"pitch_mm": args.pitch_mm, "z_lift_mm": args.z_lift_mm, "dwell_s": args.dwell_s,
                   "pixels": prog.pixel_count(), "total_dwell_s": prog.total_dwell_s}
    print(f"{prog.pixel_count()} pixels, {prog.total_dwell_s:g} s total dwell")
    return out


def cmd_force(args) -> Outputs:
    a, b = _load_grid(args.a), _load_grid(args.b)
    fmap = predict_force_map(a, b, args.peak_newtons, args.repulsion_scale)
    centered = fmap.at(0, 0)
    summary = {"centered_force_n": centered, "centered_pressure_pa": pressure_pa(abs(centered))}
    if args.measured is not None:
        measured = MeasurementGrid.from_csv(_read_text(args.measured), str(args.measured))
        summary["normalized_ssd"] = normalized_ssd(fmap, measured)
    args.params = {"peak_newtons": args.peak_newtons, "repulsion_scale": args.repulsion_scale}
    out = Outputs(args.out_dir)
    out.text("force.csv", fmap.to_csv())
    out.text("force.json", _dumps(fmap.metadata()))
    out.json("summary.json", summary, _manifest(args, args.inputs, args.params))
    out.figure("force.png", lambda p: _plots().plot_force_map(fmap, p))
    print(f"centered force {centered:g} N ({summary['centered_pressure_pa']:.1f} Pa)")
    return out


def cmd_dna(args) -> Outputs:
    m = _load_grid(args.grid)
    pool = _read_pool(args.pool)
    doc = design_edges(m, pool, args.traversal, args.mate_convention)
    doc["pool_involution_ok"] = all(complement(complement(s)) == s for s in pool)
    args.params = {"traversal": args.traversal, "mate_convention": args.mate_convention}
    out = Outputs(args.out_dir)
    out.json(Path(args.grid).stem + "_dna.json", doc, _manifest(args, args.inputs, args.params))
    print(f"{len(doc['codes'])} edge codes ({args.traversal}, {args.mate_convention})")
    return out


def _read_pool(path) -> list[str]:
    try:
        return read_pool(path)
    except OSError as exc:
        raise InputFileError(path, exc.strerror or exc) from exc


def cmd_scan(args) -> Outputs:
    try:
        scan = read_scan_csv(args.scan)
    except OSError as exc:
        raise InputFileError(args.scan, exc.strerror or exc) from exc
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AmbiguousPixelWarning)
        m = classify_scan(scan, args.dead_band)
    ambiguous = int((m.cells == 0).sum())
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out = Outputs(args.out_dir)
    out.text(Path(args.scan).stem + ".txt", format_grid(m))
    args.params = {"dead_band": args.dead_band, "ambiguous_pixels": ambiguous}
    print(f"classified {m.order}x{m.order} scan, {ambiguous} ambiguous")
    return out


def _plots():
    # imported lazily so that commands run without touching matplotlib when figures are off
    from . import plotting
    return plotting


# -- argument parsing -------------------------------------------------------------

def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pixelcodes", description="Design and check binary magnetic pixel encodings.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out-dir", type=Path, default=Path("."), help="output directory (default: .)")
        sp.add_argument("--no-figures", action="store_true", help="skip PNG figures")

    def local_mode(sp):
        sp.add_argument("--local-mode", choices=("rotated", "center"), default="rotated",
                        help="configurations for the local score: all translations of every quarter turn "
                             "(default) or the centered quarter turns only")

    def plotter_flags(sp):
        sp.add_argument("--pitch-mm", type=_positive, default=3.0)
        sp.add_argument("--z-lift-mm", type=_positive, default=3.0)
        sp.add_argument("--dwell-s", type=_positive, default=0.7)

    sp = sub.add_parser("generate", help="write the Sylvester matrix and optionally its row permutations")
    sp.add_argument("order_exponent", type=int, metavar="K", help="order is 2**K")
    sp.add_argument("--permutations", action="store_true", help="also write deduplicated row permutations")
    common(sp)

    sp = sub.add_parser("search", help="threshold sweep for a compatibility clique")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--pool-dir", type=Path, help="directory of grid .txt files")
    src.add_argument("--sylvester-permutations", type=int, metavar="K",
                     help="use all row permutations of the order-2**K Sylvester matrix")
    sp.add_argument("--seed-threshold", type=float, default=-0.2)
    sp.add_argument("--step", type=_positive, default=0.02)
    sp.add_argument("--target-size", type=int, default=12)
    local_mode(sp)
    common(sp)

    sp = sub.add_parser("score", help="translation map (and rotation profile) of two grids")
    sp.add_argument("a", type=Path)
    sp.add_argument("b", type=Path)
    sp.add_argument("--fine-rotation", action="store_true", help="also write the -180..180 rotation profile")
    local_mode(sp)
    common(sp)

    sp = sub.add_parser("assemble", help="assign a clique to the 2x2x2 meta cube and emit face programs")
    sp.add_argument("clique_dir", type=Path, help="directory of clique member grids (sorted by name)")
    plotter_flags(sp)
    local_mode(sp)
    common(sp)

    sp = sub.add_parser("gcode", help="plotter program for one grid")
    sp.add_argument("grid", type=Path)
    plotter_flags(sp)
    common(sp)

    sp = sub.add_parser("force", help="predicted force map between two faces")
    sp.add_argument("a", type=Path)
    sp.add_argument("b", type=Path)
    sp.add_argument("--peak-newtons", type=_positive, default=1.09)
    sp.add_argument("--repulsion-scale", type=_positive, default=0.09)
    sp.add_argument("--measured", type=Path, help="measured dx,dy,force_newtons CSV to compare against")
    common(sp)

    sp = sub.add_parser("dna", help="translate a grid into DNA tile edge codes")
    sp.add_argument("grid", type=Path)
    sp.add_argument("--pool", type=Path, required=True, help="sequence pool, one uppercase sequence per line")
    sp.add_argument("--traversal", choices=("rows", "columns", "row-major"), default="rows")
    sp.add_argument("--mate-convention", choices=("literal", "mating"), default="literal")
    common(sp)

    sp = sub.add_parser("scan", help="classify a hall-sensor scan CSV into a grid")
    sp.add_argument("scan", type=Path)
    sp.add_argument("--dead-band", type=float, default=0.1)
    common(sp)
    return p


COMMANDS = {
    "generate": cmd_generate, "search": cmd_search, "score": cmd_score, "assemble": cmd_assemble,
    "gcode": cmd_gcode, "force": cmd_force, "dna": cmd_dna, "scan": cmd_scan,
}

_INPUT_ATTRS = ("a", "b", "grid", "clique_dir", "scan", "pool", "measured")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.inputs = [str(getattr(args, k)) for k in _INPUT_ATTRS if getattr(args, k, None) is not None]
    args.params = {}
    try:
        out = COMMANDS[args.command](args)
        out.commit(_manifest(args, args.inputs, args.params), figures=not args.no_figures)
    except ExhaustedSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except InputFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""
fusewave subcommands.

Exit codes: 0 on success, 1 on runtime or I/O errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import statistics
import sys
import time
from pathlib import Path
from typing import Any, Dict, List

from ..core.dtcwt import forward, inverse
from ..core.image_model import pad_to_multiple
from ..core.metrics import MetricsReport
from ..core.mopso import SwarmMode
from ..core.phantoms import make_phantom_pair
from ..core.pipeline import FusionJob, SWARM_PRESETS, run_fusion
from ..io.images import load_image, save_image
from ..io.pyramid_codec import load_pyramid, save_pyramid
from ..io.reports import (
    REPORT_FORMATS,
    bench_row,
    format_bench_csv,
    format_report,
    format_result,
    write_archive_csv,
    write_text,
)
from .config import CliConfig, load_config_file, parse_weight_list, preset_values, resolve_workers

logger = logging.getLogger(__name__)

# CliConfig field -> (flag, type, help)
SWARM_FLAGS = (
    ("levels", "--levels", int, "decomposition depth L (default 3)"),
    ("n_particles", "--np", int, "particle count NP (default 100)"),
    ("max_generations", "--gmax", int, "generations Gmax (default 100)"),
    ("mutation_rate", "--pm", float, "mutation probability Pm (default 0.05)"),
    ("inertia", "--w", float, "inertia weight W (default 0.5)"),
    ("c1", "--c1", float, "cognitive learning factor (default 1)"),
    ("c2", "--c2", float, "social learning factor (default 1)"),
    ("archive_capacity", "--mem", int, "archive capacity MEM (default 100)"),
    ("seed", "--seed", int, "random seed (default 0)"),
)


def _add_swarm_flags(parser: argparse.ArgumentParser) -> None:
    for dest, flag, kind, text in SWARM_FLAGS:
        parser.add_argument(flag, dest=dest, type=kind, default=None, help=text)
    parser.add_argument("--inertia", dest="inertia_schedule", choices=("fixed", "linear"), default=None,
                        help="inertia schedule: fixed W or linear decay 0.9 -> 0.4")
    parser.add_argument("--preset", choices=sorted(SWARM_PRESETS), default=None,
                        help="named parameter set; 'desk' runs NP=20, Gmax=30")
    parser.add_argument("--config", default=None, help="JSON file of configuration values")
    parser.add_argument("--ssim-standard", dest="standard_ssim", action="store_true", default=None,
                        help="also report windowed SSIM")


def _resolve_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> CliConfig:
    try:
        file_values = load_config_file(getattr(args, "config", None))
    except ValueError as exc:
        parser.error(str(exc))
    explicit = {
        name: getattr(args, name)
        for name in CliConfig().to_dict()
        if getattr(args, name, None) is not None
    }
    if isinstance(explicit.get("weights"), str):
        try:
            explicit["weights"] = parse_weight_list(explicit["weights"])
        except ValueError as exc:
            parser.error(str(exc))
    explicit["verbosity"] = args.verbose
    config = CliConfig().merged(preset_values(args.preset)).merged(file_values).merged(explicit)
    try:
        config.validate()
    except ValueError as exc:
        parser.error(str(exc))
    return config


# ------------------------------------------------------------- fuse --------

def cmd_fuse(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _resolve_config(args, parser)
    source_a = load_image(args.a)
    source_b = load_image(args.b)
    job = FusionJob(
        source_a=source_a,
        source_b=source_b,
        levels=config.levels,
        swarm=config.swarm_config(),
        selection=config.parsed_selection(),
        weights=config.fusion_weights(),
        workers=resolve_workers(),
        standard_ssim=bool(config.standard_ssim),
    )
    result = run_fusion(job)
    save_image(result.fused, args.out)
    logger.info("Wrote fused image %s", args.out)
    if config.report:
        write_text(config.report, format_result(result, config.report_format))
    if config.dump_archive:
        write_archive_csv(result.archive_dump or [], config.dump_archive)
    return 0


# ---------------------------------------------------------- metrics --------

def cmd_metrics(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    reference = load_image(args.ref)
    test = load_image(args.test)
    report = MetricsReport.for_pair(reference, test, standard_ssim=args.standard_ssim)
    sys.stdout.write(format_report(report, args.format))
    return 0


# ------------------------------------------------- decompose/reconstruct ----

def cmd_decompose(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if not 1 <= args.levels <= 6:
        parser.error(f"--levels must be in [1, 6], got {args.levels}")
    image = load_image(args.input)
    padded, extent = pad_to_multiple(image, 1 << args.levels)
    save_pyramid(forward(padded, args.levels, source_extent=extent), args.out)
    logger.info("Wrote %d-level pyramid %s", args.levels, args.out)
    return 0


def cmd_reconstruct(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    save_image(inverse(load_pyramid(args.input)), args.out)
    logger.info("Wrote reconstruction %s", args.out)
    return 0


# ------------------------------------------------------------ bench --------

BENCH_MODES = (("apso", SwarmMode.APSO), ("pso", SwarmMode.PLAIN_PSO))


def cmd_bench(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.seeds < 1:
        parser.error(f"--seeds must be >= 1, got {args.seeds}")
    config = _resolve_config(args, parser)
    source_a = load_image(args.a)
    source_b = load_image(args.b)
    workers = resolve_workers()
    rows: List[Dict[str, Any]] = []
    for seed in range(args.seed_start, args.seed_start + args.seeds):
        for label, mode in BENCH_MODES:
            swarm = config.swarm_config().replace(seed=seed, mode=mode)
            job = FusionJob(source_a, source_b, levels=config.levels, swarm=swarm,
                            selection=config.parsed_selection(), workers=workers)
            started = time.perf_counter()
            result = run_fusion(job)
            wall_ms = (time.perf_counter() - started) * 1000.0
            rows.append(bench_row(seed, label, result.report, wall_ms))
            logger.info("seed %d %s: EN=%.4f RMSE=%.4f", seed, label, result.report.entropy, result.report.rmse)
    write_text(args.out, format_bench_csv(rows))
    for label, _ in BENCH_MODES:
        entropy = statistics.median(r["EN"] for r in rows if r["mode"] == label)
        error = statistics.median(r["RMSE"] for r in rows if r["mode"] == label)
        logger.info("median %s: EN=%.4f RMSE=%.4f", label, entropy, error)
    return 0


# ---------------------------------------------------------- phantom --------

def cmd_phantom(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.size < 16:
        parser.error(f"--size must be >= 16, got {args.size}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ct, mr = make_phantom_pair(args.size)
    save_image(ct, out_dir / f"ct_phantom.{args.format}")
    save_image(mr, out_dir / f"mr_phantom.{args.format}")
    logger.info("Wrote phantom pair to %s", out_dir)
    return 0


# ------------------------------------------------------------ parser --------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusewave",
        description="DTCWT image fusion with weights tuned by an adaptive multi-objective particle swarm.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (-v info, -vv debug)")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    fuse = sub.add_parser("fuse", help="fuse two registered grayscale images")
    fuse.add_argument("--a", required=True, help="first source image (PGM or PNG)")
    fuse.add_argument("--b", required=True, help="second source image (PGM or PNG)")
    fuse.add_argument("--out", required=True, help="fused image path (.pgm or .png)")
    _add_swarm_flags(fuse)
    fuse.add_argument("--mode", choices=("apso", "pso"), default=None, help="optimiser (default apso)")
    fuse.add_argument("--weights", default=None, help="fixed comma-separated weights; skips the optimiser")
    fuse.add_argument("--selection", default=None, help="compromise (default), max_entropy or an archive index")
    fuse.add_argument("--report", default=None, help="write the fusion report here")
    fuse.add_argument("--report-format", dest="report_format", choices=REPORT_FORMATS, default=None)
    fuse.add_argument("--dump-archive", dest="dump_archive", default=None, help="write the final archive as CSV")
    fuse.set_defaults(handler=cmd_fuse)

    metrics = sub.add_parser("metrics", help="score a test image against a reference")
    metrics.add_argument("--ref", required=True)
    metrics.add_argument("--test", required=True)
    metrics.add_argument("--format", choices=REPORT_FORMATS, default="text")
    metrics.add_argument("--ssim-standard", dest="standard_ssim", action="store_true")
    metrics.set_defaults(handler=cmd_metrics)

    decompose = sub.add_parser("decompose", help="write the DTCWT pyramid of an image")
    decompose.add_argument("--in", dest="input", required=True)
    decompose.add_argument("--out", required=True)
    decompose.add_argument("--levels", type=int, default=3)
    decompose.set_defaults(handler=cmd_decompose)

    reconstruct = sub.add_parser("reconstruct", help="invert a pyramid file back to an image")
    reconstruct.add_argument("--in", dest="input", required=True)
    reconstruct.add_argument("--out", required=True)
    reconstruct.set_defaults(handler=cmd_reconstruct)

    bench = sub.add_parser("bench", help="compare APSO and plain PSO over several seeds")
    bench.add_argument("--a", required=True)
    bench.add_argument("--b", required=True)
    bench.add_argument("--seeds", type=int, default=10)
    bench.add_argument("--seed-start", dest="seed_start", type=int, default=1)
    bench.add_argument("--out", required=True, help="CSV results path")
    _add_swarm_flags(bench)
    bench.add_argument("--selection", default=None)
    bench.set_defaults(handler=cmd_bench)

    phantom = sub.add_parser("phantom", help="write the synthetic CT/MR phantom pair")
    phantom.add_argument("--out-dir", dest="out_dir", required=True)
    phantom.add_argument("--size", type=int, default=256)
    phantom.add_argument("--format", choices=("pgm", "png"), default="pgm")
    phantom.set_defaults(handler=cmd_phantom)
    return parser

"""
End-to-end fusion of two registered grayscale images.

Both sources are padded to a multiple of 2^levels and decomposed once. Every
fitness evaluation then only fuses the cached pyramids, inverts the result,
crops it to the original extent and scores it.
"""

from __future__ import annotations

import logging
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from .dtcwt import MAX_LEVELS, Pyramid, forward, inverse
from .fusion import FusionError, FusionWeights, fuse_pyramids, weight_count, weights_from_vector
from .image_model import Image, pad_to_multiple
from .metrics import MetricsReport, fitness_vector
from .mopso import (
    ArchiveEmptyError,
    ArchiveMember,
    GenerationRecord,
    ParetoArchive,
    ProgressCallback,
    Swarm,
    SwarmConfig,
)

logger = logging.getLogger(__name__)

Selection = Union[str, int]

DEFAULT_LEVELS = 3
FITNESS_OBJECTIVES = 6
SELECTION_RULES = ("compromise", "max_entropy")

SWARM_PRESETS: Dict[str, Dict[str, Any]] = {
    "reference": {
        "n_particles": 100,
        "n_objectives": FITNESS_OBJECTIVES,
        "inertia": 0.5,
        "c1": 1.0,
        "c2": 1.0,
        "max_generations": 100,
        "archive_capacity": 100,
        "mutation_rate": 0.05,
    },
    "desk": {
        "n_particles": 20,
        "max_generations": 30,
    },
}


def preset_config(name: str, base: Optional[SwarmConfig] = None) -> SwarmConfig:
    if name not in SWARM_PRESETS:
        raise ValueError(f"Unknown preset {name}")
    return (base or SwarmConfig()).replace(**SWARM_PRESETS[name])


def parse_selection(value: Selection) -> Selection:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        if value < 0:
            raise ValueError(f"Archive index must be >= 0, got {value}")
        return int(value)
    text = str(value).strip()
    if text in SELECTION_RULES:
        return text
    if text.isdigit():
        return int(text)
    raise ValueError(f"Unknown selection rule {value!r}; use compromise, max_entropy or an index")


@dataclass
class FusionJob:
    source_a: Image
    source_b: Image
    levels: int = DEFAULT_LEVELS
    swarm: SwarmConfig = field(default_factory=SwarmConfig)
    selection: Selection = "compromise"
    weights: Optional[FusionWeights] = None
    workers: int = 1
    standard_ssim: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.levels <= MAX_LEVELS:
            raise ValueError(f"levels must be in [1, {MAX_LEVELS}], got {self.levels}")
        if self.swarm.n_objectives != FITNESS_OBJECTIVES:
            raise ValueError(f"Fusion optimises {FITNESS_OBJECTIVES} objectives, got {self.swarm.n_objectives}")
        self.selection = parse_selection(self.selection)
        self.workers = max(1, int(self.workers))

    @property
    def dimensions(self) -> int:
        return weight_count(self.levels)


@dataclass
class FusionResult:
    fused: Image
    weights: FusionWeights
    report: MetricsReport
    archive_size: int
    archive_dump: Optional[List[Tuple[np.ndarray, np.ndarray]]] = None
    selected_index: Optional[int] = None
    evaluations: int = 0
    invalid_evaluations: int = 0
    history: List[GenerationRecord] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metrics": self.report.to_dict(),
            "weights": self.weights.to_dict(),
            "archive_size": int(self.archive_size),
            "selected_index": self.selected_index,
            "evaluations": int(self.evaluations),
            "invalid_evaluations": int(self.invalid_evaluations),
        }


class FusionObjective:
    """Six-objective fitness of a weight vector over cached source pyramids."""

    def __init__(self, source_a: Image, source_b: Image, levels: int) -> None:
        if source_a.extent != source_b.extent:
            raise FusionError(
                f"Source dimensions differ: {source_a.width}x{source_a.height} vs "
                f"{source_b.width}x{source_b.height}"
            )
        self.source_a = source_a
        self.source_b = source_b
        self.levels = levels
        factor = 1 << levels
        padded_a, extent = pad_to_multiple(source_a, factor)
        padded_b, _ = pad_to_multiple(source_b, factor)
        self.pyramid_a: Pyramid = forward(padded_a, levels, source_extent=extent)
        self.pyramid_b: Pyramid = forward(padded_b, levels, source_extent=extent)

    def fuse(self, weights: FusionWeights) -> Image:
        return inverse(fuse_pyramids(self.pyramid_a, self.pyramid_b, weights))

    def __call__(self, position: np.ndarray) -> np.ndarray:
        fused = self.fuse(weights_from_vector(position, self.levels))
        return fitness_vector(fused, self.source_a, self.source_b)


def compromise_index(fitness: np.ndarray) -> int:
    values = np.asarray(fitness, dtype=np.float64)
    low = values.min(axis=0)
    span = values.max(axis=0) - low
    safe = np.where(span > 0.0, span, 1.0)
    normalised = np.where(span > 0.0, (values - low) / safe, 0.0)
    return int(np.argmin(normalised.sum(axis=1)))


def select_compromise(archive: ParetoArchive) -> ArchiveMember:
    """Member with the smallest sum of min-max normalised objectives; ties go to the lowest index."""
    if not archive.members:
        raise ArchiveEmptyError("Cannot select a compromise from an empty archive")
    return archive.members[compromise_index(archive.fitness_matrix())]


def select_index(archive: ParetoArchive, selection: Selection) -> int:
    if not archive.members:
        raise ArchiveEmptyError("The optimiser archive is empty; every evaluation was non-finite")
    rule = parse_selection(selection)
    if rule == "compromise":
        return compromise_index(archive.fitness_matrix())
    if rule == "max_entropy":
        return int(np.argmin(archive.fitness_matrix()[:, 0]))
    if rule >= len(archive):
        raise ValueError(f"Archive index {rule} out of range for {len(archive)} members")
    return int(rule)


def run_fusion(
    job: FusionJob,
    *,
    executor: Optional[Executor] = None,
    progress: Optional[ProgressCallback] = None,
) -> FusionResult:
    a, b = job.source_a, job.source_b
    for name, source in (("a", a), ("b", b)):
        if source.is_constant():
            logger.warning("Source %s is constant; its entropy objective is flat", name)
    objective = FusionObjective(a, b, job.levels)
    logger.info("Fusing %dx%d sources with %d levels", a.width, a.height, job.levels)

    if job.weights is not None:
        if job.weights.levels != job.levels:
            raise FusionError(
                f"Fixed weights cover {job.weights.levels} levels but the job uses {job.levels}"
            )
        fused = objective.fuse(job.weights)
        return FusionResult(
            fused=fused,
            weights=job.weights,
            report=MetricsReport.for_fusion(fused, a, b, standard_ssim=job.standard_ssim),
            archive_size=0,
        )

    if executor is None and job.workers > 1:
        with ThreadPoolExecutor(max_workers=job.workers) as pool:
            swarm = Swarm(objective, job.swarm, job.dimensions, executor=pool, progress=progress)
            archive = swarm.run()
    else:
        swarm = Swarm(objective, job.swarm, job.dimensions, executor=executor, progress=progress)
        archive = swarm.run()

    index = select_index(archive, job.selection)
    weights = weights_from_vector(archive[index].position, job.levels)
    fused = objective.fuse(weights)
    logger.info(
        "Selected archive member %d of %d after %d evaluations", index, len(archive), swarm.evaluations
    )
    return FusionResult(
        fused=fused,
        weights=weights,
        report=MetricsReport.for_fusion(fused, a, b, standard_ssim=job.standard_ssim),
        archive_size=len(archive),
        archive_dump=[(m.position.copy(), m.fitness.copy()) for m in archive],
        selected_index=index,
        evaluations=swarm.evaluations,
        invalid_evaluations=swarm.invalid_evaluations,
        history=list(swarm.history),
    )

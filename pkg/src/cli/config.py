"""
Command-line configuration.

Values are layered from lowest to highest precedence:

1. the built-in defaults;
2. a ``--preset``;
3. a JSON ``--config`` file whose keys are ``CliConfig`` field names;
4. explicit flags.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from ..core.fusion import FusionWeights, weights_from_vector
from ..core.mopso import SwarmConfig
from ..core.pipeline import DEFAULT_LEVELS, SWARM_PRESETS, Selection, parse_selection

logger = logging.getLogger(__name__)

THREADS_ENV = "FUSEWAVE_THREADS"


@dataclass
class CliConfig:
    levels: int = DEFAULT_LEVELS
    n_particles: int = 100
    max_generations: int = 100
    mutation_rate: float = 0.05
    inertia: float = 0.5
    c1: float = 1.0
    c2: float = 1.0
    archive_capacity: int = 100
    seed: int = 0
    mode: str = "apso"
    inertia_schedule: str = "fixed"
    selection: str = "compromise"
    # A flat vector, or the {"lowpass_weight", "highpass_weights"} object of a fuse report.
    weights: Optional[Union[List[float], Dict[str, Any]]] = None
    report: Optional[str] = None
    report_format: str = "json"
    dump_archive: Optional[str] = None
    standard_ssim: bool = False
    verbosity: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "CliConfig":
        known = {f.name for f in fields(CliConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"Unknown configuration keys: {', '.join(unknown)}")
        return CliConfig().merged(data)

    def merged(self, overrides: Mapping[str, Any]) -> "CliConfig":
        values = self.to_dict()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return CliConfig(**values)

    def swarm_config(self) -> SwarmConfig:
        return SwarmConfig(
            n_particles=int(self.n_particles),
            inertia=float(self.inertia),
            c1=float(self.c1),
            c2=float(self.c2),
            max_generations=int(self.max_generations),
            archive_capacity=int(self.archive_capacity),
            mutation_rate=float(self.mutation_rate),
            seed=int(self.seed),
            mode=self.mode,
            inertia_schedule=self.inertia_schedule,
        )

    def fusion_weights(self) -> Optional[FusionWeights]:
        if self.weights is None:
            return None
        if isinstance(self.weights, Mapping):
            try:
                weights = FusionWeights.from_dict(self.weights)
            except (KeyError, TypeError) as exc:
                raise ValueError(f"weights object needs lowpass_weight and highpass_weights: {exc}") from exc
            if weights.levels != int(self.levels):
                raise ValueError(f"weights cover {weights.levels} levels but --levels is {self.levels}")
            return weights
        return weights_from_vector(self.weights, int(self.levels))

    def parsed_selection(self) -> Selection:
        return parse_selection(self.selection)

    def validate(self) -> None:
        """Raise ValueError when a value breaks a swarm, fusion or report invariant."""
        if not 1 <= int(self.levels) <= 6:
            raise ValueError(f"--levels must be in [1, 6], got {self.levels}")
        self.swarm_config()
        self.fusion_weights()
        self.parsed_selection()
        if self.report_format not in ("json", "csv", "text"):
            raise ValueError(f"Unknown report format {self.report_format}")


def preset_values(name: Optional[str]) -> Dict[str, Any]:
    if name is None:
        return {}
    if name not in SWARM_PRESETS:
        raise ValueError(f"Unknown preset {name}")
    values = dict(SWARM_PRESETS[name])
    values.pop("n_objectives", None)
    return values


def load_config_file(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path} must hold a JSON object")
    CliConfig.from_dict(data)
    return data


def parse_weight_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValueError(f"--weights expects comma-separated numbers, got {text!r}") from exc


def resolve_workers(environ: Optional[Mapping[str, str]] = None) -> int:
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return max(1, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        logger.warning("%s=%r is not an integer; using 1 worker", THREADS_ENV, raw)
        return 1
    if value < 1:
        logger.warning("%s=%d is below 1; using 1 worker", THREADS_ENV, value)
        return 1
    return value

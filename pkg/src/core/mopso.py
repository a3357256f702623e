"""
Adaptive multi-objective particle swarm optimiser.

All objectives are minimised over the unit box [0, 1]^d. The swarm keeps a
bounded Pareto archive and picks one leader per generation, the archive
member with the largest crowding distance. Particles that leave the box are
reflected, and mutation shrinks as the run proceeds.

Random numbers come from ``numpy.random.default_rng(seed)`` (PCG64). Each run
draws in a fixed order:

1. the initial positions, as an (n_particles, d) block;
2. then for every generation:
   - one integer to break leader ties (APSO mode only);
   - then for each particle in index order: ``rand1`` (d values), ``rand2``
     (d values), the mutation trigger, the mutation dimension, the mutation
     value and the pbest coin.

Every draw happens on the calling thread before objectives are dispatched.
Results are therefore identical with or without an executor.
"""

from __future__ import annotations

import logging
from concurrent.futures import Executor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], Sequence[float]]
ProgressCallback = Callable[[int, int, int], None]


class ArchiveEmptyError(LookupError):
    pass


class SwarmMode(str, Enum):
    APSO = "apso"
    PLAIN_PSO = "plain_pso"

    @classmethod
    def _missing_(cls, value: object) -> Optional["SwarmMode"]:
        if value == "pso":
            return cls.PLAIN_PSO
        return None


class InertiaSchedule(str, Enum):
    FIXED = "fixed"
    LINEAR = "linear"


@dataclass(frozen=True)
class SwarmConfig:
    """Swarm parameters.

    ``n_particles`` (NP), ``n_objectives`` (NF), ``inertia`` (W), ``c1``/``c2``,
    ``max_generations`` (Gmax), ``archive_capacity`` (MEM), ``mutation_rate``
    (Pm).
    """

    n_particles: int = 100
    n_objectives: int = 6
    inertia: float = 0.5
    c1: float = 1.0
    c2: float = 1.0
    max_generations: int = 100
    archive_capacity: int = 100
    mutation_rate: float = 0.05
    seed: int = 0
    mode: SwarmMode = SwarmMode.APSO
    inertia_schedule: InertiaSchedule = InertiaSchedule.FIXED

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", SwarmMode(self.mode))
        object.__setattr__(self, "inertia_schedule", InertiaSchedule(self.inertia_schedule))
        if self.n_particles < 2:
            raise ValueError(f"n_particles must be >= 2, got {self.n_particles}")
        if self.n_objectives < 1:
            raise ValueError(f"n_objectives must be >= 1, got {self.n_objectives}")
        if self.max_generations < 1:
            raise ValueError(f"max_generations must be >= 1, got {self.max_generations}")
        if self.archive_capacity < 1:
            raise ValueError(f"archive_capacity must be >= 1, got {self.archive_capacity}")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation_rate must lie in [0, 1], got {self.mutation_rate}")
        if not self.inertia > 0.0:
            raise ValueError(f"inertia must be positive, got {self.inertia}")
        if self.c1 < 0.0 or self.c2 < 0.0:
            raise ValueError("learning factors must be non-negative")

    def replace(self, **changes: Any) -> "SwarmConfig":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["mode"] = self.mode.value
        data["inertia_schedule"] = self.inertia_schedule.value
        return data

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "SwarmConfig":
        defaults = SwarmConfig()
        return SwarmConfig(
            n_particles=int(data.get("n_particles", defaults.n_particles)),
            n_objectives=int(data.get("n_objectives", defaults.n_objectives)),
            inertia=float(data.get("inertia", defaults.inertia)),
            c1=float(data.get("c1", defaults.c1)),
            c2=float(data.get("c2", defaults.c2)),
            max_generations=int(data.get("max_generations", defaults.max_generations)),
            archive_capacity=int(data.get("archive_capacity", defaults.archive_capacity)),
            mutation_rate=float(data.get("mutation_rate", defaults.mutation_rate)),
            seed=int(data.get("seed", defaults.seed)),
            mode=SwarmMode(data.get("mode", defaults.mode)),
            inertia_schedule=InertiaSchedule(data.get("inertia_schedule", defaults.inertia_schedule)),
        )


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_fitness: np.ndarray
    fitness: np.ndarray
    pbest_trail: List[np.ndarray] = field(default_factory=list)

    @staticmethod
    def spawn(position: np.ndarray, n_objectives: int) -> "Particle":
        position = np.asarray(position, dtype=np.float64).copy()
        unknown = np.full(n_objectives, np.inf)
        return Particle(
            position=position,
            velocity=np.zeros_like(position),
            pbest_position=position.copy(),
            pbest_fitness=unknown.copy(),
            fitness=unknown,
        )


@dataclass(frozen=True)
class ParticleDraws:
    rand1: np.ndarray
    rand2: np.ndarray
    mutation_trigger: float
    mutation_dimension: int
    mutation_value: float
    pbest_coin: float

    @staticmethod
    def sample(rng: np.random.Generator, dimensions: int) -> "ParticleDraws":
        rand1 = rng.random(dimensions)
        rand2 = rng.random(dimensions)
        trigger = float(rng.random())
        dimension = int(rng.integers(dimensions))
        value = float(rng.random())
        coin = float(rng.random())
        return ParticleDraws(rand1, rand2, trigger, dimension, value, coin)


# ---------------------------------------------------------- dominance --------

def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    first = np.asarray(a, dtype=np.float64)
    second = np.asarray(b, dtype=np.float64)
    if first.shape != second.shape:
        raise ValueError(f"Fitness vectors differ in length: {first.shape} vs {second.shape}")
    return bool(np.all(first <= second) and np.any(first < second))


def crowding_distances(front: Sequence[Sequence[float]]) -> np.ndarray:
    """NSGA-II crowding distance; extremes of every objective are infinite."""
    values = np.asarray(front, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    count = values.shape[0]
    if count == 0:
        raise ValueError("Crowding distance of an empty front")
    distance = np.zeros(count)
    if count <= 2:
        distance[:] = np.inf
        return distance
    for column in values.T:
        order = np.argsort(column, kind="stable")
        ranked = column[order]
        distance[order[0]] = np.inf
        distance[order[-1]] = np.inf
        span = ranked[-1] - ranked[0]
        if span == 0.0 or not np.isfinite(span):
            continue
        distance[order[1:-1]] += (ranked[2:] - ranked[:-2]) / span
    return distance


# ------------------------------------------------------------ archive --------

@dataclass
class ArchiveMember:
    position: np.ndarray
    fitness: np.ndarray


class ParetoArchive:
    """Bounded store of mutually non-dominated (position, fitness) pairs."""

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError(f"Archive capacity must be >= 1, got {capacity}")
        self.capacity = int(capacity)
        self.members: List[ArchiveMember] = []
        self._crowding: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[ArchiveMember]:
        return iter(self.members)

    def __getitem__(self, index: int) -> ArchiveMember:
        return self.members[index]

    @property
    def crowding(self) -> np.ndarray:
        if not self.members:
            return np.zeros(0)
        if self._crowding is None:
            self._crowding = crowding_distances(self.fitness_matrix())
        return self._crowding

    def fitness_matrix(self) -> np.ndarray:
        return np.array([m.fitness for m in self.members], dtype=np.float64)

    def positions(self) -> np.ndarray:
        return np.array([m.position for m in self.members], dtype=np.float64)

    def insert(self, position: Sequence[float], fitness: Sequence[float]) -> bool:
        """Offer a candidate. Returns True when it is still a member afterwards."""
        fitness = np.array(fitness, dtype=np.float64)
        if not np.all(np.isfinite(fitness)):
            return False
        if any(dominates(member.fitness, fitness) for member in self.members):
            return False
        candidate = ArchiveMember(np.array(position, dtype=np.float64), fitness)
        self.members = [m for m in self.members if not dominates(fitness, m.fitness)]
        self.members.append(candidate)
        self._crowding = None
        while len(self.members) > self.capacity:
            del self.members[int(np.argmin(self.crowding))]
            self._crowding = None
        return any(m is candidate for m in self.members)


def update_archive(archive: ParetoArchive, position: Sequence[float], fitness: Sequence[float]) -> ParetoArchive:
    archive.insert(position, fitness)
    return archive


def select_leader(archive: ParetoArchive, rng: np.random.Generator) -> np.ndarray:
    if not archive.members:
        raise ArchiveEmptyError("Cannot select a leader from an empty archive")
    crowding = archive.crowding
    candidates = np.flatnonzero(crowding == crowding.max())
    chosen = candidates[int(rng.integers(candidates.size))]
    return archive.members[chosen].position.copy()


# ------------------------------------------------------- particle moves --------

def inertia_at(cfg: SwarmConfig, generation: int) -> float:
    if cfg.inertia_schedule is InertiaSchedule.LINEAR:
        return 0.9 - 0.5 * generation / cfg.max_generations
    return cfg.inertia


def velocity_update(
    particle: Particle,
    leader: np.ndarray,
    cfg: SwarmConfig,
    rand1: np.ndarray,
    rand2: np.ndarray,
    generation: int = 0,
) -> np.ndarray:
    w = inertia_at(cfg, generation)
    cognitive = cfg.c1 * rand1 * (particle.pbest_position - particle.position)
    social = cfg.c2 * rand2 * (leader - particle.position)
    return w * particle.velocity + cognitive + social


def position_update(particle: Particle) -> np.ndarray:
    return particle.position + particle.velocity


def enforce_bounds(
    position: np.ndarray,
    velocity: np.ndarray,
    lower: float = 0.0,
    upper: float = 1.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """Clamp out-of-range coordinates to the violated bound and reverse their velocity."""
    position = np.array(position, dtype=np.float64)
    velocity = np.array(velocity, dtype=np.float64)
    below = position < lower
    above = position > upper
    position[below] = lower
    position[above] = upper
    velocity[below | above] *= -1.0
    return position, velocity


def mutation_range(generation: int, cfg: SwarmConfig) -> float:
    return max(0.0, 1.0 - generation / cfg.max_generations) ** 1.5


def mutate(
    position: np.ndarray,
    generation: int,
    cfg: SwarmConfig,
    draws: Union[ParticleDraws, np.random.Generator],
) -> np.ndarray:
    out = np.array(position, dtype=np.float64)
    if isinstance(draws, np.random.Generator):
        draws = ParticleDraws.sample(draws, out.size)
    if draws.mutation_trigger >= cfg.mutation_rate:
        return out
    radius = mutation_range(generation, cfg)
    j = draws.mutation_dimension
    low = max(0.0, out[j] - radius)
    high = min(1.0, out[j] + radius)
    out[j] = low + draws.mutation_value * (high - low)
    return out


def update_pbest(particle: Particle, coin: float) -> Particle:
    """Keep the personal best by dominance; incomparable pairs go to ``coin < 0.5``.

    An incomparable candidate is never adopted when an earlier personal best
    dominates it.
    """
    current, best = particle.fitness, particle.pbest_fitness
    if dominates(current, best):
        adopt = True
    elif dominates(best, current):
        adopt = False
    else:
        adopt = coin < 0.5 and not any(dominates(old, current) for old in particle.pbest_trail)
    if adopt:
        particle.pbest_position = particle.position.copy()
        particle.pbest_fitness = current.copy()
        if np.all(np.isfinite(current)):
            particle.pbest_trail.append(current.copy())
    return particle


# -------------------------------------------------------------- swarm --------

@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    archive_size: int
    best: np.ndarray


class Swarm:
    def __init__(
        self,
        objective: Objective,
        cfg: SwarmConfig,
        dimensions: int,
        *,
        executor: Optional[Executor] = None,
        progress: Optional[ProgressCallback] = None,
    ) -> None:
        if dimensions < 1:
            raise ValueError(f"dimensions must be >= 1, got {dimensions}")
        self.objective = objective
        self.cfg = cfg
        self.dimensions = int(dimensions)
        self.executor = executor
        self.progress = progress
        self.rng = np.random.default_rng(cfg.seed)
        self.particles: List[Particle] = []
        self.archive = ParetoArchive(cfg.archive_capacity)
        self.evaluations = 0
        self.invalid_evaluations = 0
        self.history: List[GenerationRecord] = []
        self._gbest: Optional[Tuple[np.ndarray, np.ndarray]] = None

    @property
    def plain(self) -> bool:
        return self.cfg.mode is SwarmMode.PLAIN_PSO

    # ---------------------------------------------------------- evaluation ----
    def _evaluate(self, positions: List[np.ndarray]) -> List[np.ndarray]:
        if self.executor is not None:
            raw = list(self.executor.map(self.objective, positions))
        else:
            raw = [self.objective(p) for p in positions]
        self.evaluations += len(positions)
        results = []
        for values in raw:
            vector = np.asarray(values, dtype=np.float64).reshape(-1)
            if vector.size != self.cfg.n_objectives:
                raise ValueError(
                    f"Objective returned {vector.size} values, expected {self.cfg.n_objectives}"
                )
            if not np.all(np.isfinite(vector)):
                self.invalid_evaluations += 1
                log = logger.warning if self.invalid_evaluations == 1 else logger.debug
                log("Objective returned non-finite fitness %s; treating as dominated", vector)
                vector = np.full(self.cfg.n_objectives, np.inf)
            results.append(vector)
        return results

    # ----------------------------------------------------------- plain mode ----
    def _refresh_gbest(self) -> None:
        for particle in self.particles:
            score = float(np.sum(particle.pbest_fitness))
            if not np.isfinite(score):
                continue
            if self._gbest is None or score < float(np.sum(self._gbest[1])):
                self._gbest = (particle.pbest_position.copy(), particle.pbest_fitness.copy())

    @staticmethod
    def _scalar_pbest(particle: Particle) -> None:
        if float(np.sum(particle.fitness)) < float(np.sum(particle.pbest_fitness)):
            particle.pbest_position = particle.position.copy()
            particle.pbest_fitness = particle.fitness.copy()

    # ---------------------------------------------------------------- loop ----
    def initialise(self) -> None:
        positions = self.rng.random((self.cfg.n_particles, self.dimensions))
        self.particles = [Particle.spawn(p, self.cfg.n_objectives) for p in positions]
        for particle, fitness in zip(self.particles, self._evaluate([p.position for p in self.particles])):
            particle.fitness = fitness
            particle.pbest_fitness = fitness.copy()
            if np.all(np.isfinite(fitness)):
                particle.pbest_trail.append(fitness.copy())
        if self.plain:
            self._refresh_gbest()
        else:
            for particle in self.particles:
                self.archive.insert(particle.position, particle.fitness)

    def _leader(self) -> Optional[np.ndarray]:
        if self.plain:
            return None if self._gbest is None else self._gbest[0]
        if not self.archive.members:
            return None
        return select_leader(self.archive, self.rng)

    def step(self, generation: int) -> None:
        leader = self._leader()
        draws = [ParticleDraws.sample(self.rng, self.dimensions) for _ in self.particles]
        for particle, draw in zip(self.particles, draws):
            guide = leader if leader is not None else particle.pbest_position
            particle.velocity = velocity_update(particle, guide, self.cfg, draw.rand1, draw.rand2, generation)
            particle.position, particle.velocity = enforce_bounds(position_update(particle), particle.velocity)
            if not self.plain:
                particle.position = mutate(particle.position, generation, self.cfg, draw)

        fitness = self._evaluate([p.position for p in self.particles])
        for particle, values in zip(self.particles, fitness):
            particle.fitness = values

        if self.plain:
            for particle in self.particles:
                self._scalar_pbest(particle)
            self._refresh_gbest()
        else:
            for particle in self.particles:
                self.archive.insert(particle.position, particle.fitness)
            for particle, draw in zip(self.particles, draws):
                update_pbest(particle, draw.pbest_coin)
        self._record(generation)

    def _record(self, generation: int) -> None:
        if self.plain:
            size = 0 if self._gbest is None else 1
            best = np.full(self.cfg.n_objectives, np.inf) if self._gbest is None else self._gbest[1].copy()
        else:
            size = len(self.archive)
            best = self.archive.fitness_matrix().min(axis=0) if size else np.full(self.cfg.n_objectives, np.inf)
        self.history.append(GenerationRecord(generation, size, best))
        logger.info("generation %d/%d archive=%d", generation + 1, self.cfg.max_generations, size)
        if self.progress is not None:
            self.progress(generation + 1, self.cfg.max_generations, size)

    def run(self) -> ParetoArchive:
        self.initialise()
        for generation in range(self.cfg.max_generations):
            self.step(generation)
        if self.plain:
            self.archive = ParetoArchive(self.cfg.archive_capacity)
            if self._gbest is not None:
                self.archive.insert(*self._gbest)
        if self.invalid_evaluations:
            logger.warning("%d objective evaluations were non-finite", self.invalid_evaluations)
        return self.archive


def run(
    objective: Objective,
    cfg: SwarmConfig,
    dimensions: int,
    *,
    executor: Optional[Executor] = None,
    progress: Optional[ProgressCallback] = None,
) -> ParetoArchive:
    return Swarm(objective, cfg, dimensions, executor=executor, progress=progress).run()

"""Population-based seeker search for the minimum peak-sidelobe offsets.

Used when the eavesdropper location is unknown: each of S seekers carries
a candidate offset vector, moves along an empirical-gradient direction
with a fuzzy-ruled step length, and the best position ever visited wins.
All random draws come from one seeded generator in a fixed order (per
iteration, per seeker: direction pair r1/r2, partner index, step r3), so
runs are reproducible regardless of how fitness evaluations are batched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import SidelobeSearch, sidelobe_fitness
from .patterns import ArrayGeometry, FieldPoint, FoiVector


@dataclass(frozen=True)
class SoaConfig:
    """Seeker search settings.

    population is S, iterations is T; u_max/u_min bound the fuzzy
    membership degree mapped from the fitness rank; bound is the offset
    limit in Hz.
    """

    bound_hz: float
    population: int = 40
    iterations: int = 100
    u_max: float = 0.95
    u_min: float = 0.0111
    rng_seed: int = 1

    def __post_init__(self) -> None:
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if not 0.0 < self.u_min < self.u_max < 1.0:
            raise ValueError("membership bounds must satisfy 0 < u_min < u_max < 1")
        if self.bound_hz < 0.0:
            raise ValueError("bound_hz must be non-negative")


@dataclass
class SeekerPopulation:
    """Positions and bookkeeping of the seeker swarm.

    positions and personal_best are (M, S); global_best is (M,).
    """

    positions: np.ndarray
    fitness: np.ndarray
    personal_best: np.ndarray
    personal_best_fitness: np.ndarray
    global_best: np.ndarray
    global_best_fitness: float


@dataclass(frozen=True)
class SoaTraceEntry:
    iteration: int
    best_fitness: float
    best_offsets_hz: tuple[float, ...]


def inertia_weight(t: int, iterations: int) -> float:
    """Linearly decaying weight, 0.9 at the start down to 0.1 at the end."""
    if not 1 <= t <= iterations:
        raise ValueError("iteration index out of range")
    return 0.9 - 0.8 * t / iterations


def membership_degree(rank: int, population: int, u_max: float = 0.95, u_min: float = 0.0111) -> float:
    """Fuzzy membership from the fitness rank; the best seeker (rank = S) gets u_max.

    A high membership shrinks the step, implementing the rule that better
    seekers take shorter steps.
    """
    if population < 2:
        raise ValueError("population must be at least 2 to rank seekers")
    if not 1 <= rank <= population:
        raise ValueError("rank out of range")
    return u_max - (population - rank) / (population - 1) * (u_max - u_min)


def eg_direction(
    position: np.ndarray,
    personal_best: np.ndarray,
    global_best: np.ndarray,
    current_fitness: float,
    personal_fitness: float,
    w: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Empirical-gradient step direction, one of {-1, 0, 1} per coordinate.

    Blends the egotistic pull toward the personal best, the altruistic
    pull toward the global best (random scalar weights r1, r2) and the
    proactive fitness-trend sign scaled by the inertia weight.
    """
    r1 = rng.uniform()
    r2 = rng.uniform()
    d_ego = np.sign(personal_best - position)
    d_alt = np.sign(global_best - position)
    d_pro = np.sign(current_fitness - personal_fitness)
    return np.sign(r1 * d_ego + r2 * d_alt + w * d_pro)


def step_length(
    global_best: np.ndarray,
    random_seeker: np.ndarray,
    w: float,
    membership_u: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Non-negative per-coordinate step from the fuzzy membership degree."""
    if not 0.0 < membership_u < 1.0:
        raise ValueError("membership degree must lie in (0, 1)")
    r3 = rng.uniform()
    return w * np.abs(global_best - random_seeker) * np.sqrt(
        -np.log(membership_u + (1.0 - membership_u) * r3)
    )


def _ranks(fitness: np.ndarray) -> np.ndarray:
    """1-based ranks; the smallest (best) fitness gets the highest rank."""
    order = np.argsort(-fitness, kind="stable")
    ranks = np.empty(fitness.size, dtype=int)
    ranks[order] = np.arange(1, fitness.size + 1)
    return ranks


def soa_optimize(
    geom: ArrayGeometry,
    target: FieldPoint,
    config: SoaConfig,
    fitness=None,
    search: SidelobeSearch | None = None,
) -> tuple[FoiVector, list[SoaTraceEntry]]:
    """Minimize a fitness over bounded offset vectors with the seeker swarm.

    fitness defaults to the peak-sidelobe power of the pattern; pass a
    SidelobeSearch to control its window, or any callable taking an
    offset array. Returns the best offsets and the per-iteration trace of
    the best fitness seen so far (non-increasing).
    """
    if fitness is None:
        if search is None:
            search = SidelobeSearch(target, target.range_m / 10.0, 2.0 * target.range_m)
        fitness = sidelobe_fitness(geom, search)
    m_count = geom.subarrays
    s_count = config.population
    bound = config.bound_hz
    rng = np.random.default_rng(config.rng_seed)

    positions = rng.uniform(-bound, bound, size=(m_count, s_count))
    fit_vals = np.array([float(fitness(positions[:, s])) for s in range(s_count)])
    swarm = SeekerPopulation(
        positions=positions,
        fitness=fit_vals,
        personal_best=positions.copy(),
        personal_best_fitness=fit_vals.copy(),
        global_best=positions[:, int(np.argmin(fit_vals))].copy(),
        global_best_fitness=float(fit_vals.min()),
    )
    trace = [SoaTraceEntry(0, swarm.global_best_fitness, tuple(swarm.global_best))]

    for t in range(1, config.iterations + 1):
        w = inertia_weight(t, config.iterations)
        ranks = _ranks(swarm.fitness)
        new_positions = np.empty_like(swarm.positions)
        for s in range(s_count):
            direction = eg_direction(
                swarm.positions[:, s],
                swarm.personal_best[:, s],
                swarm.global_best,
                float(swarm.fitness[s]),
                float(swarm.personal_best_fitness[s]),
                w,
                rng,
            )
            u = membership_degree(int(ranks[s]), s_count, config.u_max, config.u_min)
            partner = int(rng.integers(s_count))
            step = step_length(swarm.global_best, swarm.positions[:, partner], w, u, rng)
            moved = swarm.positions[:, s] + direction * step
            over = np.abs(moved) > bound
            moved[over] = bound * np.sign(moved[over])
            new_positions[:, s] = moved
        swarm.positions = new_positions
        swarm.fitness = np.array(
            [float(fitness(swarm.positions[:, s])) for s in range(s_count)]
        )
        improved = swarm.fitness < swarm.personal_best_fitness
        swarm.personal_best[:, improved] = swarm.positions[:, improved]
        swarm.personal_best_fitness[improved] = swarm.fitness[improved]
        best = int(np.argmin(swarm.fitness))
        if swarm.fitness[best] < swarm.global_best_fitness:
            swarm.global_best = swarm.positions[:, best].copy()
            swarm.global_best_fitness = float(swarm.fitness[best])
        trace.append(
            SoaTraceEntry(t, swarm.global_best_fitness, tuple(swarm.global_best))
        )

    return FoiVector(tuple(swarm.global_best), bound), trace

"""MAP-Elites over the agent hyperparameter space.

Genomes are vectors of indices into categorical value grids: the 10
planner hyperparameters followed by the heuristic's weight genes (each an
11-value grid over [-1, 1]). Evaluating a genome plays a batch of games
against an opponent with alternating seats; the win rate is the fitness
and five averaged per-game metrics place the genome in the binned
behaviour space. Each cell keeps its best genome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .agent import HP_GRIDS, HP_NAMES, BmrhConfig, BmrhPlayer, play_game
from .engine.game import GameSpec, result
from .heuristics import (
    HEURISTIC_KINDS,
    WEIGHT_GRID,
    feature_count,
    make_evaluator,
    make_heuristic,
)
from .rng import Rng, derive_seed

BEHAVIOUR_METRIC_NAMES = ("card_count", "total_coins", "nobles", "card_cost", "reserved_cards")
SUPPORT_METRIC_NAMES = ("game_length", "final_score", "token_swaps")


class GenomeError(ValueError):
    pass


# ------------------------------------------------------- genome space


@dataclass(frozen=True)
class GenomeSpace:
    kind: str
    names: tuple[str, ...]
    values: tuple[tuple, ...]

    @property
    def dims(self) -> int:
        return len(self.values)

    def validate_genome(self, genome) -> None:
        if len(genome) != self.dims:
            raise GenomeError(f"genome has {len(genome)} genes, space has {self.dims}")
        for i, idx in enumerate(genome):
            if not 0 <= idx < len(self.values[i]):
                raise GenomeError(f"gene {i} index {idx} out of range")


def build_genome_space(kind: str, encoding_length: int) -> GenomeSpace:
    if kind not in HEURISTIC_KINDS:
        raise GenomeError(f"unknown search space {kind!r}")
    n_weights = feature_count(kind, encoding_length)
    names = HP_NAMES + tuple(f"w{i}" for i in range(n_weights))
    values = tuple(HP_GRIDS[name] for name in HP_NAMES) + (WEIGHT_GRID,) * n_weights
    return GenomeSpace(kind, names, values)


def decode_genome(space: GenomeSpace, genome):
    """Genome indices -> (BmrhConfig, weight tuple or None)."""
    space.validate_genome(genome)
    hp = {name: space.values[i][genome[i]] for i, name in enumerate(HP_NAMES)}
    cfg = BmrhConfig(**hp)
    weights = tuple(space.values[i][genome[i]] for i in range(len(HP_NAMES), space.dims))
    return cfg, (weights if weights else None)


def random_genome(space: GenomeSpace, rng: Rng) -> tuple[int, ...]:
    return tuple(rng.below(len(v)) for v in space.values)


def mutate_genome(space: GenomeSpace, genome, rng: Rng) -> tuple[int, ...]:
    """Resample one uniformly chosen gene to a different uniform value."""
    g = rng.below(space.dims)
    card = len(space.values[g])
    new = rng.below(card - 1)
    if new >= genome[g]:
        new += 1
    out = list(genome)
    out[g] = new
    return tuple(out)


# ----------------------------------------------------- behaviour space


@dataclass(frozen=True)
class MetricSpec:
    name: str
    lo: float
    hi: float
    buckets: int

    def edges(self) -> list[float]:
        step = (self.hi - self.lo) / self.buckets
        return [self.lo + i * step for i in range(self.buckets + 1)]


@dataclass(frozen=True)
class BehaviourSpaceSpec:
    metrics: tuple[MetricSpec, ...]

    def __post_init__(self):
        for m in self.metrics:
            if m.buckets < 1:
                raise ValueError(f"{m.name}: bucket count must be >= 1")
            if not m.lo < m.hi:
                raise ValueError(f"{m.name}: lo must be < hi")

    @property
    def dims(self) -> int:
        return len(self.metrics)

    def cell(self, behaviour) -> tuple[int, ...]:
        if len(behaviour) != self.dims:
            raise ValueError(f"behaviour has {len(behaviour)} values, space has {self.dims}")
        return tuple(
            bucket_index(v, m.lo, m.hi, m.buckets) for v, m in zip(behaviour, self.metrics)
        )

    def compatible_with(self, other: "BehaviourSpaceSpec") -> bool:
        return self.metrics == other.metrics


def default_behaviour_space() -> BehaviourSpaceSpec:
    return BehaviourSpaceSpec(
        (
            MetricSpec("card_count", 0.0, 40.0, 62),
            MetricSpec("total_coins", 0.0, 120.0, 62),
            MetricSpec("nobles", 0.0, 4.0, 62),
            MetricSpec("card_cost", 0.0, 15.0, 62),
            MetricSpec("reserved_cards", 0.0, 30.0, 62),
        )
    )


def bucket_index(value: float, lo: float, hi: float, k: int) -> int:
    """Left-closed uniform buckets; the first and last also absorb
    everything beyond the bounds."""
    if not math.isfinite(value):
        raise ValueError(f"non-finite metric value {value!r}")
    if value < lo:
        return 0
    if value >= hi:
        return k - 1
    idx = int((value - lo) * k / (hi - lo))
    return min(idx, k - 1)


# ------------------------------------------------------------ archive


@dataclass(frozen=True)
class Elite:
    genome: tuple[int, ...]
    fitness: float
    behaviour: tuple[float, ...]
    support: tuple[float, ...]
    iteration: int


@dataclass(frozen=True)
class EvalResult:
    fitness: float
    behaviour: tuple[float, ...]
    support: tuple[float, ...]
    behaviour_samples: tuple[tuple[float, ...], ...]
    support_samples: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class HistoryEntry:
    elite: Elite
    cell: tuple[int, ...]
    inserted: bool
    behaviour_samples: tuple[tuple[float, ...], ...] = ()
    support_samples: tuple[tuple[float, ...], ...] = ()


@dataclass
class Archive:
    space: BehaviourSpaceSpec
    cells: dict = field(default_factory=dict)
    history: list = field(default_factory=list)

    def insert(self, elite: Elite, behaviour_samples=(), support_samples=()) -> bool:
        """Empty cell takes the elite; an occupied cell only yields to a
        strictly greater fitness. Every evaluation lands in the history."""
        cell = self.space.cell(elite.behaviour)
        incumbent = self.cells.get(cell)
        inserted = incumbent is None or elite.fitness > incumbent.fitness
        self.history.append(
            HistoryEntry(elite, cell, inserted, tuple(behaviour_samples), tuple(support_samples))
        )
        if inserted:
            self.cells[cell] = elite
        return inserted

    @property
    def filled(self) -> int:
        return len(self.cells)

    def best_fitness(self) -> float:
        return max((e.fitness for e in self.cells.values()), default=0.0)

    def total_fitness(self) -> float:
        return sum(e.fitness for e in self.cells.values())

    def elites(self) -> list[Elite]:
        return list(self.cells.values())


def boot(archive: Archive, space: GenomeSpace, n_boot: int, eval_fn, rng: Rng) -> Archive:
    """Booting loop: uniform random genomes, evaluated and inserted."""
    if n_boot < 1:
        raise ValueError("n_boot must be >= 1")
    for i in range(n_boot):
        genome = random_genome(space, rng)
        res = eval_fn(genome, rng.u64())
        archive.insert(
            Elite(genome, res.fitness, res.behaviour, res.support, len(archive.history)),
            res.behaviour_samples,
            res.support_samples,
        )
    return archive


def search_step(archive: Archive, space: GenomeSpace, rng: Rng, eval_fn) -> Archive:
    """Main loop step: sample an elite uniformly, mutate one gene,
    evaluate, insert."""
    if not archive.cells:
        raise ValueError("archive is empty; boot first")
    parents = list(archive.cells.values())
    parent = parents[rng.below(len(parents))]
    genome = mutate_genome(space, parent.genome, rng)
    res = eval_fn(genome, rng.u64())
    archive.insert(
        Elite(genome, res.fitness, res.behaviour, res.support, len(archive.history)),
        res.behaviour_samples,
        res.support_samples,
    )
    return archive


# ---------------------------------------------------------- evaluation


def confidence_half_width(p: float, games: int) -> float:
    """95% margin of a win-rate estimate from `games` samples."""
    return 1.96 * math.sqrt(p * (1.0 - p) / games)


def game_metrics(final_state, seat: int) -> tuple[float, ...]:
    """The five behaviour metrics of one finished game, player-centric."""
    bought = final_state.bought_count(seat)
    card_cost = final_state.bought_cost_total(seat) / bought if bought else 0.0
    return (
        float(bought),
        float(final_state.coins_gained(seat)),
        float(len(final_state.attracted_nobles(seat))),
        float(card_cost),
        float(final_state.reserve_actions(seat)),
    )


def game_support_metrics(final_state, seat: int) -> tuple[float, ...]:
    return (
        float(final_state.tick),
        float(final_state.points(seat)),
        float(final_state.token_swaps(seat)),
    )


class Evaluator:
    """Plays `games` independent games of one genome against an opponent.

    Seats alternate: game g puts the agent at seat g % P, and the engine
    seed depends only on g // P, so consecutive seat-rotated games share
    identical worlds. Fitness is the mean outcome (ties split)."""

    def __init__(
        self,
        game_spec: GameSpec,
        genome_space: GenomeSpace,
        opponent_factory,
        games: int,
        budget: int,
    ):
        if games < 1:
            raise ValueError("games must be >= 1")
        self.spec = game_spec
        self.space = genome_space
        self.opponent_factory = opponent_factory
        self.games = games
        self.budget = budget

    def __call__(self, genome, seed: int) -> EvalResult:
        spec = self.spec
        nplayers = spec.params.players
        cfg, weights = decode_genome(self.space, genome)
        hspec = make_heuristic(self.space.kind, weights, spec.encoding_length)
        agent = BmrhPlayer(spec, cfg, make_evaluator(spec, hspec), self.budget)
        opponents = [self.opponent_factory() for _ in range(nplayers - 1)]

        outcomes = []
        behaviour_samples = [[] for _ in BEHAVIOUR_METRIC_NAMES]
        support_samples = [[] for _ in SUPPORT_METRIC_NAMES]
        for g in range(self.games):
            seat = g % nplayers
            game_seed = derive_seed(seed, 0x6A3E, g // nplayers)
            players = list(opponents)
            players.insert(seat, agent)
            final, _ = play_game(spec, players, game_seed)
            outcomes.append(result(final)[seat])
            for i, v in enumerate(game_metrics(final, seat)):
                behaviour_samples[i].append(v)
            for i, v in enumerate(game_support_metrics(final, seat)):
                support_samples[i].append(v)

        fitness = sum(outcomes) / len(outcomes)
        behaviour = tuple(sum(vs) / len(vs) for vs in behaviour_samples)
        support = tuple(sum(vs) / len(vs) for vs in support_samples)
        return EvalResult(
            fitness,
            behaviour,
            support,
            tuple(tuple(vs) for vs in behaviour_samples),
            tuple(tuple(vs) for vs in support_samples),
        )

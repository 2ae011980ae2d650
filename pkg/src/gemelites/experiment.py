"""Experiment orchestration: full searches, seeding, workers, persistence.

A run is reproducible from its master seed alone: every evaluation i
derives its own seed, boot genomes are functions of their index, and
search batches sample parents from the archive as of the previous batch
boundary. Results are therefore independent of the worker count (the
batch size, not the pool size, shapes the search).

Persisted artifact set per experiment directory:
  JSON  agentSpace, behaviours, bins, heuristicSpace, opponents, p,
        space, spaceHistory, spaceSize, summary, support, timing
  CSV   space.csv, spaceHistory.csv, spaceHistory_binned.csv
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .agent import (
    BMRH_STAR_CONFIG,
    DEFAULT_BUDGET,
    HP_NAMES,
    BmrhPlayer,
    RandomPlayer,
)
from .engine import BACKEND
from .engine.game import GameSpec
from .heuristics import make_evaluator, make_heuristic
from .qd import (
    Archive,
    BEHAVIOUR_METRIC_NAMES,
    BehaviourSpaceSpec,
    Elite,
    Evaluator,
    HistoryEntry,
    MetricSpec,
    SUPPORT_METRIC_NAMES,
    build_genome_space,
    decode_genome,
    default_behaviour_space,
    random_genome,
    mutate_genome,
)
from .rng import Rng, derive_seed

GAME_NAMES = ("SP2P", "W2", "1C2W")
SPACE_NAMES = ("PB", "EF_ID", "EF_HC", "SF")
OPPONENT_NAMES = ("RND", "BMRH_STAR")

JSON_DOCUMENTS = (
    "agentSpace",
    "behaviours",
    "bins",
    "heuristicSpace",
    "opponents",
    "p",
    "space",
    "spaceHistory",
    "spaceSize",
    "summary",
    "support",
    "timing",
)
CSV_DOCUMENTS = ("space.csv", "spaceHistory.csv", "spaceHistory_binned.csv")


class ConfigError(ValueError):
    pass


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    game: str = "SP2P"
    space: str = "PB"
    opponent: str = "RND"
    n_boot: int = 2000
    n_budget: int = 10000
    games_per_eval: int = 100
    workers: int = 1
    master_seed: int = 0
    output_dir: str = "data"
    budget: int = DEFAULT_BUDGET
    batch_size: int = 16
    checkpoint_every: int = 0

    def validate(self) -> None:
        if self.game not in GAME_NAMES:
            raise ConfigError(f"unknown game {self.game!r}; options: {GAME_NAMES}")
        if self.space not in SPACE_NAMES:
            raise ConfigError(f"unknown search space {self.space!r}; options: {SPACE_NAMES}")
        if self.opponent not in OPPONENT_NAMES:
            raise ConfigError(f"unknown opponent {self.opponent!r}; options: {OPPONENT_NAMES}")
        if self.n_boot < 1:
            raise ConfigError("n_boot must be >= 1")
        if self.n_boot > self.n_budget:
            raise ConfigError("n_boot cannot exceed n_budget")
        if self.games_per_eval < 1:
            raise ConfigError("games_per_eval must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")

    def search_settings(self) -> dict:
        """The fields that define results (resume refuses to mix these)."""
        return {
            "game": self.game,
            "space": self.space,
            "opponent": self.opponent,
            "n_boot": self.n_boot,
            "n_budget": self.n_budget,
            "games_per_eval": self.games_per_eval,
            "master_seed": self.master_seed,
            "budget": self.budget,
            "batch_size": self.batch_size,
        }


@dataclass
class ExperimentRecord:
    config: ExperimentConfig
    archive: Archive
    per_eval_seconds: list[float] = field(default_factory=list)
    wall_seconds: float = 0.0

    @property
    def timing_total(self) -> float:
        return sum(self.per_eval_seconds)


# ----------------------------------------------------------- opponents


def opponent_descriptor(kind: str, budget: int) -> dict:
    if kind == "RND":
        return {"kind": "RND"}
    if kind == "BMRH_STAR":
        return {
            "kind": "BMRH_STAR",
            "heuristic": "PB",
            "config": BMRH_STAR_CONFIG.as_dict(),
            "budget": budget,
        }
    raise ConfigError(f"unknown opponent {kind!r}")


def make_opponent(kind: str, spec: GameSpec, budget: int = DEFAULT_BUDGET):
    """Factory of fresh opponent players of the named kind."""
    if kind == "RND":
        return lambda: RandomPlayer(spec)
    if kind == "BMRH_STAR":
        def factory():
            evaluator = make_evaluator(spec, make_heuristic("PB"))
            return BmrhPlayer(spec, BMRH_STAR_CONFIG, evaluator, budget)

        return factory
    raise ConfigError(f"unknown opponent {kind!r}")


# --------------------------------------------------------- seed scheme

_TAG_EVAL = 0xE7A1
_TAG_BOOT = 0xB007
_TAG_SEARCH = 0x5EC4


def eval_seed(master_seed: int, index: int) -> int:
    return derive_seed(master_seed, _TAG_EVAL, index)


def boot_genome(space, master_seed: int, index: int):
    return random_genome(space, Rng(derive_seed(master_seed, _TAG_BOOT, index)))


def search_genome(space, archive: Archive, master_seed: int, index: int):
    rng = Rng(derive_seed(master_seed, _TAG_SEARCH, index))
    parents = list(archive.cells.values())
    parent = parents[rng.below(len(parents))]
    return mutate_genome(space, parent.genome, rng)


# ------------------------------------------------------------- workers

_WORKER_EVALUATOR: Evaluator | None = None


def _worker_init(game, space_kind, opponent_kind, games, budget):
    global _WORKER_EVALUATOR
    spec = GameSpec.preset(game)
    gspace = build_genome_space(space_kind, spec.encoding_length)
    factory = make_opponent(opponent_kind, spec, budget)
    _WORKER_EVALUATOR = Evaluator(spec, gspace, factory, games, budget)


def _worker_eval(task):
    index, genome, seed = task
    t0 = time.perf_counter()
    res = _WORKER_EVALUATOR(genome, seed)
    return index, res, time.perf_counter() - t0


# ----------------------------------------------------------------- run


def _replay_archive(space: BehaviourSpaceSpec, entries: list[HistoryEntry], upto: int) -> Archive:
    archive = Archive(space)
    for entry in entries[:upto]:
        archive.insert(entry.elite, entry.behaviour_samples, entry.support_samples)
    return archive


def run(config: ExperimentConfig, progress=None) -> ExperimentRecord:
    """Boot then search until n_budget evaluations, persisting the full
    document set into config.output_dir. Resumes from a checkpoint when
    the directory already holds one."""
    config.validate()
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    spec = GameSpec.preset(config.game)
    gspace = build_genome_space(config.space, spec.encoding_length)
    bspace = default_behaviour_space()

    archive = Archive(bspace)
    per_eval: list[float] = []
    prior_wall = 0.0
    completed = 0
    if (out / "spaceHistory.json").exists():
        previous = load(out)
        if previous.config.search_settings() != config.search_settings():
            raise ConfigError(
                f"{out} holds a run with different settings; refusing to resume"
            )
        completed = len(previous.archive.history)
        if completed > config.n_boot:
            # Align to a search-batch boundary in case of a torn checkpoint.
            completed = (
                config.n_boot
                + (completed - config.n_boot) // config.batch_size * config.batch_size
            )
        archive = _replay_archive(bspace, previous.archive.history, completed)
        per_eval = previous.per_eval_seconds[:completed]
        prior_wall = previous.wall_seconds

    wall_start = time.perf_counter()
    pool = None
    if config.workers > 1:
        pool = ProcessPoolExecutor(
            max_workers=config.workers,
            initializer=_worker_init,
            initargs=(
                config.game,
                config.space,
                config.opponent,
                config.games_per_eval,
                config.budget,
            ),
        )
    try:
        if pool is None:
            _worker_init(
                config.game, config.space, config.opponent,
                config.games_per_eval, config.budget,
            )
        last_checkpoint = completed
        while completed < config.n_budget:
            lo = completed
            if lo < config.n_boot:
                hi = min(config.n_boot, lo + config.batch_size)
                genomes = [boot_genome(gspace, config.master_seed, i) for i in range(lo, hi)]
            else:
                hi = min(config.n_budget, lo + config.batch_size)
                genomes = [
                    search_genome(gspace, archive, config.master_seed, i)
                    for i in range(lo, hi)
                ]
            tasks = [
                (i, genomes[i - lo], eval_seed(config.master_seed, i)) for i in range(lo, hi)
            ]
            if pool is None:
                results = [_worker_eval(t) for t in tasks]
            else:
                results = list(pool.map(_worker_eval, tasks))
            for index, res, elapsed in results:
                archive.insert(
                    Elite(tuple(genomes[index - lo]), res.fitness, res.behaviour,
                          res.support, index),
                    res.behaviour_samples,
                    res.support_samples,
                )
                per_eval.append(elapsed)
            completed = hi
            if progress is not None:
                progress(completed, config.n_budget)
            if (
                config.checkpoint_every > 0
                and completed - last_checkpoint >= config.checkpoint_every
                and completed < config.n_budget
            ):
                record = ExperimentRecord(
                    config, archive, per_eval,
                    prior_wall + time.perf_counter() - wall_start,
                )
                persist(record, out)
                last_checkpoint = completed
    finally:
        if pool is not None:
            pool.shutdown()

    record = ExperimentRecord(
        config, archive, per_eval, prior_wall + time.perf_counter() - wall_start
    )
    persist(record, out)
    return record


# ------------------------------------------------------------- persist


def _dump(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _heuristic_space_doc(config: ExperimentConfig, spec: GameSpec) -> dict:
    from .heuristics import WEIGHT_GRID

    doc: dict = {"kind": config.space, "mixing": "linear", "weight_values": list(WEIGHT_GRID)}
    if config.space == "PB":
        doc["feature_count"] = 0
        doc.pop("weight_values")
    elif config.space == "EF_ID":
        from .heuristics import id_mapping

        doc["feature_count"] = 18
        doc["mapping"] = {str(t): f for t, f in enumerate(id_mapping().table)}
    elif config.space == "EF_HC":
        from .heuristics import hc_mapping

        doc["feature_count"] = 5
        doc["mapping"] = {str(t): f for t, f in enumerate(hc_mapping().table)}
    else:
        doc["feature_count"] = spec.encoding_length
        doc["encoding_length"] = spec.encoding_length
    return doc


def persist(record: ExperimentRecord, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    config = record.config
    spec = GameSpec.preset(config.game)
    gspace = build_genome_space(config.space, spec.encoding_length)
    bspace = record.archive.space

    _dump(
        directory / "agentSpace.json",
        {"genes": [{"name": n, "values": list(v)} for n, v in
                   zip(HP_NAMES, gspace.values[: len(HP_NAMES)])]},
    )
    _dump(directory / "behaviours.json", list(BEHAVIOUR_METRIC_NAMES))
    _dump(directory / "bins.json", {m.name: m.edges() for m in bspace.metrics})
    _dump(directory / "heuristicSpace.json", _heuristic_space_doc(config, spec))
    _dump(directory / "opponents.json", [opponent_descriptor(config.opponent, config.budget)])
    _dump(
        directory / "p.json",
        {
            "game": config.game,
            "space": config.space,
            "opponent": config.opponent,
            "n_boot": config.n_boot,
            "n_budget": config.n_budget,
            "games_per_eval": config.games_per_eval,
            "master_seed": config.master_seed,
            "budget": config.budget,
            "batch_size": config.batch_size,
            "workers": config.workers,
            "engine_backend": BACKEND,
            "encoding_length": spec.encoding_length,
            "genome_dims": gspace.dims,
            "package_version": __version__,
        },
    )

    cells = sorted(record.archive.cells.items())
    space_rows = []
    for cell, elite in cells:
        cfg, weights = decode_genome(gspace, elite.genome)
        space_rows.append(
            {
                "cell": list(cell),
                "fitness": elite.fitness,
                "behaviours": list(elite.behaviour),
                "support": list(elite.support),
                "genome": list(elite.genome),
                "hyperparameters": cfg.as_dict(),
                "weights": list(weights) if weights else [],
                "iteration": elite.iteration,
            }
        )
    _dump(directory / "space.json", {"cells": space_rows})

    history_rows = []
    for entry in record.archive.history:
        e = entry.elite
        cfg_values, weights = decode_genome(gspace, e.genome)
        history_rows.append(
            {
                "time": e.iteration,
                "cell": list(entry.cell),
                "fitness": e.fitness,
                "behaviours": list(e.behaviour),
                "support": list(e.support),
                "genome": list(e.genome),
                "agent_config": list(cfg_values.as_dict().values()),
                "weights": list(weights) if weights else [],
                "inserted": entry.inserted,
                "behaviour_samples": [list(v) for v in entry.behaviour_samples],
                "support_samples": [list(v) for v in entry.support_samples],
            }
        )
    _dump(directory / "spaceHistory.json", {"entries": history_rows})

    _dump(
        directory / "spaceSize.json",
        {
            "dims": bspace.dims,
            "buckets": [m.buckets for m in bspace.metrics],
            "bounds": [[m.lo, m.hi] for m in bspace.metrics],
            "names": [m.name for m in bspace.metrics],
        },
    )
    _dump(
        directory / "summary.json",
        {
            "game": config.game,
            "opponent": config.opponent,
            "space": config.space,
            "heuristic": config.space,
            "evaluations": len(record.archive.history),
            "filled_cells": record.archive.filled,
            "best_fitness": record.archive.best_fitness(),
            "total_fitness": record.archive.total_fitness(),
        },
    )
    _dump(directory / "support.json", list(SUPPORT_METRIC_NAMES))
    _dump(
        directory / "timing.json",
        {
            "total": record.timing_total,
            "per_evaluation": record.per_eval_seconds,
            "wall": record.wall_seconds,
        },
    )

    _write_space_csv(directory / "space.csv", space_rows)
    _write_history_csv(directory / "spaceHistory.csv", history_rows, binned=False)
    _write_history_csv(directory / "spaceHistory_binned.csv", history_rows, binned=True)


def _write_space_csv(path: Path, space_rows: list[dict]) -> None:
    dims = len(BEHAVIOUR_METRIC_NAMES)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [f"Behave_D{i}" for i in range(dims)] + ["fitness", "behaviours", "hyperparameters"]
        )
        for row in space_rows:
            hp = list(row["hyperparameters"].values()) + row["weights"]
            writer.writerow(
                row["cell"] + [row["fitness"], json.dumps(row["behaviours"]), json.dumps(hp)]
            )


def _write_history_csv(path: Path, history_rows: list[dict], binned: bool) -> None:
    dims = len(BEHAVIOUR_METRIC_NAMES)
    n_support = len(SUPPORT_METRIC_NAMES)
    header = ["time"]
    if binned:
        header += [f"Behave_D{i}" for i in range(dims)]
    header += ["behaviours", "agentConfig", "weights"]
    header += [f"Behaviour{i}" for i in range(dims)]
    header += [f"Support{i}" for i in range(n_support)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in history_rows:
            out = [row["time"]]
            if binned:
                out += row["cell"]
            out.append(json.dumps(row["behaviours"]))
            out.append(json.dumps(row["agent_config"]))
            out.append(json.dumps(row["weights"]))
            samples = row["behaviour_samples"] or [[] for _ in range(dims)]
            out += [json.dumps(s) for s in samples]
            ssamples = row["support_samples"] or [[] for _ in range(n_support)]
            out += [json.dumps(s) for s in ssamples]
            writer.writerow(out)


# ---------------------------------------------------------------- load


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaError(message)


def load(directory: str | Path) -> ExperimentRecord:
    """Rebuild a record from a persisted directory, validating schemas."""
    directory = Path(directory)
    docs = {}
    for name in JSON_DOCUMENTS:
        path = directory / f"{name}.json"
        _require(path.exists(), f"missing document {path.name}")
        docs[name] = json.loads(path.read_text())

    p = docs["p"]
    for key in ("game", "space", "opponent", "n_boot", "n_budget", "games_per_eval",
                "master_seed", "budget", "batch_size"):
        _require(key in p, f"p.json: missing key {key!r}")
    config = ExperimentConfig(
        game=p["game"],
        space=p["space"],
        opponent=p["opponent"],
        n_boot=p["n_boot"],
        n_budget=p["n_budget"],
        games_per_eval=p["games_per_eval"],
        workers=p.get("workers", 1),
        master_seed=p["master_seed"],
        output_dir=str(directory),
        budget=p["budget"],
        batch_size=p["batch_size"],
    )
    config.validate()

    size = docs["spaceSize"]
    _require(
        all(k in size for k in ("bounds", "buckets", "dims", "names")),
        "spaceSize.json: missing keys",
    )
    metrics = tuple(
        MetricSpec(name, lo, hi, buckets)
        for name, (lo, hi), buckets in zip(size["names"], size["bounds"], size["buckets"])
    )
    bspace = BehaviourSpaceSpec(metrics)
    _require(docs["behaviours"] == list(size["names"]), "behaviours.json disagrees with spaceSize")
    bins = docs["bins"]
    for m in metrics:
        _require(m.name in bins, f"bins.json: missing dimension {m.name!r}")
        _require(len(bins[m.name]) == m.buckets + 1, f"bins.json: {m.name} needs bucket+1 edges")

    archive = Archive(bspace)
    entries = docs["spaceHistory"]["entries"]
    for row in entries:
        for key in ("time", "cell", "fitness", "behaviours", "support", "genome"):
            _require(key in row, f"spaceHistory.json: entry missing {key!r}")
        elite = Elite(
            tuple(row["genome"]),
            float(row["fitness"]),
            tuple(row["behaviours"]),
            tuple(row["support"]),
            int(row["time"]),
        )
        inserted = archive.insert(
            elite,
            tuple(tuple(v) for v in row.get("behaviour_samples", [])),
            tuple(tuple(v) for v in row.get("support_samples", [])),
        )
        _require(list(archive.history[-1].cell) == row["cell"],
                 "spaceHistory.json: stored cell disagrees with bucketization")
        _require(inserted == row["inserted"], "spaceHistory.json: insert decision mismatch")

    space_doc = docs["space"]["cells"]
    _require(len(space_doc) == archive.filled,
             "space.json cell count disagrees with replayed history")
    for row in space_doc:
        cell = tuple(row["cell"])
        _require(cell in archive.cells, f"space.json: unknown cell {cell}")
        _require(archive.cells[cell].fitness == row["fitness"],
                 f"space.json: fitness mismatch in cell {cell}")

    timing = docs["timing"]
    for key in ("total", "per_evaluation", "wall"):
        _require(key in timing, f"timing.json: missing {key!r}")

    for name in CSV_DOCUMENTS:
        _require((directory / name).exists(), f"missing document {name}")

    return ExperimentRecord(
        config=config,
        archive=archive,
        per_eval_seconds=[float(v) for v in timing["per_evaluation"]],
        wall_seconds=float(timing["wall"]),
    )


def validate_directory(directory: str | Path) -> list[str]:
    """All schema/consistency problems of one experiment directory."""
    directory = Path(directory)
    problems = []
    try:
        record = load(directory)
    except (SchemaError, ConfigError, ValueError, KeyError) as exc:
        return [f"{directory}: {exc}"]
    n = len(record.archive.history)
    if n != record.config.n_budget:
        problems.append(
            f"{directory}: spaceHistory has {n} entries, expected n_budget="
            f"{record.config.n_budget}"
        )
    with open(directory / "space.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) - 1 != record.archive.filled:
        problems.append(
            f"{directory}: space.csv has {len(rows) - 1} rows, expected {record.archive.filled}"
        )
    timing = json.loads((directory / "timing.json").read_text())
    total = sum(timing["per_evaluation"])
    if total > 0 and abs(timing["total"] - total) > 0.01 * total:
        problems.append(f"{directory}: timing.total deviates from per-evaluation sum by >1%")
    return problems


def experiment_directory(root: str | Path, config: ExperimentConfig) -> Path:
    """Canonical data layout: root/[GAME]/vs [OPPONENT]/[SPACE]."""
    return Path(root) / config.game / f"vs {config.opponent}" / config.space


def find_experiment_dirs(root: str | Path) -> list[Path]:
    root = Path(root)
    if (root / "p.json").exists():
        return [root]
    return sorted(p.parent for p in root.rglob("p.json"))

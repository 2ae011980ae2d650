"""Command-line interface.

Subcommands:
  run        execute a search and persist its artifact set
  analyze    compute analysis CSVs from persisted experiments
  compare    compare two experiments over the same behaviour space
  gen-decks  write a game-spec directory (parameters, decks, nobles)
  validate   schema-check persisted experiment directories
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .analysis import analyze_experiment, compare_experiments
from .engine.cards import GENERATOR_VARIANTS
from .engine.game import GameSpec
from .engine.params import PRESET_PARAMS, load_params
from .experiment import (
    ConfigError,
    ExperimentConfig,
    GAME_NAMES,
    OPPONENT_NAMES,
    SPACE_NAMES,
    SchemaError,
    experiment_directory,
    find_experiment_dirs,
    load,
    run,
    validate_directory,
)

_SPACE_ALIASES = {"EFID": "EF_ID", "EFHC": "EF_HC"}


def _space_name(value: str) -> str:
    name = value.upper().replace("-", "_")
    name = _SPACE_ALIASES.get(name, name)
    if name not in SPACE_NAMES:
        raise argparse.ArgumentTypeError(
            f"unknown space {value!r}; options: {', '.join(SPACE_NAMES)} (EFID/EFHC accepted)"
        )
    return name


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gemelites",
        description="Behaviour-space illumination for Splendor-like games.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a search experiment")
    p.add_argument("--game", required=True, choices=GAME_NAMES)
    p.add_argument("--space", required=True, type=_space_name)
    p.add_argument("--opponent", required=True, choices=OPPONENT_NAMES)
    p.add_argument("--evals", type=int, default=10000, help="total evaluations (incl. boot)")
    p.add_argument("--boot", type=int, default=2000, help="boot-phase evaluations")
    p.add_argument("--games", type=int, default=100, help="games per evaluation")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="data root; run lands in [GAME]/vs [OPP]/[SPACE]")
    p.add_argument("--budget", type=int, default=1000, help="forward-model calls per decision")
    p.add_argument("--batch", type=int, default=16, help="evaluations per archive update batch")
    p.add_argument("--checkpoint", type=int, default=0, help="persist every N evaluations")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("analyze", help="write analysis CSVs for experiments")
    p.add_argument("--in", dest="input", required=True, help="experiment dir or data root")
    p.add_argument("--out", required=True, help="analysis output root")

    p = sub.add_parser("compare", help="compare two experiments")
    p.add_argument("--a", dest="dir_a", required=True)
    p.add_argument("--b", dest="dir_b", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("gen-decks", help="generate a game-spec directory")
    p.add_argument("--game", choices=sorted(PRESET_PARAMS), help="use a preset's parameters")
    p.add_argument("--params", help="parameters JSON file (alternative to --game)")
    p.add_argument("--variant", choices=GENERATOR_VARIANTS, default="default")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="validate persisted experiment directories")
    p.add_argument("directory")
    return parser


def _cmd_run(args) -> int:
    config = ExperimentConfig(
        game=args.game,
        space=args.space,
        opponent=args.opponent,
        n_boot=args.boot,
        n_budget=args.evals,
        games_per_eval=args.games,
        workers=args.workers,
        master_seed=args.seed,
        output_dir="",
        budget=args.budget,
        batch_size=args.batch,
        checkpoint_every=args.checkpoint,
    )
    out_dir = experiment_directory(args.out, config)
    config = replace(config, output_dir=str(out_dir))
    progress = None
    if not args.quiet:
        def progress(done, total):
            print(f"\r{done}/{total} evaluations", end="", file=sys.stderr, flush=True)
    record = run(config, progress=progress)
    if not args.quiet:
        print(file=sys.stderr)
    print(
        f"{out_dir}: {record.archive.filled} cells filled, "
        f"best fitness {record.archive.best_fitness():.3f}, "
        f"wall {record.wall_seconds:.1f}s"
    )
    return 0


def _analysis_dir(out_root: str, record) -> Path:
    cfg = record.config
    return Path(out_root) / cfg.game / f"{cfg.opponent} opponent" / cfg.space


def _cmd_analyze(args) -> int:
    dirs = find_experiment_dirs(args.input)
    if not dirs:
        print(f"no experiments found under {args.input}", file=sys.stderr)
        return 1
    for directory in dirs:
        record = load(directory)
        out_dir = _analysis_dir(args.out, record)
        written = analyze_experiment(record, out_dir)
        print(f"{directory} -> {out_dir} ({len(written)} files)")
    return 0


def _cmd_compare(args) -> int:
    record_a = load(args.dir_a)
    record_b = load(args.dir_b)
    cfg = record_a.config
    out_dir = (
        Path(args.out)
        / cfg.game
        / f"{cfg.opponent} opponent"
        / f"{cfg.space} vs {record_b.config.space}"
    )
    written = compare_experiments(record_a, record_b, out_dir)
    print(f"{out_dir}: {len(written)} files")
    return 0


def _cmd_gen_decks(args) -> int:
    if bool(args.game) == bool(args.params):
        print("gen-decks needs exactly one of --game or --params", file=sys.stderr)
        return 2
    if args.game:
        params = PRESET_PARAMS[args.game]()
    else:
        params = load_params(args.params)
    spec = GameSpec.generated(args.variant, params, args.seed)
    spec.save_directory(args.out)
    n_cards = sum(len(d) for d in spec.decks)
    print(f"{args.out}: {params.decks} decks ({n_cards} cards), {len(spec.nobles)} nobles")
    return 0


def _cmd_validate(args) -> int:
    dirs = find_experiment_dirs(args.directory)
    if not dirs:
        print(f"no experiments found under {args.directory}", file=sys.stderr)
        return 1
    problems = []
    for directory in dirs:
        problems.extend(validate_directory(directory))
    for problem in problems:
        print(problem, file=sys.stderr)
    if problems:
        return 1
    print(f"{len(dirs)} experiment director{'y' if len(dirs) == 1 else 'ies'} valid")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "analyze": _cmd_analyze,
        "compare": _cmd_compare,
        "gen-decks": _cmd_gen_decks,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

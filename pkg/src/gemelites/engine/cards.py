"""Cards, nobles, seeded deck generation and CSV serialization.

The commercial card list is not bundled; decks come from a seeded
procedural generator (or from CSV files in the documented format), and a
generator seed pinned in an experiment config reproduces the exact decks.

CSV formats:
  deck file   header: suit,points,cost_0..cost_{nTT-1}   one card per row
  noble file  header: points,cost_0..cost_{nTT-1}        one noble per row
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from ..rng import Rng, derive_seed
from .params import GameParams


class DeckFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Card:
    suit: int
    cost: tuple[int, ...]
    points: int

    def cost_total(self) -> int:
        return sum(self.cost)


@dataclass(frozen=True)
class Noble:
    points: int
    cost: tuple[int, ...]


# Per-deck size schedule; decks beyond the third fall back to 30 cards.
_DECK_SIZES = (40, 30, 20)

# (min_total_cost, max_total_cost, point choices) per tier for the default
# generator; later tiers are pricier and score more.
_DEFAULT_TIERS = (
    (3, 5, (0, 0, 0, 1)),
    (6, 9, (1, 2, 2, 3)),
    (10, 14, (3, 4, 4, 5)),
)


def _deck_size(tier: int) -> int:
    if tier < len(_DECK_SIZES):
        return _DECK_SIZES[tier]
    return 30


def _spread_cost(total: int, n_types: int, max_suits: int, rng: Rng) -> tuple[int, ...]:
    """Split `total` over a random subset of suits, each getting >= 1."""
    n_suits = 1 + rng.below(max_suits)
    n_suits = min(n_suits, total, n_types)
    suits = list(range(n_types))
    rng.shuffle(suits)
    chosen = sorted(suits[:n_suits])
    cost = [0] * n_types
    for s in chosen:
        cost[s] = 1
    for _ in range(total - n_suits):
        cost[chosen[rng.below(n_suits)]] += 1
    return tuple(cost)


def _default_card(tier: int, params: GameParams, rng: Rng) -> Card:
    lo, hi, point_choices = _DEFAULT_TIERS[min(tier, len(_DEFAULT_TIERS) - 1)]
    total = lo + rng.below(hi - lo + 1)
    cost = _spread_cost(total, params.token_types, min(4, params.token_types), rng)
    points = point_choices[rng.below(len(point_choices))]
    return Card(suit=rng.below(params.token_types), cost=cost, points=points)


def _one_card_card(tier: int, params: GameParams, rng: Rng) -> Card:
    if tier == params.decks - 1:
        # The decisive deck: every card is worth the full winning score.
        n_types = params.token_types
        cost = [0] * n_types
        suits = list(range(n_types))
        rng.shuffle(suits)
        for s in suits[: min(3, n_types)]:
            cost[s] = 5 + rng.below(3)
        return Card(suit=rng.below(n_types), cost=tuple(cost), points=params.end_points)
    lo, hi = (2, 4) if tier == 0 else (5, 8)
    total = lo + rng.below(hi - lo + 1)
    cost = _spread_cost(total, params.token_types, min(4, params.token_types), rng)
    points = 1 if rng.below(100) < 15 else 0
    return Card(suit=rng.below(params.token_types), cost=cost, points=points)


def _generate_nobles(params: GameParams, rng: Rng) -> list[Noble]:
    count = max(2 * (params.players + params.extra_nobles), 10)
    nobles = []
    for _ in range(count):
        n_types = params.token_types
        n_suits = min(2 + rng.below(2), n_types)
        need = 4 if n_suits == 2 else 3
        suits = list(range(n_types))
        rng.shuffle(suits)
        cost = [0] * n_types
        for s in suits[:n_suits]:
            cost[s] = need
        nobles.append(Noble(points=3, cost=tuple(cost)))
    return nobles


GENERATOR_VARIANTS = ("default", "1C2W")


def generate_decks(
    variant: str, params: GameParams, seed: int
) -> tuple[list[list[Card]], list[Noble]]:
    """Seeded procedural decks and nobles for the given rule set."""
    if variant not in GENERATOR_VARIANTS:
        raise DeckFormatError(f"unknown generator variant {variant!r}")
    make = _one_card_card if variant == "1C2W" else _default_card
    decks = []
    for tier in range(params.decks):
        rng = Rng(derive_seed(seed, 0xDECC, tier))
        decks.append([make(tier, params, rng) for _ in range(_deck_size(tier))])
    nobles = _generate_nobles(params, Rng(derive_seed(seed, 0x0B1E)))
    return decks, nobles


def save_deck_csv(cards: list[Card], path: str | Path, n_types: int) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suit", "points"] + [f"cost_{i}" for i in range(n_types)])
        for card in cards:
            writer.writerow([card.suit, card.points] + list(card.cost))


def load_deck_csv(path: str | Path, n_types: int) -> list[Card]:
    cards = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["suit", "points"] + [f"cost_{i}" for i in range(n_types)]
        if header != expected:
            raise DeckFormatError(f"{path}: bad header {header!r}, expected {expected!r}")
        for row in reader:
            if not row:
                continue
            values = [int(v) for v in row]
            suit, points, cost = values[0], values[1], tuple(values[2:])
            if not 0 <= suit < n_types:
                raise DeckFormatError(f"{path}: suit {suit} out of range")
            if points < 0 or any(c < 0 for c in cost):
                raise DeckFormatError(f"{path}: negative points or cost")
            cards.append(Card(suit=suit, cost=cost, points=points))
    return cards


def save_nobles_csv(nobles: list[Noble], path: str | Path, n_types: int) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["points"] + [f"cost_{i}" for i in range(n_types)])
        for noble in nobles:
            writer.writerow([noble.points] + list(noble.cost))


def load_nobles_csv(path: str | Path, n_types: int) -> list[Noble]:
    nobles = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["points"] + [f"cost_{i}" for i in range(n_types)]
        if header != expected:
            raise DeckFormatError(f"{path}: bad header {header!r}, expected {expected!r}")
        for row in reader:
            if not row:
                continue
            values = [int(v) for v in row]
            if values[0] < 0 or any(c < 0 for c in values[1:]):
                raise DeckFormatError(f"{path}: negative points or cost")
            nobles.append(Noble(points=values[0], cost=tuple(values[1:])))
    return nobles


def save_game_assets(
    decks: list[list[Card]], nobles: list[Noble], directory: str | Path, n_types: int
) -> None:
    """Write the on-disk layout: decks/1.csv..D.csv and nobles/nobles.csv."""
    directory = Path(directory)
    (directory / "decks").mkdir(parents=True, exist_ok=True)
    (directory / "nobles").mkdir(parents=True, exist_ok=True)
    for i, deck in enumerate(decks, start=1):
        save_deck_csv(deck, directory / "decks" / f"{i}.csv", n_types)
    save_nobles_csv(nobles, directory / "nobles" / "nobles.csv", n_types)


def load_game_assets(
    directory: str | Path, params: GameParams
) -> tuple[list[list[Card]], list[Noble]]:
    directory = Path(directory)
    decks = []
    for i in range(1, params.decks + 1):
        path = directory / "decks" / f"{i}.csv"
        if not path.exists():
            raise DeckFormatError(f"missing deck file {path}")
        decks.append(load_deck_csv(path, params.token_types))
    nobles = load_nobles_csv(directory / "nobles" / "nobles.csv", params.token_types)
    return decks, nobles

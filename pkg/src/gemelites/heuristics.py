"""Value functions that guide the rolling-horizon planner.

Three families:

  PB  point-based: score delta between the start and end of a rollout.
  EF  event-value: counts the events the player triggered during the
      rollout, maps them through an event mapping (identity over all 18
      types, or a hand-crafted grouping into 5 macro-features with
      discards) and takes a linear combination.
  SF  state-value: linear score over the numeric state encoding, as a
      delta between the rollout's end and start states.

Only linear mixing is implemented; weights come from the search, not from
training.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import layout as L
from .engine.backend import core
from .engine.game import Event, GameSpec, GameState

HEURISTIC_KINDS = ("PB", "EF_ID", "EF_HC", "SF")

# Weight grid shared by every linear heuristic: 11 uniform samples of [-1, 1].
WEIGHT_GRID = (-1.0, -0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0)

DISCARD = -1

# Hand-crafted grouping: player token/joker gains (0), hidden reserves (1),
# open reserves (2), noble arrivals (3), scoring (4); everything else
# discarded.
_HC_TABLE = (
    DISCARD,  # noble leaves the table
    DISCARD,  # table token up
    DISCARD,  # table token down
    DISCARD,  # table joker up
    DISCARD,  # table joker down
    DISCARD,  # card drawn from deck
    DISCARD,  # card placed face up
    DISCARD,  # noble placed
    0,        # player token up
    DISCARD,  # player token down
    0,        # player joker up
    DISCARD,  # player joker down
    1,        # reserve hidden
    2,        # reserve face up
    3,        # noble received
    DISCARD,  # card bought
    4,        # points from card
    4,        # points from noble
)


class MappingError(ValueError):
    pass


@dataclass(frozen=True)
class EventMapping:
    name: str
    table: tuple[int, ...]
    feature_count: int

    def __post_init__(self):
        if len(self.table) != L.N_EVENT_TYPES:
            raise MappingError(
                f"mapping must cover all {L.N_EVENT_TYPES} event types, got {len(self.table)}"
            )
        for t, f in enumerate(self.table):
            if f != DISCARD and not 0 <= f < self.feature_count:
                raise MappingError(f"type {t} maps to {f}, outside [0, {self.feature_count})")

    def as_array(self) -> np.ndarray:
        return np.array(self.table, dtype=np.int32)


def id_mapping() -> EventMapping:
    return EventMapping("id", tuple(range(L.N_EVENT_TYPES)), L.N_EVENT_TYPES)


def hc_mapping() -> EventMapping:
    return EventMapping("hc", _HC_TABLE, 5)


def load_event_mapping(path: str | Path, name: str | None = None) -> EventMapping:
    """Load a mapping from JSON: {"0": -1, "1": 0, ...} over all 18 types."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise MappingError(f"{path}: expected an object of type_id -> feature index")
    table = [None] * L.N_EVENT_TYPES
    for key, value in data.items():
        t = int(key)
        if not 0 <= t < L.N_EVENT_TYPES:
            raise MappingError(f"{path}: type id {t} out of range")
        table[t] = int(value)
    missing = [t for t, f in enumerate(table) if f is None]
    if missing:
        raise MappingError(f"{path}: missing type ids {missing}")
    features = [f for f in table if f != DISCARD]
    count = max(features) + 1 if features else 0
    return EventMapping(name or Path(path).stem, tuple(table), count)


def save_event_mapping(mapping: EventMapping, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps({str(t): f for t, f in enumerate(mapping.table)}, indent=2) + "\n"
    )


@dataclass(frozen=True)
class HeuristicSpec:
    kind: str
    mapping: EventMapping | None = None
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in HEURISTIC_KINDS:
            raise ValueError(f"unknown heuristic kind {self.kind!r}")
        if self.kind == "PB":
            if self.weights is not None or self.mapping is not None:
                raise ValueError("PB carries no weights or mapping")
        elif self.kind in ("EF_ID", "EF_HC"):
            if self.mapping is None or self.weights is None:
                raise ValueError(f"{self.kind} needs a mapping and weights")
            if len(self.weights) != self.mapping.feature_count:
                raise ValueError(
                    f"{self.kind} needs {self.mapping.feature_count} weights, "
                    f"got {len(self.weights)}"
                )
        elif self.weights is None:
            raise ValueError("SF needs weights sized to the state encoding")


def make_heuristic(kind: str, weights=None, encoding_length: int | None = None) -> HeuristicSpec:
    if kind == "PB":
        return HeuristicSpec("PB")
    if kind == "EF_ID":
        return HeuristicSpec("EF_ID", id_mapping(), tuple(weights))
    if kind == "EF_HC":
        return HeuristicSpec("EF_HC", hc_mapping(), tuple(weights))
    if kind == "SF":
        weights = tuple(weights)
        if encoding_length is not None and len(weights) != encoding_length:
            raise ValueError(f"SF needs {encoding_length} weights, got {len(weights)}")
        return HeuristicSpec("SF", None, weights)
    raise ValueError(f"unknown heuristic kind {kind!r}")


def feature_count(kind: str, encoding_length: int) -> int:
    """Number of weight dimensions a heuristic contributes to the genome."""
    if kind == "PB":
        return 0
    if kind == "EF_ID":
        return L.N_EVENT_TYPES
    if kind == "EF_HC":
        return 5
    if kind == "SF":
        return encoding_length
    raise ValueError(f"unknown heuristic kind {kind!r}")


# ------------------------------------------------------- reference ops


def pb_value(start: GameState, end: GameState, player: int) -> float:
    return float(end.points(player) - start.points(player))


def ef_features(events: list[Event], player: int, mapping: EventMapping) -> np.ndarray:
    """Count the player's events per mapped feature.

    Engine-triggered noble scoring credits its beneficiary; discarded types
    contribute nothing.
    """
    counts = np.zeros(mapping.feature_count, dtype=np.int64)
    for ev in events:
        if not 0 <= ev.type_id < L.N_EVENT_TYPES:
            raise MappingError(f"unknown event type id {ev.type_id}")
        credited = ev.who == player or (
            ev.type_id == L.EV_POINTS_FROM_NOBLE and ev.who == L.ENGINE and ev.a == player
        )
        if not credited:
            continue
        f = mapping.table[ev.type_id]
        if f != DISCARD:
            counts[f] += 1
    return counts


def ef_value(features: np.ndarray, weights) -> float:
    weights = np.asarray(weights, dtype=np.float64)
    if len(features) != len(weights):
        raise ValueError(f"length mismatch: {len(features)} features vs {len(weights)} weights")
    return float(np.dot(np.asarray(features, dtype=np.float64), weights))


def encode_state(state: GameState, player: int) -> np.ndarray:
    out = np.zeros(state.spec.encoding_length, dtype=np.float64)
    n = core.encode_state(state.buf, state.spec.ctx, state.spec.off, player, out)
    assert n == len(out)
    return out


def sf_value(start: GameState, end: GameState, player: int, weights) -> float:
    weights = np.asarray(weights, dtype=np.float64)
    n = start.spec.encoding_length
    if len(weights) != n:
        raise ValueError(f"SF needs {n} weights, got {len(weights)}")
    e0 = np.zeros(n, dtype=np.float64)
    e1 = np.zeros(n, dtype=np.float64)
    return float(
        core.sf_delta(start.buf, end.buf, start.spec.ctx, start.spec.off, player, weights, e0, e1)
    )


# ------------------------------------------------------ fast evaluators


class PbEvaluator:
    kind = "PB"

    def __init__(self, spec: GameSpec):
        self._points_off = int(spec.off[L.O_PL]), int(spec.off[L.O_PS]), int(
            spec.off[L.O_R_POINTS]
        )

    def evaluate(self, start_buf, end_buf, eb, lo, hi, player: int) -> float:
        base, stride, rel = self._points_off
        idx = base + player * stride + rel
        return float(int(end_buf[idx]) - int(start_buf[idx]))


class EfEvaluator:
    def __init__(self, spec: GameSpec, mapping: EventMapping, weights):
        self.kind = "EF_" + mapping.name.upper()
        self._map = mapping.as_array()
        self._w = np.asarray(weights, dtype=np.float64)
        if len(self._w) != mapping.feature_count:
            raise ValueError("weights do not match the mapping's feature count")

    def evaluate(self, start_buf, end_buf, eb, lo, hi, player: int) -> float:
        return float(core.ef_accumulate(eb, lo, hi, player, self._map, self._w))


class SfEvaluator:
    kind = "SF"

    def __init__(self, spec: GameSpec, weights):
        n = spec.encoding_length
        self._w = np.asarray(weights, dtype=np.float64)
        if len(self._w) != n:
            raise ValueError(f"SF needs {n} weights, got {len(self._w)}")
        self._ctx = spec.ctx
        self._off = spec.off
        self._e0 = np.zeros(n, dtype=np.float64)
        self._e1 = np.zeros(n, dtype=np.float64)

    def evaluate(self, start_buf, end_buf, eb, lo, hi, player: int) -> float:
        return float(
            core.sf_delta(start_buf, end_buf, self._ctx, self._off, player, self._w, self._e0, self._e1)
        )


def make_evaluator(spec: GameSpec, hspec: HeuristicSpec):
    if hspec.kind == "PB":
        return PbEvaluator(spec)
    if hspec.kind in ("EF_ID", "EF_HC"):
        return EfEvaluator(spec, hspec.mapping, hspec.weights)
    return SfEvaluator(spec, hspec.weights)

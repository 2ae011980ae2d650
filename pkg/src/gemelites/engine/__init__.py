"""Parametric Splendor-like game engine with a copyable forward model."""

from .backend import BACKEND, available_cores, core, get_core
from .cards import Card, DeckFormatError, Noble, generate_decks
from .game import (
    ACTION_KINDS,
    ENGINE,
    EVENT_NAMES,
    Action,
    Event,
    GameSpec,
    GameState,
    IllegalActionError,
    NotTerminalError,
    apply,
    is_legal,
    is_terminal,
    new_game,
    random_playout,
    result,
    sample_action,
)
from .layout import Layout, encoding_length
from .params import GameParams, ParamsError, load_params, save_params

__all__ = [
    "ACTION_KINDS",
    "BACKEND",
    "ENGINE",
    "EVENT_NAMES",
    "Action",
    "Card",
    "DeckFormatError",
    "Event",
    "GameParams",
    "GameSpec",
    "GameState",
    "IllegalActionError",
    "Layout",
    "Noble",
    "NotTerminalError",
    "ParamsError",
    "apply",
    "available_cores",
    "core",
    "encoding_length",
    "generate_decks",
    "get_core",
    "is_legal",
    "is_terminal",
    "load_params",
    "new_game",
    "random_playout",
    "result",
    "sample_action",
    "save_params",
]

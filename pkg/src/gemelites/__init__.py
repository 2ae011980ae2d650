"""gemelites: behaviour-space illumination for Splendor-like games.

A parametric game engine with a copyable forward model, rolling-horizon
planning agents driven by point-, event- or state-value heuristics, a
MAP-Elites search over the agents' hyperparameter space, and analysis
exports for the resulting behaviour archives.
"""

__version__ = "0.1.0"

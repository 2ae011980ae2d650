"""Engine core selection.

The compiled extension is preferred when importable; the pure-Python twin
is the fallback. Set GEMELITES_PURE_CORE=1 to force the pure core (used by
the benchmark and the equivalence tests).
"""

from __future__ import annotations

import os

from . import _pycore


def _want_pure() -> bool:
    return os.environ.get("GEMELITES_PURE_CORE", "").strip().lower() in ("1", "true", "yes")


if _want_pure():
    core = _pycore
    BACKEND = "pure"
else:
    try:
        from . import _ccore  # type: ignore[attr-defined]

        core = _ccore
        BACKEND = "compiled"
    except ImportError:
        core = _pycore
        BACKEND = "pure"


def get_core(name: str):
    """Explicit core lookup for benchmarks and twin tests."""
    if name == "pure":
        return _pycore
    if name == "compiled":
        from . import _ccore  # type: ignore[attr-defined]

        return _ccore
    raise ValueError(f"unknown core {name!r}")


def available_cores() -> list[str]:
    names = ["pure"]
    try:
        from . import _ccore  # type: ignore[attr-defined]  # noqa: F401

        names.append("compiled")
    except ImportError:
        pass
    return names

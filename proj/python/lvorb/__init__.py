from ._core import (
    LvorbError,
    analyze,
    anomaly,
    bounds,
    load_lattice,
    module_characters,
    orbifold,
    snf,
    twining,
)

__all__ = [
    "LvorbError",
    "analyze",
    "anomaly",
    "bounds",
    "load_lattice",
    "module_characters",
    "orbifold",
    "snf",
    "twining",
]

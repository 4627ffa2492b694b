"""Iterated Stieltjes and half-axis Hilbert transforms through Mellin calculus.

Submodules load on first attribute access so that importing the package
stays cheap (the command-line tool sets thread limits before numpy loads).
"""

import importlib

__version__ = "0.1.0"

_SUBMODULES = ("numerics", "special", "mellin", "catalog", "transforms", "convolution",
               "inversion", "sie", "verification", "report", "errors", "cli")

__all__ = list(_SUBMODULES)


def __getattr__(name):
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

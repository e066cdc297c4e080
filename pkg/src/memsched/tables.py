"""Constraint tables shipped with the package."""

from __future__ import annotations

from importlib.resources import files

from .formats import parse_constraint_file
from .rulegen import ConstraintDef

BUNDLED = ("kleene_eq3", "and2")


def bundled_text(name: str) -> str:
    if name not in BUNDLED:
        raise KeyError(f"no bundled table {name!r}; available: {', '.join(BUNDLED)}")
    return files("memsched.data").joinpath(f"{name}.con").read_text(encoding="utf-8")


def load_bundled(name: str) -> ConstraintDef:
    return parse_constraint_file(bundled_text(name))


def kleene_equivalence() -> ConstraintDef:
    """``eq3(X, Y, Z)``: Z is the Kleene equivalence of X and Y over t, f, u."""
    return load_bundled("kleene_eq3")

"""Paths to the bundled toy dataset."""

from importlib import resources


def toy_paths() -> tuple[str, str]:
    base = resources.files("vcnet") / "data"
    return str(base / "toy_investments.csv"), str(base / "toy_exits.csv")

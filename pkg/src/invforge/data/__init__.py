"""Shipped fixtures: wiring, reference function and invariant files."""

from importlib import resources


def fixture_path(name: str) -> str:
    """Filesystem path of a shipped data file."""
    return str(resources.files(__package__).joinpath(name))


def fixture_text(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")

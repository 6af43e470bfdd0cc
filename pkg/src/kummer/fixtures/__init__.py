"""Built-in congruence scenes shipped as ``.cong`` files."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

FIXTURES = ("example41", "parabolic", "example43", "sphere", "skew", "helicoid")


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return resources.files(__package__).joinpath(f"{name}.cong").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def load_fixture(name: str):
    from ..parser import parse_scene

    return parse_scene(fixture_text(name))

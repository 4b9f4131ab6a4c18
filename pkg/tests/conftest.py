import random

import pytest

from sammrc.generator import GenerationConfig, generate_set, load_resources
from sammrc.types import Event, PlayerRef


def player(index, given, family):
    return PlayerRef(index=index, given=given, family=family)


@pytest.fixture(scope="session")
def resources():
    return load_resources("full")


@pytest.fixture(scope="session")
def small_set(tmp_path_factory):
    """A 40-triple generated set written to disk, shared across tests."""
    from pathlib import Path

    from sammrc.generator import load_challenge, write_set

    out = tmp_path_factory.mktemp("set") / "c"
    triples = generate_set(GenerationConfig(seed=11, size=40))
    write_set(triples, Path(out))
    return load_challenge(Path(out))


@pytest.fixture
def rng():
    return random.Random(123)


def make_goal(i, actor, time, distance, coactor=None, modified=False, sam=()):
    return Event(
        id=i,
        kind="goal",
        actor=actor,
        coactor=coactor,
        time=time,
        distance=distance,
        modified=modified,
        sam=tuple(sam),
    )

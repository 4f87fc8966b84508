import json
from pathlib import Path

import pytest
from hypothesis import settings

from kih.entropy import Entropy
from kih.kihprf import Seed, sample_instance
from kih.modmath import ModMatrix
from kih.presets import get_preset

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

GOLDEN = json.loads((Path(__file__).parent / "golden.json").read_text())


@pytest.fixture(scope="session")
def golden():
    return GOLDEN


@pytest.fixture(scope="session")
def toy():
    return get_preset("TOY")


@pytest.fixture(scope="session")
def desk():
    return get_preset("DESK")


@pytest.fixture(scope="session")
def toy_inst(toy):
    """The pinned instance every golden vector refers to."""
    return sample_instance(toy, Entropy(b"golden/instance"))


@pytest.fixture(scope="session")
def golden_seeds(toy):
    q = toy.q
    return Seed(ModMatrix(GOLDEN["seeds"]["S1"], q)), Seed(ModMatrix(GOLDEN["seeds"]["S2"], q))


@pytest.fixture
def entropy(request):
    return Entropy(request.node.name.encode())


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])

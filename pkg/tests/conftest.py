import random
import sys

import pytest
from gmpy2 import mpc

from quintsext.core.numbers import DEFAULT_CONFIG
from quintsext.icosahedron import build_icosahedral_context
from quintsext.valentiner.group import build_valentiner_context


@pytest.fixture(scope="session")
def ico():
    return build_icosahedral_context()


@pytest.fixture(scope="session")
def val():
    return build_valentiner_context()


@pytest.fixture(autouse=True)
def _precision():
    # every test runs at the default working precision unless it asks otherwise
    with DEFAULT_CONFIG.context():
        yield


def random_roots(rng: random.Random, n: int, scale: float = 2.0) -> list:
    return [mpc(rng.uniform(-scale, scale), rng.uniform(-scale, scale)) for _ in range(n)]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(verdicts):
            terminalreporter.write_line(line)

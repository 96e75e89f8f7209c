from pathlib import Path

import numpy as np
import pytest

from sinir.io import load_png

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def chelsea():
    return load_png(DATA / "chelsea_128x192.png")


@pytest.fixture(scope="session")
def coffee():
    return load_png(DATA / "coffee_256x384.png")


@pytest.fixture(scope="session")
def astronaut():
    return load_png(DATA / "astronaut_256.png")


@pytest.fixture
def nprng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.VERDICTS):
            terminalreporter.write_line(line)

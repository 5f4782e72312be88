from importlib import resources

import pytest

from unaware.model import load_game
from unaware.normal_form import GeneralizedNormalForm

VALID_FIXTURES = ("g1", "g2", "chain3", "centipede", "offpath_tie", "pennies", "counterexample")


def game_path(name: str) -> str:
    return str(resources.files("unaware") / "games" / f"{name}.json")


def load(name: str):
    return load_game(game_path(name))


@pytest.fixture(scope="session")
def g2():
    return load("g2")


@pytest.fixture(scope="session")
def g2_gnf(g2):
    return GeneralizedNormalForm(g2)


@pytest.fixture(scope="session")
def chain():
    return load("chain3")


_ACCEPTANCE: list = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)

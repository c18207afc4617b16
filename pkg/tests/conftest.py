import pathlib

import pytest

from arraywitness import parse

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> pathlib.Path:
    return FIXTURES / name


def load_fixture(name: str):
    return parse(fixture_path(name).read_text())


@pytest.fixture
def fig1():
    return load_fixture("fig1.c")


@pytest.fixture
def fig1_small():
    return load_fixture("fig1_small.c")


@pytest.fixture
def fig5():
    return load_fixture("fig5.c")


@pytest.fixture
def fig5_small():
    return load_fixture("fig5_small.c")


@pytest.fixture
def fig7():
    return load_fixture("fig7.c")


@pytest.fixture
def fig7_small():
    return load_fixture("fig7_small.c")

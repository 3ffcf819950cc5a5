import pytest

from helpers import fixture_corpus, fixture_table


@pytest.fixture
def corpus():
    return fixture_corpus()


@pytest.fixture
def table():
    return fixture_table()

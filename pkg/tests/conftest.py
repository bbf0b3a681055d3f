import pytest

from tests.corpus import corpus_group


@pytest.fixture(scope="session")
def group():
    """group("d8") -> the resolved corpus table (built once per session)."""
    return corpus_group


@pytest.fixture
def d8():
    return corpus_group("d8")

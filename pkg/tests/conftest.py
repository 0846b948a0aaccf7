import pytest

from taskdec.fixtures import load
from taskdec.scenario import Scenario


@pytest.fixture
def scn():
    """Loader for the bundled fixture scenarios."""

    def _load(name: str) -> Scenario:
        return load(name)

    return _load

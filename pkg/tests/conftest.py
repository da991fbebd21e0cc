import pytest

import gaitfuzz


@pytest.fixture(scope="session")
def default_set():
    return gaitfuzz.default_controllers()


@pytest.fixture(scope="session")
def default_text():
    return gaitfuzz.default_controller_text()

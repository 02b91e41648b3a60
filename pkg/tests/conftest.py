import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sealoss import load_campaign


@pytest.fixture(scope="session")
def campaign1():
    return load_campaign("campaign1")


@pytest.fixture(scope="session")
def campaign2():
    return load_campaign("campaign2")

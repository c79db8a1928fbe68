import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gcsym.corpus import demo_case, demo_names
from gcsym.oracle import SamplePlan


@pytest.fixture(scope="session")
def plan():
    return SamplePlan()


@pytest.fixture(scope="session")
def corpus():
    return [demo_case(name) for name in demo_names()]

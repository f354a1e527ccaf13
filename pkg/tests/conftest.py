import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
sys.path.insert(0, str(Path(__file__).resolve().parent))

from shopbound.instance import find_instance, load_instance  # noqa: E402


def instance_or_skip(name: str, dataset: str | None = None):
    path = find_instance(name, dataset=dataset)
    if path is None:
        pytest.skip(f"instance file {name} not available; set SHOPBOUND_INSTANCES")
    return load_instance(path)


@pytest.fixture
def fixtures_dir():
    return FIXTURES

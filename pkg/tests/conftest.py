import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from invgen.catalog import resolve  # noqa: E402

_GROUPS = {}


def get_group(name):
    # resolved groups are cached so the expensive tables are shared across tests
    if name not in _GROUPS:
        _GROUPS[name] = resolve(name)
    return _GROUPS[name]


@pytest.fixture
def group():
    return get_group

import pytest

from msdweak.codes import builtin
from msdweak.distill import build_map

_MAP_CACHE = {}


@pytest.fixture(scope="session")
def maps():
    """Compiled maps for the built-in codes, built once per session."""
    def get(name):
        if name not in _MAP_CACHE:
            _MAP_CACHE[name] = build_map(builtin(name))
        return _MAP_CACHE[name]
    return get

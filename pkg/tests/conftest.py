import json
import pathlib

import pytest

_DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def reference():
    """Frozen oracle values; see tests/data/make_reference.py for provenance."""
    with open(_DATA / "reference.json", encoding="utf-8") as handle:
        return json.load(handle)

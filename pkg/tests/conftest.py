import sys
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

# session-scoped synthetic corpora are expensive; build once and share
sys.dont_write_bytecode = True


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def kitchen_reviews() -> Path:
    return DATA / "kitchen_reviews.jsonl"


@pytest.fixture(scope="session")
def kitchen_meta() -> Path:
    return DATA / "kitchen_meta.jsonl"


@pytest.fixture(scope="session")
def reference_table() -> list[dict]:
    """Frozen per-domain results of the full-scale 28-domain Amazon run."""
    import csv

    with open(DATA / "fullscale_reference.csv", newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))

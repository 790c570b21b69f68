import sys
from collections import Counter
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))  # for `oracle`

from jobspan import build_index
from jobspan.normalize import normalize

# Micro-corpus used throughout: 12 instances over 6 distinct titles.
CSTAR_RAW = [
    ("hr manager", 4),
    ("senior hr manager", 2),
    ("hr manager london", 1),
    ("senior hr manager at acme", 1),
    ("neurologist", 3),
    ("manager", 1),
]


@pytest.fixture(scope="session")
def cstar_counts():
    counts = Counter()
    for raw, n in CSTAR_RAW:
        counts[normalize(raw)] += n
    return counts


@pytest.fixture(scope="session")
def cstar_index(cstar_counts):
    return build_index(cstar_counts)


@pytest.fixture(scope="session")
def data_dir():
    return Path(__file__).resolve().parent / "data"

import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from adjoint_invariants.classical_lie import build_algebra  # noqa: E402

ALL_SPECS = ["A_1", "A_2", "A_3", "B_2", "B_3", "C_2", "C_3", "D_3", "D_4"]


@lru_cache(maxsize=None)
def algebra(label):
    return build_algebra(label)


@pytest.fixture(scope="session")
def get_alg():
    return algebra

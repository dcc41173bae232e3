import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from adaprep.corpus import CorpusSpec, generate  # noqa: E402
from adaprep.imgcore import Image  # noqa: E402


@pytest.fixture(scope="session")
def corpus():
    return generate(CorpusSpec(seed=42))


@pytest.fixture(scope="session")
def small_corpus():
    return generate(CorpusSpec(seed=7, count_low=3, count_medium=3, count_high=3))


def gray(arr) -> Image:
    return Image(np.asarray(arr, dtype=np.uint8))


def blank(w, h, value=255) -> Image:
    return Image(np.full((h, w), value, dtype=np.uint8))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)

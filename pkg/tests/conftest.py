import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from salsi.saliency import compute_saliency  # noqa: E402
from salsi.synth import DomeSpec, generate  # noqa: E402


@pytest.fixture(scope="session")
def default_case():
    return generate(DomeSpec())


@pytest.fixture(scope="session")
def default_saliency(default_case):
    return compute_saliency(default_case.volume)


@pytest.fixture
def rng():
    return np.random.default_rng(20160319)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

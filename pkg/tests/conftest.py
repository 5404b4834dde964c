import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from eehc_lab import ClusterConfig, RadioParams  # noqa: E402


@pytest.fixture
def radio():
    return RadioParams()


@pytest.fixture
def scenario():
    return ClusterConfig(n=1000, k=14, m=6, l=2000, n_frames=10000, d_bs=150, d_intra=25,
                         field_side=100)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)

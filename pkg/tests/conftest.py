import numpy as np
import pytest

from npdyn import _backend, _fallback, nambu, vortex

BACKENDS = ["python"] + (["cython"] if _backend.BACKEND == "cython" else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per available kernel backend."""
    if request.param == "python":
        mod = _fallback
    else:
        from npdyn import _kernels as mod
    monkeypatch.setattr(vortex, "kernels", mod)
    monkeypatch.setattr(nambu, "kernels", mod)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

import pytest

from bellscan import _backend

ACCEPTANCE_LINES = []


@pytest.fixture(params=sorted(_backend.available_backends()))
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    module = _backend.available_backends()[request.param]
    monkeypatch.setattr(_backend, "kernels", module)
    return module


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import pytest
from hypothesis import settings

from primedelta import _backend

settings.register_profile("repo", deadline=None, max_examples=50, derandomize=True)
settings.load_profile("repo")

BACKENDS = ["numba", "numpy"] if _backend.HAVE_NUMBA else ["numpy"]


@pytest.fixture(params=BACKENDS)
def backend(request):
    previous = _backend.backend_name()
    _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(previous)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

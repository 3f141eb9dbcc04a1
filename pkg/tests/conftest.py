import numpy as np
import pytest

from drivenbs import _backend, _fallback

BACKENDS = [pytest.param(_fallback, id="python")]
if _backend.NAME == "cython":
    BACKENDS.append(pytest.param(_backend.kernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


def random_complex(rng, shape, radius=1.0):
    """Entries uniform in the disc of the given radius."""
    r = radius * np.sqrt(rng.random(shape))
    return r * np.exp(2j * np.pi * rng.random(shape))


ACCEPTANCE_LOG = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LOG:
        terminalreporter.write_line(line)

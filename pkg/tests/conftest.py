import numpy as np
import pytest

from floquet_coe.models import DriveEnvelope, build_ising


@pytest.fixture(scope="session")
def drive_env():
    return DriveEnvelope(8.0)


@pytest.fixture(scope="session")
def ising6():
    return build_ising(6, W=1.0, J=1.0, F=2.5, disorder_seed=11)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_acceptance_key = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_acceptance_key] = []


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Record one ``PASS``/``FAIL`` line per acceptance criterion, echoed in the terminal summary."""
    lines = request.config.stash[_acceptance_key]

    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_acceptance_key, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

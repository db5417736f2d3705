import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from felldeform.models import build_heisenberg, build_lens, build_sphere, build_torus

settings.register_profile(
    "felldeform", deadline=None, max_examples=25, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("felldeform")


@pytest.fixture(scope="session")
def sphere():
    return build_sphere(0.3)


@pytest.fixture(scope="session")
def torus():
    return build_torus(0.3)


@pytest.fixture(scope="session")
def heis():
    return build_heisenberg(1, 0.11, 0.23)


@pytest.fixture(scope="session")
def lens31():
    return build_lens(3, 1, 0.3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria report one line each; the whole-suite budget is enforced at session end
SUITE_BUDGET_S = 300.0
CRITERIA: dict[int, str] = {}
_start = time.perf_counter()


@pytest.fixture
def criterion():
    def record(n: int, passed: bool, detail: str):
        line = f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        CRITERIA[n] = line
        print(line)
        return passed
    return record


def _suite_line(elapsed: float) -> str:
    ok = elapsed <= SUITE_BUDGET_S
    return f"whole-suite runtime {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s): {'PASS' if ok else 'FAIL'}"


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])
    terminalreporter.write_line(_suite_line(time.perf_counter() - _start))


def pytest_sessionfinish(session, exitstatus):
    if CRITERIA and time.perf_counter() - _start > SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1

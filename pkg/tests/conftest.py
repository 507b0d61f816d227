import numpy as np
import pytest

from mclab.model import TangentSpace, make_random_low_rank

_ACCEPTANCE = []


@pytest.fixture
def record_criterion():
    def record(name, passed, detail=""):
        _ACCEPTANCE.append((name, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] {name} {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def instance():
    f = make_random_low_rank(8, 11, 2, "haar", seed=3)
    return f, TangentSpace.from_factorization(f)

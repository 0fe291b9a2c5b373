import pytest

from specbuckle import ball
from specbuckle.spectrum import Kind

# criterion id -> (passed, detail); filled by test_acceptance, printed at the end of the run
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def disc_buckling_small():
    return ball.ball_spectrum(2, Kind.BUCKLING, 1e4 + 1)


@pytest.fixture(scope="session")
def disc_buckling_1e6():
    return ball.ball_spectrum(2, Kind.BUCKLING, 1e6 + 1)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")

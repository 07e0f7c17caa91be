from pathlib import Path

import pytest

from heckeavg.level1 import tau_series

TESTDATA = Path(__file__).resolve().parent.parent / "testdata"

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def testdata() -> Path:
    return TESTDATA


@pytest.fixture(scope="session")
def tau_1e5():
    return tau_series(100_000)


def naive_eta_product(exponents: dict[int, int], shift: int, precision: int) -> list[int]:
    """q^shift * prod_n prod_{d} (1 - q^(d n))^(e_d), by repeated multiplication by binomials.

    Deliberately slow and independent of the fast series code.
    """
    coeffs = [0] * precision
    coeffs[0] = 1
    for d, e in exponents.items():
        for n in range(1, precision):
            step = d * n
            if step >= precision:
                break
            for _ in range(e):
                for i in range(precision - 1, step - 1, -1):
                    coeffs[i] -= coeffs[i - step]
    return [0] * shift + coeffs[: precision - shift]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

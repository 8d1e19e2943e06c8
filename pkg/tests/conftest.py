import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: numbered acceptance criteria")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])


@pytest.fixture(scope="session")
def registry():
    from volterra_hinf.weightlib import registry as reg

    return reg()

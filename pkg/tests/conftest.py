import pytest

from qgpon.scenarios import fig2a, fig3b


@pytest.fixture
def single_feeder():
    """8-user single feeder with 15.5 km feeder and 4.4 km quantum drops."""
    return fig2a().evolve(feeder_km=15.5, drop_km=4.4)


@pytest.fixture
def dual_128():
    return fig3b(128)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)

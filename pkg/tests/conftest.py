import pytest

from pseudohyperovals.appendix import appendix_group, appendix_o
from pseudohyperovals.groups import all_subgroups
from pseudohyperovals.hyperovals import lunelli_sce, reduce_hyperoval, regular_hyperoval


@pytest.fixture(scope="session")
def G():
    return appendix_group()


@pytest.fixture(scope="session")
def O():
    return appendix_o()


@pytest.fixture(scope="session")
def lattice(G):
    return all_subgroups(G)


@pytest.fixture(scope="session")
def pseudo_conic():
    return reduce_hyperoval(regular_hyperoval(2))


@pytest.fixture(scope="session")
def pseudo_ls():
    return reduce_hyperoval(lunelli_sce())


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])

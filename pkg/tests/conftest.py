import pytest

from g2glue.config import load_fixture
from g2glue.orbifold import OrbifoldPresentation

GAMMA = ("alpha", "beta", "gamma")


@pytest.fixture(scope="session")
def cfgs():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_fixture(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def torus(cfgs):
    return cfgs("torus_gamma").presentation()


@pytest.fixture(scope="session")
def ex1(cfgs):
    return cfgs("example1").presentation()


@pytest.fixture(scope="session")
def ex3(cfgs):
    return cfgs("example3").presentation()


@pytest.fixture(scope="session")
def gamma_only(cfgs):
    gens = cfgs("example1").generators
    return OrbifoldPresentation({n: gens[n] for n in GAMMA})


# --- one summary line per acceptance criterion ------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _CRITERIA[n] = ("PASS" if rep.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, title = _CRITERIA[n]
        terminalreporter.write_line(f"{status} criterion {n}: {title}")

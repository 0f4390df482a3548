import pytest

from ccct.graphcore import SocialGraph
from ccct.keychain import MasterKey, Nonce


def blank_graph(nodes, directed=False, loops=False, n_attributes=0):
    g = SocialGraph(directed=directed, loops=loops, n_attributes=n_attributes)
    for v in nodes:
        g.add_node(node_id=v)
    return g


@pytest.fixture
def key():
    return MasterKey(bytes(range(32)))


@pytest.fixture
def nonce():
    return Nonce(bytes(range(100, 164)))


# 36-bit payload from the undirected and directed worked examples
WORKED_PAYLOAD = "110100100011100100101011010011101011"

WORKED_UNDIRECTED_LINKS = {
    (1, 2), (1, 3), (1, 5), (1, 8), (2, 5), (2, 6), (2, 7), (3, 4), (3, 7), (3, 9),
    (4, 6), (4, 7), (4, 9), (5, 8), (5, 9), (6, 7), (6, 9), (7, 9), (8, 9),
}

WORKED_DIRECTED_LINKS = {
    (1, 2), (1, 3), (1, 5), (2, 1), (2, 6), (2, 7), (3, 1), (3, 5), (4, 1), (4, 3),
    (4, 6), (4, 7), (5, 2), (5, 6), (5, 7), (6, 1), (6, 3), (6, 5), (6, 7),
}


# acceptance criteria report: one line per criterion in the terminal summary
_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of an acceptance criterion under the test's docstring title."""
    number = request.node.get_closest_marker("criterion").args[0]
    title = request.node.function.__doc__.strip().splitlines()[0]
    details = []
    yield details.append
    failed = request.node.rep_call.failed if hasattr(request.node, "rep_call") else True
    line = f"criterion {number:>2} {'FAIL' if failed else 'PASS'}  {title}"
    if details:
        line += f"  ({'; '.join(details)})"
    _CRITERIA[number] = line
    print(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])

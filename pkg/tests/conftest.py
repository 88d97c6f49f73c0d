import pytest
from hypothesis import HealthCheck, settings, strategies as st

from cyclecut import Multigraph, apply_script, random_script

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def cycle(n):
    return Multigraph(n, [(i, (i + 1) % n) for i in range(n)])


QUADRUPLE = Multigraph(2, [(0, 1)] * 4)
SINGLE_LOOP = Multigraph(1, [(0, 0)])
DOUBLED_TRIANGLE = Multigraph(3, [(0, 1), (0, 1), (1, 2), (1, 2), (2, 0), (2, 0)])
# square 0-1-2-3 with roof 0-4-1: degrees 3, 3, 2, 2, 2
HOUSE = Multigraph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 1)])
BOWTIE = Multigraph(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
K4 = Multigraph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
DOUBLED_K4 = Multigraph(4, [p for p in K4.endpoints for _ in (0, 1)])


@st.composite
def scripts(draw, max_ears=8, max_subdivisions=12):
    seed = draw(st.integers(0, 2**32 - 1))
    ears = draw(st.integers(0, max_ears))
    subs = draw(st.integers(0, max_subdivisions))
    return random_script(seed, ears, subs)


@st.composite
def decomposable_graphs(draw, max_ears=8, max_subdivisions=12):
    script = draw(scripts(max_ears, max_subdivisions))
    g, c = apply_script(script)
    return g, c


@pytest.fixture
def tmp_graph(tmp_path):
    def write(text, name="g.txt"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)

    return write


# one line per acceptance criterion, echoed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from treeconf.registry import builtin_names, load_group  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GROUP_NAMES = builtin_names()


@pytest.fixture(scope="session")
def grig():
    return load_group("grigorchuk")


@pytest.fixture(scope="session")
def adding():
    return load_group("adding_machine")


@pytest.fixture(scope="session")
def gupta():
    return load_group("gupta_sidki_3")


@pytest.fixture(scope="session")
def basilica():
    return load_group("basilica")


def words(G, max_len=8):
    return st.lists(st.sampled_from(G.labels), max_size=max_len).map(tuple)


@st.composite
def group_and_words(draw, n=1, max_len=8):
    G = load_group(draw(st.sampled_from(GROUP_NAMES)))
    return (G, *[draw(words(G, max_len)) for _ in range(n)])


def vertex_in(tree, max_depth):
    return st.integers(0, max_depth).flatmap(
        lambda n: st.tuples(*[st.integers(0, tree.degree(i) - 1) for i in range(n)])
    )


# criterion number -> (status, description, detail, seconds); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, str, str, float]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, desc, detail, secs = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {desc} ({secs:.2f}s) {detail}".rstrip())

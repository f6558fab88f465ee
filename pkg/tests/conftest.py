import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from facto.fincat import finset, walking_arrow, terminal_category  # noqa: E402
from facto.topos.window import PresheafTopos  # noqa: E402

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def fs3():
    return finset(3)


@pytest.fixture(scope="session")
def fs2():
    return finset(2)


@pytest.fixture(scope="session")
def arrow_topos():
    return PresheafTopos(walking_arrow())


@pytest.fixture(scope="session")
def point_topos():
    return PresheafTopos(terminal_category())


@pytest.fixture(scope="session")
def z2():
    from facto.algebra import cyclic_group, group_action_instance
    return group_action_instance(cyclic_group(2), 4)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {title}")

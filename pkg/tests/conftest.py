import pytest

from qnetcap.channels import Erasure, Lossy
from qnetcap.network import Network


def diamond(channel=Lossy(0.5)):
    return Network.from_edges(
        ["a", "p1", "p2", "b"],
        [("a", "p1", channel), ("a", "p2", channel), ("p1", "p2", channel), ("p1", "b", channel), ("p2", "b", channel)],
    )


def butterfly(channel=Erasure(0.0, 2)):
    # a1=p0, a2=p1, relays p2/p3, b2=p4, b1=p5
    return Network.from_edges(
        ["a1", "a2", "p2", "p3", "b2", "b1"],
        [
            ("a1", "p2", channel),
            ("a1", "b2", channel),
            ("a2", "p2", channel),
            ("a2", "b1", channel),
            ("p2", "p3", channel),
            ("p3", "b2", channel),
            ("p3", "b1", channel),
        ],
    )


@pytest.fixture
def diamond_net():
    return diamond()


@pytest.fixture
def butterfly_net():
    return butterfly()


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

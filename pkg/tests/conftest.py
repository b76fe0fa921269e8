import os

import pytest

from semirandom.process import Config, ProcessState, StopMode

ACCEPTANCE_LINES = []


class ScriptedRng:
    """Returns queued values from randrange, checking each against its range."""

    def __init__(self, *values):
        self.values = list(values)

    def randrange(self, k):
        value = self.values.pop(0)
        assert 0 <= value < k, f"scripted {value} outside range({k})"
        return value


def make_state(n, path=(), pairs=(), stubs=None, cap=3, pairing=True, mode=StopMode.FULL_CYCLE):
    """Hand-built state: `path` in order, `pairs` matched, `stubs` root -> list of ends."""
    s = ProcessState(Config(n=n, cap=cap, pairing_enabled=pairing, stop_mode=mode, epsilon=0.01))
    for a, b in pairs:
        s._drop_isolated(a)
        s._drop_isolated(b)
        s.kind[a] = s.kind[b] = 1  # PAIRED
        s.partner[a], s.partner[b] = b, a
        s.V2 += 2
        s._add_edge(a, b)
    for i, v in enumerate(path):
        s._join_path(v)
        if i:
            s._add_edge(s.tail, v)
        s._append_tail(v)
    for r, ends in (stubs or {}).items():
        for e in ends:
            s._add_stubedge(r, e)
    s.rebalance_labels()
    return s


@pytest.fixture
def scripted():
    return ScriptedRng


def jobs():
    return max(1, min(8, os.cpu_count() or 1))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

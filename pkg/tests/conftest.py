from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from osa.hanabi import HanabiConfig, HanabiEnv, parse_card


def cards(*names):
    return tuple(parse_card(n) for n in names)


def rainbow_state(info=5):
    """Standard-config opening where player 0 has all 20 actions available."""
    env = HanabiEnv()
    mine = cards("G1", "G1", "G1", "W1", "W1")
    partner = cards("R1", "Y2", "G3", "W4", "B5")
    rest = Counter((c, r) for c in range(5) for r, n in enumerate((3, 2, 2, 2, 1), 1) for _ in range(n))
    rest.subtract(Counter(mine + partner))
    s = env.deal(mine + partner + tuple(sorted(rest.elements())))
    return env, replace(s, info=info)


def mini_positions(n, seed=0, depth_max=10):
    """Non-terminal mini-Hanabi states reached by random legal play."""
    env = HanabiEnv(HanabiConfig.mini())
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        s = env.initial_state(rng)
        for _ in range(int(rng.integers(0, depth_max))):
            if s.terminal:
                break
            legal = env.legal_actions(s, s.turn)
            s, _ = env.apply(s, legal[int(rng.integers(len(legal)))])
        if not s.terminal:
            out.append(s)
    return env, out


@pytest.fixture
def mini_env():
    return HanabiEnv(HanabiConfig.mini())


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)

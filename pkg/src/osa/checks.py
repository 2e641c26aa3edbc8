"""Sampler-versus-oracle checks shared by the test suite and ``oracle-check``."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .belief import GibbsBelief, gather_evidence
from .core import stream_seed
from .hanabi import HanabiConfig, HanabiEnv
from .oracle import exact_step_joint
from .policies import HANABI_BOTS, Noisy, Portfolio, make_portfolio
from .policies.toy_bots import ConventionBot
from .toy import SIGNALER, ToyConfig, ToyEnv

GIBBS_TV_MAX = 0.05
GIBBS_SECONDS_MAX = 10.0
STEP_TOL = 1e-9


@dataclass
class Fixture:
    name: str
    env: object
    portfolio: Portfolio
    state: object
    action: object
    state_after: object
    viewer: int
    partner: int


@dataclass
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool
    seconds: float = 0.0

    def __post_init__(self):
        self.value = float(self.value)
        self.passed = bool(self.passed)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.3g} (threshold {self.threshold:g}, {self.seconds:.2f}s)"


def noisy_hanabi_portfolio(epsilon: float = 0.1) -> Portfolio:
    return make_portfolio([Noisy(cls(), epsilon) for cls in HANABI_BOTS.values()])


def toy_fixture(epsilon: float = 0.3, seed: int = 0) -> Fixture:
    """Three noisy conventions over four cards; the guesser watches a signal."""
    env = ToyEnv(ToyConfig(card_values=4, signals=4, rounds=4))
    maps = [(0, 1, 2, 3), (1, 0, 3, 2), (0, 1, 3, 2)]
    pf = make_portfolio([Noisy(ConventionBot(m, f"conv-{i}"), epsilon) for i, m in enumerate(maps)])
    rng = np.random.default_rng(seed)
    state = env.initial_state(rng)
    # skip the open round so the card is hidden from the guesser
    for _ in range(2 * env.config.open_rounds):
        state, _ = env.apply(state, env.legal_actions(state, state.turn)[0])
    action = pf.policies[0].act(env.observe(state, SIGNALER), rng)
    after, _ = env.apply(state, action)
    return Fixture("toy", env, pf, state, action, after, 1 - SIGNALER, SIGNALER)


def random_mini_position(seed: int, portfolio: Portfolio, max_hyps: int = 90) -> Fixture:
    """Random legal playout to a mid-game partner move with a small hidden space."""
    env = HanabiEnv(HanabiConfig.mini())
    rng = np.random.default_rng(seed)
    while True:
        state = env.initial_state(rng)
        depth = int(rng.integers(0, 8))
        for _ in range(depth):
            if state.terminal:
                break
            legal = env.legal_actions(state, state.turn)
            state, _ = env.apply(state, legal[int(rng.integers(len(legal)))])
        if state.terminal:
            continue
        partner = state.turn
        pid = portfolio.ids[int(rng.integers(len(portfolio)))]
        action = portfolio[pid].act(env.observe(state, partner), rng)
        after, _ = env.apply(state, action)
        if after.terminal:
            continue
        viewer = 1 - partner
        if len(env.enumerate_hidden(after, viewer)) <= max_hyps:
            return Fixture(f"mini-{seed}", env, portfolio, state, action, after, viewer, partner)


def gibbs_frequencies(fx: Fixture, sweeps: int, seed: int, burn_in: int = 50) -> Counter:
    """(policy, hidden) visit counts of a single-sweep chain held at one move."""
    rng = np.random.default_rng(seed)
    belief = GibbsBelief(fx.portfolio, sweeps_per_turn=1, backend="enumerate")
    ev = gather_evidence(fx.env, fx.portfolio, fx.state, fx.action, fx.state_after, fx.viewer, fx.partner, rng, "enumerate")
    belief.prune(ev)
    counts: Counter = Counter()
    for i in range(burn_in + sweeps):
        pid = belief.gibbs_sweep(ev, rng)
        if i >= burn_in:
            counts[(pid, belief.current_hidden)] += 1
    return counts


def check_gibbs(fx: Fixture, sweeps: int = 5000, seed: int = 0) -> CheckResult:
    t0 = time.perf_counter()
    counts = gibbs_frequencies(fx, sweeps, seed)
    exact = exact_step_joint(fx.env, fx.state, fx.action, fx.portfolio, viewer=fx.viewer, state_after=fx.state_after)
    tv = exact.tv(counts)
    dt = time.perf_counter() - t0
    return CheckResult(f"gibbs-tv[{fx.name}]", tv, GIBBS_TV_MAX, tv <= GIBBS_TV_MAX and dt < GIBBS_SECONDS_MAX, dt)


def step_error(fx: Fixture) -> float:
    """Largest gap between the belief's conditionals and the oracle's direct ones."""
    rng = np.random.default_rng(0)
    ev = gather_evidence(fx.env, fx.portfolio, fx.state, fx.action, fx.state_after, fx.viewer, fx.partner, rng, "enumerate")
    exact = exact_step_joint(fx.env, fx.state, fx.action, fx.portfolio, viewer=fx.viewer, state_after=fx.state_after)
    belief = GibbsBelief(fx.portfolio, backend="enumerate")
    err = 0.0
    marg = exact.policy_marginal()
    for pid in fx.portfolio.ids:
        if marg[pid] <= 0:
            continue
        belief.current_policy = pid
        got = belief.step_hidden_posterior(ev)
        want = exact.hidden_given_policy(pid)
        err = max(err, max(abs(got[k] - want[h]) for k, h in enumerate(ev.hypotheses)))
    hmarg = exact.hidden_marginal()
    for k, h in enumerate(ev.hypotheses):
        if hmarg[h] <= 0:
            continue
        got = belief.step_policy_posterior(ev, k)
        want = exact.policy_given_hidden(h)
        err = max(err, max(abs(got[i] - want[pid]) for i, pid in enumerate(belief.active)))
    return err


def check_steps(n_positions: int = 50, seed: int = 0) -> CheckResult:
    t0 = time.perf_counter()
    pf = noisy_hanabi_portfolio()
    worst = max(step_error(random_mini_position(stream_seed(seed, "step", i), pf)) for i in range(n_positions))
    return CheckResult(f"bayes-step[{n_positions} mini positions]", worst, STEP_TOL, worst <= STEP_TOL, time.perf_counter() - t0)


def informative_mini_fixture(min_hyps: int = 10, min_peak: float = 0.6) -> Fixture:
    """First seeded mini position whose exact joint both spreads over at least
    ``min_hyps`` hands and favours one policy with mass >= ``min_peak``."""
    pf = noisy_hanabi_portfolio()
    for i in range(1000):
        fx = random_mini_position(stream_seed("gibbs-fixture", i), pf, max_hyps=90)
        exact = exact_step_joint(fx.env, fx.state, fx.action, pf, viewer=fx.viewer, state_after=fx.state_after)
        if len(exact.hypotheses) >= min_hyps and max(exact.policy_marginal().values()) >= min_peak:
            return fx
    raise RuntimeError("no informative fixture found")


def iid_tv(fx: Fixture, n: int = 5000, seed: int = 0) -> float:
    """TV of n independent draws from the exact joint: the noise floor for check_gibbs."""
    exact = exact_step_joint(fx.env, fx.state, fx.action, fx.portfolio, viewer=fx.viewer, state_after=fx.state_after)
    keys = list(exact.entries)
    p = np.array([exact.entries[k] for k in keys])
    draws = Counter(np.random.default_rng(seed).choice(len(keys), n, p=p / p.sum()).tolist())
    return exact.tv({keys[i]: c for i, c in draws.items()})


def gibbs_fixtures() -> list[Fixture]:
    return [toy_fixture(), informative_mini_fixture()]


def oracle_check(seed: int = 0) -> list[CheckResult]:
    results = [check_gibbs(fx, seed=seed) for fx in gibbs_fixtures()]
    results.append(check_steps(seed=seed))
    return results

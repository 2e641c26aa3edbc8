"""Two-variable Gibbs sampler over (partner policy, hidden features).

Each partner move yields an :class:`Evidence`: the hidden-feature hypotheses
consistent with the complex agent's view, their card-counting prior, and the
likelihood of the observed move under every (policy, hypothesis) pair. The
belief alternates draws of the hidden features given the current policy sample
and of the policy given the hidden sample, prunes policies that cannot explain
the move, and keeps a running tally whose mode is the partner estimate.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import Environment, HiddenSpaceTooLarge
from .policies.base import Portfolio

BACKENDS = ("auto", "enumerate", "sir")


class Evidence:
    """A partner move and the hypotheses it is scored against.

    ``state`` is the state the partner acted in; hypotheses come from the
    viewer's information after the move (``state_after``), so public outcomes
    of the move (hint reveals, newly visible cards) are conditioned on. The
    viewer's hidden features are untouched by the partner's move.
    """

    def __init__(self, env: Environment, portfolio: Portfolio, state, action, viewer: int, partner: int, hypotheses, prior):
        self.env = env
        self.portfolio = portfolio
        self.state = state
        self.action = action
        self.viewer = viewer
        self.partner = partner
        self.hypotheses = list(hypotheses)
        self.prior = np.asarray(prior, dtype=float)
        self._obs: list = [None] * len(self.hypotheses)
        self._rows: dict[str, np.ndarray] = {}

    def partner_view(self, k: int):
        if self._obs[k] is None:
            cf = self.env.with_hidden(self.state, self.viewer, self.hypotheses[k])
            self._obs[k] = self.env.observe(cf, self.partner)
        return self._obs[k]

    def row(self, pid: str) -> np.ndarray:
        """P(action | hypothesis k, policy pid, state) for every k."""
        r = self._rows.get(pid)
        if r is None:
            pol = self.portfolio[pid]
            r = np.array([pol.likelihood(self.partner_view(k), self.action) for k in range(len(self.hypotheses))])
            self._rows[pid] = r
        return r

    def marginal(self, pid: str) -> float:
        """P(action | policy, state) with the hidden features summed out."""
        return float(self.row(pid) @ self.prior)


def gather_evidence(
    env: Environment,
    portfolio: Portfolio,
    state,
    action,
    state_after,
    viewer: int,
    partner: int,
    rng: np.random.Generator,
    backend: str = "auto",
    sir_samples: int = 1000,
) -> Evidence:
    if backend not in BACKENDS:
        raise ValueError(f"unknown hidden backend {backend!r}")
    if backend in ("auto", "enumerate"):
        try:
            pairs = env.enumerate_hidden(state_after, viewer)
        except HiddenSpaceTooLarge:
            if backend == "enumerate":
                raise
        else:
            hyps, prior = zip(*pairs)
            return Evidence(env, portfolio, state, action, viewer, partner, hyps, prior)
    # sampling-importance-resampling: candidates from the prior, reweighted later
    draw = env.hand_sampler(state_after, viewer) if hasattr(env, "hand_sampler") else (
        lambda g: env.sample_hidden_prior(state_after, viewer, g)
    )
    tally = Counter(draw(rng) for _ in range(sir_samples))
    hyps = list(tally)
    prior = [tally[h] / sir_samples for h in hyps]
    return Evidence(env, portfolio, state, action, viewer, partner, hyps, prior)


def _sample(rng: np.random.Generator, p: np.ndarray) -> int:
    c = np.cumsum(p)
    return int(min(np.searchsorted(c, rng.random() * c[-1], side="right"), len(p) - 1))


@dataclass
class GibbsBelief:
    portfolio: Portfolio
    init_policy: str | None = None
    epsilon: float = 1e-9
    sweeps_per_turn: int = 5
    backend: str = "auto"
    sir_samples: int = 1000
    active: list[str] = field(default_factory=list)
    current_policy: str = ""
    current_hidden: Any = None
    counts: Counter = field(default_factory=Counter)

    def __post_init__(self):
        if self.sweeps_per_turn < 1:
            raise ValueError("sweeps_per_turn must be >= 1")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown hidden backend {self.backend!r}")
        if self.init_policy is None:
            self.init_policy = self.portfolio.ids[0]
        if self.init_policy not in self.portfolio:
            raise KeyError(f"initial policy {self.init_policy!r} is not in the portfolio")
        self.reset()

    def reset(self) -> None:
        self.active = list(self.portfolio.ids)
        self.current_policy = self.init_policy
        self.current_hidden = None
        self.counts = Counter()

    # --- conditionals ---

    def step_hidden_posterior(self, ev: Evidence) -> np.ndarray:
        """P(f | current policy sample, move, state); the prior if nothing explains the move."""
        w = ev.row(self.current_policy) * ev.prior
        z = w.sum()
        return w / z if z > 0 else ev.prior / ev.prior.sum()

    def step_policy_posterior(self, ev: Evidence, k: int) -> np.ndarray:
        """P(policy | f = hypothesis k, move, state) over the active set, uniform prior."""
        w = np.array([ev.row(pid)[k] for pid in self.active])
        z = w.sum()
        return w / z if z > 0 else np.full(len(self.active), 1.0 / len(self.active))

    # --- updates ---

    def prune(self, ev: Evidence) -> list[str]:
        """Drop policies whose marginal likelihood of the move is below epsilon."""
        if len(self.active) == 1:
            return []
        m = {pid: ev.marginal(pid) for pid in self.active}
        keep = [pid for pid in self.active if m[pid] >= self.epsilon]
        if not keep:
            keep = [max(self.active, key=lambda pid: (m[pid], -self.portfolio.order(pid)))]
        removed = [pid for pid in self.active if pid not in keep]
        self.active = keep
        return removed

    def gibbs_sweep(self, ev: Evidence, rng: np.random.Generator) -> str:
        if self.current_policy not in self.active:
            self._reseat(ev, rng)
        k = 0
        for _ in range(self.sweeps_per_turn):
            k = _sample(rng, self.step_hidden_posterior(ev))
            if len(self.active) > 1:
                self.current_policy = self.active[_sample(rng, self.step_policy_posterior(ev, k))]
        self.current_hidden = ev.hypotheses[k]
        self.counts[self.current_policy] += 1
        return self.current_policy

    def _reseat(self, ev: Evidence, rng: np.random.Generator) -> None:
        # the chain's policy was pruned: restart it from the marginal posterior
        m = np.array([ev.marginal(pid) for pid in self.active])
        if m.sum() <= 0:
            m = np.ones(len(self.active))
        self.current_policy = self.active[_sample(rng, m / m.sum())]

    def update(self, ev: Evidence, rng: np.random.Generator) -> str:
        self.prune(ev)
        return self.gibbs_sweep(ev, rng)

    def mode_estimate(self) -> str:
        """Most frequent per-step sample; earlier portfolio entries win ties."""
        if not self.counts:
            return self.init_policy
        return max(self.portfolio.ids, key=lambda pid: (self.counts.get(pid, 0), -self.portfolio.order(pid)))

"""Policy interface, the uniform-noise wrapper and the portfolio/best-response map."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..core import Observation


class Policy:
    """A Markov-in-observation strategy.

    Subclasses implement :meth:`action_probs`; deterministic rule bots instead
    implement :meth:`choose` and get a point mass for free.
    """

    id: str = "policy"

    def choose(self, obs: Observation):
        raise NotImplementedError

    def action_probs(self, obs: Observation) -> dict:
        return {self.choose(obs): 1.0}

    def act(self, obs: Observation, rng: np.random.Generator):
        probs = self.action_probs(obs)
        if len(probs) == 1:
            return next(iter(probs))
        actions = list(probs)
        return actions[_draw(rng, [probs[a] for a in actions])]

    def likelihood(self, obs: Observation, action) -> float:
        return self.action_probs(obs).get(action, 0.0)

    def __repr__(self):
        return f"{type(self).__name__}({self.id!r})"


def _draw(rng: np.random.Generator, weights: Sequence[float]) -> int:
    u = rng.random() * sum(weights)
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if u < acc:
            return i
    return len(weights) - 1


class RandomPolicy(Policy):
    def __init__(self, id: str = "random"):
        self.id = id

    def action_probs(self, obs: Observation) -> dict:
        legal = obs.legal_actions
        return {a: 1.0 / len(legal) for a in legal}


class Noisy(Policy):
    """Mixes a base policy with the uniform distribution over legal actions."""

    def __init__(self, base: Policy, epsilon: float, id: str | None = None):
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        self.base = base
        self.epsilon = epsilon
        self.id = id or base.id

    def action_probs(self, obs: Observation) -> dict:
        base = self.base.action_probs(obs)
        if self.epsilon == 0.0:
            return base
        legal = obs.legal_actions
        u = self.epsilon / len(legal)
        out = {a: u for a in legal}
        for a, p in base.items():
            out[a] = out.get(a, 0.0) + (1.0 - self.epsilon) * p
        return out


@dataclass
class Portfolio:
    """Ordered policy set with a prior and a best-response map (identity by default)."""

    policies: list[Policy]
    prior: dict[str, float] | None = None
    best_responses: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        ids = [p.id for p in self.policies]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate policy ids in {ids}")
        if not ids:
            raise ValueError("portfolio is empty")
        if self.prior is None:
            self.prior = {i: 1.0 / len(ids) for i in ids}
        if set(self.prior) != set(ids) or abs(sum(self.prior.values()) - 1.0) > 1e-9:
            raise ValueError("prior must cover every policy and sum to 1")
        for k, v in self.best_responses.items():
            if k not in ids or v not in ids:
                raise ValueError(f"best-response entry {k}->{v} refers to an unknown policy")
        self._by_id = {p.id: p for p in self.policies}

    @property
    def ids(self) -> list[str]:
        return [p.id for p in self.policies]

    def __len__(self):
        return len(self.policies)

    def __iter__(self):
        return iter(self.policies)

    def __contains__(self, pid: str) -> bool:
        return pid in self._by_id

    def __getitem__(self, pid: str) -> Policy:
        try:
            return self._by_id[pid]
        except KeyError:
            raise KeyError(f"unknown policy id {pid!r}") from None

    def best_response(self, pid: str) -> str:
        if pid not in self._by_id:
            raise KeyError(f"unknown policy id {pid!r}")
        return self.best_responses.get(pid, pid)

    def without(self, pid: str) -> "Portfolio":
        keep = [p for p in self.policies if p.id != pid]
        if not keep:
            raise ValueError(f"excluding {pid!r} leaves an empty portfolio")
        br = {k: v for k, v in self.best_responses.items() if k != pid and v != pid}
        mass = sum(self.prior[p.id] for p in keep)
        return Portfolio(keep, {p.id: self.prior[p.id] / mass for p in keep}, br)

    def order(self, pid: str) -> int:
        return self.ids.index(pid)


def best_response(portfolio: Portfolio, policy_id: str) -> str:
    return portfolio.best_response(policy_id)


def make_portfolio(policies: Sequence[Policy], best_responses: Mapping[str, str] | None = None) -> Portfolio:
    return Portfolio(list(policies), None, dict(best_responses or {}))

"""Seat-level agents: fixed policies, the adaptive OSA agent and the k-shot controller."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .belief import GibbsBelief, gather_evidence
from .core import Environment, Observation
from .policies.base import Policy, Portfolio


class Agent:
    """What the game loop talks to. ``observe`` is called for every move made
    by another seat, with the states before and after it."""

    id = "agent"

    def reset(self, env: Environment, seat: int) -> None:
        self.env = env
        self.seat = seat

    def act(self, obs: Observation, rng: np.random.Generator):
        raise NotImplementedError

    def observe(self, state, actor: int, action, state_after, rng: np.random.Generator) -> None:
        pass

    def trace(self) -> list[dict] | None:
        return None


class PolicyAgent(Agent):
    def __init__(self, policy: Policy):
        self.policy = policy
        self.id = policy.id

    def act(self, obs, rng):
        return self.policy.act(obs, rng)


@dataclass
class BeliefSettings:
    epsilon: float = 1e-9
    sweeps_per_turn: int = 5
    backend: str = "auto"
    sir_samples: int = 1000


class OsaAgent(Agent):
    """Tracks the partner with a Gibbs belief and plays the best response to
    the belief's mode. ``carry_belief`` keeps the belief across :meth:`reset`."""

    id = "osa"

    def __init__(
        self,
        portfolio: Portfolio,
        init_policy: str | None = None,
        settings: BeliefSettings | None = None,
        trace_belief: bool = False,
        carry_belief: bool = False,
    ):
        self.portfolio = portfolio
        self.settings = settings or BeliefSettings()
        s = self.settings
        self.belief = GibbsBelief(
            portfolio,
            init_policy=init_policy,
            epsilon=s.epsilon,
            sweeps_per_turn=s.sweeps_per_turn,
            backend=s.backend,
            sir_samples=s.sir_samples,
        )
        self.init_policy = self.belief.init_policy
        self.current_response = portfolio.best_response(self.init_policy)
        self.trace_belief = trace_belief
        self.carry_belief = carry_belief
        self._trace: list[dict] = []
        self.pruned: list[str] = []

    def reset(self, env, seat):
        super().reset(env, seat)
        if not self.carry_belief:
            self.belief.reset()
            self.current_response = self.portfolio.best_response(self.init_policy)
        self._trace = []
        self.pruned = []

    def observe(self, state, actor, action, state_after, rng):
        if actor == self.seat or state_after.terminal:
            return
        self.on_partner_action(state, actor, action, state_after, rng)

    def on_partner_action(self, state, partner: int, action, state_after, rng: np.random.Generator) -> None:
        s = self.settings
        ev = gather_evidence(
            self.env, self.portfolio, state, action, state_after, self.seat, partner, rng, s.backend, s.sir_samples
        )
        self.pruned += self.belief.prune(ev)
        sampled = self.belief.gibbs_sweep(ev, rng)
        mode = self.belief.mode_estimate()
        self.current_response = self.portfolio.best_response(mode)
        if self.trace_belief:
            self._trace.append(
                {"sampled": sampled, "mode": mode, "active": len(self.belief.active), "response": self.current_response}
            )

    def act(self, obs, rng):
        return self.portfolio[self.current_response].act(obs, rng)

    @property
    def final_policy(self) -> str:
        return self.current_response

    def trace(self):
        return list(self._trace) if self.trace_belief else None


@dataclass(frozen=True)
class ReuseFixed:
    policy_id: str


@dataclass(frozen=True)
class RunOsa:
    pass


@dataclass
class KShotController:
    """Policy choice across k+1 games with the same partner: once a game has
    paid off, replay that game's final response policy.

    ``reuse="latest"`` takes the most recent rewarded game, ``"first"`` the
    earliest one.
    """

    k: int
    reuse: str = "latest"
    rewards: list[float] = field(default_factory=list)
    final_policies: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.reuse not in ("latest", "first"):
            raise ValueError("reuse must be 'latest' or 'first'")

    @property
    def game_index(self) -> int:
        return len(self.rewards)

    @property
    def reuse_policy(self) -> str | None:
        hits = [p for r, p in zip(self.rewards, self.final_policies) if r > 0]
        if not hits:
            return None
        return hits[-1] if self.reuse == "latest" else hits[0]

    def next_policy(self) -> ReuseFixed | RunOsa:
        if self.game_index > self.k:
            raise ValueError(f"all {self.k + 1} games of the sequence have been played")
        pid = self.reuse_policy
        return RunOsa() if pid is None else ReuseFixed(pid)

    def record(self, reward: float, final_policy: str) -> None:
        self.rewards.append(float(reward))
        self.final_policies.append(final_policy)


def kshot_next_policy(controller: KShotController) -> ReuseFixed | RunOsa:
    return controller.next_policy()

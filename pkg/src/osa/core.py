"""Shared game abstractions: specs, observations, records and the environment base."""

from __future__ import annotations

import abc
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Hashable, Mapping, Sequence

import numpy as np

# enumerate_hidden refuses beyond this many assignments; callers fall back to sampling
ENUMERATION_CAP = 200_000


class IllegalActionError(ValueError):
    pass


class TerminalStateError(ValueError):
    pass


class HiddenSpaceTooLarge(RuntimeError):
    """Raised when exact enumeration of hidden features would exceed the cap."""

    def __init__(self, size: int, cap: int = ENUMERATION_CAP):
        super().__init__(f"hidden space has {size} assignments (cap {cap}); too large, use sampling")
        self.size = size
        self.cap = cap


class InconsistentHiddenState(RuntimeError):
    """No hidden assignment is consistent with the viewer's information."""


@dataclass(frozen=True)
class GameSpec:
    num_agents: int
    action_space: tuple
    observation_space: str
    discount: float = 1.0
    max_steps: int = 1000

    def __post_init__(self):
        if self.num_agents < 2:
            raise ValueError("num_agents must be >= 2")
        if not self.action_space:
            raise ValueError("action_space must be non-empty")
        if not 0.0 < self.discount <= 1.0:
            raise ValueError("discount must lie in (0, 1]")


@dataclass(frozen=True)
class Observation:
    """What one agent sees of a state.

    ``public`` holds features shared by every agent, ``private`` maps agent
    index to the private features of that agent visible to the observer.
    """

    agent: int
    public: Any
    private: Mapping[int, Any]
    legal_actions: tuple

    def digest(self) -> str:
        return hashlib.blake2b(repr(self).encode(), digest_size=8).hexdigest()


@dataclass(frozen=True)
class FeaturePartition:
    public: Mapping[str, Any]
    private: tuple  # one mapping per agent
    environment: Mapping[str, Any]  # features visible to nobody (e.g. deck order)


@dataclass
class Step:
    agent: int
    observation: str
    action: Any
    reward: float


@dataclass
class GameRecord:
    seed: int
    steps: list[Step] = field(default_factory=list)
    final_reward: float = 0.0
    discount: float = 1.0
    belief_trace: list[dict] | None = None
    meta: dict = field(default_factory=dict)

    def recomputed_return(self) -> float:
        return float(sum(self.discount**t * s.reward for t, s in enumerate(self.steps)))

    def to_json(self, env: "Environment") -> dict:
        out = {
            "seed": self.seed,
            "final_reward": self.final_reward,
            "discount": self.discount,
            "steps": [
                {
                    "agent": s.agent,
                    "observation": s.observation,
                    "action": env.action_to_json(s.action),
                    "reward": s.reward,
                }
                for s in self.steps
            ],
            "meta": self.meta,
        }
        if self.belief_trace is not None:
            out["belief_trace"] = self.belief_trace
        return out

    def dumps(self, env: "Environment") -> str:
        return json.dumps(self.to_json(env), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict, env: "Environment") -> "GameRecord":
        steps = [
            Step(s["agent"], s["observation"], env.action_from_json(s["action"]), s["reward"])
            for s in data["steps"]
        ]
        return cls(
            seed=data["seed"],
            steps=steps,
            final_reward=data["final_reward"],
            discount=data.get("discount", 1.0),
            belief_trace=data.get("belief_trace"),
            meta=data.get("meta", {}),
        )


class Environment(abc.ABC):
    """Turn-based Dec-POMDP. States are immutable; transitions are deterministic
    given the state because all chance (deck order, dealt cards) is fixed when
    the initial state is drawn."""

    spec: GameSpec

    @abc.abstractmethod
    def initial_state(self, rng: np.random.Generator): ...

    @abc.abstractmethod
    def legal_actions(self, state, agent: int) -> tuple: ...

    @abc.abstractmethod
    def apply(self, state, action) -> tuple[Any, float]:
        """Advance by the acting agent's action; returns (next_state, reward)."""

    @abc.abstractmethod
    def observe(self, state, agent: int, rng: np.random.Generator | None = None) -> Observation: ...

    @abc.abstractmethod
    def enumerate_hidden(self, state, viewer: int) -> list[tuple[Hashable, float]]:
        """All assignments of the features hidden from ``viewer`` that other
        agents can see, with their prior probability given the viewer's view."""

    @abc.abstractmethod
    def sample_hidden_prior(self, state, viewer: int, rng: np.random.Generator) -> Hashable: ...

    @abc.abstractmethod
    def with_hidden(self, state, viewer: int, hidden):
        """Counterfactual copy of ``state`` with the viewer-hidden features replaced."""

    @abc.abstractmethod
    def partition(self, state) -> FeaturePartition: ...

    @abc.abstractmethod
    def action_to_json(self, action) -> dict: ...

    @abc.abstractmethod
    def action_from_json(self, data: dict): ...

    def transition(self, state, joint_action: Sequence | Mapping) -> tuple[Any, float]:
        """Joint-action form of :meth:`apply`; non-acting agents must pass ``None``."""
        if isinstance(joint_action, Mapping):
            actions = [joint_action.get(i) for i in range(self.spec.num_agents)]
        else:
            actions = list(joint_action)
        if len(actions) != self.spec.num_agents:
            raise ValueError(f"expected {self.spec.num_agents} actions, got {len(actions)}")
        for i, a in enumerate(actions):
            if i != state.turn and a is not None:
                raise IllegalActionError(f"agent {i} acted out of turn with {a!r}")
        return self.apply(state, actions[state.turn])

    def check_action(self, state, action) -> None:
        if state.terminal:
            raise TerminalStateError("no actions are admissible in a terminal state")
        if action not in self.legal_actions(state, state.turn):
            raise IllegalActionError(f"agent {state.turn}: action {action!r} is illegal")


def stream_seed(*keys) -> int:
    """Stable 63-bit seed from arbitrary printable keys (independent of PYTHONHASHSEED)."""
    h = hashlib.blake2b(repr(keys).encode(), digest_size=8).digest()
    return int.from_bytes(h, "little") >> 1


def game_streams(seed: int, num_agents: int) -> tuple[np.random.Generator, list[np.random.Generator]]:
    """Deal stream and one stream per seat for the game played with ``seed``."""
    deal, *seats = np.random.SeedSequence(seed).spawn(1 + num_agents)
    return np.random.default_rng(deal), [np.random.default_rng(s) for s in seats]

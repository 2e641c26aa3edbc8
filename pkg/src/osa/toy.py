"""Signal-and-guess: a tiny cooperative game whose hidden space is fully enumerable.

Seat 0 (signaler) privately sees a card in ``range(card_values)`` and sends one
of ``signals`` public signals; seat 1 (guesser) names a card. Each scored round
pays 1 on a correct guess. The first ``open_rounds`` rounds are played with the
card face up and score nothing; they let the guesser see the signaler's
convention once before play counts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import (
    Environment,
    FeaturePartition,
    GameSpec,
    IllegalActionError,
    Observation,
    TerminalStateError,
)

SIGNALER, GUESSER = 0, 1


@dataclass(frozen=True)
class ToyConfig:
    card_values: int = 4
    signals: int = 4
    rounds: int = 8
    open_rounds: int = 1

    def __post_init__(self):
        if min(self.card_values, self.signals, self.rounds) < 1 or self.open_rounds < 0:
            raise ValueError("card_values, signals and rounds must be >= 1")


@dataclass(frozen=True, slots=True)
class Signal:
    value: int


@dataclass(frozen=True, slots=True)
class Guess:
    value: int


@dataclass(frozen=True, slots=True)
class ToyState:
    cards: tuple  # one card per round; only the current one is ever visible
    round: int = 0
    phase: int = 0  # 0: signaler to act, 1: guesser to act
    signal: int | None = None
    score: int = 0
    terminal: bool = False

    @property
    def turn(self) -> int:
        return self.phase


@dataclass(frozen=True, slots=True)
class ToyPublic:
    round: int
    phase: int
    signal: int | None
    open_card: int | None
    score: int
    scored: bool


class ToyEnv(Environment):
    def __init__(self, config: ToyConfig | None = None):
        self.config = config or ToyConfig()
        cfg = self.config
        self.total_rounds = cfg.open_rounds + cfg.rounds
        self.spec = GameSpec(
            num_agents=2,
            action_space=tuple(Signal(s) for s in range(cfg.signals)) + tuple(Guess(g) for g in range(cfg.card_values)),
            observation_space="toy: round, phase, public signal, open card",
            discount=1.0,
            max_steps=2 * self.total_rounds,
        )

    def __repr__(self):
        return f"ToyEnv({self.config!r})"

    @property
    def name(self) -> str:
        return "toy"

    def initial_state(self, rng: np.random.Generator) -> ToyState:
        cards = rng.integers(self.config.card_values, size=self.total_rounds)
        return ToyState(cards=tuple(int(c) for c in cards))

    def is_open(self, state: ToyState) -> bool:
        return state.round < self.config.open_rounds

    def legal_actions(self, state: ToyState, agent: int) -> tuple:
        if state.terminal or agent != state.turn:
            return ()
        if agent == SIGNALER:
            return tuple(Signal(s) for s in range(self.config.signals))
        return tuple(Guess(g) for g in range(self.config.card_values))

    def apply(self, state: ToyState, action) -> tuple[ToyState, float]:
        if state.terminal:
            raise TerminalStateError("no actions are admissible in a terminal state")
        if action not in self.legal_actions(state, state.turn):
            raise IllegalActionError(f"agent {state.turn}: action {action!r} is illegal")
        if state.phase == 0:
            return replace(state, phase=1, signal=action.value), 0.0
        hit = action.value == state.cards[state.round]
        reward = 1.0 if hit and not self.is_open(state) else 0.0
        nxt_round = state.round + 1
        return (
            replace(
                state,
                round=nxt_round,
                phase=0,
                signal=None,
                score=state.score + int(reward),
                terminal=nxt_round >= self.total_rounds,
            ),
            reward,
        )

    def _current_card(self, state: ToyState):
        return None if state.terminal else state.cards[state.round]

    def observe(self, state: ToyState, agent: int, rng=None) -> Observation:
        if agent not in (SIGNALER, GUESSER):
            raise ValueError(f"agent {agent} out of range")
        card = self._current_card(state)
        is_open = card is not None and self.is_open(state)
        public = ToyPublic(
            round=state.round,
            phase=state.phase,
            signal=state.signal,
            open_card=card if is_open else None,
            score=state.score,
            scored=not is_open,
        )
        private = {SIGNALER: card} if agent == SIGNALER and card is not None and not is_open else {}
        legal = self.legal_actions(state, agent)
        return Observation(agent, public, private, legal)

    def enumerate_hidden(self, state: ToyState, viewer: int, cap: int | None = None):
        card = self._current_card(state)
        if viewer == SIGNALER or card is None:
            return [(None, 1.0)]
        if self.is_open(state):
            return [(card, 1.0)]
        d = self.config.card_values
        return [(c, 1.0 / d) for c in range(d)]

    def sample_hidden_prior(self, state: ToyState, viewer: int, rng: np.random.Generator):
        options = self.enumerate_hidden(state, viewer)
        if len(options) == 1:
            return options[0][0]
        return options[int(rng.integers(len(options)))][0]

    def with_hidden(self, state: ToyState, viewer: int, hidden) -> ToyState:
        if viewer == SIGNALER or hidden is None or state.terminal:
            return state
        cards = list(state.cards)
        cards[state.round] = hidden
        return replace(state, cards=tuple(cards))

    def partition(self, state: ToyState) -> FeaturePartition:
        card = self._current_card(state)
        is_open = card is not None and self.is_open(state)
        public = {
            "round": state.round,
            "phase": state.phase,
            "signal": state.signal,
            "score": state.score,
            "terminal": state.terminal,
            "open_card": card if is_open else None,
        }
        private = ({"card": card} if card is not None and not is_open else {}, {})
        env_only = {"other_cards": tuple(c for i, c in enumerate(state.cards) if i != state.round or state.terminal)}
        return FeaturePartition(public, private, env_only)

    def action_to_json(self, action) -> dict:
        if isinstance(action, Signal):
            return {"type": "signal", "value": action.value}
        if isinstance(action, Guess):
            return {"type": "guess", "value": action.value}
        raise TypeError(f"not a toy action: {action!r}")

    def action_from_json(self, data: dict):
        return {"signal": Signal, "guess": Guess}[data["type"]](data["value"])

"""Permutation-convention bots for the signal-and-guess game."""

from __future__ import annotations

from itertools import permutations

from ..core import Observation
from ..toy import SIGNALER, Guess, Signal
from .base import Policy


class ConventionBot(Policy):
    """Signals ``mapping[card]``; as guesser, inverts the mapping (unknown signals guess 0)."""

    def __init__(self, mapping, id: str | None = None):
        self.mapping = tuple(int(x) for x in mapping)
        if len(set(self.mapping)) != len(self.mapping):
            raise ValueError("a convention must map cards to distinct signals")
        self.inverse = {s: c for c, s in enumerate(self.mapping)}
        self.id = id or "convention-" + "".join(map(str, self.mapping))

    def choose(self, obs: Observation):
        pub = obs.public
        if obs.agent == SIGNALER:
            card = pub.open_card if pub.open_card is not None else obs.private[SIGNALER]
            return Signal(self.mapping[card])
        return Guess(self.inverse.get(pub.signal, 0))


def overlap(a: ConventionBot, b: ConventionBot) -> int:
    """Cards on which two conventions agree; cross-play pays overlap/d per scored round."""
    return sum(x == y for x, y in zip(a.mapping, b.mapping))


def shift_conventions(count: int, card_values: int) -> list[ConventionBot]:
    """Cyclic shifts c -> c + i (mod d): pairwise disjoint for count <= d."""
    if count > card_values:
        raise ValueError("at most card_values disjoint shift conventions exist")
    return [
        ConventionBot([(c + i) % card_values for c in range(card_values)], id=f"shift-{i}")
        for i in range(count)
    ]


def all_conventions(card_values: int) -> list[ConventionBot]:
    return [ConventionBot(p) for p in permutations(range(card_values))]

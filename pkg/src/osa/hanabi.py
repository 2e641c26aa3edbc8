"""Two-player Hanabi engine, parameterized so that small configurations admit
exact enumeration of hidden hands."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .core import (
    ENUMERATION_CAP,
    Environment,
    FeaturePartition,
    GameSpec,
    HiddenSpaceTooLarge,
    IllegalActionError,
    InconsistentHiddenState,
    Observation,
    TerminalStateError,
)

COLOR_LETTERS = "RYGWB"

Card = tuple  # (color index, rank starting at 1)


def card_str(card: Card) -> str:
    return f"{COLOR_LETTERS[card[0]]}{card[1]}"


def parse_card(text: str) -> Card:
    return (COLOR_LETTERS.index(text[0]), int(text[1:]))


@dataclass(frozen=True)
class HanabiConfig:
    colors: int = 5
    rank_counts: tuple = (3, 2, 2, 2, 1)
    hand_size: int = 5
    info_tokens: int = 8
    life_tokens: int = 3
    players: int = 2
    zero_on_death: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rank_counts", tuple(self.rank_counts))
        if not 1 <= self.colors <= len(COLOR_LETTERS):
            raise ValueError(f"colors must be in 1..{len(COLOR_LETTERS)}")
        if self.players != 2:
            raise ValueError("only 2-player Hanabi is supported")
        if self.hand_size * self.players > self.deck_size:
            raise ValueError("deck too small to deal the opening hands")
        if min(self.rank_counts) < 1 or self.info_tokens < 1 or self.life_tokens < 1:
            raise ValueError("counts and tokens must be positive")

    @classmethod
    def standard(cls, **kw) -> "HanabiConfig":
        return cls(**kw)

    @classmethod
    def mini(cls, **kw) -> "HanabiConfig":
        base = dict(colors=2, rank_counts=(2, 2, 1), hand_size=2, info_tokens=3, life_tokens=2)
        base.update(kw)
        return cls(**base)

    @property
    def num_ranks(self) -> int:
        return len(self.rank_counts)

    @property
    def deck_size(self) -> int:
        return self.colors * sum(self.rank_counts)

    @property
    def max_score(self) -> int:
        return self.colors * self.num_ranks

    @property
    def num_types(self) -> int:
        return self.colors * self.num_ranks

    def type_index(self, card: Card) -> int:
        return card[0] * self.num_ranks + card[1] - 1

    def type_card(self, index: int) -> Card:
        return (index // self.num_ranks, index % self.num_ranks + 1)

    def full_counts(self) -> list[int]:
        return [self.rank_counts[r] for _ in range(self.colors) for r in range(self.num_ranks)]


class Knowledge(NamedTuple):
    """Public hint knowledge about one card: possible colors/ranks as bitmasks
    (bit r-1 for rank r) and whether a positive hint has touched the card."""

    colors: int
    ranks: int
    color_hinted: bool = False
    rank_hinted: bool = False

    def allows(self, card: Card) -> bool:
        return bool(self.colors >> card[0] & 1) and bool(self.ranks >> (card[1] - 1) & 1)


# Actions. Hint targets are offsets from the acting player (1 = next player).
@dataclass(frozen=True, slots=True)
class Play:
    slot: int


@dataclass(frozen=True, slots=True)
class Discard:
    slot: int


@dataclass(frozen=True, slots=True)
class HintColor:
    color: int
    offset: int = 1


@dataclass(frozen=True, slots=True)
class HintRank:
    rank: int
    offset: int = 1


@dataclass(frozen=True, slots=True)
class HanabiState:
    fireworks: tuple
    discards: tuple
    deck: tuple  # deck[0] is drawn next; private to the environment
    hands: tuple
    knowledge: tuple
    info: int
    life: int
    turn: int = 0
    countdown: int | None = None  # turns left once the deck has run out
    score: int = 0
    terminal: bool = False


@dataclass(frozen=True, slots=True)
class HanabiPublic:
    config: HanabiConfig
    fireworks: tuple
    discards: tuple
    knowledge: tuple
    info: int
    life: int
    deck_size: int
    countdown: int | None
    turn: int


class HandPrior:
    """Card-counting prior over an ordered hand.

    The hand is treated as an ordered draw without replacement from the unseen
    multiset, conditioned on each slot's hint constraints; the weight of a
    hand is the product of remaining counts as each slot is filled.
    """

    def __init__(self, counts, candidates):
        self.counts = tuple(counts)
        self.candidates = [tuple(c) for c in candidates]
        self._z: dict = {}
        self._n: dict = {}

    def _weight(self, j, counts):
        if j == len(self.candidates):
            return 1
        key = (j, counts)
        if key in self._z:
            return self._z[key]
        total = 0
        for t in self.candidates[j]:
            k = counts[t]
            if k:
                nxt = counts[:t] + (k - 1,) + counts[t + 1 :]
                total += k * self._weight(j + 1, nxt)
        self._z[key] = total
        return total

    def _distinct(self, j, counts):
        if j == len(self.candidates):
            return 1
        key = (j, counts)
        if key in self._n:
            return self._n[key]
        total = 0
        for t in self.candidates[j]:
            k = counts[t]
            if k:
                total += self._distinct(j + 1, counts[:t] + (k - 1,) + counts[t + 1 :])
        self._n[key] = total
        return total

    def size(self) -> int:
        return self._distinct(0, self.counts)

    def enumerate(self) -> list[tuple[tuple, float]]:
        z = self._weight(0, self.counts)
        if z == 0:
            raise InconsistentHiddenState("no hand is consistent with the hint knowledge")
        out = []

        def rec(j, counts, prefix, w):
            if j == len(self.candidates):
                out.append((tuple(prefix), w / z))
                return
            for t in self.candidates[j]:
                k = counts[t]
                if k:
                    prefix.append(t)
                    rec(j + 1, counts[:t] + (k - 1,) + counts[t + 1 :], prefix, w * k)
                    prefix.pop()

        rec(0, self.counts, [], 1)
        return out

    def sample(self, rng: np.random.Generator) -> tuple:
        counts = self.counts
        if self._weight(0, counts) == 0:
            raise InconsistentHiddenState("no hand is consistent with the hint knowledge")
        hand = []
        for j, cands in enumerate(self.candidates):
            opts, weights = [], []
            for t in cands:
                k = counts[t]
                if k:
                    nxt = counts[:t] + (k - 1,) + counts[t + 1 :]
                    w = k * self._weight(j + 1, nxt)
                    if w:
                        opts.append((t, nxt))
                        weights.append(w)
            total = sum(weights)
            u = rng.random() * total
            acc = 0
            for (t, nxt), w in zip(opts, weights):
                acc += w
                if u < acc:
                    break
            hand.append(t)
            counts = nxt
        return tuple(hand)


class HanabiEnv(Environment):
    def __init__(self, config: HanabiConfig | None = None):
        self.config = config or HanabiConfig()
        cfg = self.config
        self.spec = GameSpec(
            num_agents=cfg.players,
            action_space=self.all_actions(),
            observation_space="hanabi: public board + knowledge, partner hands",
            discount=1.0,
            max_steps=2 * cfg.deck_size + cfg.info_tokens + cfg.colors + cfg.players,
        )

    def __repr__(self):
        return f"HanabiEnv({self.config!r})"

    @property
    def name(self) -> str:
        return "hanabi"

    def all_actions(self) -> tuple:
        cfg = self.config
        acts = [Play(i) for i in range(cfg.hand_size)]
        acts += [Discard(i) for i in range(cfg.hand_size)]
        for off in range(1, cfg.players):
            acts += [HintColor(c, off) for c in range(cfg.colors)]
            acts += [HintRank(r, off) for r in range(1, cfg.num_ranks + 1)]
        return tuple(acts)

    # ---- state construction -------------------------------------------------

    def initial_state(self, rng: np.random.Generator) -> HanabiState:
        cfg = self.config
        cards = [
            (c, r + 1) for c in range(cfg.colors) for r in range(cfg.num_ranks) for _ in range(cfg.rank_counts[r])
        ]
        order = rng.permutation(len(cards))
        deck = tuple(cards[i] for i in order)
        return self.deal(deck)

    def deal(self, deck) -> HanabiState:
        """Initial state from a fully specified deck order (first cards dealt)."""
        cfg = self.config
        deck = tuple(deck)
        hands = []
        for p in range(cfg.players):
            hands.append(deck[p * cfg.hand_size : (p + 1) * cfg.hand_size])
        rest = deck[cfg.players * cfg.hand_size :]
        blank = self.blank_knowledge()
        return HanabiState(
            fireworks=(0,) * cfg.colors,
            discards=(),
            deck=rest,
            hands=tuple(hands),
            knowledge=tuple((blank,) * cfg.hand_size for _ in range(cfg.players)),
            info=cfg.info_tokens,
            life=cfg.life_tokens,
        )

    def blank_knowledge(self) -> Knowledge:
        return Knowledge((1 << self.config.colors) - 1, (1 << self.config.num_ranks) - 1)

    # ---- rules --------------------------------------------------------------

    def legal_actions(self, state: HanabiState, agent: int) -> tuple:
        if state.terminal or agent != state.turn:
            return ()
        cfg = self.config
        n = len(state.hands[agent])
        acts = [Play(i) for i in range(n)]
        if state.info < cfg.info_tokens:
            acts += [Discard(i) for i in range(n)]
        if state.info > 0:
            for off in range(1, cfg.players):
                target = state.hands[(agent + off) % cfg.players]
                acts += [HintColor(c, off) for c in sorted({card[0] for card in target})]
                acts += [HintRank(r, off) for r in sorted({card[1] for card in target})]
        return tuple(acts)

    def is_legal(self, state: HanabiState, action) -> bool:
        if state.terminal:
            return False
        hand = state.hands[state.turn]
        cls = type(action)
        if cls is Play:
            return 0 <= action.slot < len(hand)
        if cls is Discard:
            return state.info < self.config.info_tokens and 0 <= action.slot < len(hand)
        if cls is HintColor or cls is HintRank:
            if state.info <= 0 or not 1 <= action.offset < self.config.players:
                return False
            target = state.hands[(state.turn + action.offset) % self.config.players]
            if cls is HintColor:
                return any(card[0] == action.color for card in target)
            return any(card[1] == action.rank for card in target)
        return False

    def apply(self, state: HanabiState, action) -> tuple[HanabiState, float]:
        if state.terminal:
            raise TerminalStateError("no actions are admissible in a terminal state")
        if not self.is_legal(state, action):
            raise IllegalActionError(f"agent {state.turn}: action {action!r} is illegal")
        cfg = self.config
        p = state.turn
        fireworks, discards = state.fireworks, state.discards
        hands, knowledge = list(state.hands), list(state.knowledge)
        info, life, score = state.info, state.life, state.score
        deck, countdown = state.deck, state.countdown
        reward = 0.0
        cls = type(action)

        if cls is Play or cls is Discard:
            hand, know = hands[p], knowledge[p]
            card = hand[action.slot]
            hand = hand[: action.slot] + hand[action.slot + 1 :]
            know = know[: action.slot] + know[action.slot + 1 :]
            if cls is Play:
                c, r = card
                if fireworks[c] == r - 1:
                    fireworks = fireworks[:c] + (r,) + fireworks[c + 1 :]
                    score += 1
                    reward = 1.0
                    if r == cfg.num_ranks and info < cfg.info_tokens:
                        info += 1
                else:
                    life -= 1
                    discards = discards + (card,)
                    if life == 0 and cfg.zero_on_death:
                        reward = -float(score)
            else:
                info += 1
                discards = discards + (card,)
            if deck:
                hand = hand + (deck[0],)
                know = know + (self.blank_knowledge(),)
                deck = deck[1:]
                drew_last = not deck
            else:
                drew_last = False
            hands[p], knowledge[p] = hand, know
        else:
            drew_last = False
            info -= 1
            t = (p + action.offset) % cfg.players
            target = hands[t]
            new = []
            if cls is HintColor:
                bit = 1 << action.color
                for card, k in zip(target, knowledge[t]):
                    if card[0] == action.color:
                        new.append(Knowledge(bit, k.ranks, True, k.rank_hinted))
                    else:
                        new.append(Knowledge(k.colors & ~bit, k.ranks, k.color_hinted, k.rank_hinted))
            else:
                bit = 1 << (action.rank - 1)
                for card, k in zip(target, knowledge[t]):
                    if card[1] == action.rank:
                        new.append(Knowledge(k.colors, bit, k.color_hinted, True))
                    else:
                        new.append(Knowledge(k.colors, k.ranks & ~bit, k.color_hinted, k.rank_hinted))
            knowledge[t] = tuple(new)

        if countdown is not None:
            countdown -= 1
        elif drew_last:
            countdown = cfg.players
        terminal = life <= 0 or score == cfg.max_score or countdown == 0
        nxt = HanabiState(
            fireworks=fireworks,
            discards=discards,
            deck=deck,
            hands=tuple(hands),
            knowledge=tuple(knowledge),
            info=info,
            life=life,
            turn=(p + 1) % cfg.players,
            countdown=countdown,
            score=score,
            terminal=terminal,
        )
        return nxt, reward

    # ---- views --------------------------------------------------------------

    def observe(self, state: HanabiState, agent: int, rng=None) -> Observation:
        if not 0 <= agent < self.config.players:
            raise ValueError(f"agent {agent} out of range")
        public = HanabiPublic(
            config=self.config,
            fireworks=state.fireworks,
            discards=state.discards,
            knowledge=state.knowledge,
            info=state.info,
            life=state.life,
            deck_size=len(state.deck),
            countdown=state.countdown,
            turn=state.turn,
        )
        private = {i: state.hands[i] for i in range(self.config.players) if i != agent}
        legal = self.legal_actions(state, agent) if agent == state.turn else ()
        return Observation(agent, public, private, legal)

    def unseen_counts(self, state: HanabiState, viewer: int) -> list[int]:
        """Card counts not visible to ``viewer``: deck plus the viewer's own hand."""
        cfg = self.config
        counts = cfg.full_counts()
        for card in state.discards:
            counts[cfg.type_index(card)] -= 1
        for c, top in enumerate(state.fireworks):
            for r in range(1, top + 1):
                counts[cfg.type_index((c, r))] -= 1
        for i, hand in enumerate(state.hands):
            if i != viewer:
                for card in hand:
                    counts[cfg.type_index(card)] -= 1
        return counts

    def hand_prior(self, state: HanabiState, viewer: int) -> HandPrior:
        cfg = self.config
        cands = []
        for k in state.knowledge[viewer]:
            cands.append([t for t in range(cfg.num_types) if k.allows(cfg.type_card(t))])
        return HandPrior(self.unseen_counts(state, viewer), cands)

    def enumerate_hidden(self, state: HanabiState, viewer: int, cap: int = ENUMERATION_CAP):
        prior = self.hand_prior(state, viewer)
        size = prior.size()
        if size > cap:
            raise HiddenSpaceTooLarge(size, cap)
        tc = self.config.type_card
        return [(tuple(tc(t) for t in hand), p) for hand, p in prior.enumerate()]

    # consistent_hands in the engine vocabulary
    consistent_hands = enumerate_hidden

    def sample_hidden_prior(self, state: HanabiState, viewer: int, rng: np.random.Generator):
        tc = self.config.type_card
        return tuple(tc(t) for t in self.hand_prior(state, viewer).sample(rng))

    def hand_sampler(self, state: HanabiState, viewer: int):
        """Reusable sampler for many draws from the same position."""
        prior = self.hand_prior(state, viewer)
        tc = self.config.type_card
        return lambda rng: tuple(tc(t) for t in prior.sample(rng))

    def with_hidden(self, state: HanabiState, viewer: int, hidden) -> HanabiState:
        hands = list(state.hands)
        hands[viewer] = tuple(hidden)
        return replace(state, hands=tuple(hands))

    def consistent(self, state: HanabiState, viewer: int, hand) -> bool:
        know = state.knowledge[viewer]
        if len(hand) != len(know) or not all(k.allows(c) for k, c in zip(know, hand)):
            return False
        counts = self.unseen_counts(state, viewer)
        for card in hand:
            counts[self.config.type_index(card)] -= 1
        return min(counts) >= 0

    def partition(self, state: HanabiState) -> FeaturePartition:
        players = self.config.players
        public = {
            "fireworks": state.fireworks,
            "discards": state.discards,
            "knowledge": state.knowledge,
            "info": state.info,
            "life": state.life,
            "turn": state.turn,
            "countdown": state.countdown,
            "score": state.score,
            "terminal": state.terminal,
            "deck_size": len(state.deck),
        }
        # with two players each hand is seen only by the other player
        private = tuple({"partner_hand": state.hands[(i + 1) % players]} for i in range(players))
        return FeaturePartition(public, private, {"deck": state.deck})

    def conserved(self, state: HanabiState) -> bool:
        """Card conservation: deck + hands + discards + played = full deck."""
        cfg = self.config
        counts = [0] * cfg.num_types
        for card in state.deck:
            counts[cfg.type_index(card)] += 1
        for hand in state.hands:
            for card in hand:
                counts[cfg.type_index(card)] += 1
        for card in state.discards:
            counts[cfg.type_index(card)] += 1
        for c, top in enumerate(state.fireworks):
            for r in range(1, top + 1):
                counts[cfg.type_index((c, r))] += 1
        return counts == cfg.full_counts()

    # ---- serialization ------------------------------------------------------

    def action_to_json(self, action) -> dict:
        cls = type(action)
        if cls is Play:
            return {"type": "play", "slot": action.slot}
        if cls is Discard:
            return {"type": "discard", "slot": action.slot}
        if cls is HintColor:
            return {"type": "hint_color", "color": COLOR_LETTERS[action.color], "offset": action.offset}
        if cls is HintRank:
            return {"type": "hint_rank", "rank": action.rank, "offset": action.offset}
        raise TypeError(f"not a Hanabi action: {action!r}")

    def action_from_json(self, data: dict):
        kind = data["type"]
        if kind == "play":
            return Play(data["slot"])
        if kind == "discard":
            return Discard(data["slot"])
        if kind == "hint_color":
            return HintColor(COLOR_LETTERS.index(data["color"]), data.get("offset", 1))
        if kind == "hint_rank":
            return HintRank(data["rank"], data.get("offset", 1))
        raise ValueError(f"unknown action type {kind!r}")

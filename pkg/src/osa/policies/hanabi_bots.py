"""Scripted Hanabi bots.

Two convention families share the hint-signal idea but read it differently:

* valuebot / holmesbot: a card touched by a colour hint whose rank is still
  unknown is a play signal; rank hints mark cards worth keeping.
* iggi / piers: a card touched by a rank hint whose colour is still unknown is a
  play signal when that rank is playable on some firework; colour hints carry
  no signal.

Rule precedence for every bot is listed in its class docstring, top rule first.
The pairs also differ in tempo (how many info tokens make a bot hint before
playing), which card they play first and which card they throw away; those
choices are what lets an observer tell family members apart. All bots are
deterministic and read only the current observation.
"""

from __future__ import annotations

from ..core import Observation
from ..hanabi import Discard, HintColor, HintRank, Knowledge, Play
from .base import Policy


class _View:
    """Derived quantities for one observation, computed on demand."""

    __slots__ = ("cfg", "fw", "info", "life", "me", "partner", "my_k", "p_hand", "p_k", "legal", "discards", "_dead_cnt", "_unseen")

    def __init__(self, obs: Observation):
        pub = obs.public
        self.cfg = pub.config
        self.fw = pub.fireworks
        self.info = pub.info
        self.life = pub.life
        self.me = obs.agent
        self.partner = (obs.agent + 1) % self.cfg.players
        self.my_k = pub.knowledge[self.me]
        self.p_hand = obs.private[self.partner]
        self.p_k = pub.knowledge[self.partner]
        self.legal = obs.legal_actions
        self.discards = pub.discards
        self._dead_cnt = None
        self._unseen = None

    def discarded(self) -> list[int]:
        if self._dead_cnt is None:
            cnt = [0] * self.cfg.num_types
            for card in self.discards:
                cnt[self.cfg.type_index(card)] += 1
            self._dead_cnt = cnt
        return self._dead_cnt

    def unseen(self) -> list[int]:
        """Counts of cards this player cannot see (own hand and deck)."""
        if self._unseen is None:
            cfg = self.cfg
            cnt = cfg.full_counts()
            d = self.discarded()
            for t in range(cfg.num_types):
                cnt[t] -= d[t]
            for c, top in enumerate(self.fw):
                for r in range(1, top + 1):
                    cnt[c * cfg.num_ranks + r - 1] -= 1
            for card in self.p_hand:
                cnt[cfg.type_index(card)] -= 1
            self._unseen = cnt
        return self._unseen

    # --- card predicates ---

    def playable(self, card) -> bool:
        return self.fw[card[0]] == card[1] - 1

    def dead(self, card) -> bool:
        c, r = card
        if r <= self.fw[c]:
            return True
        d = self.discarded()
        rc = self.cfg.rank_counts
        base = c * self.cfg.num_ranks
        return any(d[base + q - 1] >= rc[q - 1] for q in range(self.fw[c] + 1, r))

    def critical(self, card) -> bool:
        if self.dead(card):
            return False
        return self.discarded()[self.cfg.type_index(card)] == self.cfg.rank_counts[card[1] - 1] - 1

    def candidates(self, k: Knowledge, counting: bool) -> list[tuple]:
        """(card, weight) pairs the knowledge allows; weights are unseen counts
        when counting, else 1."""
        cfg = self.cfg
        out = []
        unseen = self.unseen() if counting else None
        for c in range(cfg.colors):
            if not k.colors >> c & 1:
                continue
            for r in range(1, cfg.num_ranks + 1):
                if not k.ranks >> (r - 1) & 1:
                    continue
                if counting:
                    w = unseen[c * cfg.num_ranks + r - 1]
                    if w > 0:
                        out.append(((c, r), w))
                else:
                    out.append(((c, r), 1))
        if counting and not out:
            return self.candidates(k, False)
        return out

    def p_playable(self, k: Knowledge, counting: bool) -> float:
        cands = self.candidates(k, counting)
        total = sum(w for _, w in cands)
        return sum(w for card, w in cands if self.playable(card)) / total

    def p_dead(self, k: Knowledge, counting: bool) -> float:
        cands = self.candidates(k, counting)
        total = sum(w for _, w in cands)
        return sum(w for card, w in cands if self.dead(card)) / total

    def p_critical(self, k: Knowledge, counting: bool) -> float:
        cands = self.candidates(k, counting)
        total = sum(w for _, w in cands)
        return sum(w for card, w in cands if self.critical(card)) / total

    def can_discard(self) -> bool:
        return self.info < self.cfg.info_tokens


def touched(k: Knowledge) -> bool:
    return k.color_hinted or k.rank_hinted


def value_signal(k: Knowledge) -> bool:
    return k.color_hinted and not k.rank_hinted


def iggi_signal(k: Knowledge, fw) -> bool:
    if not k.rank_hinted or k.color_hinted:
        return False
    r = k.ranks.bit_length()
    return any(fw[c] == r - 1 for c in range(len(fw)) if k.colors >> c & 1)


def apply_hint(hand, know, action) -> tuple:
    """Knowledge of a hand after a hint, mirroring the engine's update."""
    out = []
    if type(action) is HintColor:
        bit = 1 << action.color
        for card, k in zip(hand, know):
            if card[0] == action.color:
                out.append(Knowledge(bit, k.ranks, True, k.rank_hinted))
            else:
                out.append(Knowledge(k.colors & ~bit, k.ranks, k.color_hinted, k.rank_hinted))
    else:
        bit = 1 << (action.rank - 1)
        for card, k in zip(hand, know):
            if card[1] == action.rank:
                out.append(Knowledge(k.colors, bit, k.color_hinted, True))
            else:
                out.append(Knowledge(k.colors, k.ranks & ~bit, k.color_hinted, k.rank_hinted))
    return tuple(out)


class RuleBot(Policy):
    """Shared machinery; subclasses set the family and override ``choose``."""

    family = "value"
    prefer = HintColor  # hint type tried first when signalling a play
    quiet_hint = HintRank  # hint type that carries no play signal in this family
    newest_first = False  # signal the newest eligible card rather than the oldest
    risk: float | None = None  # threshold for risky plays, None for never
    hint_floor = 1  # fewest info tokens at which play and save hints are given
    play_newest = False  # among cards known to play, play the newest first
    tempo_floor: int | None = None  # with a known play and this many tokens, hint first
    hint_first = False  # give a pending play hint before playing a known card

    def __init__(self, id: str | None = None):
        if id is not None:
            self.id = id

    def will_play(self, v: _View, k: Knowledge) -> bool:
        """How a member of this family reads a partner card's knowledge."""
        if v.p_playable(k, counting=False) == 1.0:
            return True
        if self.family == "value":
            return value_signal(k)
        return iggi_signal(k, v.fw)

    def own_play(self, v: _View, counting: bool):
        signal = value_signal if self.family == "value" else (lambda k: iggi_signal(k, v.fw))
        n = len(v.my_k)
        for j in range(n - 1, -1, -1) if self.play_newest else range(n):
            k = v.my_k[j]
            if signal(k) or v.p_playable(k, counting) == 1.0:
                return Play(j)
        return None

    def first_moves(self, v: _View, counting: bool):
        play = self.own_play(v, counting)
        if play is not None and self.tempo_floor is not None and v.info >= self.tempo_floor:
            return self.play_hint(v) or self.fallback_hint(v, self.quiet_hint) or play
        if self.hint_first:
            return self.play_hint(v) or play
        return play or self.play_hint(v)

    def play_hint(self, v: _View):
        """Best hint that makes the partner play a card that is really playable."""
        if v.info < self.hint_floor:
            return None
        before = [self.will_play(v, k) for k in v.p_k]
        best, best_key = None, None
        for a in v.legal:
            if type(a) is not HintColor and type(a) is not HintRank:
                continue
            after = apply_hint(v.p_hand, v.p_k, a)
            plays = [j for j, k in enumerate(after) if self.will_play(v, k)]
            new = [j for j in plays if not before[j]]
            if not new:
                continue
            cards = [v.p_hand[j] for j in plays]
            if not all(v.playable(c) for c in cards) or len(set(cards)) < len(cards):
                continue
            key = (-max(new) if self.newest_first else min(new), 0 if type(a) is self.prefer else 1, a.color if type(a) is HintColor else a.rank)
            if best_key is None or key < best_key:
                best, best_key = a, key
        return best

    def chop(self, know, newest: bool = False) -> int | None:
        order = range(len(know) - 1, -1, -1) if newest else range(len(know))
        for j in order:
            if not touched(know[j]):
                return j
        return None

    def fallback_hint(self, v: _View, kind):
        """Signal-free hint (the family's non-signal hint type) on the oldest card lacking it."""
        hints = [a for a in v.legal if type(a) is kind]
        if not hints:
            hints = [a for a in v.legal if type(a) in (HintColor, HintRank)]
        if not hints:
            return None
        for card, k in zip(v.p_hand, v.p_k):
            for a in hints:
                if type(a) is HintRank and a.rank == card[1] and not k.rank_hinted:
                    return a
                if type(a) is HintColor and a.color == card[0] and not k.color_hinted:
                    return a
        return hints[0]

    def risky_play(self, v: _View, threshold: float | None):
        if threshold is None or v.life < 2:
            return None
        best, best_p = None, threshold
        for j, k in enumerate(v.my_k):
            p = v.p_playable(k, counting=True)
            if p >= best_p and (best is None or p > best_p):
                best, best_p = j, p
        return None if best is None else Play(best)


class ValueBot(RuleBot):
    """1. holding a card known to play with 2+ info tokens: play hint, else a
       rank hint on the oldest card lacking one;
    2. play the newest card proven playable by hints, or colour-signalled;
    3. colour hint (rank if needed) that signals a playable card;
    4. rank hint saving a critical chop card;
    5. discard the oldest untouched card (slot 0 if all are touched);
    6. rank hint on the oldest card without rank knowledge;
    7. play slot 0."""

    id = "valuebot"
    family = "value"
    prefer = HintColor
    tempo_floor = 2
    play_newest = True

    def choose(self, obs: Observation):
        v = _View(obs)
        a = self.first_moves(v, counting=False) or self.save(v)
        if a is not None:
            return a
        if v.can_discard():
            j = self.chop(v.my_k)
            return Discard(0 if j is None else j)
        return self.fallback_hint(v, HintRank) or Play(0)

    def save(self, v: _View):
        if v.info < self.hint_floor:
            return None
        j = self.chop(v.p_k)
        if j is None:
            return None
        card = v.p_hand[j]
        if v.critical(card) and not v.playable(card):
            return HintRank(card[1], 1)
        return None


class HolmesBot(ValueBot):
    """Valuebot that counts cards and risks lives:
    1. holding a card known to play with any info token: hint first (as valuebot);
    2. play the newest card proven playable by hints plus counting, or colour-signalled;
    3-4. play hint and critical save (as valuebot);
    5. with two or more lives, play the card most likely playable if p >= 0.4;
    6. discard the card most likely dead by counting, untouched cards first,
       newest on ties;
    7-8. valuebot fallbacks."""

    id = "holmesbot"
    tempo_floor = 1
    risk = 0.4

    def choose(self, obs: Observation):
        v = _View(obs)
        a = self.first_moves(v, counting=True) or self.save(v) or self.risky_play(v, self.risk)
        if a is not None:
            return a
        if v.can_discard():
            return Discard(self.inferred_chop(v))
        return self.fallback_hint(v, HintRank) or Play(0)

    def inferred_chop(self, v: _View) -> int:
        best, best_key = 0, None
        for j in range(len(v.my_k) - 1, -1, -1):
            k = v.my_k[j]
            key = (not touched(k), v.p_dead(k, counting=True))
            if best_key is None or key > best_key:
                best, best_key = j, key
        return best


class IggiBot(RuleBot):
    """1. pending play hint before anything else; with a card known to play and
       all 3+ info tokens left, a colour hint if no play hint exists;
    2. play the newest card proven playable by hints, or rank-signalled;
    3. discard a card proven dead by hints, else the oldest untouched, else slot 0;
    4. colour hint on the oldest card without colour knowledge;
    5. play slot 0.
    Play hints prefer rank over colour."""

    id = "iggi"
    family = "iggi"
    prefer = HintRank
    quiet_hint = HintColor
    tempo_floor = 3
    hint_first = True
    play_newest = True

    def choose(self, obs: Observation):
        v = _View(obs)
        a = self.first_moves(v, counting=False)
        if a is not None:
            return a
        if v.can_discard():
            return Discard(self.dead_first_chop(v, counting=False))
        return self.fallback_hint(v, HintColor) or Play(0)

    def dead_first_chop(self, v: _View, counting: bool) -> int:
        for j, k in enumerate(v.my_k):
            if v.p_dead(k, counting) == 1.0:
                return j
        j = self.chop(v.my_k)
        return 0 if j is None else j


class PiersBot(IggiBot):
    """Iggi with card counting, life-token risk and protection of valuable cards:
    1. play the oldest card proven playable by hints plus counting, or rank-signalled;
    2. rank-first play hint (as iggi), only with 3+ info tokens;
    3. colour hint saving a critical chop card, also only with 3+ tokens;
    4. with two or more lives, play the card most likely playable if p >= 0.4;
    5. discard a card proven dead by counting, else the newest untouched card
       unlikely (< 0.5) to be critical, else (all touched) the card least likely
       critical, newest on ties, else as iggi;
    6-7. iggi fallbacks."""

    id = "piers"
    tempo_floor = None
    hint_first = False
    play_newest = False
    hint_floor = 3
    risk = 0.4

    def choose(self, obs: Observation):
        v = _View(obs)
        a = self.first_moves(v, counting=True) or self.save(v) or self.risky_play(v, self.risk)
        if a is not None:
            return a
        if v.can_discard():
            return Discard(self.protective_chop(v))
        return self.fallback_hint(v, HintColor) or Play(0)

    def save(self, v: _View):
        if v.info < self.hint_floor:
            return None
        j = self.chop(v.p_k)
        if j is None:
            return None
        card = v.p_hand[j]
        if v.critical(card) and not v.playable(card) and not v.p_k[j].color_hinted:
            return HintColor(card[0], 1)
        return None

    def protective_chop(self, v: _View) -> int:
        for j, k in enumerate(v.my_k):
            if v.p_dead(k, counting=True) == 1.0:
                return j
        for j in range(len(v.my_k) - 1, -1, -1):
            k = v.my_k[j]
            if not touched(k) and v.p_critical(k, counting=True) < 0.5:
                return j
        if all(touched(k) for k in v.my_k):
            return min(range(len(v.my_k) - 1, -1, -1), key=lambda j: v.p_critical(v.my_k[j], counting=True))
        return self.dead_first_chop(v, counting=True)


HANABI_BOTS = {cls.id: cls for cls in (ValueBot, HolmesBot, IggiBot, PiersBot)}

"""Brute-force exact inference used as a reference by tests and ``oracle-check``.

Nothing here is on the agent's runtime path. The Hanabi hand prior is recomputed
by plain enumeration over card types rather than through :class:`HandPrior`, and
the history posterior runs a forward filter over the viewer's hand that models
every card draw explicitly.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import ENUMERATION_CAP, Environment, GameRecord, HiddenSpaceTooLarge, game_streams
from .hanabi import Discard, HanabiEnv, HanabiState, Play
from .policies.base import Portfolio
from .toy import SIGNALER, ToyEnv


@dataclass
class JointPosterior:
    """P(policy, hidden | move, state) as a dense policies x hypotheses table."""

    policies: list[str]
    hypotheses: list
    probs: np.ndarray

    @property
    def entries(self) -> dict:
        return {
            (pid, h): float(self.probs[i, k])
            for i, pid in enumerate(self.policies)
            for k, h in enumerate(self.hypotheses)
        }

    def policy_marginal(self) -> dict[str, float]:
        return dict(zip(self.policies, self.probs.sum(axis=1).tolist()))

    def hidden_marginal(self) -> dict:
        return dict(zip(self.hypotheses, self.probs.sum(axis=0).tolist()))

    def hidden_given_policy(self, pid: str) -> dict:
        row = self.probs[self.policies.index(pid)]
        return dict(zip(self.hypotheses, (row / row.sum()).tolist()))

    def policy_given_hidden(self, hyp) -> dict[str, float]:
        col = self.probs[:, self.hypotheses.index(hyp)]
        return dict(zip(self.policies, (col / col.sum()).tolist()))

    def tv(self, counts: Mapping) -> float:
        """Total variation to the empirical distribution of ``counts[(pid, hyp)]``."""
        n = sum(counts.values())
        exact = self.entries
        keys = set(exact) | set(counts)
        return 0.5 * sum(abs(exact.get(k, 0.0) - counts.get(k, 0) / n) for k in keys)


# --------------------------------------------------------------------------- hand priors


def _hanabi_unseen(env: HanabiEnv, state: HanabiState, viewer: int) -> Counter:
    cfg = env.config
    left = Counter()
    for c in range(cfg.colors):
        for r, n in enumerate(cfg.rank_counts, start=1):
            left[(c, r)] = n
    for c, top in enumerate(state.fireworks):
        for r in range(1, top + 1):
            left[(c, r)] -= 1
    for card in state.discards:
        left[card] -= 1
    for p, hand in enumerate(state.hands):
        if p != viewer:
            for card in hand:
                left[card] -= 1
    return left


def _ordered_draw_weight(hand: Sequence, pool: Counter) -> float:
    """Probability of drawing ``hand`` in order, without replacement, from ``pool``."""
    pool = Counter(pool)
    total = sum(pool.values())
    w = 1.0
    for card in hand:
        if pool[card] <= 0:
            return 0.0
        w *= pool[card] / total
        pool[card] -= 1
        total -= 1
    return w


def brute_hand_prior(env: HanabiEnv, state: HanabiState, viewer: int, cap: int = ENUMERATION_CAP) -> list[tuple]:
    """Every hand the viewer could hold with its normalized probability."""
    pool = _hanabi_unseen(env, state, viewer)
    know = state.knowledge[viewer]
    slots = [[card for card in sorted(pool) if pool[card] > 0 and k.allows(card)] for k in know]
    size = int(np.prod([len(s) for s in slots])) if slots else 1
    if size > cap:
        raise HiddenSpaceTooLarge(size, cap)
    out = []
    for hand in itertools.product(*slots):
        w = _ordered_draw_weight(hand, pool)
        if w > 0:
            out.append((tuple(hand), w))
    z = sum(w for _, w in out)
    return [(h, w / z) for h, w in out]


def hidden_prior(env: Environment, state, viewer: int) -> list[tuple]:
    if isinstance(env, HanabiEnv):
        return brute_hand_prior(env, state, viewer)
    return list(env.enumerate_hidden(state, viewer))


# --------------------------------------------------------------------------- one step


def exact_step_joint(
    env: Environment,
    state,
    action,
    portfolio: Portfolio,
    prior: Mapping[str, float] | None = None,
    viewer: int | None = None,
    state_after=None,
    active: Sequence[str] | None = None,
) -> JointPosterior:
    """P(policy, hidden | action, state) over the whole product space.

    The partner is the seat to move in ``state``. Hypotheses are conditioned on
    the viewer's information after the move; the likelihood is evaluated in
    ``state`` with the viewer's hidden features swapped in.
    """
    partner = state.turn
    if viewer is None:
        viewer = 1 - partner
    if state_after is None:
        state_after, _ = env.apply(state, action)
    ids = list(active) if active is not None else portfolio.ids
    if prior is None:
        prior = {pid: 1.0 / len(ids) for pid in ids}
    hyps = hidden_prior(env, state_after, viewer)
    table = np.zeros((len(ids), len(hyps)))
    for k, (h, pf) in enumerate(hyps):
        obs = env.observe(env.with_hidden(state, viewer, h), partner)
        for i, pid in enumerate(ids):
            table[i, k] = portfolio[pid].likelihood(obs, action) * pf * prior[pid]
    z = table.sum()
    if z <= 0:
        raise ValueError("no policy in the portfolio can produce the observed action")
    return JointPosterior(ids, [h for h, _ in hyps], table / z)


# --------------------------------------------------------------------------- full history


def replay(env: Environment, record: GameRecord) -> list:
    """States s_0..s_T of a recorded game."""
    deal_rng, _ = game_streams(record.seed, env.spec.num_agents)
    states = [env.initial_state(deal_rng)]
    for step in record.steps:
        nxt, _ = env.apply(states[-1], step.action)
        states.append(nxt)
    return states


def exact_history_policy_posterior(
    env: Environment,
    record: GameRecord,
    portfolio: Portfolio,
    viewer: int,
    prior: Mapping[str, float] | None = None,
) -> dict[str, float]:
    """P(policy | every partner move and everything the viewer saw)."""
    ids = portfolio.ids
    if prior is None:
        prior = {pid: 1.0 / len(ids) for pid in ids}
    states = replay(env, record)
    if isinstance(env, HanabiEnv):
        ev = {pid: _hanabi_filter(env, states, record, portfolio[pid], viewer) for pid in ids}
    elif isinstance(env, ToyEnv):
        ev = {pid: _toy_evidence(env, states, record, portfolio[pid], viewer) for pid in ids}
    else:
        raise TypeError(f"no history oracle for {env!r}")
    w = {pid: prior[pid] * ev[pid] for pid in ids}
    z = sum(w.values())
    if z <= 0:
        raise ValueError("no policy in the portfolio explains the recorded partner moves")
    return {pid: v / z for pid, v in w.items()}


def _toy_evidence(env: ToyEnv, states, record: GameRecord, policy, viewer: int) -> float:
    # cards are independent across rounds, so the evidence factorizes by round
    total = 1.0
    steps = record.steps
    for t, step in enumerate(steps):
        if step.agent == viewer:
            continue
        s = states[t]
        if viewer == SIGNALER:
            total *= policy.likelihood(env.observe(s, step.agent), step.action)
            continue
        guess = steps[t + 1].action.value if t + 1 < len(steps) else None
        scored = not env.is_open(s)
        hit = steps[t + 1].reward > 0 if t + 1 < len(steps) else None
        d = env.config.card_values
        cards = [s.cards[s.round]] if env.is_open(s) else range(d)
        acc = 0.0
        for c in cards:
            if scored and guess is not None and (guess == c) != hit:
                continue
            obs = env.observe(env.with_hidden(s, viewer, c), step.agent)
            acc += policy.likelihood(obs, step.action) / len(cards)
        total *= acc
    return total


def _hanabi_filter(env: HanabiEnv, states, record: GameRecord, policy, viewer: int) -> float:
    """Forward filter over the viewer's hand; returns P(partner moves | policy, viewer's view)."""
    alpha: dict[tuple, float] = dict(brute_hand_prior(env, states[0], viewer))
    for t, step in enumerate(record.steps):
        s, nxt = states[t], states[t + 1]
        pool = _hanabi_unseen(env, s, viewer)  # deck plus the viewer's hand
        new: dict[tuple, float] = {}
        if step.agent != viewer:
            drew = len(s.deck) > len(nxt.deck)
            z = nxt.hands[step.agent][-1] if drew else None
            deck_n = sum(pool.values()) - len(s.hands[viewer])
            for hand, w in alpha.items():
                obs = env.observe(env.with_hidden(s, viewer, hand), step.agent)
                w *= policy.likelihood(obs, step.action)
                if w and z is not None:
                    w *= (pool[z] - hand.count(z)) / deck_n
                if w:
                    new[hand] = new.get(hand, 0.0) + w
        elif type(step.action) in (Play, Discard):
            j = step.action.slot
            card = s.hands[viewer][j]
            pool[card] -= 1
            drew = len(s.deck) > len(nxt.deck)
            for hand, w in alpha.items():
                if hand[j] != card:
                    continue
                rest = hand[:j] + hand[j + 1 :]
                if not drew:
                    new[rest] = new.get(rest, 0.0) + w
                    continue
                deck = pool - Counter(rest)
                n = sum(deck.values())
                for y, cnt in deck.items():
                    if cnt > 0:
                        h2 = rest + (y,)
                        new[h2] = new.get(h2, 0.0) + w * cnt / n
        else:
            new = alpha
        know = nxt.knowledge[viewer]
        alpha = {h: w for h, w in new.items() if all(k.allows(c) for k, c in zip(know, h))}
        if not alpha:
            return 0.0
    return float(sum(alpha.values()))

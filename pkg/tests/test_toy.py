import itertools

import numpy as np
import pytest

from osa.agent import PolicyAgent
from osa.harness import run_game
from osa.policies import ConventionBot, overlap, shift_conventions
from osa.policies.toy_bots import all_conventions
from osa.toy import GUESSER, SIGNALER, Guess, Signal, ToyConfig, ToyEnv, ToyState


def rollout(env, signaler, guesser, cards):
    s = ToyState(cards=tuple(cards))
    total = 0.0
    while not s.terminal:
        pol = signaler if s.turn == SIGNALER else guesser
        s, r = env.apply(s, pol.choose(env.observe(s, s.turn)))
        total += r
    return total


def test_identity_conventions_score_every_round():
    env = ToyEnv()
    ident = ConventionBot(range(4))
    for seed in range(5):
        rec = run_game(env, [PolicyAgent(ident), PolicyAgent(ident)], seed)
        assert rec.final_reward == env.config.rounds


@pytest.mark.parametrize("a,b", [((0, 1, 2), (0, 2, 1)), ((0, 1, 2), (1, 2, 0)), ((2, 1, 0), (2, 1, 0))])
def test_brute_force_expectation_matches_overlap(a, b):
    env = ToyEnv(ToyConfig(card_values=3, signals=3, rounds=2, open_rounds=1))
    pa, pb = ConventionBot(a), ConventionBot(b)
    seqs = list(itertools.product(range(3), repeat=env.total_rounds))
    mean = sum(rollout(env, pa, pb, c) for c in seqs) / len(seqs)
    assert mean == pytest.approx(overlap(pa, pb) / 3 * env.config.rounds, abs=1e-12)


def test_open_round_scores_nothing_and_reveals_card():
    env = ToyEnv()
    s = ToyState(cards=(2, 1, 0, 3, 1, 1, 0, 2, 3))
    o0, o1 = env.observe(s, SIGNALER), env.observe(s, GUESSER)
    assert o0.public == o1.public and o0.public.open_card == 2
    assert o0.private == {} and o1.private == {}
    s, _ = env.apply(s, Signal(2))
    s, r = env.apply(s, Guess(2))
    assert r == 0.0 and s.round == 1
    o0, o1 = env.observe(s, SIGNALER), env.observe(s, GUESSER)
    assert o0.private == {SIGNALER: 1} and o1.private == {} and o1.public.open_card is None


def test_enumerate_hidden():
    env = ToyEnv()
    s = ToyState(cards=(2, 1, 0, 3, 1, 1, 0, 2, 3))
    assert env.enumerate_hidden(s, GUESSER) == [(2, 1.0)]  # open round
    s = ToyState(cards=s.cards, round=1)
    hyps = env.enumerate_hidden(s, GUESSER)
    assert [h for h, _ in hyps] == [0, 1, 2, 3] and sum(p for _, p in hyps) == pytest.approx(1.0)
    assert env.enumerate_hidden(s, SIGNALER) == [(None, 1.0)]
    assert env.with_hidden(s, GUESSER, 3).cards[1] == 3


def test_illegal_actions():
    env = ToyEnv()
    s = env.initial_state(np.random.default_rng(0))
    assert env.legal_actions(s, GUESSER) == ()
    with pytest.raises(ValueError):
        env.apply(s, Guess(0))
    with pytest.raises(ValueError):
        env.apply(s, Signal(7))


def test_conventions():
    with pytest.raises(ValueError):
        ConventionBot([0, 0, 1])
    shifts = shift_conventions(3, 4)
    assert all(overlap(a, b) == 0 for a, b in itertools.combinations(shifts, 2))
    with pytest.raises(ValueError):
        shift_conventions(5, 4)
    assert len(all_conventions(3)) == 6


def test_action_json_round_trip():
    env = ToyEnv()
    for a in env.spec.action_space:
        assert env.action_from_json(env.action_to_json(a)) == a

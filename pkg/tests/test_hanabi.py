import itertools
from collections import Counter
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from osa.core import HiddenSpaceTooLarge, IllegalActionError
from osa.hanabi import (
    Discard,
    HanabiConfig,
    HanabiEnv,
    HintColor,
    HintRank,
    Knowledge,
    Play,
    card_str,
    parse_card,
)
from osa.oracle import brute_hand_prior

R, Y = 0, 1


def mini():
    return HanabiEnv(HanabiConfig.mini())


def cards(*names):
    return tuple(parse_card(n) for n in names)


def random_playout(env, rng, check=None):
    s = env.initial_state(rng)
    total = 0.0
    while not s.terminal:
        legal = env.legal_actions(s, s.turn)
        s, r = env.apply(s, legal[int(rng.integers(len(legal)))])
        total += r
        if check is not None:
            check(s)
    return s, total


def test_standard_config_has_twenty_actions():
    env = HanabiEnv()
    assert len(env.all_actions()) == 20
    assert env.config.max_score == 25
    assert env.config.deck_size == 50


def test_all_twenty_actions_legal_with_rainbow_partner():
    env = HanabiEnv()
    mine = cards("G1", "G1", "G1", "W1", "W1")
    partner = cards("R1", "Y2", "G3", "W4", "B5")
    full = Counter((c, r) for c in range(5) for r, n in enumerate((3, 2, 2, 2, 1), 1) for _ in range(n))
    full.subtract(Counter(mine + partner))
    s = env.deal(mine + partner + tuple(full.elements()))
    s = replace(s, info=5)
    legal = env.legal_actions(s, 0)
    assert len(legal) == 20 and set(legal) == set(env.all_actions())


def test_token_rules():
    env = mini()
    s = env.initial_state(np.random.default_rng(1))
    assert not any(isinstance(a, Discard) for a in env.legal_actions(s, 0))  # full tokens
    while s.info > 0:
        s, _ = env.apply(s, next(a for a in env.legal_actions(s, s.turn) if isinstance(a, (HintColor, HintRank))))
    assert not any(isinstance(a, (HintColor, HintRank)) for a in env.legal_actions(s, s.turn))
    with pytest.raises(IllegalActionError):
        env.apply(s, HintRank(1))


def test_play_rank_one_scores():
    env = mini()
    s = env.deal(cards("R1", "Y3", "Y1", "R2", "R1", "Y1", "R2", "Y2", "R3", "Y2"))
    s2, r = env.apply(s, Play(0))
    assert r == 1.0 and s2.fireworks == (1, 0) and s2.score == 1
    assert s2.hands[0] == cards("Y3", "R1")  # draws to the newest slot


def test_misplays_end_the_game():
    env = mini()
    s = env.deal(cards("R3", "Y3", "Y1", "R2", "R1", "Y1", "R2", "Y2", "R1", "Y2"))
    s, r = env.apply(s, Play(0))
    assert r == 0.0 and s.life == 1 and parse_card("R3") in s.discards
    s, _ = env.apply(s, Play(1))  # R2 on an empty firework
    assert s.terminal and s.life == 0


def test_zero_on_death_flag():
    env = HanabiEnv(HanabiConfig.mini(zero_on_death=True))
    s = env.deal(cards("R1", "Y3", "R3", "Y2", "R1", "Y1", "R2", "Y2", "Y1", "R2"))
    total = 0.0
    for a in (Play(0), Play(0), Play(0)):  # R1 scores, then two misplays
        s, r = env.apply(s, a)
        total += r
    assert s.terminal and total == 0.0


def test_hint_soundness():
    env = mini()
    s = env.deal(cards("R1", "Y3", "Y1", "R1", "R2", "Y2", "R2", "Y2", "R3", "Y1"))
    s2, _ = env.apply(s, HintRank(1))
    k0, k1 = s2.knowledge[1]
    assert k0.ranks == 0b001 and k1.ranks == 0b001 and k0.rank_hinted
    s3, _ = env.apply(s2, HintColor(Y))
    for card, k in zip(s3.hands[0], s3.knowledge[0]):
        assert k.allows(card)
        assert (k.colors == 1 << Y) == (card[0] == Y)


def test_completing_a_colour_restores_a_token():
    env = mini()
    s = env.deal(cards("R1", "R2", "Y1", "Y1", "R3", "Y2", "R1", "Y2", "R2", "Y3"))
    s, _ = env.apply(s, HintRank(1))
    s, _ = env.apply(s, HintRank(1))  # info 1
    for a in (Play(0), Play(0), Play(0), Play(1)):  # R1, Y1, R2, Y2
        s, r = env.apply(s, a)
        assert r == 1.0
    assert s.hands[0] == cards("R3", "R1") and s.info == 1
    s, r = env.apply(s, Play(0))
    assert r == 1.0 and s.fireworks == (3, 2) and s.info == 2


def test_final_round_countdown():
    env = mini()
    s = env.initial_state(np.random.default_rng(3))
    # player 0 hints, player 1 discards: no lives lost, one draw per round
    while s.deck:
        legal = env.legal_actions(s, s.turn)
        a = next(a for a in legal if isinstance(a, (HintColor, HintRank))) if s.turn == 0 else Discard(0)
        s, _ = env.apply(s, a)
    assert s.countdown == 2 and not s.terminal
    s, _ = env.apply(s, env.legal_actions(s, s.turn)[0])
    assert s.countdown == 1 and not s.terminal
    s, _ = env.apply(s, Discard(0) if s.info < 3 else Play(0))
    assert s.terminal


def test_perfect_game_scores_max():
    env = HanabiEnv()
    order = [(c, r) for r in range(1, 6) for c in range(5)]
    extra = Counter((c, r) for c in range(5) for r, n in enumerate((3, 2, 2, 2, 1), 1) for _ in range(n))
    extra.subtract(Counter(order))
    # both players play slot 0 every turn; player p's queue holds order[p::2]
    deck = order[0:10:2] + order[1:10:2] + order[10:] + sorted(extra.elements())
    s = env.deal(deck)
    total = 0.0
    while not s.terminal:
        s, r = env.apply(s, Play(0))
        total += r
    assert total == 25 and s.score == 25 and s.fireworks == (5,) * 5


def test_card_strings_round_trip():
    for c in range(5):
        for r in range(1, 6):
            assert parse_card(card_str((c, r))) == (c, r)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_invariants_along_random_playouts(seed, standard):
    env = HanabiEnv() if standard else mini()
    cfg = env.config
    fw_prev = [None]

    def check(s):
        assert env.conserved(s)
        assert 0 <= s.info <= cfg.info_tokens and s.life >= 0
        assert all(0 <= f <= cfg.num_ranks for f in s.fireworks)
        if fw_prev[0] is not None:
            assert all(a >= b for a, b in zip(s.fireworks, fw_prev[0]))
        fw_prev[0] = s.fireworks
        for hand, know in zip(s.hands, s.knowledge):
            assert all(k.allows(c) for c, k in zip(hand, know))

    s, total = random_playout(env, np.random.default_rng(seed), check)
    assert total == s.score == sum(s.fireworks) <= cfg.max_score


def test_replay_determinism():
    env = mini()
    a, ta = random_playout(env, np.random.default_rng(11))
    b, tb = random_playout(env, np.random.default_rng(11))
    assert a == b and ta == tb


def test_observation_hides_own_hand_only():
    env = mini()
    s = env.initial_state(np.random.default_rng(0))
    o = env.observe(s, 0)
    assert 0 not in o.private and o.private[1] == s.hands[1]
    assert "deck" not in repr(o.public).lower() or o.public.deck_size == len(s.deck)
    assert not hasattr(o.public, "deck")
    with pytest.raises(ValueError):
        env.observe(s, 2)


def test_partition_covers_state():
    env = mini()
    s = env.initial_state(np.random.default_rng(0))
    part = env.partition(s)
    assert part.private[0]["partner_hand"] == s.hands[1]
    assert part.private[1]["partner_hand"] == s.hands[0]
    assert part.environment["deck"] == s.deck
    assert set(part.public) & {"deck", "hands"} == set()


# ---- hidden-hand priors


def test_prior_two_one_one_counts():
    env = HanabiEnv(HanabiConfig(colors=3, rank_counts=(2, 1), hand_size=1, info_tokens=3, life_tokens=2))
    deck = cards("R1", "Y1", "G1", "R1", "R2", "Y2", "G2", "Y1", "G1")
    s = env.deal(deck)  # P0 holds R1, P1 holds Y1
    s, _ = env.apply(s, HintColor(Y))
    s, _ = env.apply(s, HintRank(1))  # P0 now knows its card is a 1
    # move one G1 from the deck to the discard pile: unseen ones are R1 x2, Y1, G1
    rest = list(s.deck)
    rest.remove(parse_card("G1"))
    s = replace(s, deck=tuple(rest), discards=cards("G1"))
    assert env.conserved(s)
    pairs = dict(env.enumerate_hidden(s, 0))
    assert pairs == pytest.approx({cards("R1"): 0.5, cards("Y1"): 0.25, cards("G1"): 0.25}, abs=1e-12)


def test_prior_two_thirds_one_third():
    env = HanabiEnv(HanabiConfig(colors=5, rank_counts=(2, 1), hand_size=1, info_tokens=3, life_tokens=2))
    # viewer 0 knows its card is red or blue and rank 1; Y1/G1/W1 are irrelevant
    deck = cards("R1", "B1", "R1", "R2", "Y1", "Y1", "G1", "G1", "W1", "W1", "Y2", "G2", "W2", "B2")
    s = env.deal(deck)  # P0 holds R1, P1 holds B1 -> unseen red/blue ones: R1 x2 (deck+hand), B1 x1
    k = Knowledge(1 << 0 | 1 << 4, 0b01, True, True)
    s = replace(s, knowledge=((k,), s.knowledge[1]))
    pairs = dict(env.enumerate_hidden(s, 0))
    assert pairs == pytest.approx({cards("R1"): 2 / 3, cards("B1"): 1 / 3}, abs=1e-12)


def test_hand_fully_determined_is_singleton():
    env = mini()
    s = env.deal(cards("R3", "Y3", "Y1", "R2", "R1", "Y1", "R2", "Y2", "R1", "Y2"))
    k = (Knowledge(1 << R, 0b100, True, True), Knowledge(1 << Y, 0b100, True, True))
    s = replace(s, knowledge=(k, s.knowledge[1]))
    assert env.enumerate_hidden(s, 0) == [(cards("R3", "Y3"), 1.0)]
    assert env.sample_hidden_prior(s, 0, np.random.default_rng(0)) == cards("R3", "Y3")


def deck_permutation_prior(env, s, viewer):
    """P(viewer hand) by enumerating every ordering of the unseen cards."""
    cfg = env.config
    pool = []
    for t, n in enumerate(env.unseen_counts(s, viewer)):
        pool += [cfg.type_card(t)] * n
    know = s.knowledge[viewer]
    tally = Counter()
    n_hand = len(know)
    for perm in itertools.permutations(range(len(pool))):
        hand = tuple(pool[i] for i in perm[:n_hand])
        if all(k.allows(c) for k, c in zip(know, hand)):
            tally[hand] += 1
    z = sum(tally.values())
    return {h: c / z for h, c in tally.items()}


def reachable_mini_states(n, seed=0, depth_max=10):
    env = mini()
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        s = env.initial_state(rng)
        for _ in range(int(rng.integers(0, depth_max))):
            if s.terminal:
                break
            legal = env.legal_actions(s, s.turn)
            s, _ = env.apply(s, legal[int(rng.integers(len(legal)))])
        if not s.terminal:
            out.append(s)
    return env, out


def test_mini_prior_matches_deck_permutations():
    env, states = reachable_mini_states(8, seed=5, depth_max=12)
    checked = 0
    for s in states:
        if sum(env.unseen_counts(s, 0)) > 8:
            continue
        exact = deck_permutation_prior(env, s, 0)
        got = dict(env.enumerate_hidden(s, 0))
        assert set(got) == set(exact)
        for h in got:
            assert abs(got[h] - exact[h]) < 1e-9
        checked += 1
    assert checked >= 2


def test_enumeration_matches_brute_force_filter():
    env, states = reachable_mini_states(40, seed=2)
    for s in states:
        for viewer in (0, 1):
            got = dict(env.enumerate_hidden(s, viewer))
            want = dict(brute_hand_prior(env, s, viewer))
            assert set(got) == set(want)
            assert max(abs(got[h] - want[h]) for h in got) < 1e-9
            assert sum(got.values()) == pytest.approx(1.0, abs=1e-9)


def test_sampler_matches_enumeration():
    env, states = reachable_mini_states(1, seed=4, depth_max=1)
    s = states[0]
    exact = dict(env.enumerate_hidden(s, 0))
    draw = env.hand_sampler(s, 0)
    rng = np.random.default_rng(0)
    n = 100_000
    tally = Counter(draw(rng) for _ in range(n))
    tv = 0.5 * sum(abs(exact.get(h, 0) - tally.get(h, 0) / n) for h in set(exact) | set(tally))
    assert tv < 0.01


def test_standard_start_is_too_large_to_enumerate():
    env = HanabiEnv()
    s = env.initial_state(np.random.default_rng(0))
    with pytest.raises(HiddenSpaceTooLarge, match="too large"):
        env.enumerate_hidden(s, 0)


def test_standard_samples_respect_hints():
    env = HanabiEnv()
    rng = np.random.default_rng(9)
    s = env.initial_state(rng)
    for _ in range(12):
        if s.terminal:
            break
        legal = env.legal_actions(s, s.turn)
        hints = [a for a in legal if isinstance(a, (HintColor, HintRank))]
        s, _ = env.apply(s, hints[int(rng.integers(len(hints)))] if hints else legal[0])
    for _ in range(200):
        hand = env.sample_hidden_prior(s, s.turn, rng)
        assert env.consistent(s, s.turn, hand)

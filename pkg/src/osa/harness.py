"""Seeded batch evaluation: single games, cross-play matrices, OSA evaluation
(partner in or out of the portfolio), k-shot sequences and result emission."""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .agent import Agent, BeliefSettings, KShotController, OsaAgent, PolicyAgent, ReuseFixed
from .core import Environment, GameRecord, Step, game_streams, stream_seed
from .policies.base import Portfolio

SCHEMA_VERSION = 1
CSV_HEADER = ["pi_c", "pi_s", "n", "mean", "stderr"]


def run_game(env: Environment, agents: Sequence[Agent], seed: int, trace_belief: bool = False) -> GameRecord:
    """Play one game. Seat ``i`` is ``agents[i]``; all randomness derives from ``seed``."""
    if len(agents) != env.spec.num_agents:
        raise ValueError(f"{env!r} needs {env.spec.num_agents} agents, got {len(agents)}")
    deal_rng, rngs = game_streams(seed, len(agents))
    state = env.initial_state(deal_rng)
    for seat, agent in enumerate(agents):
        agent.reset(env, seat)
    gamma = env.spec.discount
    record = GameRecord(seed=seed, discount=gamma)
    total = 0.0
    t = 0
    while not state.terminal:
        if t >= env.spec.max_steps:
            raise RuntimeError(f"game exceeded {env.spec.max_steps} steps")
        p = state.turn
        obs = env.observe(state, p)
        action = agents[p].act(obs, rngs[p])
        nxt, r = env.apply(state, action)
        record.steps.append(Step(p, obs.digest(), action, r))
        total += gamma**t * r
        for q, agent in enumerate(agents):
            if q != p:
                agent.observe(state, p, action, nxt, rngs[q])
        state = nxt
        t += 1
    record.final_reward = total
    record.meta["agents"] = [a.id for a in agents]
    if trace_belief:
        traces = {str(i): a.trace() for i, a in enumerate(agents) if a.trace() is not None}
        record.belief_trace = [dict(seat=int(s), **e) for s, tr in traces.items() for e in tr]
    return record


# --------------------------------------------------------------------------- results


@dataclass
class Row:
    pi_c: str
    pi_s: str
    rewards: list[float]
    histogram: dict[str, int] | None = None
    histogram_positive: dict[str, int] | None = None

    @property
    def n(self) -> int:
        return len(self.rewards)

    @property
    def mean(self) -> float:
        return float(np.mean(self.rewards))

    @property
    def stderr(self) -> float:
        if self.n < 2:
            return 0.0
        return float(np.std(self.rewards, ddof=1) / math.sqrt(self.n))


@dataclass
class EvalResult:
    kind: str
    rows: list[Row] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def cell(self, pi_c: str, pi_s: str) -> Row:
        for row in self.rows:
            if row.pi_c == pi_c and row.pi_s == pi_s:
                return row
        raise KeyError((pi_c, pi_s))

    def to_json(self) -> dict:
        rows = []
        for r in self.rows:
            d = {"pi_c": r.pi_c, "pi_s": r.pi_s, "n": r.n, "mean": r.mean, "stderr": r.stderr, "rewards": r.rewards}
            if r.histogram is not None:
                d["histogram"] = r.histogram
                d["histogram_positive"] = r.histogram_positive
            rows.append(d)
        return {"schema_version": SCHEMA_VERSION, "kind": self.kind, "metadata": self.metadata, "rows": rows}

    @classmethod
    def from_json(cls, data: dict) -> "EvalResult":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {data.get('schema_version')!r}")
        rows = [
            Row(d["pi_c"], d["pi_s"], [float(x) for x in d["rewards"]], d.get("histogram"), d.get("histogram_positive"))
            for d in data["rows"]
        ]
        return cls(data["kind"], rows, data.get("metadata", {}))

    def __eq__(self, other):
        return isinstance(other, EvalResult) and self.to_json() == other.to_json()


def emit(result: EvalResult, path: str | os.PathLike, formats: Sequence[str] = ("csv", "json")) -> list[Path]:
    """Write ``<path>.csv`` (one row per cell) and/or ``<path>.json``."""
    base = Path(path)
    base.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in formats:
        out = base.with_suffix("." + fmt)
        if fmt == "csv":
            with open(out, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(CSV_HEADER)
                for r in result.rows:
                    w.writerow([r.pi_c, r.pi_s, r.n, repr(r.mean), repr(r.stderr)])
            if any(r.histogram is not None for r in result.rows):
                hist = base.with_name(base.name + "_hist.csv")
                with open(hist, "w", newline="") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    w.writerow(["pi_c", "pi_s", "final_policy", "count", "count_positive"])
                    for r in result.rows:
                        for pid, cnt in (r.histogram or {}).items():
                            w.writerow([r.pi_c, r.pi_s, pid, cnt, (r.histogram_positive or {}).get(pid, 0)])
                written.append(hist)
        elif fmt == "json":
            with open(out, "w") as fh:
                json.dump(result.to_json(), fh, indent=1, sort_keys=True)
                fh.write("\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")
        written.append(out)
    return written


# --------------------------------------------------------------------------- batch runs


def worker_count(requested: int | None = None) -> int:
    """Requested workers (default: CPU count), capped by ``OSA_THREADS``."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("OSA_THREADS")
    if cap:
        n = min(n, int(cap))
    return max(1, n)


@dataclass(frozen=True)
class Seating:
    """Which seat the complex (evaluated) agent takes: 0, 1 or alternate by game index."""

    mode: str = "alternate"

    def seat(self, game_index: int) -> int:
        if self.mode == "alternate":
            return game_index % 2
        return int(self.mode)


def _seated(complex_agent: Agent, partner: Agent, seat: int) -> list[Agent]:
    return [complex_agent, partner] if seat == 0 else [partner, complex_agent]


@dataclass(frozen=True)
class GameJob:
    """Everything needed to play one evaluation game in any process."""

    kind: str  # "fixed" or "osa"
    pi_c: str  # fixed policy id, or OSA initial policy
    pi_s: str
    seed: int
    seat: int
    exclude_partner: bool = False


@dataclass
class GameOutcome:
    reward: float
    final_policy: str
    partner_pruned: bool = False


class Runner:
    """Binds an environment, portfolio and belief settings; fans jobs out to workers."""

    def __init__(
        self,
        env: Environment,
        portfolio: Portfolio,
        settings: BeliefSettings | None = None,
        seating: Seating | None = None,
        workers: int | None = None,
        partners: Portfolio | None = None,
    ):
        self.env = env
        self.portfolio = portfolio
        self.partners = partners or portfolio
        self.settings = settings or BeliefSettings()
        self.seating = seating or Seating()
        self.workers = worker_count(workers)

    def play(self, job: GameJob) -> GameOutcome:
        partner = PolicyAgent(self.partners[job.pi_s])
        if job.kind == "fixed":
            agent = PolicyAgent(self.portfolio[job.pi_c])
        else:
            pf = self.portfolio.without(job.pi_s) if job.exclude_partner else self.portfolio
            agent = OsaAgent(pf, init_policy=job.pi_c, settings=self.settings)
        rec = run_game(self.env, _seated(agent, partner, job.seat), job.seed)
        if job.kind == "fixed":
            return GameOutcome(rec.final_reward, job.pi_c)
        return GameOutcome(rec.final_reward, agent.final_policy, job.pi_s in agent.pruned)

    def run(self, jobs: Sequence[GameJob]) -> list[GameOutcome]:
        if self.workers <= 1 or len(jobs) < 2:
            return [self.play(j) for j in jobs]
        chunk = max(1, len(jobs) // (self.workers * 8))
        with ProcessPoolExecutor(self.workers) as pool:
            return list(pool.map(self.play, jobs, chunksize=chunk))

    def game_seed(self, base: int, pi_c: str, pi_s: str, index: int, *extra) -> int:
        return stream_seed(base, pi_c, pi_s, index, *extra)


def _histograms(outcomes: Sequence[GameOutcome], ids: Sequence[str]):
    hist = {pid: 0 for pid in ids}
    pos = {pid: 0 for pid in ids}
    for o in outcomes:
        hist[o.final_policy] = hist.get(o.final_policy, 0) + 1
        if o.reward > 0:
            pos[o.final_policy] = pos.get(o.final_policy, 0) + 1
    return hist, pos


def crossplay_matrix(
    runner: Runner,
    n_games: int,
    seed: int,
    ids: Sequence[str] | None = None,
    partners: Sequence[str] | None = None,
) -> EvalResult:
    """Every ordered pair (complex policy, simple policy), self-play included."""
    ids = list(ids or runner.portfolio.ids)
    partners = list(partners or runner.partners.ids)
    jobs, cells = [], []
    for c in ids:
        for s in partners:
            cells.append((c, s))
            for g in range(n_games):
                jobs.append(GameJob("fixed", c, s, runner.game_seed(seed, c, s, g), runner.seating.seat(g)))
    outs = runner.run(jobs)
    rows = []
    for i, (c, s) in enumerate(cells):
        chunk = outs[i * n_games : (i + 1) * n_games]
        rows.append(Row(c, s, [o.reward for o in chunk]))
    return EvalResult("crossplay", rows, {"n_games": n_games, "seed": seed, "seating": runner.seating.mode})


def osa_eval(
    runner: Runner,
    exclude_partner: bool,
    n_games: int,
    seed: int,
    inits: Sequence[str] | None = None,
    partners: Sequence[str] | None = None,
) -> EvalResult:
    """OSA against each simple policy, once per initial policy.

    Histograms count the final response policy over all games and over the
    games with positive reward.
    """
    if exclude_partner and len(runner.portfolio) < 2:
        raise ValueError("excluding the partner from a one-policy portfolio leaves it empty")
    partners = list(partners or runner.partners.ids)
    cells, jobs = [], []
    for s in partners:
        pool = [pid for pid in runner.portfolio.ids if not (exclude_partner and pid == s)]
        for c in inits or pool:
            if c not in pool:
                continue
            cells.append((c, s))
            for g in range(n_games):
                jobs.append(GameJob("osa", c, s, runner.game_seed(seed, c, s, g), runner.seating.seat(g), exclude_partner))
    outs = runner.run(jobs)
    rows = []
    for i, (c, s) in enumerate(cells):
        chunk = outs[i * n_games : (i + 1) * n_games]
        hist, pos = _histograms(chunk, runner.portfolio.ids)
        row = Row(c, s, [o.reward for o in chunk], hist, pos)
        rows.append(row)
    meta = {
        "n_games": n_games,
        "seed": seed,
        "exclude_partner": exclude_partner,
        "seating": runner.seating.mode,
        "belief": asdict(runner.settings),
        "partner_pruned": {f"{c}|{s}": sum(o.partner_pruned for o in outs[i * n_games : (i + 1) * n_games]) for i, (c, s) in enumerate(cells)},
    }
    return EvalResult("osa-eval", rows, meta)


@dataclass
class KShotJob:
    pi_s: str
    k: int
    sequence: int
    init: str
    base_seed: int
    seat: int
    reuse: str = "latest"
    carry_belief: bool = False


def play_kshot(runner: Runner, job: KShotJob) -> tuple[list[float], list[str]]:
    """Play the k+1 games of one sequence against ``pi_s`` (excluded from the portfolio).

    The final game always uses the seed of game ``sequence`` in the matching
    single-shot OSA evaluation, so k = 0 reproduces it exactly and all k share
    the final deal.
    """
    pf = runner.portfolio.without(job.pi_s)
    ctl = KShotController(job.k, reuse=job.reuse)
    partner = PolicyAgent(runner.partners[job.pi_s])
    osa = OsaAgent(pf, init_policy=job.init, settings=runner.settings, carry_belief=job.carry_belief)
    for m in range(job.k + 1):
        back = job.k - m
        if back == 0:
            seed = runner.game_seed(job.base_seed, job.init, job.pi_s, job.sequence)
        else:
            seed = runner.game_seed(job.base_seed, job.init, job.pi_s, job.sequence, "kshot", back)
        decision = ctl.next_policy()
        if isinstance(decision, ReuseFixed):
            agent = PolicyAgent(pf[decision.policy_id])
            rec = run_game(runner.env, _seated(agent, partner, job.seat), seed)
            ctl.record(rec.final_reward, decision.policy_id)
        else:
            rec = run_game(runner.env, _seated(osa, partner, job.seat), seed)
            ctl.record(rec.final_reward, osa.final_policy)
    return ctl.rewards, ctl.final_policies


def _kshot_worker(args):
    runner, job = args
    return play_kshot(runner, job)


def kshot_eval(
    runner: Runner,
    k_values: Sequence[int],
    n_sequences: int,
    seed: int,
    partners: Sequence[str] | None = None,
    reuse: str = "latest",
    init: str | None = None,
    carry_belief: bool = False,
) -> EvalResult:
    """Mean final-game reward of (k+1)-game sequences against each excluded
    partner, plus the best cross-play of any other portfolio policy with it."""
    partners = list(partners or runner.partners.ids)
    rows = []
    for s in partners:
        pool = [pid for pid in runner.portfolio.ids if pid != s]
        start = init if init in pool else pool[0]
        for k in k_values:
            jobs = [(runner, KShotJob(s, k, n, start, seed, runner.seating.seat(n), reuse, carry_belief)) for n in range(n_sequences)]
            if runner.workers > 1:
                with ProcessPoolExecutor(runner.workers) as ex:
                    results = list(ex.map(_kshot_worker, jobs, chunksize=max(1, len(jobs) // (runner.workers * 8))))
            else:
                results = [_kshot_worker(j) for j in jobs]
            finals = [r[0][-1] for r in results]
            hist, pos = _histograms([GameOutcome(r[0][-1], r[1][-1]) for r in results], runner.portfolio.ids)
            rows.append(Row(f"k={k}", s, finals, hist, pos))
        xp = crossplay_matrix(runner, n_sequences, seed, ids=pool, partners=[s])
        best = max((xp.cell(c, s) for c in pool), key=lambda r: r.mean)
        rows.append(Row("max", s, best.rewards, {best.pi_c: best.n}, None))
    meta = {
        "n_sequences": n_sequences,
        "seed": seed,
        "k_values": list(k_values),
        "reuse": reuse,
        "carry_belief": carry_belief,
        "seating": runner.seating.mode,
        "max_row": "best cross-play with pi_s among portfolio policies other than pi_s (histogram names it)",
    }
    return EvalResult("kshot", rows, meta)

"""Run configuration: dataclasses, TOML loading and factories for envs and portfolios."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .agent import BeliefSettings
from .core import Environment
from .hanabi import HanabiConfig, HanabiEnv
from .harness import Runner, Seating
from .policies import HANABI_BOTS, Noisy, Portfolio, RandomPolicy, make_portfolio
from .policies.toy_bots import ConventionBot, shift_conventions
from .toy import ToyConfig, ToyEnv


@dataclass
class EnvSection:
    name: str = "hanabi-mini"  # hanabi-mini, hanabi or toy
    colors: int | None = None
    rank_counts: list[int] | None = None
    hand_size: int | None = None
    info_tokens: int | None = None
    life_tokens: int | None = None
    zero_on_death: bool = False


@dataclass
class ToySection:
    card_values: int = 4
    signals: int = 4
    rounds: int = 8
    open_rounds: int = 1
    conventions: int = 3
    # explicit card -> signal maps; overrides the shift conventions when given
    mappings: list[list[int]] | None = None


@dataclass
class PortfolioSection:
    policies: list[str] | None = None  # default: every bot for the env
    noise: float = 0.0
    best_responses: dict[str, str] = field(default_factory=dict)


@dataclass
class BeliefSection:
    epsilon: float = 1e-9
    sweeps: int = 5
    backend: str = "auto"
    M: int = 1000

    def settings(self) -> BeliefSettings:
        return BeliefSettings(self.epsilon, self.sweeps, self.backend, self.M)


@dataclass
class EvalSection:
    n_games: int = 1000
    seed: int = 0
    output_dir: str = "results"
    seating: str = "alternate"
    reuse: str = "latest"
    carry_belief: bool = False
    k: list[int] = field(default_factory=lambda: [0, 1, 4])
    init: str | None = None


@dataclass
class RunConfig:
    env: EnvSection = field(default_factory=EnvSection)
    toy: ToySection = field(default_factory=ToySection)
    portfolio: PortfolioSection = field(default_factory=PortfolioSection)
    belief: BeliefSection = field(default_factory=BeliefSection)
    eval: EvalSection = field(default_factory=EvalSection)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        out = cls()
        for f in fields(cls):
            section = data.get(f.name, {})
            target = getattr(out, f.name)
            known = {g.name for g in fields(target)}
            unknown = set(section) - known
            if unknown:
                raise ValueError(f"unknown keys in [{f.name}]: {sorted(unknown)}")
            for k, v in section.items():
                setattr(target, k, v)
        extra = set(data) - {f.name for f in fields(cls)}
        if extra:
            raise ValueError(f"unknown config sections: {sorted(extra)}")
        return out

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        with open(path, "rb") as fh:
            return cls.from_dict(tomllib.load(fh))


def build_env(cfg: RunConfig) -> Environment:
    e = cfg.env
    if e.name == "toy":
        t = cfg.toy
        return ToyEnv(ToyConfig(t.card_values, t.signals, t.rounds, t.open_rounds))
    if e.name not in ("hanabi", "hanabi-mini"):
        raise ValueError(f"unknown env {e.name!r}")
    overrides = {
        k: getattr(e, k)
        for k in ("colors", "hand_size", "info_tokens", "life_tokens")
        if getattr(e, k) is not None
    }
    if e.rank_counts is not None:
        overrides["rank_counts"] = tuple(e.rank_counts)
    overrides["zero_on_death"] = e.zero_on_death
    base = HanabiConfig.mini if e.name == "hanabi-mini" else HanabiConfig.standard
    return HanabiEnv(base(**overrides))


def build_portfolio(cfg: RunConfig) -> Portfolio:
    p = cfg.portfolio
    if cfg.env.name == "toy":
        t = cfg.toy
        if t.mappings:
            bots = [ConventionBot(m) for m in t.mappings]
        else:
            bots = shift_conventions(t.conventions, t.card_values)
        if p.policies:
            by_id = {b.id: b for b in bots}
            bots = [by_id[i] for i in p.policies]
    else:
        # the uniform baseline is available by name but not in the default portfolio
        known = {**HANABI_BOTS, "random": RandomPolicy}
        ids = p.policies or list(HANABI_BOTS)
        unknown = [i for i in ids if i not in known]
        if unknown:
            raise ValueError(f"unknown bots {unknown}; choose from {sorted(known)}")
        bots = [known[i]() for i in ids]
    if p.noise > 0:
        bots = [Noisy(b, p.noise) for b in bots]
    return make_portfolio(bots, p.best_responses)


def build_runner(cfg: RunConfig, workers: int | None = None) -> Runner:
    return Runner(
        build_env(cfg),
        build_portfolio(cfg),
        settings=cfg.belief.settings(),
        seating=Seating(cfg.eval.seating),
        workers=workers,
    )

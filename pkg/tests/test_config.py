import pytest

from osa.config import RunConfig, build_env, build_portfolio, build_runner
from osa.hanabi import HanabiEnv
from osa.policies import Noisy
from osa.toy import ToyEnv


def test_defaults():
    cfg = RunConfig()
    assert cfg.eval.n_games == 1000 and cfg.belief.epsilon == 1e-9 and cfg.belief.sweeps == 5
    env = build_env(cfg)
    assert isinstance(env, HanabiEnv) and env.config.colors == 2
    assert build_portfolio(cfg).ids == ["valuebot", "holmesbot", "iggi", "piers"]


def test_unknown_keys_rejected():
    with pytest.raises(ValueError, match="unknown keys"):
        RunConfig.from_dict({"belief": {"epsilon": 1e-6, "sweep": 3}})
    with pytest.raises(ValueError, match="unknown config sections"):
        RunConfig.from_dict({"evaluation": {}})


def test_load_toml(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        """
[env]
name = "toy"

[toy]
mappings = [[0, 1, 2, 3], [1, 0, 3, 2]]

[portfolio]
noise = 0.1
best_responses = { "convention-0123" = "convention-1032" }

[belief]
backend = "enumerate"

[eval]
n_games = 12
seed = 4
"""
    )
    cfg = RunConfig.load(path)
    assert cfg.eval.n_games == 12 and cfg.eval.seed == 4
    assert isinstance(build_env(cfg), ToyEnv)
    pf = build_portfolio(cfg)
    assert pf.ids == ["convention-0123", "convention-1032"]
    assert all(isinstance(p, Noisy) for p in pf.policies)
    assert pf.best_response("convention-0123") == "convention-1032"
    runner = build_runner(cfg, workers=1)
    assert runner.settings.backend == "enumerate"


def test_hanabi_overrides_and_errors():
    cfg = RunConfig.from_dict({"env": {"name": "hanabi", "life_tokens": 1, "zero_on_death": True}})
    env = build_env(cfg)
    assert env.config.life_tokens == 1 and env.config.zero_on_death and env.config.colors == 5
    with pytest.raises(ValueError):
        build_env(RunConfig.from_dict({"env": {"name": "chess"}}))
    with pytest.raises(ValueError):
        build_portfolio(RunConfig.from_dict({"portfolio": {"policies": ["valuebot", "nobody"]}}))
    pf = build_portfolio(RunConfig.from_dict({"portfolio": {"policies": ["iggi", "random"]}}))
    assert pf.ids == ["iggi", "random"]
    cfg = RunConfig.from_dict({"env": {"name": "toy"}, "toy": {"conventions": 2}, "portfolio": {"policies": ["shift-1"]}})
    assert build_portfolio(cfg).ids == ["shift-1"]

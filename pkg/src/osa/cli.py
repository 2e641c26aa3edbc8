"""Command line entry point: ``python -m osa <command>``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .agent import OsaAgent, PolicyAgent
from .checks import oracle_check
from .config import RunConfig, build_runner
from .harness import Seating, crossplay_matrix, emit, kshot_eval, osa_eval, run_game


def _config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.env:
        cfg.env.name = args.env
    if args.n_games is not None:
        cfg.eval.n_games = args.n_games
    elif args.fast:
        cfg.eval.n_games = 100
    if args.seed is not None:
        cfg.eval.seed = args.seed
    if args.out:
        cfg.eval.output_dir = args.out
    return cfg


def _report(paths) -> None:
    for p in paths:
        print(f"wrote {p}")


def cmd_crossplay(args) -> int:
    cfg = _config(args)
    runner = build_runner(cfg, args.workers)
    res = crossplay_matrix(runner, cfg.eval.n_games, cfg.eval.seed)
    _report(emit(res, Path(cfg.eval.output_dir) / "crossplay"))
    for row in res.rows:
        print(f"{row.pi_c:>12} x {row.pi_s:<12} {row.mean:7.3f} +- {row.stderr:.3f}")
    return 0


def cmd_osa_eval(args) -> int:
    cfg = _config(args)
    runner = build_runner(cfg, args.workers)
    inits = [cfg.eval.init] if cfg.eval.init else None
    res = osa_eval(runner, args.exclude_partner, cfg.eval.n_games, cfg.eval.seed, inits=inits)
    name = "osa_eval_excluded" if args.exclude_partner else "osa_eval"
    _report(emit(res, Path(cfg.eval.output_dir) / name))
    for row in res.rows:
        top = max(row.histogram, key=row.histogram.get)
        print(f"init {row.pi_c:>12} vs {row.pi_s:<12} {row.mean:7.3f} +- {row.stderr:.3f}  modal final policy {top}")
    return 0


def cmd_kshot(args) -> int:
    cfg = _config(args)
    ks = [int(x) for x in args.k.split(",")] if args.k else cfg.eval.k
    runner = build_runner(cfg, args.workers)
    carry = args.carry_belief or cfg.eval.carry_belief
    res = kshot_eval(runner, ks, cfg.eval.n_games, cfg.eval.seed, reuse=cfg.eval.reuse, init=cfg.eval.init, carry_belief=carry)
    _report(emit(res, Path(cfg.eval.output_dir) / "kshot"))
    for row in res.rows:
        print(f"{row.pi_c:>6} vs {row.pi_s:<12} {row.mean:7.3f} +- {row.stderr:.3f}")
    return 0


def cmd_oracle_check(args) -> int:
    cfg = _config(args)
    results = oracle_check(cfg.eval.seed)
    out = Path(cfg.eval.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = [
        {"name": r.name, "value": r.value, "threshold": r.threshold, "passed": r.passed} for r in results
    ]
    with open(out / "oracle_check.json", "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def cmd_play_one(args) -> int:
    cfg = _config(args)
    runner = build_runner(cfg, 1)
    pf = runner.portfolio
    partner_id = args.partner or pf.ids[0]
    own = pf.without(partner_id) if args.exclude_partner else pf
    osa = OsaAgent(own, init_policy=cfg.eval.init if cfg.eval.init in own else None, settings=runner.settings, trace_belief=args.trace_belief)
    seat = Seating(cfg.eval.seating).seat(0) if args.seat is None else args.seat
    agents = [osa, PolicyAgent(pf[partner_id])]
    if seat == 1:
        agents.reverse()
    seed = cfg.eval.seed
    rec = run_game(runner.env, agents, seed, trace_belief=args.trace_belief)
    rec.meta["final_policy"] = osa.final_policy
    out = Path(cfg.eval.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"play_one_{seed}.json"
    with open(path, "w") as fh:
        fh.write(rec.dumps(runner.env))
        fh.write("\n")
    print(f"wrote {path}")
    print(f"reward {rec.final_reward:g} in {len(rec.steps)} steps; final response policy {osa.final_policy}")
    if args.trace_belief:
        for entry in rec.belief_trace or []:
            print(f"  sampled {entry['sampled']:<12} mode {entry['mode']:<12} active {entry['active']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file with [env] [toy] [portfolio] [belief] [eval] sections")
    common.add_argument("--env", choices=["hanabi-mini", "hanabi", "toy"], help="override [env].name")
    common.add_argument("--n-games", type=int, help="games (or k-shot sequences) per cell")
    common.add_argument("--fast", action="store_true", help="100 games per cell unless --n-games is given")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int, help="worker processes (capped by OSA_THREADS)")

    p = argparse.ArgumentParser(prog="osa", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("crossplay", parents=[common], help="fixed-policy cross-play matrix").set_defaults(fn=cmd_crossplay)
    q = sub.add_parser("osa-eval", parents=[common], help="OSA agent against each portfolio policy")
    q.add_argument("--exclude-partner", action="store_true", help="remove the partner's policy from the portfolio")
    q.set_defaults(fn=cmd_osa_eval)
    q = sub.add_parser("kshot", parents=[common], help="k-shot sequences with policy reuse")
    q.add_argument("--k", help="comma separated k values, e.g. 0,1,4")
    q.add_argument("--carry-belief", action="store_true", help="keep the belief between games of a sequence")
    q.set_defaults(fn=cmd_kshot)
    sub.add_parser("oracle-check", parents=[common], help="sampler vs exact inference").set_defaults(fn=cmd_oracle_check)
    q = sub.add_parser("play-one", parents=[common], help="one OSA game, optionally with the belief trace")
    q.add_argument("--partner", help="partner policy id (default: first portfolio entry)")
    q.add_argument("--seat", type=int, choices=[0, 1], help="OSA seat (default 0)")
    q.add_argument("--exclude-partner", action="store_true")
    q.add_argument("--trace-belief", action="store_true")
    q.set_defaults(fn=cmd_play_one)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

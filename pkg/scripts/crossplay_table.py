"""Print the fixed-policy cross-play matrix on mini-Hanabi (or the toy game)."""

import argparse

from osa.config import RunConfig, build_runner
from osa.harness import crossplay_matrix, emit


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--env", default="hanabi-mini", choices=["hanabi-mini", "hanabi", "toy"])
    ap.add_argument("--n-games", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/crossplay")
    args = ap.parse_args()

    cfg = RunConfig()
    cfg.env.name = args.env
    runner = build_runner(cfg)
    res = crossplay_matrix(runner, args.n_games, args.seed)
    emit(res, args.out)
    ids = runner.portfolio.ids
    print("pi_c \\ pi_s".ljust(14) + "".join(s[:10].rjust(12) for s in ids))
    for c in ids:
        print(c[:12].ljust(14) + "".join(f"{res.cell(c, s).mean:12.3f}" for s in ids))


if __name__ == "__main__":
    main()

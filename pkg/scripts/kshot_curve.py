"""Mean reward of the last game in k-shot sequences, against the best fixed
response from the rest of the portfolio."""

import argparse

from osa.config import RunConfig, build_runner
from osa.harness import emit, kshot_eval


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--env", default="hanabi-mini", choices=["hanabi-mini", "toy"])
    ap.add_argument("--k", default="0,1,2,4")
    ap.add_argument("--n-seq", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/kshot")
    args = ap.parse_args()

    cfg = RunConfig()
    cfg.env.name = args.env
    runner = build_runner(cfg)
    ks = [int(k) for k in args.k.split(",")]
    res = kshot_eval(runner, ks, args.n_seq, args.seed)
    emit(res, args.out)
    cols = [f"k={k}" for k in ks] + ["max"]
    print("partner".ljust(14) + "".join(c.rjust(10) for c in cols))
    for s in runner.portfolio.ids:
        print(s[:12].ljust(14) + "".join(f"{res.cell(c, s).mean:10.3f}" for c in cols))


if __name__ == "__main__":
    main()

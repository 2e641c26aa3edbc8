"""How often the OSA agent ends on the partner's policy, with the partner's
policy in the portfolio and without it. Without it, the modal final policy is
compared with the best cross-play response."""

import argparse

from osa.config import RunConfig, build_runner
from osa.harness import crossplay_matrix, osa_eval


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-games", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    runner = build_runner(RunConfig())
    ids = runner.portfolio.ids
    inc = osa_eval(runner, False, args.n_games, args.seed, inits=ids[:1])
    print("partner included: share of games ending on the partner's policy")
    for row in inc.rows:
        print(f"  {row.pi_s:<12} {row.histogram[row.pi_s] / row.n:.3f}   reward {row.mean:.3f} +- {row.stderr:.3f}")

    xp = crossplay_matrix(runner, args.n_games, args.seed)
    exc = osa_eval(runner, True, args.n_games, args.seed)
    print("partner excluded: final policy histogram (all inits pooled)")
    for s in ids:
        pool = [c for c in ids if c != s]
        hist = {c: 0 for c in pool}
        for row in exc.rows:
            if row.pi_s == s:
                for c in pool:
                    hist[c] += row.histogram.get(c, 0)
        total = sum(hist.values())
        best = max(pool, key=lambda c: xp.cell(c, s).mean)
        shares = ", ".join(f"{c} {hist[c] / total:.2f}" for c in pool)
        print(f"  {s:<12} {shares}   best cross-play response {best}")


if __name__ == "__main__":
    main()

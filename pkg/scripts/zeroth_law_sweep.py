"""Monte-Carlo transitivity-failure rates with Wilson intervals and an exponential fit."""

import argparse
import csv
import sys
from dataclasses import asdict, dataclass, field

from bitthermo import failure_rate_sweep, fit_exponential_decay
from bitthermo.equilibrium import PAIR_TOL


@dataclass
class SweepConfig:
    t: float = 0.3
    n_grid: list = field(default_factory=lambda: [2**p for p in range(10, 17)])
    trials: int = 200
    estimator: str = "mdl"
    tol: float = PAIR_TOL
    seed: int = 0
    duplicate: bool = False
    workers: int = 1


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--t", type=float, default=0.3)
    p.add_argument("--n-grid", default=",".join(str(2**k) for k in range(10, 17)))
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--estimator", default="mdl")
    p.add_argument("--tol", type=float, default=PAIR_TOL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duplicate", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")
    a = p.parse_args(argv)
    cfg = SweepConfig(a.t, [int(x) for x in a.n_grid.split(",")], a.trials, a.estimator,
                      a.tol, a.seed, a.duplicate, a.workers)
    rows = failure_rate_sweep(cfg.t, cfg.n_grid, cfg.trials, cfg.estimator, cfg.seed,
                              cfg.tol, cfg.duplicate, cfg.workers)
    fit = fit_exponential_decay(rows)
    fh = sys.stdout if a.out == "-" else open(a.out, "w", newline="")
    fh.write(f"# {asdict(cfg)}\n")
    fh.write(f"# fit: amplitude={fit.amplitude:.6g} decay={fit.decay:.6g} "
             f"within_ci={fit.within_ci}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "trials", "failures", "rate", "ci_low", "ci_high", "fitted"])
    for r, f in zip(rows, fit.fitted):
        w.writerow([r.n, r.trials, r.failures, r.rate, r.ci_low, r.ci_high, f])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()

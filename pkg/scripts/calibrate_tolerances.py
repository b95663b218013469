"""Slack distributions behind the pair and heat-bath tolerances in defaults.json.

Pair slack is (K_est(s||s') - 2n h((t+t')/2)) / 2n. A usable pair tolerance
must sit above every same-t slack and below every |slack| of pairs with
|t - t'| >= 0.1; the script prints both envelopes per length.
"""

import argparse
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from bitthermo import derive_seed, generate_bernoulli, is_heat_bath, pair_equilibrium


@dataclass
class CalibrationConfig:
    estimator: str = "mdl"
    lengths: list = field(default_factory=lambda: [2**10, 2**12, 2**14, 2**16])
    seeds: int = 50
    same: list = field(default_factory=lambda: [(0.3, 0.3), (0.1, 0.1), (0.45, 0.45)])
    different: list = field(default_factory=lambda: [(0.3, 0.4), (0.4, 0.5), (0.45, 0.55),
                                                     (0.1, 0.2), (0.2, 0.4)])
    heat_bath_length: int = 2**14
    probe_budget: int = 32
    seed: int = 2


def pair_slacks(cfg, n, t, t2):
    out = []
    for i in range(cfg.seeds):
        a = generate_bernoulli(n, t, derive_seed(cfg.seed, n, i, 0))
        b = generate_bernoulli(n, t2, derive_seed(cfg.seed, n, i, 1))
        out.append(pair_equilibrium(a, b, cfg.estimator, check_inputs=False).slack_bits / (2 * n))
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--estimator", default="mdl")
    a = p.parse_args(argv)
    cfg = CalibrationConfig(estimator=a.estimator, seeds=a.seeds)
    report = {"config": asdict(cfg), "pairs": [], "heat_bath": []}
    for n in cfg.lengths:
        for kind, pairs in (("same", cfg.same), ("different", cfg.different)):
            for t, t2 in pairs:
                s = pair_slacks(cfg, n, t, t2)
                report["pairs"].append({"n": n, "kind": kind, "t": t, "t_prime": t2,
                                        "min": min(s), "max": max(s)})
    for t in (0.1, 0.2, 0.3, 0.4):
        gaps = [is_heat_bath(generate_bernoulli(cfg.heat_bath_length, t,
                                                derive_seed(cfg.seed, 99, i)),
                             cfg.estimator, probe_budget=cfg.probe_budget, seed=i).relative_gap
                for i in range(cfg.seeds)]
        report["heat_bath"].append({"t": t, "max_relative_gap": float(np.max(gaps))})
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()

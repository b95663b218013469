"""Heat baths, the pairwise thermal-equilibrium relation and zeroth-law experiments."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from .bitstring import BitString, derive_seed, generate_bernoulli
from .complexity import (ComplexityEstimate, StrucTemperature, get_estimator,
                         structural_temperature)
from .thermo import BOUNDARY, OK, StatTemperature, binary_entropy, statistical_temperature

HEAT_BATH_TOL = 0.05
PAIR_TOL = 0.0045
MIN_LENGTH = 2**12


@dataclass(frozen=True)
class EquilibriumVerdict:
    """Whether a string is a heat bath: equal statistical and structural temperature.

    ``relative_gap`` = |a - b| / max(|a|, |b|, 1) on the per-symbol inverse
    scale, so it is relative above 1 bit per symbol and absolute below (near
    t = 1/2 both inverses are tiny and a pure ratio would be noise).
    """

    t_stat: StatTemperature
    t_struc: StrucTemperature | None
    relative_gap: float
    is_heat_bath: bool
    tolerance: float
    k_est_bits: float
    entropy_bits: float
    entropy_criterion: bool
    flag: str

    def as_dict(self) -> dict:
        return {
            "statistical": self.t_stat.as_dict(),
            "structural": None if self.t_struc is None else self.t_struc.as_dict(),
            "relative_gap": self.relative_gap,
            "is_heat_bath": self.is_heat_bath,
            "tolerance": self.tolerance,
            "k_est_bits": self.k_est_bits,
            "n_h_t_bits": self.entropy_bits,
            "entropy_criterion": self.entropy_criterion,
            "flag": self.flag,
        }


def inverse_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1.0)


def is_heat_bath(s: BitString, e=None, tol: float = HEAT_BATH_TOL, probe_budget: int = 4096,
                 seed: int = 0, min_length: int = MIN_LENGTH) -> EquilibriumVerdict:
    """Compare both temperatures; also report the direct test |K_est - n h(t)| / n <= tol."""
    if s.length < min_length:
        raise ValueError(f"length {s.length} below the heat-bath minimum {min_length}")
    est = get_estimator(e)
    n = s.length
    t = s.weight / n
    stat = statistical_temperature(t)
    struc = structural_temperature(s, est, probe_budget=probe_budget, seed=seed)
    k_bits = est.bits(s)
    nh = n * binary_entropy(t)
    entropy_ok = abs(k_bits - nh) / n <= tol
    if stat.flag == BOUNDARY:
        return EquilibriumVerdict(stat, struc, math.nan, False, tol, k_bits, nh, entropy_ok,
                                  BOUNDARY)
    gap = inverse_gap(stat.inverse_beta_bits, struc.inverse_per_symbol)
    return EquilibriumVerdict(stat, struc, gap, gap <= tol, tol, k_bits, nh, entropy_ok,
                              stat.flag if stat.flag != OK else struc.flag)


@dataclass(frozen=True)
class PairRelationResult:
    k_concat: ComplexityEstimate
    target_bits: float
    slack_bits: float
    in_equilibrium: bool
    tolerance: float
    t: float
    t_prime: float
    inputs_look_like_baths: tuple[bool, bool]

    def as_dict(self) -> dict:
        return {
            "k_concat_bits": self.k_concat.bits,
            "estimator": self.k_concat.estimator_id,
            "component": self.k_concat.component,
            "target_bits": self.target_bits,
            "slack_bits": self.slack_bits,
            "in_equilibrium": self.in_equilibrium,
            "tolerance": self.tolerance,
            "t": self.t,
            "t_prime": self.t_prime,
            "inputs_look_like_baths": list(self.inputs_look_like_baths),
        }


def _looks_like_bath(s: BitString, est, tol: float) -> bool:
    return abs(est.bits(s) - s.length * binary_entropy(s.weight / s.length)) / s.length <= tol


def pair_equilibrium(s: BitString, s2: BitString, e=None, tol: float = PAIR_TOL,
                     check_inputs: bool = True) -> PairRelationResult:
    """s and s2 are in equilibrium when K_est(s||s2) is within tol*2n of 2n h((t+t')/2).

    The estimator must be able to see redundancy across the seam; the
    default mixture contains a dictionary coder for that. Inputs failing the
    single-string test K_est ~ n h(t) are flagged, not rejected.
    """
    if s.length != s2.length:
        raise ValueError(f"length mismatch: {s.length} vs {s2.length}")
    est = get_estimator(e)
    n = s.length
    t, t2 = s.weight / n, s2.weight / n
    k = est.estimate(s.concat(s2))
    target = 2 * n * binary_entropy((t + t2) / 2)
    slack = k.bits - target
    flags = (_looks_like_bath(s, est, HEAT_BATH_TOL), _looks_like_bath(s2, est, HEAT_BATH_TOL)
             ) if check_inputs else (True, True)
    return PairRelationResult(k, target, slack, abs(slack) <= tol * 2 * n, tol, t, t2, flags)


NO_VIOLATION = "none"
IRREFLEXIVE_CHAIN = "irreflexive-chain"
NOISE = "noise"


@dataclass
class ZerothReport:
    """All ordered-pair verdicts over three slots.

    Transitivity is checked on every chain i ~ j, j ~ l => i ~ l over
    distinct slots; when slots i and l hold the same string that final pair
    is a reflexive one, which is how a duplicated bath breaks the law.
    """

    relation: list[list[bool | None]]
    slack_bits: list[list[float | None]]
    reflexive: list[bool | None]
    transitive: bool
    violations: list[tuple[int, int, int]]
    pattern: str
    identical_slots: list[tuple[int, int]]
    estimator_id: str
    tolerance: float
    seeds: list[int] | None = field(default=None)

    def as_dict(self) -> dict:
        return {
            "relation": self.relation,
            "slack_bits": self.slack_bits,
            "reflexive": self.reflexive,
            "reflexivity_holds": all(r for r in self.reflexive if r is not None)
            if any(r is not None for r in self.reflexive) else None,
            "transitive": self.transitive,
            "violations": [list(v) for v in self.violations],
            "pattern": self.pattern,
            "identical_slots": [list(p) for p in self.identical_slots],
            "estimator": self.estimator_id,
            "tolerance": self.tolerance,
            "seeds": self.seeds,
        }


def zeroth_law_experiment(triple: Sequence[BitString], e=None, tol: float = PAIR_TOL,
                          include_reflexive: bool = True) -> ZerothReport:
    if len(triple) != 3:
        raise ValueError("need exactly three strings")
    if len({s.length for s in triple}) != 1:
        raise ValueError("all three strings must have the same length")
    est = get_estimator(e)
    cache: dict[tuple[BitString, BitString], PairRelationResult] = {}

    def rel(a: BitString, b: BitString) -> PairRelationResult:
        if (a, b) not in cache:
            cache[(a, b)] = pair_equilibrium(a, b, est, tol, check_inputs=False)
        return cache[(a, b)]

    R: list[list[bool | None]] = [[None] * 3 for _ in range(3)]
    S: list[list[float | None]] = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            if i == j and not include_reflexive:
                continue
            r = rel(triple[i], triple[j])
            R[i][j], S[i][j] = r.in_equilibrium, r.slack_bits
    violations = []
    for i in range(3):
        for j in range(3):
            for m in range(3):
                if len({i, j, m}) == 3 and R[i][j] and R[j][m] and not R[i][m]:
                    violations.append((i, j, m))
    identical = [(i, j) for i in range(3) for j in range(i + 1, 3) if triple[i] == triple[j]]
    if not violations:
        pattern = NO_VIOLATION
    elif any(triple[i] == triple[m] for i, _, m in violations):
        pattern = IRREFLEXIVE_CHAIN
    else:
        pattern = NOISE
    return ZerothReport(R, S, [R[i][i] for i in range(3)], not violations, violations,
                        pattern, identical, est.id, tol)


@dataclass(frozen=True)
class SweepRow:
    n: int
    trials: int
    failures: int
    rate: float
    ci_low: float
    ci_high: float


def wilson_interval(failures: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(failures, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def _bath_triple(t: float, n: int, seed: int, trial: int, duplicate: bool) -> list[BitString]:
    seeds = [derive_seed(seed, n, trial, slot) for slot in range(3)]
    a, b, c = (generate_bernoulli(n, t, x) for x in seeds)
    return [a, b, a] if duplicate else [a, b, c]


def _trial_fails(args) -> bool:
    t, n, seed, trial, duplicate, e, tol = args
    triple = _bath_triple(t, n, seed, trial, duplicate)
    return not zeroth_law_experiment(triple, e, tol, include_reflexive=False).transitive


def failure_rate_sweep(t: float, n_grid: Sequence[int], trials: int, e=None, seed: int = 0,
                       tol: float = PAIR_TOL, duplicate: bool = False, workers: int = 1,
                       min_trials: int = 100) -> list[SweepRow]:
    """Monte-Carlo transitivity-failure rate over independent Bernoulli(t) triples.

    Trial i at length n draws its three strings from seeds derived from
    (seed, n, i, slot), so rows do not depend on the grid or on ``workers``.
    ``duplicate`` replaces the third string by a copy of the first.
    """
    if trials < min_trials:
        raise ValueError(f"need at least {min_trials} trials, got {trials}")
    est = get_estimator(e)
    rows = []
    for n in sorted(n_grid):
        jobs = [(t, n, seed, i, duplicate, est.id, tol) for i in range(trials)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                fails = list(pool.map(_trial_fails, jobs, chunksize=8))
        else:
            fails = [_trial_fails(j) for j in jobs]
        k = sum(fails)
        lo, hi = wilson_interval(k, trials)
        rows.append(SweepRow(n, trials, k, k / trials, lo, hi))
    return rows


@dataclass(frozen=True)
class DecayFit:
    """rate ~ amplitude * exp(-decay * n), fitted to continuity-corrected rates."""

    amplitude: float
    decay: float
    within_ci: bool
    fitted: tuple[float, ...]


def fit_exponential_decay(rows: Sequence[SweepRow]) -> DecayFit:
    """Least squares on log((f + 1/2) / (N + 1)) against n with decay clamped at >= 0.

    No decay constant is treated as ground truth; ``within_ci`` only says
    whether the fitted curve passes through every row's Wilson interval.
    """
    n = np.array([r.n for r in rows], dtype=float)
    y = np.log([(r.failures + 0.5) / (r.trials + 1) for r in rows])
    if len(rows) >= 2 and np.ptp(n) > 0:
        slope, intercept = np.polyfit(n, y, 1)
    else:
        slope, intercept = 0.0, float(np.mean(y))
    if slope > 0:
        slope, intercept = 0.0, float(np.mean(y))
    fitted = np.exp(intercept + slope * n)
    inside = all(r.ci_low - 1e-12 <= f <= r.ci_high + 1e-12 for r, f in zip(rows, fitted))
    return DecayFit(float(np.exp(intercept)), float(-slope) + 0.0, inside, tuple(map(float, fitted)))

"""Binary entropy, statistical temperature and the two-level occupancy law.

Everything is in base 2: the inverse temperature of a string with Hamming
fraction t is log2((1-t)/t) and the occupancy law is its exact inverse
t = 1 / (1 + 2**(1/T')).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .bitstring import Macrostate, log2_binomial

OK = "ok"
DIVERGENT = "divergent"
BOUNDARY = "boundary"

Number = float | Fraction | int


def _fraction(t: Number) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"fraction t={t} outside [0, 1]")
    return t


def binary_entropy(t: Number) -> float:
    """h(t) in bits, with 0 log 0 = 0."""
    t = _fraction(t)
    if t == 0.0 or t == 1.0:
        return 0.0
    return -t * math.log2(t) - (1.0 - t) * math.log2(1.0 - t)


def entropy_derivative(t: Number) -> float:
    """h'(t) = log2((1-t)/t); diverges at the endpoints."""
    t = _fraction(t)
    if t == 0.0 or t == 1.0:
        raise ValueError(f"h'(t) diverges at t={t}")
    return math.log2((1.0 - t) / t)


@dataclass(frozen=True)
class EntropyReport:
    h_bits_per_symbol: float
    total_entropy_bits: float
    dh_dt_bits: float | None


def entropy_report(t: Number, n: int) -> EntropyReport:
    h = binary_entropy(t)
    t = float(t)
    slope = None if t in (0.0, 1.0) else entropy_derivative(t)
    return EntropyReport(h, n * h, slope)


@dataclass(frozen=True)
class StatTemperature:
    """Statistical temperature with its inverse in bits.

    ``flag`` is ``divergent`` at t = 1/2 (value reported as +inf, inverse 0)
    and ``boundary`` at t in {0, 1} (signed zero, inverse +/-inf). Callers
    doing arithmetic must check the flag first.
    """

    t: float
    value: float
    inverse_beta_bits: float
    flag: str = OK

    @property
    def is_finite(self) -> bool:
        return self.flag == OK

    @property
    def sign(self) -> int:
        return int(math.copysign(1, self.value))

    def as_dict(self) -> dict:
        return {"t": self.t, "T_stat": self.value, "inv_T_stat": self.inverse_beta_bits,
                "flag": self.flag}


def statistical_temperature(t: Number) -> StatTemperature:
    t = _fraction(t)
    if t == 0.0:
        return StatTemperature(t, 0.0, math.inf, BOUNDARY)
    if t == 1.0:
        return StatTemperature(t, -0.0, -math.inf, BOUNDARY)
    inv = entropy_derivative(t)
    if inv == 0.0:
        return StatTemperature(t, math.inf, 0.0, DIVERGENT)
    return StatTemperature(t, 1.0 / inv, inv, OK)


def occupancy_from_temperature(T_prime: float) -> float:
    """Fraction of excited bits at reduced temperature T' (inverse of the above)."""
    T_prime = float(T_prime)
    if T_prime == 0.0 or math.isnan(T_prime):
        raise ValueError("reduced temperature must be a nonzero real")
    x = 1.0 / T_prime
    # 2**-x / (1 + 2**-x), arranged so the exponent never overflows
    if x >= 0:
        e = 2.0 ** -x
        return e / (1.0 + e)
    return 1.0 / (1.0 + 2.0 ** x)


def microstate_count_bits(m: Macrostate, mode: str = "exact") -> float:
    """log2 of the number of microstates: exact binomial or n*h(k/n)."""
    if mode == "exact":
        return log2_binomial(m.n, m.k)
    if mode == "asymptotic":
        return m.n * binary_entropy(Fraction(m.k, m.n))
    raise ValueError(f"mode must be 'exact' or 'asymptotic', got {mode!r}")


@dataclass(frozen=True)
class CurveRow:
    t: float
    T_stat: float
    inv_T_stat: float
    flag: str


def default_grid(points: int = 199, lo: float = 0.005, hi: float = 0.995) -> list[float]:
    """Evenly spaced grid; the step is computed in rationals so 1/2 lands exactly."""
    if points < 2:
        raise ValueError("need at least two grid points")
    lo_q, hi_q = Fraction(str(lo)), Fraction(str(hi))
    step = (hi_q - lo_q) / (points - 1)
    return [float(lo_q + i * step) for i in range(points)]


def temperature_curve(t_grid: Sequence[Number]) -> list[CurveRow]:
    grid = [float(t) for t in t_grid]
    for a, b in zip(grid, grid[1:]):
        if not b > a:
            raise ValueError("grid must be strictly increasing")
    if grid and not (0.0 < grid[0] and grid[-1] < 1.0):
        raise ValueError("grid values must lie in (0, 1)")
    rows = []
    for t in grid:
        T = statistical_temperature(t)
        rows.append(CurveRow(t, T.value, T.inverse_beta_bits, T.flag))
    return rows

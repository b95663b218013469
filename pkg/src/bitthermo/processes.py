"""First and second laws as checks on transformations, macro feasibility, Carnot.

A transformation respects the first law when it preserves total Hamming weight
(1s moved into an explicit work register count as extracted) and the second
law when it is injective. Between macrostates an injective map exists iff the
target set is at least as large as the source set, so feasibility is a
comparison of microstate counts.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, TextIO

from scipy.optimize import brentq

from .bitstring import (ENUMERATION_CAP, BitString, EnumerationCapError, Macrostate,
                        enumerate_microstates, log2_binomial)
from .thermo import binary_entropy, entropy_derivative

EXACT = "exact"
ASYMPTOTIC = "asymptotic"
MODES = (EXACT, ASYMPTOTIC)

# above this many ratio factors, exact comparisons fall back to math.comb
_RATIO_FACTOR_LIMIT = 200_000
_EXACT_TIE_BITS = 1e-6


class InfeasibleError(ValueError):
    pass


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


# -- transformation tables -------------------------------------------------

Tuple = tuple[BitString, ...]


@dataclass(frozen=True)
class TableEntry:
    source: Tuple
    image: Tuple
    extracted: int = 0


@dataclass
class TransformationTable:
    """A finite map on tuples of strings, optionally feeding a work register."""

    entries: list[TableEntry] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.source in seen:
                raise ValueError(f"domain element listed twice: {_fmt(e.source)}")
            seen.add(e.source)
            if len(e.source) != len(e.image):
                raise ValueError(f"arity changes in {_fmt(e.source)} -> {_fmt(e.image)}")
            if any(a.length != b.length for a, b in zip(e.source, e.image)):
                raise ValueError(f"length changes in {_fmt(e.source)} -> {_fmt(e.image)}")
            if e.extracted < 0:
                raise ValueError("extracted work must be nonnegative")

    @classmethod
    def from_mapping(cls, mapping: dict, extracted: dict | None = None) -> TransformationTable:
        extracted = extracted or {}
        rows = []
        for src, img in mapping.items():
            src = src if isinstance(src, tuple) else (src,)
            key = src
            img = img if isinstance(img, tuple) else (img,)
            rows.append(TableEntry(src, img, extracted.get(key, 0)))
        return cls(rows)

    @property
    def domain(self) -> list[Tuple]:
        return [e.source for e in self.entries]

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class LawVerdict:
    law: str
    holds: bool
    witness: tuple | None = None

    def as_dict(self) -> dict:
        witness = None
        if self.witness is not None:
            witness = [_fmt(w) if isinstance(w, tuple) else w for w in self.witness]
        return {"law": self.law, "holds": self.holds, "witness": witness}


def check_first_law(tt: TransformationTable) -> LawVerdict:
    """Total weight in = total weight out + extracted, for every entry."""
    for e in tt.entries:
        before = sum(s.weight for s in e.source)
        after = sum(s.weight for s in e.image) + e.extracted
        if before != after:
            return LawVerdict("first", False, (e.source, e.image))
    return LawVerdict("first", True)


def check_second_law(tt: TransformationTable) -> LawVerdict:
    """Injectivity on the domain; the witness is two sources sharing an image."""
    seen: dict[Tuple, Tuple] = {}
    for e in tt.entries:
        if e.image in seen:
            return LawVerdict("second", False, (seen[e.image], e.source))
        seen[e.image] = e.source
    return LawVerdict("second", True)


_LINE = re.compile(r"^\s*([01,\s]+?)\s*->\s*([01,\s]+?)\s*(?:\|\s*extracted\s*=\s*(\d+)\s*)?$")


def _fmt(t: Tuple) -> str:
    return ",".join(str(s) for s in t)


def _parse_tuple(text: str) -> Tuple:
    return tuple(BitString.from_str(x) for x in text.split(","))


def parse_table(fh: TextIO | Iterable[str]) -> TransformationTable:
    """Lines of ``in1,in2 -> out1,out2 [| extracted=w]``; '#' starts a comment."""
    rows = []
    for lineno, raw in enumerate(fh, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ValueError(f"line {lineno}: cannot parse {raw.strip()!r}")
        try:
            rows.append(TableEntry(_parse_tuple(m[1]), _parse_tuple(m[2]), int(m[3] or 0)))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return TransformationTable(rows)


def format_table(tt: TransformationTable) -> str:
    lines = []
    for e in tt.entries:
        line = f"{_fmt(e.source)} -> {_fmt(e.image)}"
        if e.extracted:
            line += f" | extracted={e.extracted}"
        lines.append(line)
    return "\n".join(lines) + "\n"


# -- macro transitions -----------------------------------------------------

@dataclass(frozen=True)
class MacroTransition:
    """Before/after macrostates of one or more strings plus 1s sent to work."""

    before: tuple[Macrostate, ...]
    after: tuple[Macrostate, ...]
    extracted: int = 0

    def __post_init__(self):
        if len(self.before) != len(self.after) or not self.before:
            raise ValueError("before and after need the same nonzero number of strings")
        for a, b in zip(self.before, self.after):
            if a.n != b.n:
                raise ValueError(f"length changes from {a.n} to {b.n}")
        if self.extracted < 0:
            raise ValueError("extracted must be nonnegative")
        if sum(m.k for m in self.before) != sum(m.k for m in self.after) + self.extracted:
            raise ValueError("weights do not balance: sum k = sum k' + extracted must hold")

    @classmethod
    def between(cls, n: int, before: Sequence[int], after: Sequence[int]) -> MacroTransition:
        """Transition on strings of common length n; extraction is the weight lost."""
        return cls(tuple(Macrostate(n, k) for k in before),
                   tuple(Macrostate(n, k) for k in after),
                   sum(before) - sum(after))

    def deltas(self) -> tuple[Fraction, ...]:
        """Per-string change of Hamming fraction, after minus before."""
        return tuple(Fraction(b.k - a.k, a.n) for a, b in zip(self.before, self.after))


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    before_bits: float
    after_bits: float
    slack_bits: float
    mode: str

    def as_dict(self) -> dict:
        return dict(feasible=self.feasible, before_bits=self.before_bits,
                    after_bits=self.after_bits, slack_bits=self.slack_bits, mode=self.mode)


def _binomial_ratio(n: int, k: int, k2: int) -> tuple[int, int]:
    """C(n, k2) / C(n, k) as an unreduced integer fraction."""
    if k2 < k:
        num = math.prod(range(k2 + 1, k + 1))
        den = math.prod(range(n - k + 1, n - k2 + 1))
    else:
        num = math.prod(range(n - k2 + 1, n - k + 1))
        den = math.prod(range(k + 1, k2 + 1))
    return num, den


def _count_at_least(after: Sequence[Macrostate], before: Sequence[Macrostate]) -> bool:
    """Exact integer test of prod C(after) >= prod C(before)."""
    factors = sum(abs(a.k - b.k) for a, b in zip(after, before))
    if factors <= _RATIO_FACTOR_LIMIT:
        num = den = 1
        for a, b in zip(after, before):
            x, y = _binomial_ratio(b.n, b.k, a.k)
            num *= x
            den *= y
        return num >= den
    return (math.prod(math.comb(m.n, m.k) for m in after)
            >= math.prod(math.comb(m.n, m.k) for m in before))


def _log_count(states: Iterable[Macrostate], mode: str) -> float:
    if mode == EXACT:
        return math.fsum(log2_binomial(m.n, m.k) for m in states)
    return math.fsum(m.n * binary_entropy(Fraction(m.k, m.n)) for m in states)


def macro_feasible(mt: MacroTransition, mode: str = EXACT) -> FeasibilityReport:
    """An injective, weight-respecting map exists iff after-count >= before-count.

    Exact mode decides with integer arithmetic and reports log2 counts;
    asymptotic mode replaces log2 C(n, k) by n h(k/n).
    """
    return _compare_counts(mt.before, mt.after, _check_mode(mode))


def _compare_counts(before_states: Sequence[Macrostate], after_states: Sequence[Macrostate],
                    mode: str) -> FeasibilityReport:
    before = _log_count(before_states, mode)
    after = _log_count(after_states, mode)
    if mode == EXACT:
        # lgamma sums are good to ~1e-8 bits at n = 1e7; settle near-ties in integers
        if abs(after - before) > _EXACT_TIE_BITS:
            ok = after > before
        else:
            ok = _count_at_least(after_states, before_states)
    else:
        ok = after - before >= -1e-9 * max(1.0, abs(before))
    return FeasibilityReport(ok, before, after, after - before, mode)


@dataclass
class BruteForceResult:
    feasible: bool
    before_count: int
    after_count: int
    table: TransformationTable | None = None


@lru_cache(maxsize=None)
def _microstates(n: int, k: int, cap: int) -> tuple[BitString, ...]:
    return tuple(enumerate_microstates(Macrostate(n, k), cap))


def brute_force_feasible(mt: MacroTransition, cap: int = ENUMERATION_CAP,
                         materialize_limit: int = 4096) -> BruteForceResult:
    """Decide feasibility by building the rank-pairing injection over enumerated states.

    The r-th source tuple (lexicographic product order) goes to the r-th
    target tuple; extracted 1s go to the work register. The map is injective
    by construction and succeeds iff every source rank has a target. The
    explicit table is built when the source has at most ``materialize_limit``
    elements.
    """
    for m in (*mt.before, *mt.after):
        c = math.comb(m.n, m.k)
        if c > cap:
            raise EnumerationCapError(c, cap)
    src_lists = [_microstates(m.n, m.k, cap) for m in mt.before]
    dst_lists = [_microstates(m.n, m.k, cap) for m in mt.after]
    before_count = math.prod(len(x) for x in src_lists)
    after_count = math.prod(len(x) for x in dst_lists)
    # the last source rank is the only one that can run out of targets
    feasible = before_count - 1 < after_count
    table = None
    if feasible and before_count <= materialize_limit:
        targets = itertools.product(*dst_lists)
        rows = [TableEntry(tuple(src), tuple(next(targets)), mt.extracted)
                for src in itertools.product(*src_lists)]
        table = TransformationTable(rows)
    return BruteForceResult(feasible, before_count, after_count, table)


# -- Carnot ----------------------------------------------------------------

POSITIVE_BRANCH = "positive"
OUTSIDE_REGIME = "outside_theorem_regime"


@dataclass(frozen=True)
class CarnotOutcome:
    """Result of moving d1 ones out of the hot string.

    ``d2_min`` is the fewest 1s the cold string must absorb for the after-set
    to be at least as large as the before-set; the remaining d1 - d2_min are
    work. ``d2_crossing`` is the real root of the same count balance (the
    log-binomial extended through the gamma function), which separates the
    linearization error from integer rounding.
    """

    n: int
    t1: float
    t2: float
    k1: int
    k2: int
    d1: int
    d2_min: int
    extracted: int
    eta_exact: Fraction
    eta_asymptotic: float | None
    gap: float | None
    d2_crossing: float
    eta_crossing: float
    gap_crossing: float | None
    mode: str
    branch: str
    work_deficit: bool
    slack_bits: float

    def as_dict(self) -> dict:
        return {
            "n": self.n, "t1": self.t1, "t2": self.t2, "k1": self.k1, "k2": self.k2,
            "d1": self.d1, "d2_min": self.d2_min, "extracted": self.extracted,
            "eta_exact": f"{self.eta_exact.numerator}/{self.eta_exact.denominator}",
            "eta_exact_float": float(self.eta_exact),
            "eta_asymptotic": self.eta_asymptotic, "gap": self.gap,
            "d2_crossing": self.d2_crossing, "eta_crossing": self.eta_crossing,
            "gap_crossing": self.gap_crossing, "mode": self.mode, "branch": self.branch,
            "work_deficit": self.work_deficit, "slack_bits": self.slack_bits,
        }


def carnot_efficiency(t1: float, t2: float) -> float | None:
    """1 - T2/T1 = 1 - h'(t1)/h'(t2); None when either temperature is not finite."""
    if t1 in (0.0, 0.5, 1.0) or t2 in (0.0, 0.5, 1.0) or not (0 < t1 < 1 and 0 < t2 < 1):
        return None
    return 1.0 - entropy_derivative(t1) / entropy_derivative(t2)


def _log2_binomial_real(n: int, x: float) -> float:
    return (math.lgamma(n + 1) - math.lgamma(x + 1) - math.lgamma(n - x + 1)) / math.log(2)


def carnot_run(n: int, t1: float, t2: float, d1: int, mode: str = EXACT) -> CarnotOutcome:
    """Search the smallest d2 keeping (k1, k2) -> (k1 - d1, k2 + d2) feasible.

    Feasibility only improves while the cold string stays below half filling,
    so d2 is binary-searched on [0, n//2 - k2]. d2_min > d1 means no work can
    be extracted (flagged ``work_deficit``).
    """
    _check_mode(mode)
    if d1 < 1:
        raise ValueError("d1 must be at least 1")
    k1, k2 = round(t1 * n), round(t2 * n)
    Macrostate(n, k1)
    Macrostate(n, k2)
    if k1 < d1:
        raise ValueError(f"hot string holds {k1} ones, cannot give {d1}")
    tt1, tt2 = k1 / n, k2 / n
    branch = POSITIVE_BRANCH if 0 < tt2 <= tt1 < 0.5 else OUTSIDE_REGIME

    before = (Macrostate(n, k1), Macrostate(n, k2))

    # d2 > d1 would need work fed in, so this bypasses MacroTransition's checks
    def check(d2: int) -> FeasibilityReport:
        return _compare_counts(before, (Macrostate(n, k1 - d1), Macrostate(n, k2 + d2)), mode)

    def ok(d2: int) -> bool:
        return check(d2).feasible

    peak = max(0, min(n // 2 - k2, n - k2))
    if not ok(peak):
        raise InfeasibleError(
            f"no d2 in [0, {n - k2}] balances the count for n={n}, t1={t1}, t2={t2}, d1={d1}")
    lo, hi = 0, peak
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    d2_min = lo
    report = check(d2_min)

    if mode == EXACT:
        base = log2_binomial(n, k1 - d1) - log2_binomial(n, k1)

        def balance(x: float) -> float:
            return base + _log2_binomial_real(n, k2 + x) - _log2_binomial_real(n, k2)
    else:
        base = n * (binary_entropy((k1 - d1) / n) - binary_entropy(tt1))

        def balance(x: float) -> float:
            return base + n * (binary_entropy((k2 + x) / n) - binary_entropy(tt2))

    if d2_min == 0:
        crossing = 0.0
    elif balance(d2_min - 1) < 0 <= balance(d2_min):
        crossing = brentq(balance, d2_min - 1, d2_min, xtol=1e-12, rtol=1e-15)
    else:
        # float rounding disagrees with the exact integer decision at the edge
        crossing = float(d2_min)

    eta_asym = carnot_efficiency(tt1, tt2)
    eta_exact = Fraction(d1 - d2_min, d1)
    eta_cross = 1.0 - crossing / d1
    return CarnotOutcome(
        n=n, t1=t1, t2=t2, k1=k1, k2=k2, d1=d1, d2_min=d2_min,
        extracted=d1 - d2_min, eta_exact=eta_exact, eta_asymptotic=eta_asym,
        gap=None if eta_asym is None else float(eta_exact) - eta_asym,
        d2_crossing=crossing, eta_crossing=eta_cross,
        gap_crossing=None if eta_asym is None else eta_cross - eta_asym,
        mode=mode, branch=branch, work_deficit=d2_min > d1,
        slack_bits=report.slack_bits,
    )

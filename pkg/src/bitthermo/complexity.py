"""Computable upper-bound proxies for Kolmogorov complexity and structural temperature.

Every estimator is a decodable code for the string *given its length n*, so
each returns an honest upper bound on K(s | n) in bits. ``estimate(s) <= n +
overhead_bits`` holds for every input.
"""

from __future__ import annotations

import lzma
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import gammaln

from .bitstring import BitString, log2_binomial, make_rng
from .thermo import BOUNDARY, DIVERGENT, OK, binary_entropy


class UnknownEstimatorError(KeyError):
    pass


class NoProbeError(ValueError):
    """No 0 -> 1 flip exists (all-ones string), so no positive-dt probe."""


@dataclass(frozen=True)
class ComplexityEstimate:
    bits: float
    estimator_id: str
    input_length: int
    component: str | None = None


# -- universal integer codes -----------------------------------------------

def _floor_log2(x: np.ndarray) -> np.ndarray:
    # frexp is exact for integers below 2**53, unlike floor(log2(x))
    _, e = np.frexp(np.asarray(x, dtype=np.float64))
    return e.astype(np.int64) - 1


def gamma_length(x) -> np.ndarray:
    """Elias-gamma code length of positive integers."""
    return 2 * _floor_log2(x) + 1


def _delta_length(x) -> np.ndarray:
    lg = _floor_log2(x)
    return lg + 2 * _floor_log2(lg + 1) + 1


_DELTA_TABLE = _delta_length(np.arange(1, 1 << 16)).astype(np.int16)


def delta_length(x) -> np.ndarray:
    """Elias-delta code length of positive integers."""
    x = np.asarray(x, dtype=np.int64)
    if x.size and x.max() < (1 << 16):
        return _DELTA_TABLE[x - 1].astype(np.int64)
    return _delta_length(x)


def _runs(bits: np.ndarray) -> np.ndarray:
    edges = np.flatnonzero(np.diff(bits)) + 1
    bounds = np.concatenate(([0], edges, [bits.size]))
    return np.diff(bounds)


# -- estimators ------------------------------------------------------------

class ComplexityEstimator:
    """Maps a BitString to an upper bound on its description length.

    Subclasses implement ``bits``. ``overhead_bits`` is the published
    constant c with bits(s) <= n + c, ``resolution_bits`` the smallest change
    in bits the estimator can express.
    """

    id = "abstract"
    overhead_bits = 0.0
    resolution_bits = 1e-9

    def bits(self, s: BitString) -> float:
        raise NotImplementedError

    def header_bits(self, n: int) -> float:
        """Fixed cost paid before any content; used as the entropy-bound allowance."""
        return self.overhead_bits

    def estimate(self, s: BitString) -> ComplexityEstimate:
        return ComplexityEstimate(float(self.bits(s)), self.id, s.length)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} id={self.id!r}>"


class LiteralEstimator(ComplexityEstimator):
    id = "literal"

    def bits(self, s):
        return float(s.length)


class BlockEntropyEstimator(ComplexityEstimator):
    """Two-part code: weight k in log2(n+1) bits, then the index among C(n, k).

    No literal fallback, so the header grows as log2(n+1); 64 bits covers
    every length a u64 header can carry.
    """

    id = "block"
    overhead_bits = 64.0

    def bits(self, s):
        return math.log2(s.length + 1) + log2_binomial(s.length, s.weight)

    def header_bits(self, n):
        return math.log2(n + 1)


class RunLengthEstimator(ComplexityEstimator):
    """First bit, then Elias-gamma run lengths; literal fallback behind a flag bit."""

    id = "runlength"
    overhead_bits = 1.0

    def bits(self, s):
        model = 1 + int(gamma_length(_runs(s.bits)).sum())
        return 1.0 + min(model, s.length)

    def header_bits(self, n):
        return 2.0


class PeriodicPatternEstimator(ComplexityEstimator):
    """Period p <= max_period with a p-bit pattern plus a list of exceptions.

    Code: gamma(p), the pattern, delta(#exceptions + 1), then the gaps between
    exception positions in Elias delta. A single exception at 1-based position
    j therefore costs about log2(j) + 2 log2 log2(j) bits. Only sparse
    exception sets are considered; dense ones are cheaper under other codes.
    """

    id = "pattern"
    overhead_bits = 1.0

    def __init__(self, max_period: int = 16, max_exception_share: int = 8):
        self.max_period = max_period
        # periods with more than n / max_exception_share exceptions are left to other codes
        self.max_exception_share = max_exception_share

    def _model_bits(self, bits: np.ndarray) -> float:
        n = bits.size
        candidates = []
        for p in range(1, min(self.max_period, n) + 1):
            q, r = divmod(n, p)
            body = bits[:q * p].reshape(q, p)
            counts = body.sum(axis=0, dtype=np.int64)
            sizes = np.full(p, q, dtype=np.int64)
            counts[:r] += bits[q * p:]
            sizes[:r] += 1
            n_exc = int(np.minimum(counts, sizes - counts).sum())
            if n_exc > n // self.max_exception_share:
                continue
            head = int(gamma_length(p)) + p + int(delta_length(n_exc + 1))
            pattern = (2 * counts > sizes).astype(np.uint8)
            # every exception costs at least one bit, so head + n_exc is a lower bound
            candidates.append((head + n_exc, p, head, pattern))
        best = float(n)
        for bound, p, head, pattern in sorted(candidates, key=lambda c: c[:2]):
            if bound >= best:
                break
            q, r = divmod(n, p)
            mismatch = np.concatenate([(bits[:q * p].reshape(q, p) != pattern).reshape(-1),
                                       bits[q * p:] != pattern[:r]])
            exc = np.flatnonzero(mismatch) + 1
            cost = head
            if exc.size:
                cost += int(delta_length(np.diff(exc, prepend=0)).sum(dtype=np.int64))
            best = min(best, float(cost))
        return best

    def bits(self, s):
        return 1.0 + min(self._model_bits(s.bits), s.length)

    def header_bits(self, n):
        return 5.0


class SegmentedBlockEstimator(ComplexityEstimator):
    """Dyadic segmentation tree with a block-entropy code in every leaf.

    One bit per node says leaf or split; leaves spend log2(L+1) + log2 C(L, w).
    Catches strings glued from pieces of different density, which the plain
    block code cannot see.
    """

    id = "segmented"
    overhead_bits = 1.0

    def __init__(self, max_depth: int = 6, min_leaf: int = 32):
        self.max_depth = max_depth
        self.min_leaf = min_leaf

    def bits(self, s):
        n = s.length
        prefix = np.concatenate(([0], np.cumsum(s.bits, dtype=np.int64)))
        # segment boundaries level by level; children of [a, b) split at a + (b-a)//2
        levels = [(np.array([0]), np.array([n]))]
        for _ in range(self.max_depth):
            a, b = levels[-1]
            mid = a + (b - a) // 2
            levels.append((np.stack([a, mid], 1).reshape(-1), np.stack([mid, b], 1).reshape(-1)))
        cost = None
        for a, b in reversed(levels):
            length = b - a
            w = prefix[b] - prefix[a]
            leaf = np.log2(length + 1) + (gammaln(length + 1) - gammaln(w + 1)
                                          - gammaln(length - w + 1)) / math.log(2)
            if cost is not None:
                split = cost[0::2] + cost[1::2]
                leaf = np.where(length >= 2 * self.min_leaf, np.minimum(leaf, split), leaf)
            cost = 1.0 + leaf
        return 1.0 + min(float(cost[0]), n)

    def header_bits(self, n):
        return 2.0 + math.log2(n + 1)


class CompressorEstimator(ComplexityEstimator):
    """Adapter putting any bytes -> bytes compressor behind the estimator contract.

    Input is the packed string (8 bits per byte); output length is counted in
    whole bytes, with a literal fallback behind one flag bit.
    """

    overhead_bits = 1.0
    resolution_bits = 8.0

    def __init__(self, id: str, compress: Callable[[bytes], bytes]):
        self.id = id
        self._compress = compress

    def bits(self, s):
        return 1.0 + min(8 * len(self._compress(s.packed())), s.length)


def _raw_deflate(data: bytes) -> bytes:
    c = zlib.compressobj(9, zlib.DEFLATED, -15)
    return c.compress(data) + c.flush()


def _raw_lzma(data: bytes) -> bytes:
    return lzma.compress(data, format=lzma.FORMAT_RAW,
                         filters=[{"id": lzma.FILTER_LZMA2, "preset": 9}])


class MixtureEstimator(ComplexityEstimator):
    """Best of several codes plus log2(#codes) bits naming the winner."""

    def __init__(self, id: str, components: Sequence[ComplexityEstimator]):
        if not any(isinstance(c, LiteralEstimator) for c in components):
            components = [LiteralEstimator(), *components]
        self.id = id
        self.components = list(components)
        self.selector_bits = math.log2(len(self.components))
        self.overhead_bits = self.selector_bits

    def best(self, s: BitString) -> tuple[float, str]:
        scored = [(c.bits(s), c.id) for c in self.components]
        bits, cid = min(scored, key=lambda x: x[0])
        return self.selector_bits + bits, cid

    def bits(self, s):
        return self.best(s)[0]

    def estimate(self, s):
        bits, cid = self.best(s)
        return ComplexityEstimate(bits, self.id, s.length, cid)

    def header_bits(self, n):
        return self.selector_bits + 2.0 + math.log2(n + 1)


DEFAULT_ESTIMATOR = "mdl"
DICTIONARY_ESTIMATOR = "dict-zlib"


def builtin_estimators() -> dict[str, ComplexityEstimator]:
    block = BlockEntropyEstimator()
    runlength = RunLengthEstimator()
    pattern = PeriodicPatternEstimator()
    segmented = SegmentedBlockEstimator()
    dict_zlib = CompressorEstimator("dict-zlib", _raw_deflate)
    dict_lzma = CompressorEstimator("dict-lzma", _raw_lzma)
    mdl = MixtureEstimator("mdl", [LiteralEstimator(), block, segmented, runlength,
                                   pattern, dict_zlib])
    found = [LiteralEstimator(), block, runlength, pattern, segmented, dict_zlib,
             dict_lzma, mdl]
    return {e.id: e for e in found}


_REGISTRY: dict[str, ComplexityEstimator] | None = None


def get_estimator(e: str | ComplexityEstimator | None = None) -> ComplexityEstimator:
    global _REGISTRY
    if isinstance(e, ComplexityEstimator):
        return e
    if _REGISTRY is None:
        _REGISTRY = builtin_estimators()
    key = DEFAULT_ESTIMATOR if e is None else e
    try:
        return _REGISTRY[key]
    except KeyError:
        raise UnknownEstimatorError(
            f"unknown estimator {key!r}; choose from {sorted(_REGISTRY)}") from None


def estimate_complexity(s: BitString, e: str | ComplexityEstimator | None = None
                        ) -> ComplexityEstimate:
    return get_estimator(e).estimate(s)


# -- diagnostics -----------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    k_per_n: float
    h_t: float
    slack: float
    allowance: float
    header_dominated: bool


def entropy_bound_check(s: BitString, e: str | ComplexityEstimator | None = None,
                        header_allowance: float | None = None,
                        header_fraction: float = 0.05) -> BoundReport:
    """Compare K_est/n with h(t); slack = h(t) + allowance - K_est/n."""
    est = get_estimator(e)
    n = s.length
    h = binary_entropy(s.weight / n)
    if header_allowance is None:
        header_allowance = (est.header_bits(n) + 1.0) / n
    k_per_n = est.bits(s) / n
    dominated = est.header_bits(n) >= header_fraction * n * h
    return BoundReport(k_per_n, h, h + header_allowance - k_per_n, header_allowance,
                       dominated)


def _check_positions(s: BitString, positions: Iterable[int]) -> list[int]:
    pos = [int(p) for p in positions]
    bad = [p for p in pos if not 1 <= p <= s.length]
    if bad:
        raise ValueError(f"positions {bad[:5]} outside [1, {s.length}]")
    return pos


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def delta_k_profile(s: BitString, positions: Iterable[int],
                    e: str | ComplexityEstimator | None = None,
                    workers: int = 1) -> list[tuple[int, float]]:
    """Change in estimated complexity for flipping each 1-based position alone."""
    est = get_estimator(e)
    pos = _check_positions(s, positions)
    base = est.bits(s)
    deltas = _map(lambda p: est.bits(s.flipped(p - 1)) - base, pos, workers)
    return list(zip(pos, deltas))


@dataclass(frozen=True)
class StrucTemperature:
    """Structural temperature from the steepest complexity gain per added 1.

    ``inverse_bits`` is max dK/dt with t the Hamming fraction (so n times the
    per-flip gain); ``inverse_per_symbol`` divides by n and is the scale on
    which it compares with the statistical inverse temperature log2((1-t)/t).
    ``value`` = 1 / inverse_per_symbol.
    """

    value: float
    inverse_bits: float
    inverse_per_symbol: float
    max_delta_k: float
    sample_size: int
    positions: tuple[int, ...]
    exhaustive: bool
    flag: str
    probe_mode: str
    estimator_id: str
    seed: int | None

    def as_dict(self) -> dict:
        return {
            "T_struc": self.value,
            "inv_T_struc_bits": self.inverse_bits,
            "inv_T_struc_per_symbol": self.inverse_per_symbol,
            "max_delta_k_bits": self.max_delta_k,
            "sample_size": self.sample_size,
            "argmax_positions": list(self.positions),
            "exhaustive": self.exhaustive,
            "lower_bound_on_max": not self.exhaustive,
            "flag": self.flag,
            "probe_mode": self.probe_mode,
            "estimator": self.estimator_id,
            "seed": self.seed,
        }


def structural_temperature(s: BitString, e: str | ComplexityEstimator | None = None,
                           probe_budget: int = 4096, seed: int = 0,
                           floor_bits: float | None = None,
                           position_sets: Sequence[Sequence[int]] | None = None,
                           workers: int = 1) -> StrucTemperature:
    """Maximize dK/dt over 0 -> 1 flips.

    Default probes are single flips at every zero (or a seeded sample of
    ``probe_budget`` zeros). ``position_sets`` replaces them with explicit
    sets of 1-based positions flipped together. Ties go to the first probe
    in ascending position order.
    """
    est = get_estimator(e)
    if probe_budget < 1:
        raise ValueError("probe_budget must be >= 1")
    n = s.length
    if position_sets is not None:
        probes = [tuple(sorted(_check_positions(s, ps))) for ps in position_sets]
        for ps in probes:
            if not ps or any(s.bits[p - 1] for p in ps):
                raise ValueError(f"probe {ps[:5]} must flip only zeros")
        exhaustive, mode = True, "position-sets"
    else:
        zeros = np.flatnonzero(s.bits == 0) + 1
        if zeros.size == 0:
            raise NoProbeError("no positive-dt probe: the string is all ones")
        exhaustive = zeros.size <= probe_budget
        if not exhaustive:
            picked = make_rng(seed).choice(zeros.size, size=probe_budget, replace=False)
            zeros = zeros[np.sort(picked)]
        probes = [(int(p),) for p in zeros]
        mode = "single-flip"
        probes.sort()

    base = est.bits(s)
    deltas = _map(lambda ps: est.bits(s.flipped([p - 1 for p in ps])) - base, probes,
                  workers)
    # gain per added 1; dt = |set| / n so dK/dt = n * dK / |set|
    rates = [d / len(ps) for d, ps in zip(deltas, probes)]
    best = int(np.argmax(rates))
    rate = rates[best]
    floor = est.resolution_bits if floor_bits is None else floor_bits
    if abs(rate) < floor:
        flag = DIVERGENT
        value = math.copysign(math.inf, rate) if rate else math.inf
    else:
        flag = OK
        value = 1.0 / rate
    return StrucTemperature(
        value=value,
        inverse_bits=n * rate,
        inverse_per_symbol=rate,
        max_delta_k=deltas[best],
        sample_size=len(probes),
        positions=probes[best],
        exhaustive=exhaustive,
        flag=flag,
        probe_mode=mode,
        estimator_id=est.id,
        seed=None if exhaustive else seed,
    )


__all__ = [
    "BOUNDARY", "BoundReport", "ComplexityEstimate", "ComplexityEstimator",
    "NoProbeError", "StrucTemperature", "UnknownEstimatorError", "builtin_estimators",
    "delta_k_profile", "entropy_bound_check", "estimate_complexity", "get_estimator",
    "structural_temperature",
]

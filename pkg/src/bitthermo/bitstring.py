"""Bit-string microstates, seeded reservoir generation and exact counting."""

from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import BinaryIO, Iterable, Iterator, Sequence, TextIO

import numpy as np

ENUMERATION_CAP = 10**7
SEED_MAX = 2**64 - 1

# exact integer path for log2 C(n, k) up to this n, log-gamma above
_EXACT_BINOMIAL_MAX_N = 1024


class EnumerationCapError(ValueError):
    """Raised when a brute-force enumeration would exceed the configured cap."""

    def __init__(self, required: int, cap: int):
        super().__init__(f"enumeration needs {required} microstates, cap is {cap}")
        self.required = required
        self.cap = cap


class BitString:
    """Immutable finite binary string with cached Hamming weight."""

    __slots__ = ("_bits", "_weight")

    def __init__(self, bits: Iterable[int] | np.ndarray):
        arr = np.array(bits, dtype=np.uint8, copy=True).reshape(-1)
        if arr.size == 0:
            raise ValueError("a BitString needs at least one bit")
        if arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        arr.flags.writeable = False
        self._bits = arr
        self._weight = int(arr.sum(dtype=np.int64))

    @classmethod
    def from_str(cls, text: str) -> BitString:
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a 0/1 string: {text[:40]!r}")
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def zeros(cls, n: int) -> BitString:
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def ones(cls, n: int) -> BitString:
        return cls(np.ones(n, dtype=np.uint8))

    @classmethod
    def alternating(cls, n: int, first: int = 0) -> BitString:
        """0101... (or 1010... when ``first=1``) of length n."""
        return cls((np.arange(n) + first) % 2)

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def length(self) -> int:
        return int(self._bits.size)

    @property
    def weight(self) -> int:
        return self._weight

    @property
    def macrostate(self) -> Macrostate:
        return Macrostate(self.length, self._weight)

    def __len__(self) -> int:
        return int(self._bits.size)

    def __str__(self) -> str:
        return (self._bits + ord("0")).tobytes().decode("ascii")

    def __repr__(self) -> str:
        text = str(self)
        if len(text) > 32:
            text = text[:29] + "..."
        return f"BitString('{text}', n={self.length}, k={self.weight})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self._weight == other._weight and np.array_equal(self._bits, other._bits)

    def __hash__(self) -> int:
        return hash((self.length, self._bits.tobytes()))

    def __lt__(self, other: BitString) -> bool:
        return str(self) < str(other)

    def __add__(self, other: BitString) -> BitString:
        return self.concat(other)

    def concat(self, other: BitString) -> BitString:
        return BitString(np.concatenate([self._bits, other._bits]))

    def flipped(self, indices: int | Sequence[int]) -> BitString:
        """Copy with the bits at the given 0-based indices inverted."""
        arr = self._bits.copy()
        idx = np.atleast_1d(np.asarray(indices, dtype=np.int64))
        if idx.size and (idx.min() < 0 or idx.max() >= arr.size):
            raise IndexError(f"flip index out of range for length {arr.size}")
        arr[idx] ^= 1
        return BitString(arr)

    def packed(self) -> bytes:
        """8 bits per byte, most significant bit first, zero padded."""
        return np.packbits(self._bits, bitorder="big").tobytes()

    @classmethod
    def from_packed(cls, data: bytes, n: int) -> BitString:
        if len(data) != (n + 7) // 8:
            raise ValueError(f"{len(data)} bytes cannot hold exactly {n} bits")
        arr = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="big")
        if arr[n:].any():
            raise ValueError("nonzero padding bits")
        return cls(arr[:n])


@dataclass(frozen=True, order=True)
class Macrostate:
    """Length n and Hamming weight k; every string sharing them is a microstate."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"length must be positive, got {self.n}")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"weight {self.k} outside [0, {self.n}]")

    @property
    def t(self) -> Fraction:
        return Fraction(self.k, self.n)


def hamming_fraction(s: BitString) -> Fraction:
    return Fraction(s.weight, s.length)


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(check_seed(seed)))


def derive_seed(seed: int, *path: int) -> int:
    """Deterministic child seed for trial ``path`` under ``seed``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def generate_bernoulli(n: int, t: float, seed: int) -> BitString:
    """Each bit independently 1 with probability t."""
    if n < 1:
        raise ValueError(f"length must be positive, got {n}")
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"fraction t={t} outside [0, 1]")
    u = make_rng(seed).random(n)
    return BitString(u < t)


def generate_exact(n: int, k: int, seed: int) -> BitString:
    """Uniform draw among the C(n, k) strings of weight exactly k."""
    Macrostate(n, k)
    arr = np.zeros(n, dtype=np.uint8)
    arr[make_rng(seed).permutation(n)[:k]] = 1
    return BitString(arr)


def log2_binomial(n: int, k: int) -> float:
    """log2 C(n, k); symmetric in k <-> n-k bit for bit."""
    if not 0 <= k <= n:
        raise ValueError(f"weight {k} outside [0, {n}]")
    k = min(k, n - k)
    if k == 0:
        return 0.0
    if n <= _EXACT_BINOMIAL_MAX_N:
        return math.log2(math.comb(n, k))
    return (math.lgamma(n + 1) - (math.lgamma(k + 1) + math.lgamma(n - k + 1))) / math.log(2)


def enumerate_microstates(m: Macrostate, cap: int = ENUMERATION_CAP) -> list[BitString]:
    """All strings of macrostate m in ascending lexicographic order."""
    count = math.comb(m.n, m.k)
    if count > cap:
        raise EnumerationCapError(count, cap)
    out = []
    # ascending lexicographic order = zero positions in ascending combination order
    for zeros in itertools.combinations(range(m.n), m.n - m.k):
        arr = np.ones(m.n, dtype=np.uint8)
        arr[list(zeros)] = 0
        out.append(BitString(arr))
    return out


# -- serialization ---------------------------------------------------------

_RECORD_HEADER = struct.Struct(">Q")


def write_text(strings: Iterable[BitString], fh: TextIO, header: str | None = None) -> None:
    """One '0'/'1' line per string; an optional header goes on a leading '#' line."""
    if header is not None:
        for line in header.splitlines():
            fh.write(f"# {line}\n")
    for s in strings:
        fh.write(str(s))
        fh.write("\n")


def read_text(fh: TextIO) -> list[BitString]:
    out = []
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            out.append(BitString.from_str(line))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return out


def write_packed(strings: Iterable[BitString], fh: BinaryIO) -> None:
    """Records of [u64 big-endian bit length][ceil(n/8) packed bytes]."""
    for s in strings:
        fh.write(_RECORD_HEADER.pack(s.length))
        fh.write(s.packed())


def read_packed(fh: BinaryIO) -> list[BitString]:
    return list(_iter_packed(fh))


def _iter_packed(fh: BinaryIO) -> Iterator[BitString]:
    while True:
        head = fh.read(_RECORD_HEADER.size)
        if not head:
            return
        if len(head) != _RECORD_HEADER.size:
            raise ValueError("truncated record header")
        (n,) = _RECORD_HEADER.unpack(head)
        nbytes = (n + 7) // 8
        body = fh.read(nbytes)
        if len(body) != nbytes:
            raise ValueError("truncated record body")
        yield BitString.from_packed(body, n)

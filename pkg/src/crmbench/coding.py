"""Entropy coding core.

A 32-bit arithmetic coder with carry (underflow) propagation, frequency
models driving it, and codelength accounting helpers.  All codelengths in
this package are plain floats measured in bits.

The coder works on half-open cumulative count intervals [cum_lo, cum_hi)
out of a running total, so any object exposing ``interval``, ``find`` and
``update`` can drive it.  Encoder and decoder must see identical model
state before each symbol; both sides update deterministically, which the
tests check state-by-state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

MASK32 = (1 << 32) - 1
HALF = 1 << 31
QUARTER = 1 << 30
THREEQ = 3 << 30

# Hard ceiling on model totals: keeps span * count arithmetic exact and the
# per-symbol truncation loss around 2^-14 relative.
MAX_MODEL_TOTAL = 1 << 16

# 4-bit end-of-stream check symbol, coded with a static uniform 16-ary
# distribution after the payload.  Catches truncation, wrong symbol counts
# and most model mismatches without costing a full byte.
_SENTINEL = 0xA
_SENTINEL_TOTAL = 16


class DecodeError(Exception):
    """Raised when a coded stream fails structural or sentinel checks."""


def shannon_codelength(p: float) -> float:
    """Ideal codelength -log2(p) in bits for an event of probability p.

    Raises ValueError outside the domain (0, 1].
    """
    if not (0.0 < p <= 1.0):
        raise ValueError(f"probability out of range (0, 1]: {p!r}")
    return -math.log2(p)


def kraft_audit(codelength_fn, inputs) -> float:
    """Sum of 2^-L(x) over a finite input set.

    A prefix-free code must come out <= 1 (+ float tolerance); a sum above 1
    certifies that the claimed lengths are not jointly realizable.
    """
    return math.fsum(2.0 ** -codelength_fn(x) for x in inputs)


@dataclass(frozen=True)
class Bitstream:
    """Packed MSB-first bits.  The final byte is zero-padded."""

    data: bytes
    bit_length: int

    def __post_init__(self):
        if self.bit_length < 0 or self.bit_length > 8 * len(self.data):
            raise ValueError("bit_length inconsistent with data")
        if len(self.data) != (self.bit_length + 7) // 8:
            raise ValueError("data has trailing bytes beyond bit_length")
        if self.bit_length % 8:
            pad = 8 - self.bit_length % 8
            if self.data[-1] & ((1 << pad) - 1):
                raise ValueError("padding bits must be zero")


class BitWriter:
    """Accumulates single bits MSB-first into bytes."""

    def __init__(self):
        self._out = bytearray()
        self._acc = 0
        self._n = 0
        self.bit_count = 0

    def write(self, bit: int) -> None:
        self._acc = (self._acc << 1) | (bit & 1)
        self._n += 1
        self.bit_count += 1
        if self._n == 8:
            self._out.append(self._acc)
            self._acc = 0
            self._n = 0

    def finish(self) -> Bitstream:
        if self._n:
            self._out.append(self._acc << (8 - self._n))
            self._acc = 0
            self._n = 0
        return Bitstream(bytes(self._out), self.bit_count)


class BitReader:
    """Reads MSB-first bits; reads past the end yield zeros.

    The arithmetic decoder legitimately looks up to 32 bits past the
    payload, so past-end zeros are normal; corruption is caught by the
    stream sentinel instead.
    """

    def __init__(self, data: bytes, bit_length: int | None = None):
        self._data = data
        self._limit = 8 * len(data) if bit_length is None else bit_length
        self._pos = 0

    def read(self) -> int:
        if self._pos >= self._limit:
            self._pos += 1
            return 0
        byte = self._data[self._pos >> 3]
        bit = (byte >> (7 - (self._pos & 7))) & 1
        self._pos += 1
        return bit


@dataclass(frozen=True)
class SymbolDistribution:
    """Fixed probability masses over a contiguous symbol alphabet.

    Masses must be non-negative and sum to 1 within 1e-9.  Encoding through
    this distribution requires strictly positive mass on every symbol that
    actually occurs; ``codelength`` enforces positivity per lookup.
    """

    masses: tuple[float, ...]

    def __post_init__(self):
        if len(self.masses) < 1:
            raise ValueError("empty alphabet")
        if any(m < 0.0 for m in self.masses):
            raise ValueError("negative probability mass")
        total = math.fsum(self.masses)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"masses sum to {total!r}, not 1 within 1e-9")

    @property
    def alphabet_size(self) -> int:
        return len(self.masses)

    def codelength(self, symbol: int) -> float:
        return shannon_codelength(self.masses[symbol])

    def to_counts(self, total: int = MAX_MODEL_TOTAL) -> list[int]:
        """Integer frequency counts for coding, every symbol >= 1."""
        n = len(self.masses)
        if total < n:
            raise ValueError("total too small for alphabet")
        counts = [max(1, round(m * (total - n))) for m in self.masses]
        return counts


class StaticFrequencyModel:
    """Immutable integer-count model with O(1) interval lookups."""

    def __init__(self, counts):
        counts = list(counts)
        if not counts or any(c < 1 for c in counts):
            raise ValueError("all counts must be >= 1")
        self.counts = counts
        self.cum = [0] * (len(counts) + 1)
        run = 0
        for i, c in enumerate(counts):
            run += c
            self.cum[i + 1] = run
        self.total = run
        if self.total > MAX_MODEL_TOTAL:
            raise ValueError("total exceeds coder precision ceiling")

    @classmethod
    def uniform(cls, alphabet_size: int) -> "StaticFrequencyModel":
        return cls([1] * alphabet_size)

    @classmethod
    def from_distribution(cls, dist: SymbolDistribution,
                          total: int = MAX_MODEL_TOTAL) -> "StaticFrequencyModel":
        return cls(dist.to_counts(total))

    def copy(self) -> "StaticFrequencyModel":
        return self  # stateless across symbols

    def interval(self, symbol: int):
        return self.cum[symbol], self.cum[symbol + 1], self.total

    def find(self, value: int) -> int:
        # rightmost cum entry <= value
        lo, hi = 0, len(self.counts)
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if self.cum[mid] <= value:
                lo = mid
            else:
                hi = mid
        return lo

    def update(self, symbol: int) -> None:
        pass

    def ideal_codelength(self, symbol: int) -> float:
        return shannon_codelength(self.counts[symbol] / self.total)


class AdaptiveFrequencyModel:
    """Laplace-style adaptive counts over a Fenwick tree.

    Every symbol starts at count 1, observed symbols gain ``increment``,
    and when the total passes ``max_total`` all counts are halved rounding
    up (so nothing drops below 1).  Identical update sequences give
    identical state on encoder and decoder.
    """

    def __init__(self, alphabet_size: int, increment: int = 32,
                 max_total: int = MAX_MODEL_TOTAL):
        if alphabet_size < 2:
            raise ValueError("alphabet_size must be >= 2")
        if increment < 1:
            raise ValueError("increment must be >= 1")
        if max_total < 2 * alphabet_size or max_total > MAX_MODEL_TOTAL:
            raise ValueError("max_total out of range")
        self.alphabet_size = alphabet_size
        self.increment = increment
        self.max_total = max_total
        self.counts = [1] * alphabet_size
        self.total = alphabet_size
        self._tree = self._build(self.counts)

    @staticmethod
    def _build(counts):
        n = len(counts)
        tree = [0] * (n + 1)
        for i, c in enumerate(counts):
            tree[i + 1] += c
            j = (i + 1) + ((i + 1) & -(i + 1))
            if j <= n:
                tree[j] += tree[i + 1]
        return tree

    def copy(self) -> "AdaptiveFrequencyModel":
        dup = AdaptiveFrequencyModel.__new__(AdaptiveFrequencyModel)
        dup.alphabet_size = self.alphabet_size
        dup.increment = self.increment
        dup.max_total = self.max_total
        dup.counts = list(self.counts)
        dup.total = self.total
        dup._tree = list(self._tree)
        return dup

    def _prefix(self, k: int) -> int:
        tree = self._tree
        s = 0
        while k:
            s += tree[k]
            k &= k - 1
        return s

    def interval(self, symbol: int):
        lo = self._prefix(symbol)
        return lo, lo + self.counts[symbol], self.total

    def find(self, value: int) -> int:
        tree = self._tree
        n = self.alphabet_size
        idx = 0
        mask = 1 << (n.bit_length() - 1)
        while mask:
            nxt = idx + mask
            if nxt <= n and tree[nxt] <= value:
                idx = nxt
                value -= tree[nxt]
            mask >>= 1
        return idx

    def ideal_codelength(self, symbol: int) -> float:
        return shannon_codelength(self.counts[symbol] / self.total)

    def update(self, symbol: int) -> None:
        inc = self.increment
        self.counts[symbol] += inc
        self.total += inc
        tree = self._tree
        n = self.alphabet_size
        k = symbol + 1
        while k <= n:
            tree[k] += inc
            k += k & -k
        if self.total > self.max_total:
            self._rescale()

    def _rescale(self) -> None:
        self.counts = [(c + 1) // 2 for c in self.counts]
        self.total = sum(self.counts)
        self._tree = self._build(self.counts)


class RangeEncoder:
    """32-bit arithmetic encoder with underflow carry propagation."""

    def __init__(self):
        self.low = 0
        self.high = MASK32
        self._pending = 0
        self._writer = BitWriter()
        self._finished = False

    def _emit(self, bit: int) -> None:
        self._writer.write(bit)
        while self._pending:
            self._writer.write(bit ^ 1)
            self._pending -= 1

    def encode(self, cum_lo: int, cum_hi: int, total: int) -> None:
        if not 0 <= cum_lo < cum_hi <= total:
            raise ValueError("bad cumulative interval")
        span = self.high - self.low + 1
        self.high = self.low + span * cum_hi // total - 1
        self.low = self.low + span * cum_lo // total
        while True:
            if self.high < HALF:
                self._emit(0)
            elif self.low >= HALF:
                self._emit(1)
                self.low -= HALF
                self.high -= HALF
            elif self.low >= QUARTER and self.high < THREEQ:
                self._pending += 1
                self.low -= QUARTER
                self.high -= QUARTER
            else:
                break
            self.low <<= 1
            self.high = (self.high << 1) | 1

    def finish(self) -> Bitstream:
        """Flush the final interval; at most 5 bytes of tail and padding."""
        if self._finished:
            raise RuntimeError("finish called twice")
        self._finished = True
        self._pending += 1
        if self.low < QUARTER:
            self._emit(0)
        else:
            self._emit(1)
        return self._writer.finish()


class RangeDecoder:
    """Mirror of RangeEncoder; consumes a Bitstream or raw bytes."""

    def __init__(self, data, bit_length: int | None = None):
        if isinstance(data, Bitstream):
            reader = BitReader(data.data, data.bit_length)
        else:
            reader = BitReader(data, bit_length)
        self._reader = reader
        self.low = 0
        self.high = MASK32
        self.code = 0
        for _ in range(32):
            self.code = (self.code << 1) | reader.read()

    def decode_target(self, total: int) -> int:
        span = self.high - self.low + 1
        value = ((self.code - self.low + 1) * total - 1) // span
        if value >= total:
            raise DecodeError("decoder state out of range")
        return value

    def advance(self, cum_lo: int, cum_hi: int, total: int) -> None:
        span = self.high - self.low + 1
        self.high = self.low + span * cum_hi // total - 1
        self.low = self.low + span * cum_lo // total
        read = self._reader.read
        while True:
            if self.high < HALF:
                pass
            elif self.low >= HALF:
                self.low -= HALF
                self.high -= HALF
                self.code -= HALF
            elif self.low >= QUARTER and self.high < THREEQ:
                self.low -= QUARTER
                self.high -= QUARTER
                self.code -= QUARTER
            else:
                break
            self.low <<= 1
            self.high = (self.high << 1) | 1
            self.code = (self.code << 1) | read()


def encode_stream(symbols, model) -> Bitstream:
    """Arithmetic-code a symbol sequence under a frequency model.

    The model is copied first so the caller's instance is untouched.  A
    4-bit sentinel follows the payload; ``decode_stream`` verifies it.
    """
    model = model.copy()
    enc = RangeEncoder()
    for s in symbols:
        lo, hi, total = model.interval(s)
        enc.encode(lo, hi, total)
        model.update(s)
    enc.encode(_SENTINEL, _SENTINEL + 1, _SENTINEL_TOTAL)
    return enc.finish()


def decode_stream(data, count: int, model) -> list[int]:
    """Inverse of encode_stream for a known symbol count.

    Raises DecodeError when the end sentinel fails, which catches
    truncation, wrong counts and mismatched models.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    model = model.copy()
    dec = RangeDecoder(data)
    out = []
    for _ in range(count):
        total = model.total
        value = dec.decode_target(total)
        sym = model.find(value)
        lo, hi, _ = model.interval(sym)
        dec.advance(lo, hi, total)
        model.update(sym)
        out.append(sym)
    check = dec.decode_target(_SENTINEL_TOTAL)
    if check != _SENTINEL:
        raise DecodeError("end sentinel mismatch: truncated or corrupt stream")
    dec.advance(_SENTINEL, _SENTINEL + 1, _SENTINEL_TOTAL)
    return out


def ideal_stream_bits(symbols, model) -> float:
    """Sum of -log2 p(symbol | prefix) along the model's adaptive path."""
    model = model.copy()
    bits = 0.0
    for s in symbols:
        bits += model.ideal_codelength(s)
        model.update(s)
    return bits

"""Net-score accounting, archives, verification, NFL audits, leaderboards.

The benchmark's rule is blunt: a theory's score is the byte size of its
declared compressor artifact plus the byte size of everything it
encoded, times eight.  Archives are verified by decoding and comparing
byte-for-byte ("trust, but verify"), with a deterministic re-encode as
a tripwire for mutations that happen to decode cleanly.  The NFL audit
feeds a codec every bit string of length N and checks that the mean
codelength is at least N and the Kraft sum at most one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coding import DecodeError
from .registry import CODEC_NAMES, codec_id, codec_name, compress_item, \
    decompress_item

ARCHIVE_MAGIC = b"CRMA"
ARCHIVE_VERSION = 1
FLAG_BACKOFF = 0x01
_ARCHIVE_HEADER_BYTES = 4 + 1 + 1 + 8   # magic, version, codec id, count
_ITEM_HEADER_BYTES = 1 + 8 + 8          # flags, original len, encoded len

VAST_RATIO = 100.0
NFL_MAX_N = 16

STATUSES = ("verified", "failed", "unverified")


# ---------------------------------------------------------------------------
# net scores


@dataclass(frozen=True, order=False)
class NetScore:
    """Compressor artifact size plus encoded payload size, in bytes."""

    compressor_bytes: int
    payload_bytes: int

    def __post_init__(self):
        if self.compressor_bytes < 0 or self.payload_bytes < 0:
            raise ValueError("byte counts must be non-negative")

    @property
    def total_bits(self) -> int:
        return 8 * (self.compressor_bytes + self.payload_bytes)


def net_score(compressor_bytes: int, payload_bytes: int) -> NetScore:
    return NetScore(int(compressor_bytes), int(payload_bytes))


def compare_theories(a: NetScore, b: NetScore, corpus_a: str = "",
                     corpus_b: str = "") -> str:
    """Strictly lower total wins; equal totals are a reported tie."""
    if corpus_a != corpus_b:
        raise ValueError("scores computed on different corpora")
    if a.total_bits < b.total_bits:
        return "a"
    if b.total_bits < a.total_bits:
        return "b"
    return "tie"


# ---------------------------------------------------------------------------
# archive container


@dataclass(frozen=True)
class ArchiveItem:
    backed_off: bool
    original_bytes: int
    body: bytes


@dataclass(frozen=True)
class Archive:
    codec: str
    items: tuple[ArchiveItem, ...]

    @property
    def payload_bits(self) -> int:
        return 8 * sum(len(it.body) for it in self.items)

    @property
    def container_overhead_bits(self) -> int:
        return 8 * (_ARCHIVE_HEADER_BYTES
                    + _ITEM_HEADER_BYTES * len(self.items))


def pack_archive(codec: str, items) -> bytes:
    """items: iterable of (body, backed_off, original_byte_count)."""
    cid = codec_id(codec)
    entries = list(items)
    out = bytearray()
    out += ARCHIVE_MAGIC
    out.append(ARCHIVE_VERSION)
    out.append(cid)
    out += len(entries).to_bytes(8, "big")
    for body, backed_off, original_bytes in entries:
        out.append(FLAG_BACKOFF if backed_off else 0)
        out += int(original_bytes).to_bytes(8, "big")
        out += len(body).to_bytes(8, "big")
        out += body
    return bytes(out)


def parse_archive(data: bytes) -> Archive:
    if data[:4] != ARCHIVE_MAGIC:
        raise DecodeError("wrong magic, expected CRMA")
    if len(data) < _ARCHIVE_HEADER_BYTES:
        raise DecodeError("truncated archive header")
    if data[4] != ARCHIVE_VERSION:
        raise DecodeError(f"unsupported archive version {data[4]}")
    try:
        codec = codec_name(data[5])
    except ValueError as exc:
        raise DecodeError(str(exc)) from exc
    count = int.from_bytes(data[6:14], "big")
    pos = _ARCHIVE_HEADER_BYTES
    items = []
    for _ in range(count):
        if pos + _ITEM_HEADER_BYTES > len(data):
            raise DecodeError("truncated item header")
        flags = data[pos]
        if flags & ~FLAG_BACKOFF:
            raise DecodeError(f"unknown item flags 0x{flags:02x}")
        original_bytes = int.from_bytes(data[pos + 1:pos + 9], "big")
        enc_len = int.from_bytes(data[pos + 9:pos + 17], "big")
        pos += _ITEM_HEADER_BYTES
        if pos + enc_len > len(data):
            raise DecodeError("truncated item body")
        items.append(ArchiveItem(bool(flags & FLAG_BACKOFF), original_bytes,
                                 data[pos:pos + enc_len]))
        pos += enc_len
    if pos != len(data):
        raise DecodeError("trailing bytes after final item")
    return Archive(codec, tuple(items))


def compress_archive(codec: str, payloads, *, stride: int = 4,
                     motion: bool = True) -> bytes:
    entries = []
    for payload in payloads:
        body, backed_off = compress_item(codec, payload, stride=stride,
                                         motion=motion)
        entries.append((body, backed_off, len(payload)))
    return pack_archive(codec, entries)


def extract_archive(data: bytes) -> list[bytes]:
    """Decode every item back to its original bytes."""
    archive = parse_archive(data)
    return [decompress_item(archive.codec, it.body, it.backed_off)
            for it in archive.items]


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class ItemCheck:
    index: int
    ok: bool
    reason: str = ""


@dataclass(frozen=True)
class VerificationReport:
    codec: str
    passed: bool
    items: tuple[ItemCheck, ...]
    payload_bits: int
    container_overhead_bits: int
    reason: str = ""

    def __str__(self):
        state = "pass" if self.passed else "FAIL"
        bad = [c.index for c in self.items if not c.ok]
        tail = f" (bad items: {bad})" if bad else ""
        if self.reason and not self.items:
            tail = f" ({self.reason})"
        return (f"{state}: {len(self.items)} items, "
                f"{self.payload_bits} payload bits{tail}")


def _reencode_options(codec: str, item: ArchiveItem) -> dict:
    """Recover per-item encoder settings embedded in a native body."""
    if item.backed_off:
        return {}
    body = item.body
    if codec == "interp" and len(body) > 15:
        return {"stride": body[14], "motion": bool(body[15])}
    if codec == "blob" and len(body) > 16 and body[0] == 0:
        return {"stride": body[15], "motion": bool(body[16])}
    return {}


def verify_roundtrip(archive_bytes: bytes, originals) -> VerificationReport:
    """Decode every item and byte-compare against the originals.

    A deterministic re-encode of each decoded item must also reproduce
    the stored body, so mutations that survive decoding are still
    caught.  Corrupt archives are reported, never raised through.
    """
    originals = list(originals)
    try:
        archive = parse_archive(archive_bytes)
    except (DecodeError, ValueError) as exc:
        return VerificationReport("?", False, (), 0, 0,
                                  reason=f"unreadable archive: {exc}")
    checks = []
    if len(archive.items) != len(originals):
        return VerificationReport(
            archive.codec, False, (), archive.payload_bits,
            archive.container_overhead_bits,
            reason=f"item count mismatch: archive has {len(archive.items)}, "
                   f"corpus has {len(originals)}")
    for idx, (item, original) in enumerate(zip(archive.items, originals)):
        try:
            decoded = decompress_item(archive.codec, item.body,
                                      item.backed_off)
        except (DecodeError, ValueError) as exc:
            checks.append(ItemCheck(idx, False, f"decode error: {exc}"))
            continue
        if decoded != original:
            checks.append(ItemCheck(idx, False, "decoded bytes differ"))
            continue
        if item.original_bytes != len(original):
            checks.append(ItemCheck(idx, False, "recorded size differs"))
            continue
        body, backed_off = compress_item(archive.codec, decoded,
                                         **_reencode_options(archive.codec,
                                                             item))
        if backed_off != item.backed_off or body != item.body:
            checks.append(ItemCheck(idx, False, "re-encode differs"))
            continue
        checks.append(ItemCheck(idx, True))
    passed = all(c.ok for c in checks)
    return VerificationReport(archive.codec, passed, tuple(checks),
                              archive.payload_bits,
                              archive.container_overhead_bits)


# ---------------------------------------------------------------------------
# vastness


@dataclass(frozen=True)
class VastnessReport:
    payload_bits: int
    shim_bound_bits: int
    ratio: float
    vast: bool


def vastness_check(payload_bits: int, shim_bound_bits: int) -> VastnessReport:
    """Is the corpus so large that a fixed-size language shim is noise?"""
    if shim_bound_bits <= 0:
        raise ValueError("shim bound must be positive")
    ratio = payload_bits / shim_bound_bits
    return VastnessReport(payload_bits, shim_bound_bits, ratio,
                          ratio >= VAST_RATIO)


# ---------------------------------------------------------------------------
# NFL audit


@dataclass(frozen=True)
class NflAudit:
    codec: str
    n: int
    inputs: int
    mean_bits: float
    min_bits: int
    max_bits: int
    kraft_sum: float
    backoff_fraction: float

    @property
    def passed(self) -> bool:
        return self.mean_bits >= self.n and self.kraft_sum <= 1.0 + 1e-9

    def __str__(self):
        state = "pass" if self.passed else "FAIL"
        return (f"{self.codec} at N={self.n}: mean {self.mean_bits:.3f} bits"
                f" over {self.inputs} inputs, Kraft sum"
                f" {self.kraft_sum:.6g} -> {state}")


def nfl_audit(codec: str, n: int) -> NflAudit:
    """Run the full encode path over every N-bit input.

    Inputs are the 2^N bit strings, packed most-significant-bit first
    into ceil(N/8) bytes.  An item's codelength is eight times its
    encoded body plus the one-byte back-off flag that travels with it.
    """
    if codec not in CODEC_NAMES:
        raise ValueError(f"unknown codec {codec!r}")
    if not 1 <= n <= NFL_MAX_N:
        raise ValueError(f"n must be in [1, {NFL_MAX_N}]")
    width = (n + 7) // 8
    shift = 8 * width - n
    total_bits = 0
    min_bits = None
    max_bits = 0
    kraft = 0.0
    backoffs = 0
    for value in range(1 << n):
        payload = (value << shift).to_bytes(width, "big")
        body, backed_off = compress_item(codec, payload)
        bits = 8 * (1 + len(body))
        total_bits += bits
        min_bits = bits if min_bits is None else min(min_bits, bits)
        max_bits = max(max_bits, bits)
        kraft += 2.0 ** -bits
        backoffs += backed_off
    count = 1 << n
    return NflAudit(codec, n, count, total_bits / count, min_bits, max_bits,
                    kraft, backoffs / count)


# ---------------------------------------------------------------------------
# leaderboard


@dataclass(frozen=True)
class LeaderboardEntry:
    corpus_id: str
    codec: str
    compressor_bytes: int
    payload_bytes: int
    status: str
    timestamp: str
    note: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.compressor_bytes < 0 or self.payload_bytes < 0:
            raise ValueError("byte counts must be non-negative")
        for text in (self.corpus_id, self.codec, self.status,
                     self.timestamp):
            if "\t" in text or "\n" in text or not text:
                raise ValueError("fields must be non-empty and tab-free")

    @property
    def total_bits(self) -> int:
        return 8 * (self.compressor_bytes + self.payload_bytes)

    def to_line(self) -> str:
        return "\t".join([self.corpus_id, self.codec,
                          str(self.compressor_bytes),
                          str(self.payload_bytes), str(self.total_bits),
                          self.status, self.timestamp])


def parse_leaderboard(text: str) -> list[LeaderboardEntry]:
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 7:
            raise ValueError(f"line {lineno}: expected 7 fields")
        corpus_id, codec, comp_s, pay_s, total_s, status, stamp = fields
        try:
            comp, pay, total = int(comp_s), int(pay_s), int(total_s)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: non-integer size") from exc
        entry = LeaderboardEntry(corpus_id, codec, comp, pay, status, stamp)
        if entry.total_bits != total:
            raise ValueError(f"line {lineno}: total bits inconsistent")
        entries.append(entry)
    return entries


def serialize_leaderboard(entries) -> str:
    return "".join(e.to_line() + "\n" for e in entries)


def leaderboard_update(entries, entry: LeaderboardEntry):
    """Append-only: only verified entries may enter the board."""
    if entry.status != "verified":
        raise ValueError(f"entry rejected: status is {entry.status!r}, "
                         "only verified entries rank")
    return list(entries) + [entry]


def ranked(entries):
    """Verified entries, ascending by total bits within each corpus;
    equal totals keep timestamp order."""
    verified = [e for e in entries if e.status == "verified"]
    return sorted(verified,
                  key=lambda e: (e.corpus_id, e.total_bits, e.timestamp))

"""Image and frame-sequence types plus their on-disk formats.

Images are 8-bit grayscale, stored as binary PGM (P5, maxval 255 only).
Frame sequences use a small container: a ``CRMVID 1`` header line, a line
of decimal fields ``width height frame_count frame_rate``, then the frames
as concatenated P5 payloads.  Writers emit a single canonical byte form;
parsers accept standard PGM whitespace and comments, so a file is called
canonical exactly when reserialization reproduces it byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DIM = 65535


class FormatError(ValueError):
    """Malformed or unsupported input file."""


@dataclass(frozen=True, eq=False)
class Image:
    """8-bit grayscale raster; pixels are a read-only (h, w) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8:
            raise ValueError("pixels must be uint8")
        if px.ndim != 2 or px.size == 0:
            raise ValueError("pixels must be a non-empty 2-D array")
        if px.shape[0] > MAX_DIM or px.shape[1] > MAX_DIM:
            raise ValueError("image dimension exceeds 65535")
        px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels))

    def __hash__(self) -> int:
        return hash((self.pixels.shape, self.pixels.tobytes()))


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Equal-dimension grayscale frames sampled at a fixed rate."""

    frames: tuple[Image, ...]
    frame_rate: float = 25.0

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise ValueError("sequence needs at least one frame")
        w, h = frames[0].width, frames[0].height
        for f in frames:
            if f.width != w or f.height != h:
                raise ValueError("frames must share dimensions")
        if not (self.frame_rate > 0):
            raise ValueError("frame_rate must be positive")
        object.__setattr__(self, "frames", frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrameSequence):
            return NotImplemented
        return (self.frame_rate == other.frame_rate
                and self.frames == other.frames)


_WS = b" \t\r\n\v\f"


def _scan_tokens(data: bytes, pos: int, count: int):
    """Read whitespace/comment separated ASCII integers from a PNM header."""
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and (data[pos] in _WS or data[pos] == 0x23):
            if data[pos] == 0x23:  # '#' comment runs to end of line
                while pos < n and data[pos] != 0x0A:
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < n and 0x30 <= data[pos] <= 0x39:
            pos += 1
        if pos == start:
            raise FormatError("malformed header: expected decimal field")
        tokens.append(int(data[start:pos]))
    return tokens, pos


def parse_pgm_at(data: bytes, pos: int = 0):
    """Parse one P5 image starting at ``pos``; returns (Image, end_pos)."""
    if data[pos:pos + 2] != b"P5":
        if data[pos:pos + 1] == b"P":
            raise FormatError("unsupported PNM variant, only binary P5")
        raise FormatError("wrong magic, expected P5")
    (w, h, maxval), pos = _scan_tokens(data, pos + 2, 3)
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval}, only 255")
    if w < 1 or h < 1 or w > MAX_DIM or h > MAX_DIM:
        raise FormatError("bad dimensions")
    if pos >= len(data) or data[pos] not in _WS:
        raise FormatError("malformed header: missing raster separator")
    pos += 1
    end = pos + w * h
    if end > len(data):
        raise FormatError("truncated pixel data")
    px = np.frombuffer(data[pos:end], dtype=np.uint8).reshape(h, w)
    return Image(px), end


def parse_pgm(data: bytes) -> Image:
    img, end = parse_pgm_at(data, 0)
    if end != len(data):
        raise FormatError("trailing bytes after pixel data")
    return img


def serialize_pgm(img: Image) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def is_canonical_pgm(data: bytes) -> bool:
    try:
        return serialize_pgm(parse_pgm(data)) == data
    except FormatError:
        return False


def _format_rate(rate: float) -> str:
    return str(int(rate)) if float(rate).is_integer() else repr(float(rate))


def serialize_sequence(seq: FrameSequence) -> bytes:
    head = (f"CRMVID 1\n{seq.width} {seq.height} {seq.frame_count} "
            f"{_format_rate(seq.frame_rate)}\n").encode("ascii")
    return head + b"".join(serialize_pgm(f) for f in seq.frames)


def parse_sequence(data: bytes) -> FrameSequence:
    nl = data.find(b"\n")
    if nl < 0 or data[:nl] != b"CRMVID 1":
        raise FormatError("wrong magic, expected CRMVID 1")
    nl2 = data.find(b"\n", nl + 1)
    if nl2 < 0:
        raise FormatError("malformed header: missing field line")
    fields = data[nl + 1:nl2].split()
    if len(fields) != 4:
        raise FormatError("malformed header: expected 4 decimal fields")
    try:
        w, h, count = int(fields[0]), int(fields[1]), int(fields[2])
        rate = float(fields[3])
    except ValueError as exc:
        raise FormatError("malformed header: non-decimal field") from exc
    if count < 1 or not rate > 0:
        raise FormatError("bad frame count or rate")
    pos = nl2 + 1
    frames = []
    for _ in range(count):
        img, pos = parse_pgm_at(data, pos)
        if img.width != w or img.height != h:
            raise FormatError("frame dimensions disagree with header")
        frames.append(img)
    if pos != len(data):
        raise FormatError("trailing bytes after final frame")
    return FrameSequence(tuple(frames), rate)


def is_canonical_sequence(data: bytes) -> bool:
    try:
        return serialize_sequence(parse_sequence(data)) == data
    except FormatError:
        return False

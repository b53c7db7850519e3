"""Codec registry: every shipped codec behind one bytes-to-bytes interface.

Each codec owns a native container format (PGM for still images, the
CRMVID sequence container for video and stereo, the CRMTRIALS text
format for measured outcomes).  ``compress_item`` tries the native path
when the payload parses canonically, keeps it only when it is strictly
shorter than the payload, and otherwise backs off to storing the bytes
verbatim.  The back-off flag travels next to the encoded body, so every
codec is lossless on every input and never loses more than the flag.
"""

from __future__ import annotations

import math
import struct

import numpy as np

from .coding import (MAX_MODEL_TOTAL, DecodeError, RangeDecoder,
                     RangeEncoder, StaticFrequencyModel, _SENTINEL,
                     _SENTINEL_TOTAL, decode_stream, encode_stream)
from .images import (pixeldiff_decode_image, pixeldiff_encode_image,
                     segmented_decode_image, segmented_encode_image)
from .media import (FormatError, FrameSequence, parse_pgm, parse_sequence,
                    serialize_pgm, serialize_sequence)
from .multiview import (compress_sequence_blob, compress_sequence_interp,
                        compress_stereo_pair, decompress_sequence_blob,
                        decompress_sequence_interp, decompress_stereo_pair)
from .scalar import TrialSet, parse_trials, serialize_trials

CODEC_NAMES = ("uniform", "pixdiff", "segment", "stereo", "interp", "blob",
               "gaussian", "interval")

# guards for the trials coders: milli-unit integers stay well inside the
# range where float formatting of m/1000 is exact to three decimals
_MILLI_LIMIT = 1 << 48
_GAUSS_HALF_MAX = 8192


def codec_id(name: str) -> int:
    try:
        return CODEC_NAMES.index(name)
    except ValueError:
        raise ValueError(f"unknown codec {name!r}") from None


def codec_name(cid: int) -> str:
    if not 0 <= cid < len(CODEC_NAMES):
        raise ValueError(f"unknown codec id {cid}")
    return CODEC_NAMES[cid]


# ---------------------------------------------------------------------------
# canonical-container helpers


def _canonical_image(payload: bytes):
    img = parse_pgm(payload)
    if serialize_pgm(img) != payload:
        raise FormatError("non-canonical PGM")
    return img


def _canonical_sequence(payload: bytes) -> FrameSequence:
    seq = parse_sequence(payload)
    if serialize_sequence(seq) != payload:
        raise FormatError("non-canonical sequence")
    return seq


def _canonical_trials(payload: bytes) -> TrialSet:
    trials = parse_trials(payload)
    if serialize_trials(trials) != payload:
        raise FormatError("non-canonical trials file")
    return trials


# ---------------------------------------------------------------------------
# trials coding (gaussian and interval theories as actual codecs)


def _trials_milli(trials: TrialSet):
    """Outcomes as integers in thousandths, or None when unrepresentable."""
    ms = []
    for x in trials.outcomes:
        m = round(x * 1000.0)
        if abs(m) > _MILLI_LIMIT:
            return None
        if f"{m / 1000.0:.3f}" != f"{x:.3f}":
            return None
        ms.append(int(m))
    return ms


def _meta_block(trials: TrialSet) -> bytes:
    return "\n".join(f"{k}={v}" for k, v in trials.metadata).encode("ascii")


def _meta_parse(block: bytes):
    if not block:
        return ()
    pairs = []
    for line in block.decode("ascii").split("\n"):
        key, sep, value = line.partition("=")
        if not sep:
            raise DecodeError("bad metadata line in trials body")
        pairs.append((key, value))
    return tuple(pairs)


def _rebuild_trials(ms, metadata) -> bytes:
    try:
        trials = TrialSet(tuple(m / 1000.0 for m in ms), metadata)
    except ValueError as exc:
        raise DecodeError(f"bad trials content: {exc}") from exc
    return serialize_trials(trials)


_BYTE_MODEL = StaticFrequencyModel.uniform(256)


def _encode_gaussian_trials(payload: bytes) -> bytes:
    trials = _canonical_trials(payload)
    ms = _trials_milli(trials)
    if ms is None or not ms:
        raise FormatError("outcomes unsuited to milli-integer coding")
    arr = np.array(ms, dtype=np.float64)
    mu = int(round(float(arr.mean())))
    sigma = int(min(max(round(float(arr.std())), 1), 0xFFFF))
    half = min(8 * sigma, _GAUSS_HALF_MAX)
    bins = 2 * half + 1
    zs = (np.arange(-half, half + 1, dtype=np.float64)) / sigma
    masses = np.exp(-0.5 * zs * zs)
    probs = masses / masses.sum()
    budget = MAX_MODEL_TOTAL - bins - 1
    counts = np.maximum(1, np.rint(probs * budget).astype(np.int64))
    model = StaticFrequencyModel(counts.tolist() + [1])  # last slot: escape
    escape = bins

    enc = RangeEncoder()
    for m in ms:
        z = m - mu
        if -half <= z <= half:
            lo, hi, total = model.interval(z + half)
            enc.encode(lo, hi, total)
        else:
            lo, hi, total = model.interval(escape)
            enc.encode(lo, hi, total)
            for byte in struct.pack(">q", m):
                lo, hi, total = _BYTE_MODEL.interval(byte)
                enc.encode(lo, hi, total)
    enc.encode(_SENTINEL, _SENTINEL + 1, _SENTINEL_TOTAL)
    stream = enc.finish().data

    meta = _meta_block(trials)
    head = struct.pack(">Iq H H", len(ms), mu, sigma, len(meta))
    return head + meta + stream


def _decode_gaussian_trials(body: bytes) -> bytes:
    if len(body) < 16:
        raise DecodeError("truncated trials body")
    count, mu, sigma, meta_len = struct.unpack(">Iq H H", body[:16])
    if sigma < 1:
        raise DecodeError("bad sigma in trials body")
    if 16 + meta_len > len(body):
        raise DecodeError("truncated trials metadata")
    metadata = _meta_parse(body[16:16 + meta_len])
    half = min(8 * sigma, _GAUSS_HALF_MAX)
    bins = 2 * half + 1
    zs = (np.arange(-half, half + 1, dtype=np.float64)) / sigma
    masses = np.exp(-0.5 * zs * zs)
    probs = masses / masses.sum()
    budget = MAX_MODEL_TOTAL - bins - 1
    counts = np.maximum(1, np.rint(probs * budget).astype(np.int64))
    model = StaticFrequencyModel(counts.tolist() + [1])
    escape = bins

    dec = RangeDecoder(body[16 + meta_len:])
    ms = []
    for _ in range(count):
        sym = model.find(dec.decode_target(model.total))
        lo, hi, total = model.interval(sym)
        dec.advance(lo, hi, total)
        if sym == escape:
            raw = bytearray()
            for _ in range(8):
                byte = _BYTE_MODEL.find(dec.decode_target(256))
                lo, hi, total = _BYTE_MODEL.interval(byte)
                dec.advance(lo, hi, total)
                raw.append(byte)
            ms.append(struct.unpack(">q", bytes(raw))[0])
        else:
            ms.append(sym - half + mu)
    if dec.decode_target(_SENTINEL_TOTAL) != _SENTINEL:
        raise DecodeError("end sentinel mismatch")
    return _rebuild_trials(ms, metadata)


def _encode_interval_trials(payload: bytes) -> bytes:
    trials = _canonical_trials(payload)
    ms = _trials_milli(trials)
    if ms is None or not ms:
        raise FormatError("outcomes unsuited to milli-integer coding")
    lo_m, hi_m = min(ms), max(ms)
    bins = hi_m - lo_m + 1
    if bins > MAX_MODEL_TOTAL:
        raise FormatError("outcome span too wide for interval coding")
    model = StaticFrequencyModel([1] * bins)
    stream = encode_stream([m - lo_m for m in ms], model).data
    meta = _meta_block(trials)
    head = struct.pack(">Iqq H", len(ms), lo_m, hi_m, len(meta))
    return head + meta + stream


def _decode_interval_trials(body: bytes) -> bytes:
    if len(body) < 22:
        raise DecodeError("truncated trials body")
    count, lo_m, hi_m, meta_len = struct.unpack(">Iqq H", body[:22])
    if hi_m < lo_m:
        raise DecodeError("bad interval bounds in trials body")
    bins = hi_m - lo_m + 1
    if bins > MAX_MODEL_TOTAL:
        raise DecodeError("interval span too wide")
    if 22 + meta_len > len(body):
        raise DecodeError("truncated trials metadata")
    metadata = _meta_parse(body[22:22 + meta_len])
    model = StaticFrequencyModel([1] * bins)
    symbols = decode_stream(body[22 + meta_len:], count, model)
    return _rebuild_trials([int(s) + lo_m for s in symbols], metadata)


# ---------------------------------------------------------------------------
# per-codec native paths


def _encode_stereo(payload: bytes, stride, motion) -> bytes:
    seq = _canonical_sequence(payload)
    if seq.frame_count != 2:
        raise FormatError("stereo codec needs exactly two frames")
    body, _ = compress_stereo_pair(seq.frames[0], seq.frames[1])
    return struct.pack(">d", seq.frame_rate) + body


def _decode_stereo(body: bytes) -> bytes:
    if len(body) < 8:
        raise DecodeError("truncated stereo body")
    rate = struct.unpack(">d", body[:8])[0]
    if not (rate > 0) or not math.isfinite(rate):
        raise DecodeError("bad frame rate")
    left, right = decompress_stereo_pair(body[8:])
    return serialize_sequence(FrameSequence((left, right), rate))


def _encode_interp(payload: bytes, stride, motion) -> bytes:
    seq = _canonical_sequence(payload)
    if seq.frame_count < 2:
        raise FormatError("interp codec needs at least two frames")
    body, _ = compress_sequence_interp(seq, stride=stride, motion=motion)
    return body


def _encode_blob(payload: bytes, stride, motion) -> bytes:
    seq = _canonical_sequence(payload)
    if seq.frame_count < 3:
        raise FormatError("blob codec needs at least three frames")
    body, _ = compress_sequence_blob(seq)
    return body


_NATIVE_ENCODERS = {
    "uniform": None,
    "pixdiff": lambda p, stride, motion:
        pixeldiff_encode_image(_canonical_image(p)),
    "segment": lambda p, stride, motion:
        segmented_encode_image(_canonical_image(p)),
    "stereo": _encode_stereo,
    "interp": _encode_interp,
    "blob": _encode_blob,
    "gaussian": lambda p, stride, motion: _encode_gaussian_trials(p),
    "interval": lambda p, stride, motion: _encode_interval_trials(p),
}

_NATIVE_DECODERS = {
    "pixdiff": lambda b: serialize_pgm(pixeldiff_decode_image(b)),
    "segment": lambda b: serialize_pgm(segmented_decode_image(b)),
    "stereo": _decode_stereo,
    "interp": lambda b: serialize_sequence(decompress_sequence_interp(b)),
    "blob": lambda b: serialize_sequence(decompress_sequence_blob(b)),
    "gaussian": _decode_gaussian_trials,
    "interval": _decode_interval_trials,
}


def compress_item(codec: str, payload: bytes, *, stride: int = 4,
                  motion: bool = True) -> tuple[bytes, bool]:
    """Encode one item; returns (body, backed_off).

    The native path is used only when the payload is a canonical
    container for the codec and the encoding is strictly shorter than
    the payload itself; otherwise the body is the payload verbatim.
    """
    if codec not in CODEC_NAMES:
        raise ValueError(f"unknown codec {codec!r}")
    encoder = _NATIVE_ENCODERS[codec]
    if encoder is not None:
        try:
            body = encoder(payload, stride, motion)
        except (FormatError, ValueError):
            body = None
        if body is not None and len(body) < len(payload):
            return body, False
    return payload, True


def decompress_item(codec: str, body: bytes, backed_off: bool) -> bytes:
    if codec not in CODEC_NAMES:
        raise ValueError(f"unknown codec {codec!r}")
    if backed_off:
        return body
    decoder = _NATIVE_DECODERS.get(codec)
    if decoder is None:
        raise DecodeError(f"codec {codec!r} has no native decoder")
    try:
        return decoder(body)
    except FormatError as exc:
        raise DecodeError(f"native body rebuilds no container: {exc}") from exc

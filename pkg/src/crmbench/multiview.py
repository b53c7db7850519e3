"""Multi-image codecs: stereo pairs, interpolated video, moving blobs.

The stereo coder transmits the left image as a still-image section,
then chooses between disparity-compensated joint coding of the right
image and independent coding, reporting the measured section sizes.
The video coders share a sectioned container: every frame is a
self-contained section behind a mode byte and a length, so skipped
frames cost five bytes and losslessness never depends on a model being
right.  Still-image sections and per-frame modes both include a raw
branch, so no image ever costs more than 8 bits/pixel plus the flag.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .coding import (MAX_MODEL_TOTAL, AdaptiveFrequencyModel, DecodeError,
                     RangeDecoder, RangeEncoder, StaticFrequencyModel,
                     _SENTINEL, _SENTINEL_TOTAL, decode_stream, encode_stream)
from .images import (RESIDUAL_ALPHABET, pixeldiff_decode_image,
                     pixeldiff_encode_image)
from .media import FrameSequence, Image

D_MAX_DEFAULT = 32
STEREO_BLOCK = 8
EPSILON_DEFAULT = 1.0
SCALE_DEFAULT = 1.0
STRIDE_DEFAULT = 4
MOTION_TILE = 16
MOTION_RANGE = 16
TAU_DEFAULT = 12

# per-frame section modes in the video container
MODE_PIXDIFF = 0     # independent pixel-diff coding
MODE_KEYDIFF = 1     # difference against the previous keyframe
MODE_INTERP = 2      # keyframe interpolation residual, flow variance rule
MODE_SKIP = 3        # identical to the previous frame, empty section
MODE_PREVDIFF = 4    # difference against the previous frame
MODE_BLOB = 5        # background plus translated blob prediction
MODE_RAW = 6         # verbatim raster bytes, the per-frame back-off floor


def _encode_u16(value: int) -> bytes:
    return int(value).to_bytes(2, "big")


def _encode_u32(value: int) -> bytes:
    return int(value).to_bytes(4, "big")


class _Cursor:
    """Sequential reader that turns truncation into DecodeError."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise DecodeError("truncated payload")
        out = self.data[self.pos:self.pos + count]
        self.pos += count
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return int.from_bytes(self.take(2), "big")

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def f64(self) -> float:
        return struct.unpack(">d", self.take(8))[0]

    def done(self) -> None:
        if self.pos != len(self.data):
            raise DecodeError("trailing bytes after payload")


# ---------------------------------------------------------------------------
# flagged image sections


def _image_section(img: Image) -> bytes:
    """A self-describing still-image section: one flag byte, then either
    a pixel-diff payload (flag 0) or verbatim raster bytes (flag 1),
    whichever is shorter.  The raw branch caps the cost of incompressible
    content at 8 bits/pixel plus the flag."""
    candidates = [(pixeldiff_encode_image(img), 0),
                  (img.pixels.tobytes(), 1)]
    body, flag = min(candidates, key=lambda c: (len(c[0]), c[1]))
    return bytes([flag]) + body


def _image_section_decode(section: bytes, width: int, height: int) -> Image:
    if not section:
        raise DecodeError("empty image section")
    flag, body = section[0], section[1:]
    if flag == 0:
        img = pixeldiff_decode_image(body)
        if img.pixels.shape != (height, width):
            raise DecodeError("image dimensions disagree with header")
        return img
    if flag == 1:
        if len(body) != width * height:
            raise DecodeError("raw section length disagrees with header")
        return Image(np.frombuffer(body, dtype=np.uint8)
                     .reshape(height, width).copy())
    raise DecodeError("unknown image section flag")


def _raw_frame_decode(section: bytes, width: int, height: int) -> Image:
    if len(section) != width * height:
        raise DecodeError("raw section length disagrees with header")
    return Image(np.frombuffer(section, dtype=np.uint8)
                 .reshape(height, width).copy())


# ---------------------------------------------------------------------------
# disparity


@dataclass(frozen=True, eq=False)
class DisparityMap:
    """Per-pixel scanline disparities, constant within each block."""

    values: np.ndarray
    d_max: int
    block_size: int

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 2 or vals.size == 0:
            raise ValueError("values must be a non-empty 2-D array")
        if self.d_max < 0 or self.block_size < 1:
            raise ValueError("d_max must be >= 0 and block_size positive")
        if vals.min() < 0 or vals.max() > self.d_max:
            raise ValueError("disparity outside [0, d_max]")
        vals = vals.astype(np.int32, copy=True)
        b = self.block_size
        for y0 in range(0, vals.shape[0], b):
            for x0 in range(0, vals.shape[1], b):
                block = vals[y0:y0 + b, x0:x0 + b]
                if block.max() != block.min():
                    raise ValueError("disparity not constant within block")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def block_values(self) -> np.ndarray:
        return self.values[::self.block_size, ::self.block_size]


def estimate_disparity(left: Image, right: Image,
                       d_max: int = D_MAX_DEFAULT,
                       block_size: int = STEREO_BLOCK) -> DisparityMap:
    """Block scanline search: right(x) is matched against left(x + d).

    For each block the disparity minimizing the sum of absolute
    differences wins; ties go to the smallest d.  Shifts past the right
    edge clamp to the last column.
    """
    if left.pixels.shape != right.pixels.shape:
        raise ValueError("stereo pair dimensions differ")
    h, w = left.pixels.shape
    if block_size > w or block_size > h:
        raise ValueError("block_size larger than image")
    if d_max < 0:
        raise ValueError("d_max must be >= 0")
    lf = left.pixels.astype(np.int32)
    rt = right.pixels.astype(np.int32)
    row_starts = np.arange(0, h, block_size)
    col_starts = np.arange(0, w, block_size)
    sads = np.empty((d_max + 1, len(row_starts), len(col_starts)),
                    dtype=np.int64)
    cols = np.arange(w)
    for d in range(d_max + 1):
        pred = lf[:, np.minimum(cols + d, w - 1)]
        diff = np.abs(rt - pred)
        sads[d] = np.add.reduceat(
            np.add.reduceat(diff, row_starts, axis=0), col_starts, axis=1)
    best = np.argmin(sads, axis=0)  # first minimum = smallest d
    per_pixel = np.repeat(np.repeat(best, block_size, axis=0),
                          block_size, axis=1)[:h, :w]
    return DisparityMap(per_pixel.astype(np.int32), d_max, block_size)


def disparity_predict(left: Image, dmap: DisparityMap) -> Image:
    """Warp the left image along scanlines to predict the right one."""
    h, w = left.pixels.shape
    cols = np.minimum(np.arange(w)[None, :] + dmap.values, w - 1)
    return Image(left.pixels[np.arange(h)[:, None], cols])


# ---------------------------------------------------------------------------
# stereo codec


@dataclass(frozen=True)
class StereoReport:
    """Measured section sizes for the joint-versus-independent decision."""

    left_bits: int
    disparity_bits: int
    residual_bits: int
    right_independent_bits: int
    joint_selected: bool

    @property
    def joint_bits(self) -> int:
        return self.disparity_bits + self.residual_bits

    def __str__(self):
        verdict = "joint" if self.joint_selected else "independent"
        return (f"left {self.left_bits} b, disparity {self.disparity_bits} b"
                f" + residual {self.residual_bits} b vs independent"
                f" {self.right_independent_bits} b -> {verdict}")


def _diff_symbols(actual: np.ndarray, predicted: np.ndarray) -> np.ndarray:
    return (actual.astype(np.int32) - predicted.astype(np.int32)
            ).ravel() + 255


def _apply_diff(symbols, predicted: np.ndarray) -> Image:
    delta = np.asarray(symbols, dtype=np.int32).reshape(predicted.shape) - 255
    out = predicted.astype(np.int32) + delta
    if out.min() < 0 or out.max() > 255:
        raise DecodeError("residuals reconstruct outside [0, 255]")
    return Image(out.astype(np.uint8))


def compress_stereo_pair(left: Image, right: Image,
                         d_max: int = D_MAX_DEFAULT):
    """Returns (payload, StereoReport); the payload is self-contained."""
    if left.pixels.shape != right.pixels.shape:
        raise ValueError("stereo pair dimensions differ")
    h, w = left.pixels.shape
    block = min(STEREO_BLOCK, w, h)
    left_section = _image_section(left)

    dmap = estimate_disparity(left, right, d_max, block)
    disp_section = encode_stream(
        dmap.block_values().ravel().tolist(),
        AdaptiveFrequencyModel(d_max + 1)).data
    pred = disparity_predict(left, dmap)
    resid_section = encode_stream(
        _diff_symbols(right.pixels, pred.pixels).tolist(),
        AdaptiveFrequencyModel(RESIDUAL_ALPHABET)).data
    indep_section = _image_section(right)

    report = StereoReport(
        left_bits=8 * len(left_section),
        disparity_bits=8 * len(disp_section),
        residual_bits=8 * len(resid_section),
        right_independent_bits=8 * len(indep_section),
        joint_selected=8 * (len(disp_section) + len(resid_section))
        < 8 * len(indep_section))

    out = bytearray()
    out.append(0 if report.joint_selected else 1)
    out += _encode_u16(w) + _encode_u16(h) + _encode_u16(d_max)
    out += _encode_u32(len(left_section)) + left_section
    if report.joint_selected:
        out += _encode_u32(len(disp_section)) + disp_section
        out += _encode_u32(len(resid_section)) + resid_section
    else:
        out += _encode_u32(len(indep_section)) + indep_section
    return bytes(out), report


def decompress_stereo_pair(payload: bytes):
    cur = _Cursor(payload)
    submode = cur.u8()
    if submode not in (0, 1):
        raise DecodeError("unknown stereo submode")
    w, h, d_max = cur.u16(), cur.u16(), cur.u16()
    if w < 1 or h < 1:
        raise DecodeError("bad dimensions")
    left = _image_section_decode(cur.take(cur.u32()), w, h)
    if submode == 1:
        right = _image_section_decode(cur.take(cur.u32()), w, h)
        cur.done()
        return left, right
    block = min(STEREO_BLOCK, w, h)
    n_blocks = ((h + block - 1) // block) * ((w + block - 1) // block)
    disp_syms = decode_stream(cur.take(cur.u32()), n_blocks,
                              AdaptiveFrequencyModel(d_max + 1))
    grid = np.array(disp_syms, dtype=np.int32).reshape(
        (h + block - 1) // block, (w + block - 1) // block)
    per_pixel = np.repeat(np.repeat(grid, block, axis=0),
                          block, axis=1)[:h, :w]
    dmap = DisparityMap(per_pixel, d_max, block)
    pred = disparity_predict(left, dmap)
    resid_syms = decode_stream(cur.take(cur.u32()), w * h,
                               AdaptiveFrequencyModel(RESIDUAL_ALPHABET))
    right = _apply_diff(resid_syms, pred.pixels)
    cur.done()
    return left, right


# ---------------------------------------------------------------------------
# flow-rule residual model


@dataclass(frozen=True, eq=False)
class FlowPrediction:
    """A predicted frame plus the gradient-scaled variance field."""

    predicted: Image
    epsilon: float = EPSILON_DEFAULT
    scale: float = SCALE_DEFAULT

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ValueError("epsilon must be positive")
        if not (self.scale > 0):
            raise ValueError("scale must be positive")

    def variance(self) -> np.ndarray:
        return _variance_map(self.predicted.pixels, self.scale, self.epsilon)


def _gradient_sq(pixels: np.ndarray) -> np.ndarray:
    """Central differences with replicated borders; returns Ix^2 + Iy^2."""
    p = pixels.astype(np.float64)
    padded_x = np.pad(p, ((0, 0), (1, 1)), mode="edge")
    padded_y = np.pad(p, ((1, 1), (0, 0)), mode="edge")
    ix = (padded_x[:, 2:] - padded_x[:, :-2]) / 2.0
    iy = (padded_y[2:, :] - padded_y[:-2, :]) / 2.0
    return ix * ix + iy * iy


def _variance_map(pixels: np.ndarray, scale: float,
                  epsilon: float) -> np.ndarray:
    return scale * (_gradient_sq(pixels) + epsilon)


_RESIDUAL_RANGE = np.arange(-255, 256, dtype=np.float64)


def _log2_normalizer(variances: np.ndarray) -> np.ndarray:
    """log2 of Z(var) = sum over integer residuals of exp(-r^2 / (2 var))."""
    v = np.asarray(variances, dtype=np.float64).ravel()
    z = np.exp(-(_RESIDUAL_RANGE[None, :] ** 2) / (2.0 * v[:, None])).sum(axis=1)
    return np.log2(z).reshape(np.shape(variances))


def flow_codelength(real: Image, pred: FlowPrediction) -> float:
    """Exact codelength of `real` under per-pixel discretized Gaussians
    centered on the prediction: residual^2 * log2(e) / (2 var) plus the
    per-pixel normalizer log2 Z(var)."""
    if real.pixels.shape != pred.predicted.pixels.shape:
        raise ValueError("prediction dimensions differ from image")
    var = pred.variance()
    if var.min() <= 0:
        raise ValueError("non-positive variance")
    resid = real.pixels.astype(np.float64) - pred.predicted.pixels
    uniq, inverse = np.unique(var, return_inverse=True)
    k_terms = _log2_normalizer(uniq)[inverse].reshape(var.shape)
    resid_terms = resid * resid * math.log2(math.e) / (2.0 * var)
    return float((resid_terms + k_terms).sum())


_BUCKET_SCALE = MAX_MODEL_TOTAL - 2 * RESIDUAL_ALPHABET


def _bucket_indices(var: np.ndarray) -> np.ndarray:
    """Quantize variances onto the 2^(i/4) grid used for actual coding."""
    return np.rint(4.0 * np.log2(var)).astype(np.int32)


def _bucket_model(index: int) -> StaticFrequencyModel:
    bucket_var = 2.0 ** (index / 4.0)
    masses = np.exp(-(_RESIDUAL_RANGE ** 2) / (2.0 * bucket_var))
    probs = masses / masses.sum()
    counts = np.maximum(1, np.rint(probs * _BUCKET_SCALE).astype(np.int64))
    return StaticFrequencyModel(counts.tolist())


def _flow_residual_encode(actual: np.ndarray, predicted: np.ndarray,
                          scale: float) -> bytes:
    var = _variance_map(predicted, scale, EPSILON_DEFAULT)
    buckets = _bucket_indices(var).ravel()
    tables = {i: _bucket_model(i) for i in np.unique(buckets)}
    symbols = _diff_symbols(actual, predicted)
    enc = RangeEncoder()
    for sym, bucket in zip(symbols, buckets):
        lo, hi, total = tables[bucket].interval(int(sym))
        enc.encode(lo, hi, total)
    enc.encode(_SENTINEL, _SENTINEL + 1, _SENTINEL_TOTAL)
    return enc.finish().data


def _flow_residual_decode(section: bytes, predicted: np.ndarray,
                          scale: float) -> Image:
    var = _variance_map(predicted, scale, EPSILON_DEFAULT)
    buckets = _bucket_indices(var).ravel()
    tables = {i: _bucket_model(i) for i in np.unique(buckets)}
    dec = RangeDecoder(section)
    symbols = np.empty(buckets.size, dtype=np.int32)
    for i, bucket in enumerate(buckets):
        table = tables[bucket]
        total = table.total
        sym = table.find(dec.decode_target(total))
        lo, hi, _ = table.interval(sym)
        dec.advance(lo, hi, total)
        symbols[i] = sym
    if dec.decode_target(_SENTINEL_TOTAL) != _SENTINEL:
        raise DecodeError("end sentinel mismatch")
    return _apply_diff(symbols, predicted)


# ---------------------------------------------------------------------------
# motion-compensated interpolation


def _estimate_motion(frame_a: np.ndarray, frame_b: np.ndarray,
                     tile: int = MOTION_TILE,
                     search: int = MOTION_RANGE) -> np.ndarray:
    """Per-tile integer motion v such that b(x) ~ a(x - v).

    Returns an array of shape (tiles_y, tiles_x, 2) holding (vy, vx);
    ties go to the first candidate in scan order.
    """
    h, w = frame_a.shape
    a = frame_a.astype(np.int32)
    b = frame_b.astype(np.int32)
    row_starts = np.arange(0, h, tile)
    col_starts = np.arange(0, w, tile)
    ys = np.arange(h)
    xs = np.arange(w)
    best_sad = np.full((len(row_starts), len(col_starts)),
                       np.iinfo(np.int64).max, dtype=np.int64)
    best_v = np.zeros((len(row_starts), len(col_starts), 2), dtype=np.int32)
    # scan small displacements first so ties settle on the least motion
    order = sorted(range(-search, search + 1), key=lambda v: (abs(v), v))
    for vy in order:
        rows = np.clip(ys - vy, 0, h - 1)
        for vx in order:
            cols = np.clip(xs - vx, 0, w - 1)
            pred = a[rows[:, None], cols[None, :]]
            sad = np.add.reduceat(
                np.add.reduceat(np.abs(b - pred), row_starts, axis=0),
                col_starts, axis=1)
            better = sad < best_sad
            best_sad[better] = sad[better]
            best_v[better] = (vy, vx)
    return best_v


def _interp_predict(frame_a: np.ndarray, frame_b: np.ndarray, alpha: float,
                    motion: bool) -> np.ndarray:
    """Blend the bracketing keyframes at fraction alpha of the way from
    a to b, shifting both along per-tile motion when enabled."""
    h, w = frame_a.shape
    if not motion:
        blend = (1.0 - alpha) * frame_a + alpha * frame_b
        return np.floor(blend + 0.5).astype(np.uint8)
    tile = min(MOTION_TILE, h, w)
    motion_v = _estimate_motion(frame_a, frame_b, tile)
    vy_map = np.repeat(np.repeat(motion_v[:, :, 0], tile, axis=0),
                       tile, axis=1)[:h, :w]
    vx_map = np.repeat(np.repeat(motion_v[:, :, 1], tile, axis=0),
                       tile, axis=1)[:h, :w]
    ys = np.arange(h)[:, None]
    xs = np.arange(w)[None, :]
    ay = np.clip(ys - np.rint(alpha * vy_map).astype(np.int32), 0, h - 1)
    ax = np.clip(xs - np.rint(alpha * vx_map).astype(np.int32), 0, w - 1)
    by = np.clip(ys + np.rint((1.0 - alpha) * vy_map).astype(np.int32),
                 0, h - 1)
    bx = np.clip(xs + np.rint((1.0 - alpha) * vx_map).astype(np.int32),
                 0, w - 1)
    blend = (1.0 - alpha) * frame_a[ay, ax] + alpha * frame_b[by, bx]
    return np.floor(blend + 0.5).astype(np.uint8)


# ---------------------------------------------------------------------------
# interpolation video codec


@dataclass(frozen=True)
class InterpReport:
    stride: int
    motion: bool
    keyframes: tuple[int, ...]
    modes: tuple[int, ...]
    section_bytes: tuple[int, ...]

    @property
    def total_section_bits(self) -> int:
        return 8 * sum(self.section_bytes)


def _video_header(seq: FrameSequence) -> bytes:
    return (_encode_u16(seq.frames[0].width)
            + _encode_u16(seq.frames[0].height)
            + _encode_u16(seq.frame_count)
            + struct.pack(">d", seq.frame_rate))


def _read_video_header(cur: _Cursor):
    w, h, count = cur.u16(), cur.u16(), cur.u16()
    rate = cur.f64()
    if w < 1 or h < 1 or count < 1:
        raise DecodeError("bad video header")
    if not (rate > 0) or not math.isfinite(rate):
        raise DecodeError("bad frame rate")
    return w, h, count, rate


def _keyframe_indices(frame_count: int, stride: int) -> tuple[int, ...]:
    ks = set(range(0, frame_count, stride))
    ks.add(frame_count - 1)
    return tuple(sorted(ks))


def _adaptive_diff_section(actual: np.ndarray,
                           predicted: np.ndarray) -> bytes:
    return encode_stream(_diff_symbols(actual, predicted).tolist(),
                         AdaptiveFrequencyModel(RESIDUAL_ALPHABET)).data


def _adaptive_diff_decode(section: bytes, predicted: np.ndarray) -> Image:
    symbols = decode_stream(section, predicted.size,
                            AdaptiveFrequencyModel(RESIDUAL_ALPHABET))
    return _apply_diff(symbols, predicted)


def compress_sequence_interp(seq: FrameSequence, stride: int = STRIDE_DEFAULT,
                             motion: bool = True):
    """Returns (payload, InterpReport).

    Keyframes (every stride-th frame plus the last) carry pixel-diff,
    previous-keyframe-difference, or raw sections; intermediate frames
    choose, per frame, the smallest of an interpolation-residual
    section, an independent pixel-diff section, raw raster bytes, or a
    skip.  The raw option bounds incompressible frames at 8 bits/pixel.
    stride=1 degenerates to independent pixel-diff coding of every
    frame, with no other modes considered.
    """
    if seq.frame_count < 2:
        raise ValueError("need at least two frames")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    frames = [f.pixels for f in seq.frames]
    count = seq.frame_count
    keyframes = _keyframe_indices(count, stride)
    scale_code = 256  # fixed-point 8.8 for the variance scale, s = 1.0
    scale = scale_code / 256.0

    modes = [MODE_PIXDIFF] * count
    sections: list[bytes] = [b""] * count

    prev_kf = None
    for t in keyframes:
        candidates = [(pixeldiff_encode_image(seq.frames[t]), MODE_PIXDIFF)]
        if stride > 1:
            candidates.append((frames[t].tobytes(), MODE_RAW))
            if prev_kf is not None:
                candidates.append((_adaptive_diff_section(frames[t], prev_kf),
                                   MODE_KEYDIFF))
        section, mode = min(candidates, key=lambda c: (len(c[0]), c[1]))
        sections[t], modes[t] = section, mode
        prev_kf = frames[t]

    for left_kf, right_kf in zip(keyframes, keyframes[1:]):
        span = right_kf - left_kf
        for t in range(left_kf + 1, right_kf):
            if np.array_equal(frames[t], frames[t - 1]):
                modes[t], sections[t] = MODE_SKIP, b""
                continue
            alpha = (t - left_kf) / span
            pred = _interp_predict(frames[left_kf], frames[right_kf],
                                   alpha, motion)
            candidates = [
                (pixeldiff_encode_image(seq.frames[t]), MODE_PIXDIFF),
                (_flow_residual_encode(frames[t], pred, scale), MODE_INTERP),
                (frames[t].tobytes(), MODE_RAW),
            ]
            section, mode = min(candidates, key=lambda c: (len(c[0]), c[1]))
            sections[t], modes[t] = section, mode

    out = bytearray()
    out += _video_header(seq)
    out.append(stride)
    out.append(1 if motion else 0)
    out += _encode_u16(scale_code)
    for mode, section in zip(modes, sections):
        out.append(mode)
        out += _encode_u32(len(section)) + section
    report = InterpReport(stride=stride, motion=motion, keyframes=keyframes,
                          modes=tuple(modes),
                          section_bytes=tuple(len(s) for s in sections))
    return bytes(out), report


def decompress_sequence_interp(payload: bytes) -> FrameSequence:
    cur = _Cursor(payload)
    seq = _decode_interp_body(cur)
    cur.done()
    return seq


def _decode_interp_body(cur: _Cursor) -> FrameSequence:
    w, h, count, rate = _read_video_header(cur)
    stride = cur.u8()
    motion = cur.u8()
    if stride < 1 or motion not in (0, 1):
        raise DecodeError("bad interp parameters")
    scale = cur.u16() / 256.0
    if scale <= 0:
        raise DecodeError("bad variance scale")
    keyframes = _keyframe_indices(count, stride)
    entries = []
    for _ in range(count):
        mode = cur.u8()
        entries.append((mode, cur.take(cur.u32())))

    decoded: list[Image | None] = [None] * count
    prev_kf = None
    for t in keyframes:
        mode, section = entries[t]
        if mode == MODE_PIXDIFF:
            img = pixeldiff_decode_image(section)
        elif mode == MODE_RAW and stride > 1:
            img = _raw_frame_decode(section, w, h)
        elif mode == MODE_KEYDIFF and prev_kf is not None and stride > 1:
            img = _adaptive_diff_decode(section, prev_kf)
        else:
            raise DecodeError("invalid keyframe mode")
        if img.pixels.shape != (h, w):
            raise DecodeError("frame dimensions disagree with header")
        decoded[t] = img
        prev_kf = img.pixels

    for left_kf, right_kf in zip(keyframes, keyframes[1:]):
        span = right_kf - left_kf
        for t in range(left_kf + 1, right_kf):
            mode, section = entries[t]
            if mode == MODE_SKIP:
                if section:
                    raise DecodeError("skip section must be empty")
                decoded[t] = decoded[t - 1]
            elif mode == MODE_PIXDIFF:
                img = pixeldiff_decode_image(section)
                if img.pixels.shape != (h, w):
                    raise DecodeError("frame dimensions disagree with header")
                decoded[t] = img
            elif mode == MODE_RAW:
                decoded[t] = _raw_frame_decode(section, w, h)
            elif mode == MODE_INTERP:
                alpha = (t - left_kf) / span
                pred = _interp_predict(decoded[left_kf].pixels,
                                       decoded[right_kf].pixels,
                                       alpha, bool(motion))
                decoded[t] = _flow_residual_decode(section, pred, scale)
            else:
                raise DecodeError("invalid intermediate mode")
    return FrameSequence(tuple(decoded), rate)


# ---------------------------------------------------------------------------
# blob codec


@dataclass(frozen=True)
class BlobReport:
    has_blob: bool
    tau: int
    start_frame: int | None
    box: tuple[int, int, int, int] | None  # (y0, x0, y1, x1), half-open
    velocity: tuple[float, float] | None   # (vy, vx) pixels per frame
    modes: tuple[int, ...]
    section_bytes: tuple[int, ...]
    fallback: InterpReport | None = None


def _median_background(frames: list[np.ndarray]) -> np.ndarray:
    """Per-pixel median over the whole sequence.

    Sampling every frame (rather than a sparse subset) keeps a slow blob
    from contaminating the estimate: a pixel stays background as long as
    the blob covers it less than half the time.
    """
    med = np.median(np.stack(frames), axis=0)
    return np.floor(med + 0.5).astype(np.uint8)


def _blob_box(mask: np.ndarray):
    ys, xs = np.nonzero(mask)
    if len(ys) == 0:
        return None
    return int(ys.min()), int(xs.min()), int(ys.max()) + 1, int(xs.max()) + 1


def _shift_box(box, t_delta, velocity, h, w):
    """Translate the detected box by t_delta frames of constant velocity
    and clip it to the frame; returns (dest, src_offset) or None."""
    y0, x0, y1, x1 = box
    dy = int(round(velocity[0] * t_delta))
    dx = int(round(velocity[1] * t_delta))
    ny0, nx0, ny1, nx1 = y0 + dy, x0 + dx, y1 + dy, x1 + dx
    cy0, cx0 = max(ny0, 0), max(nx0, 0)
    cy1, cx1 = min(ny1, h), min(nx1, w)
    if cy0 >= cy1 or cx0 >= cx1:
        return None
    return (cy0, cx0, cy1, cx1), (cy0 - ny0, cx0 - nx0)


def _blob_predict(background: np.ndarray, content: np.ndarray, box,
                  t_delta, velocity) -> np.ndarray:
    pred = background.copy()
    h, w = background.shape
    placed = _shift_box(box, t_delta, velocity, h, w)
    if placed is not None:
        (cy0, cx0, cy1, cx1), (oy, ox) = placed
        pred[cy0:cy1, cx0:cx1] = content[oy:oy + (cy1 - cy0),
                                         ox:ox + (cx1 - cx0)]
    return pred


def compress_sequence_blob(seq: FrameSequence, tau: int = TAU_DEFAULT):
    """Returns (payload, BlobReport).

    A per-pixel median over the whole sequence forms the background;
    pixels deviating by more than tau mark the blob.  With a blob
    detected, its box and constant velocity are sent once and frames
    pick the cheapest of blob prediction, previous-frame difference,
    independent pixel-diff, raw bytes, or skip.  With no blob the whole
    sequence delegates to the interpolation codec behind a one-byte
    flag.
    """
    if seq.frame_count < 3:
        raise ValueError("need at least three frames")
    if not 0 < tau < 256:
        raise ValueError("tau must be in (0, 255]")
    frames = [f.pixels for f in seq.frames]
    count = seq.frame_count
    background = _median_background(frames)
    masks = [np.abs(f.astype(np.int32) - background.astype(np.int32)) > tau
             for f in frames]
    boxes = [_blob_box(m) for m in masks]
    present = [t for t, b in enumerate(boxes) if b is not None]

    if not present:
        inner, interp_report = compress_sequence_interp(
            seq, STRIDE_DEFAULT, motion=False)
        payload = bytes([0]) + inner
        report = BlobReport(has_blob=False, tau=tau, start_frame=None,
                            box=None, velocity=None, modes=(),
                            section_bytes=(), fallback=interp_report)
        return payload, report

    t0 = present[0]
    box0 = boxes[t0]
    if len(present) > 1:
        # least-squares constant-velocity fit to the box centers
        times = np.array(present, dtype=np.float64)
        centers = np.array([((boxes[t][0] + boxes[t][2]) / 2.0,
                             (boxes[t][1] + boxes[t][3]) / 2.0)
                            for t in present])
        dt = times - times.mean()
        denom = float((dt * dt).sum())
        fit = (centers - centers.mean(axis=0)).T @ dt / denom
        velocity = (float(fit[0]), float(fit[1]))
    else:
        velocity = (0.0, 0.0)

    content = frames[t0][box0[0]:box0[2], box0[1]:box0[3]]
    modes = [MODE_PIXDIFF] * count
    sections: list[bytes] = [b""] * count
    for t in range(count):
        candidates = [(pixeldiff_encode_image(seq.frames[t]), MODE_PIXDIFF)]
        if t > 0:
            if np.array_equal(frames[t], frames[t - 1]):
                modes[t], sections[t] = MODE_SKIP, b""
                continue
            candidates.append((_adaptive_diff_section(frames[t],
                                                      frames[t - 1]),
                               MODE_PREVDIFF))
        if t > t0:
            pred = _blob_predict(background, content, box0, t - t0, velocity)
            candidates.append((_adaptive_diff_section(frames[t], pred),
                               MODE_BLOB))
        candidates.append((frames[t].tobytes(), MODE_RAW))
        section, mode = min(candidates, key=lambda c: (len(c[0]), c[1]))
        sections[t], modes[t] = section, mode

    bg_section = _image_section(Image(background))
    out = bytearray()
    out.append(1)
    out += _video_header(seq)
    out.append(tau)
    out += _encode_u16(t0)
    for edge in box0:
        out += _encode_u16(edge)
    out += struct.pack(">d", velocity[0]) + struct.pack(">d", velocity[1])
    out += _encode_u32(len(bg_section)) + bg_section
    for mode, section in zip(modes, sections):
        out.append(mode)
        out += _encode_u32(len(section)) + section
    report = BlobReport(has_blob=True, tau=tau, start_frame=t0, box=box0,
                        velocity=velocity, modes=tuple(modes),
                        section_bytes=tuple(len(s) for s in sections))
    return bytes(out), report


def decompress_sequence_blob(payload: bytes) -> FrameSequence:
    cur = _Cursor(payload)
    flag = cur.u8()
    if flag == 0:
        seq = _decode_interp_body(cur)
        cur.done()
        return seq
    if flag != 1:
        raise DecodeError("unknown blob flag")
    w, h, count, rate = _read_video_header(cur)
    tau = cur.u8()
    t0 = cur.u16()
    box0 = (cur.u16(), cur.u16(), cur.u16(), cur.u16())
    velocity = (cur.f64(), cur.f64())
    if t0 >= count:
        raise DecodeError("blob start frame out of range")
    if not (box0[0] < box0[2] <= h and box0[1] < box0[3] <= w):
        raise DecodeError("blob box outside frame bounds")
    if not all(math.isfinite(v) for v in velocity):
        raise DecodeError("bad blob velocity")
    background = _image_section_decode(cur.take(cur.u32()), w, h)

    entries = []
    for _ in range(count):
        mode = cur.u8()
        entries.append((mode, cur.take(cur.u32())))
    cur.done()

    decoded: list[Image | None] = [None] * count
    content = None
    for t, (mode, section) in enumerate(entries):
        if mode == MODE_SKIP and t > 0:
            if section:
                raise DecodeError("skip section must be empty")
            decoded[t] = decoded[t - 1]
        elif mode == MODE_PIXDIFF:
            img = pixeldiff_decode_image(section)
            if img.pixels.shape != (h, w):
                raise DecodeError("frame dimensions disagree with header")
            decoded[t] = img
        elif mode == MODE_RAW:
            decoded[t] = _raw_frame_decode(section, w, h)
        elif mode == MODE_PREVDIFF and t > 0:
            decoded[t] = _adaptive_diff_decode(section,
                                               decoded[t - 1].pixels)
        elif mode == MODE_BLOB and t > t0:
            pred = _blob_predict(background.pixels, content, box0,
                                 t - t0, velocity)
            decoded[t] = _adaptive_diff_decode(section, pred)
        else:
            raise DecodeError("invalid blob frame mode")
        if t == t0:
            content = decoded[t0].pixels[box0[0]:box0[2], box0[1]:box0[3]]
    return FrameSequence(tuple(decoded), rate)

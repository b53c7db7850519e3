"""Tests for stereo, interpolation, and blob codecs.

Oracles here are deliberately naive: disparity search re-done with
nested loops, flow codelengths re-summed term by term in mpmath.
"""

import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from crmbench.coding import DecodeError
from crmbench.corpus import gen_blob_video, gen_random_image
from crmbench.images import pixeldiff_encode_image
from crmbench.media import FrameSequence, Image
from crmbench.multiview import (MODE_BLOB, MODE_INTERP, MODE_KEYDIFF,
                                MODE_PIXDIFF, MODE_PREVDIFF, MODE_RAW,
                                MODE_SKIP, DisparityMap, FlowPrediction,
                                compress_sequence_blob,
                                compress_sequence_interp,
                                compress_stereo_pair,
                                decompress_sequence_blob,
                                decompress_sequence_interp,
                                decompress_stereo_pair, disparity_predict,
                                estimate_disparity, flow_codelength,
                                _image_section, _image_section_decode)

mpmath = pytest.importorskip("mpmath")
mp = mpmath.mp


# ---------------------------------------------------------------------------
# oracles


def oracle_disparity(left, right, d_max, block):
    """Quadratic-time SAD search, clamping shifts at the right edge."""
    h, w = left.shape
    out = np.zeros((h, w), dtype=np.int32)
    for y0 in range(0, h, block):
        for x0 in range(0, w, block):
            best_d, best_sad = 0, None
            for d in range(d_max + 1):
                sad = 0
                for y in range(y0, min(y0 + block, h)):
                    for x in range(x0, min(x0 + block, w)):
                        xl = min(x + d, w - 1)
                        sad += abs(int(right[y, x]) - int(left[y, xl]))
                if best_sad is None or sad < best_sad:
                    best_d, best_sad = d, sad
            out[y0:y0 + block, x0:x0 + block] = best_d
    return out


def oracle_flow_bits(real, predicted, scale, epsilon):
    """Per-pixel Gaussian codelength, summed in high precision."""
    with mp.workdps(80):
        p = predicted.astype(np.float64)
        padded_x = np.pad(p, ((0, 0), (1, 1)), mode="edge")
        padded_y = np.pad(p, ((1, 1), (0, 0)), mode="edge")
        ix = (padded_x[:, 2:] - padded_x[:, :-2]) / 2.0
        iy = (padded_y[2:, :] - padded_y[:-2, :]) / 2.0
        var = scale * (ix * ix + iy * iy + epsilon)
        total = mp.mpf(0)
        log2 = mp.log(2)
        for y in range(real.shape[0]):
            for x in range(real.shape[1]):
                v = mp.mpf(float(var[y, x]))
                r = mp.mpf(int(real[y, x]) - int(predicted[y, x]))
                z = mp.fsum(mp.e ** (-(mp.mpf(k) ** 2) / (2 * v))
                            for k in range(-255, 256))
                total += r * r / (2 * v * log2) + mp.log(z) / log2
        return float(total)


def textured(width, height, seed):
    """Smooth but high-gradient test texture."""
    rng = np.random.default_rng(seed)
    steps = rng.integers(-6, 7, size=(height, width))
    return np.clip(np.cumsum(steps, axis=1) + 128, 0, 255).astype(np.uint8)


small_images = arrays(np.uint8, st.tuples(st.integers(1, 10),
                                          st.integers(1, 10)),
                      elements=st.integers(0, 255))


# ---------------------------------------------------------------------------
# disparity estimation


def test_disparity_matches_loop_oracle():
    rng = np.random.default_rng(42)
    for trial in range(4):
        h = int(rng.integers(4, 14))
        w = int(rng.integers(4, 14))
        left = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
        right = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
        block = int(rng.integers(1, 5))
        d_max = int(rng.integers(0, 6))
        if block > min(h, w):
            block = min(h, w)
        got = estimate_disparity(Image(left), Image(right), d_max, block)
        want = oracle_disparity(left, right, d_max, block)
        assert np.array_equal(got.values, want)


def test_disparity_identical_images_is_zero():
    img = Image(textured(40, 24, seed=1))
    dmap = estimate_disparity(img, img, d_max=8, block_size=8)
    assert not dmap.values.any()


def test_disparity_recovers_constructed_shift():
    base = textured(80, 32, seed=2)
    left = Image(base[:, :64])
    right = Image(base[:, 3:67])  # right(x) = left(x + 3)
    dmap = estimate_disparity(left, right, d_max=8, block_size=8)
    interior = dmap.values[:, :48]  # clamping only affects the right edge
    assert (interior == 3).all()


def test_disparity_two_depth_planes():
    base = textured(96, 64, seed=3)
    left = Image(base[:, :80])
    right_px = np.empty((64, 80), dtype=np.uint8)
    right_px[:32] = base[:32, 2:82]   # near plane, shift 2
    right_px[32:] = base[32:, 6:86]   # far plane, shift 6
    truth = np.where(np.arange(64)[:, None] < 32, 2, 6)
    dmap = estimate_disparity(left, Image(right_px), d_max=16, block_size=8)
    interior = np.s_[:, :64]  # keep clear of the clamped right edge
    agree = (dmap.values[interior] == truth[(slice(None), slice(0, 64))])
    assert agree.mean() >= 0.95


def test_disparity_predict_matches_gather():
    rng = np.random.default_rng(9)
    left = rng.integers(0, 256, size=(6, 9), dtype=np.uint8)
    values = np.repeat(np.repeat(rng.integers(0, 4, size=(2, 3)), 3, axis=0),
                       3, axis=1)
    dmap = DisparityMap(values.astype(np.int32), d_max=3, block_size=3)
    pred = disparity_predict(Image(left), dmap)
    for y in range(6):
        for x in range(9):
            assert pred.pixels[y, x] == left[y, min(x + values[y, x], 8)]


def test_disparity_map_validation():
    good = np.zeros((4, 4), dtype=np.int32)
    DisparityMap(good, d_max=2, block_size=2)
    with pytest.raises(ValueError):
        DisparityMap(good - 1, d_max=2, block_size=2)
    with pytest.raises(ValueError):
        DisparityMap(good + 5, d_max=2, block_size=2)
    uneven = good.copy()
    uneven[0, 0] = 1
    with pytest.raises(ValueError):
        DisparityMap(uneven, d_max=2, block_size=2)


def test_disparity_argument_errors():
    img = Image(np.zeros((8, 8), dtype=np.uint8))
    tall = Image(np.zeros((9, 8), dtype=np.uint8))
    with pytest.raises(ValueError):
        estimate_disparity(img, tall)
    with pytest.raises(ValueError):
        estimate_disparity(img, img, block_size=9)
    with pytest.raises(ValueError):
        estimate_disparity(img, img, d_max=-1)


# ---------------------------------------------------------------------------
# stereo codec


def test_stereo_identical_pair_saves_bits():
    img = Image(textured(64, 48, seed=4))
    payload, report = compress_stereo_pair(img, img)
    assert report.joint_selected
    assert report.joint_bits < report.right_independent_bits
    left, right = decompress_stereo_pair(payload)
    assert left == img and right == img


def test_stereo_shifted_pair_saves_bits():
    base = textured(96, 64, seed=5)
    left = Image(base[:, :80])
    right = Image(base[:, 4:84])
    payload, report = compress_stereo_pair(left, right)
    assert report.joint_selected
    assert (report.disparity_bits + report.residual_bits
            < report.right_independent_bits)
    dl, dr = decompress_stereo_pair(payload)
    assert dl == left and dr == right


def test_stereo_random_pair_backs_off():
    left = gen_random_image(64, 64, seed=6)
    right = gen_random_image(64, 64, seed=7)
    payload, report = compress_stereo_pair(left, right)
    assert not report.joint_selected
    independent = (len(_image_section(left)) + len(_image_section(right)))
    assert len(payload) <= math.ceil(1.01 * independent) + 32
    dl, dr = decompress_stereo_pair(payload)
    assert dl == left and dr == right


def test_stereo_report_flag_matches_measured_sections():
    pairs = [
        (gen_random_image(32, 32, seed=8), gen_random_image(32, 32, seed=9)),
        (Image(textured(48, 32, seed=10)), Image(textured(48, 32, seed=11))),
    ]
    base = textured(64, 32, seed=12)
    pairs.append((Image(base[:, :48]), Image(base[:, 2:50])))
    for left, right in pairs:
        _, report = compress_stereo_pair(left, right)
        assert report.joint_selected == (
            report.joint_bits < report.right_independent_bits)
        assert report.joint_bits == (report.disparity_bits
                                     + report.residual_bits)


def test_stereo_payload_never_far_from_independent_sections():
    base = textured(64, 48, seed=13)
    cases = [
        (Image(base[:, :48]), Image(base[:, 3:51])),
        (gen_random_image(48, 48, seed=14), gen_random_image(48, 48, seed=15)),
    ]
    for left, right in cases:
        payload, _ = compress_stereo_pair(left, right)
        independent = (len(_image_section(left))
                       + len(_image_section(right)))
        assert len(payload) <= independent + 23


def test_stereo_dimension_mismatch_rejected():
    a = Image(np.zeros((8, 8), dtype=np.uint8))
    b = Image(np.zeros((8, 9), dtype=np.uint8))
    with pytest.raises(ValueError):
        compress_stereo_pair(a, b)


def test_stereo_truncation_rejected():
    img = Image(textured(24, 16, seed=16))
    payload, _ = compress_stereo_pair(img, img)
    for cut in (0, 1, 5, 9, len(payload) // 2, len(payload) - 1):
        with pytest.raises(DecodeError):
            decompress_stereo_pair(payload[:cut])
    with pytest.raises(DecodeError):
        decompress_stereo_pair(payload + b"\x00")
    with pytest.raises(DecodeError):
        decompress_stereo_pair(b"\x07" + payload[1:])


@given(seed=st.integers(0, 10**6))
@settings(max_examples=15, deadline=None)
def test_stereo_roundtrip_random_pairs(seed):
    rng = np.random.default_rng(seed)
    h = int(rng.integers(1, 20))
    w = int(rng.integers(1, 20))
    left = Image(rng.integers(0, 256, size=(h, w), dtype=np.uint8))
    right = Image(rng.integers(0, 256, size=(h, w), dtype=np.uint8))
    payload, _ = compress_stereo_pair(left, right)
    dl, dr = decompress_stereo_pair(payload)
    assert dl == left and dr == right


# ---------------------------------------------------------------------------
# image sections


def test_image_section_roundtrip_and_floor():
    for img in (gen_random_image(16, 16, seed=17),
                Image(textured(16, 16, seed=18)),
                Image(np.full((5, 7), 9, dtype=np.uint8))):
        section = _image_section(img)
        assert len(section) <= img.width * img.height + 1
        assert _image_section_decode(section, img.width, img.height) == img


def test_image_section_decode_rejects_bad_input():
    img = gen_random_image(4, 4, seed=19)
    section = _image_section(img)
    with pytest.raises(DecodeError):
        _image_section_decode(b"", 4, 4)
    with pytest.raises(DecodeError):
        _image_section_decode(b"\x02" + section[1:], 4, 4)
    with pytest.raises(DecodeError):
        _image_section_decode(section, 5, 4)
    with pytest.raises(DecodeError):
        _image_section_decode(b"\x01" + b"\x00" * 15, 4, 4)


# ---------------------------------------------------------------------------
# flow codelength


def test_flow_codelength_matches_oracle():
    rng = np.random.default_rng(20)
    for trial in range(3):
        h = int(rng.integers(2, 7))
        w = int(rng.integers(2, 7))
        real = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
        predicted = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
        pred = FlowPrediction(Image(predicted))
        got = flow_codelength(Image(real), pred)
        want = oracle_flow_bits(real, predicted, 1.0, 1.0)
        assert got == pytest.approx(want, rel=1e-9)


def test_flow_codelength_perfect_prediction_is_pure_normalizer():
    px = textured(12, 9, seed=21)
    pred = FlowPrediction(Image(px))
    got = flow_codelength(Image(px), pred)
    want = oracle_flow_bits(px, px, 1.0, 1.0)
    assert got == pytest.approx(want, rel=1e-9)
    # every pixel still pays its normalizer, so the total is far from zero
    assert got > px.size * 0.5


def test_flow_codelength_flat_prediction_closed_form():
    rng = np.random.default_rng(22)
    real = rng.integers(100, 140, size=(6, 8), dtype=np.uint8)
    flat = np.full((6, 8), 120, dtype=np.uint8)
    pred = FlowPrediction(Image(flat), epsilon=1.0, scale=1.0)
    resid = real.astype(np.float64) - 120.0
    z1 = sum(math.exp(-(k * k) / 2.0) for k in range(-255, 256))
    want = float((resid * resid).sum()) * math.log2(math.e) / 2.0 \
        + real.size * math.log2(z1)
    assert flow_codelength(Image(real), pred) == pytest.approx(want, rel=1e-9)


def test_flow_epsilon_doubling_trades_residual_for_normalizer():
    base = textured(16, 16, seed=23)
    rng = np.random.default_rng(24)
    real = np.clip(base.astype(np.int32)
                   + rng.integers(-9, 10, size=base.shape), 0, 255)
    real = real.astype(np.uint8)

    def parts(epsilon):
        p = base.astype(np.float64)
        padded_x = np.pad(p, ((0, 0), (1, 1)), mode="edge")
        padded_y = np.pad(p, ((1, 1), (0, 0)), mode="edge")
        ix = (padded_x[:, 2:] - padded_x[:, :-2]) / 2.0
        iy = (padded_y[2:, :] - padded_y[:-2, :]) / 2.0
        var = ix * ix + iy * iy + epsilon
        resid = real.astype(np.float64) - base
        resid_term = float((resid * resid / (2 * var)).sum()) * math.log2(math.e)
        total = flow_codelength(Image(real),
                                FlowPrediction(Image(base), epsilon=epsilon))
        return resid_term, total - resid_term

    resid_1, norm_1 = parts(1.0)
    resid_2, norm_2 = parts(2.0)
    assert resid_2 < resid_1
    assert norm_2 != norm_1


def test_flow_prediction_validation():
    img = Image(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(ValueError):
        FlowPrediction(img, epsilon=0.0)
    with pytest.raises(ValueError):
        FlowPrediction(img, scale=-1.0)
    pred = FlowPrediction(img, epsilon=0.5, scale=2.0)
    assert pred.variance().min() >= 0.5 * 2.0 - 1e-12
    other = Image(np.zeros((4, 5), dtype=np.uint8))
    with pytest.raises(ValueError):
        flow_codelength(other, pred)


# ---------------------------------------------------------------------------
# interpolation codec


def _sequence_from(frames, rate=25.0):
    return FrameSequence(tuple(Image(f) for f in frames), rate)


def test_interp_static_sequence_is_cheap():
    frame = textured(64, 48, seed=25)
    seq = _sequence_from([frame] * 9)
    payload, report = compress_sequence_interp(seq, stride=4, motion=False)
    assert decompress_sequence_interp(payload) == seq
    keyframe_cost = len(pixeldiff_encode_image(seq.frames[0]))
    header = 14 + 1 + 1 + 2 + 5 * seq.frame_count
    assert len(payload) <= 1.2 * keyframe_cost + header
    independent = seq.frame_count * keyframe_cost
    assert len(payload) < independent / 4
    # repeated frames inside a span cost only their empty section entries
    assert MODE_SKIP in report.modes
    for mode, size in zip(report.modes, report.section_bytes):
        if mode == MODE_SKIP:
            assert size == 0


def test_interp_translating_texture_motion_helps():
    # smooth in both axes so interpolation residuals can actually win
    rng = np.random.default_rng(5)
    steps = rng.integers(-3, 4, size=(80, 120))
    base = np.clip(np.cumsum(np.cumsum(steps, axis=0), axis=1) % 240,
                   0, 255).astype(np.uint8)
    frames = [base[8:72, t:t + 96] for t in range(0, 18, 2)]
    seq = _sequence_from(frames)
    on_payload, on_report = compress_sequence_interp(seq, stride=4,
                                                     motion=True)
    off_payload, _ = compress_sequence_interp(seq, stride=4, motion=False)
    assert len(on_payload) < len(off_payload)
    assert decompress_sequence_interp(on_payload) == seq
    assert decompress_sequence_interp(off_payload) == seq
    assert MODE_INTERP in on_report.modes


def test_interp_temporally_random_backs_off_per_frame():
    rng = np.random.default_rng(27)
    frames = [rng.integers(0, 256, size=(48, 48), dtype=np.uint8)
              for _ in range(9)]
    seq = _sequence_from(frames)
    payload, report = compress_sequence_interp(seq, stride=4, motion=False)
    assert decompress_sequence_interp(payload) == seq
    independent = sum(len(_image_section(f)) for f in seq.frames)
    headers = 18 + 5 * seq.frame_count
    assert len(payload) <= math.ceil(1.01 * independent) + headers
    assert all(m in (MODE_RAW, MODE_PIXDIFF, MODE_SKIP) for m in report.modes)


def test_interp_stride_one_equals_per_frame_pixdiff():
    base = textured(96, 48, seed=28)
    frames = [base[:, t:t + 64] for t in range(0, 10, 1)]
    seq = _sequence_from(frames)
    payload, report = compress_sequence_interp(seq, stride=1, motion=True)
    per_frame = sum(len(pixeldiff_encode_image(f)) for f in seq.frames)
    header = 14 + 1 + 1 + 2 + 5 * seq.frame_count
    assert len(payload) == per_frame + header
    assert set(report.modes) == {MODE_PIXDIFF}
    assert decompress_sequence_interp(payload) == seq


def test_interp_keyframe_difference_mode_engages():
    base = textured(64, 48, seed=29)
    shifted = np.roll(base, 1, axis=1)
    seq = _sequence_from([base, base, shifted, shifted, base])
    payload, report = compress_sequence_interp(seq, stride=2, motion=False)
    assert decompress_sequence_interp(payload) == seq
    keyframe_modes = [report.modes[t] for t in report.keyframes]
    # the first keyframe has no predecessor to difference against
    assert keyframe_modes[0] == MODE_PIXDIFF
    assert MODE_KEYDIFF in keyframe_modes[1:]


def test_interp_argument_errors():
    frame = np.zeros((8, 8), dtype=np.uint8)
    seq = _sequence_from([frame, frame])
    with pytest.raises(ValueError):
        compress_sequence_interp(_sequence_from([frame]))
    with pytest.raises(ValueError):
        compress_sequence_interp(seq, stride=0)


def test_interp_decode_rejects_corruption():
    base = textured(32, 24, seed=30)
    frames = [np.roll(base, t, axis=1) for t in range(6)]
    seq = _sequence_from(frames)
    payload, _ = compress_sequence_interp(seq, stride=3, motion=False)
    for cut in (0, 5, 13, 16, len(payload) - 1):
        with pytest.raises(DecodeError):
            decompress_sequence_interp(payload[:cut])
    with pytest.raises(DecodeError):
        decompress_sequence_interp(payload + b"\x00")
    bad_stride = bytearray(payload)
    bad_stride[14] = 0
    with pytest.raises(DecodeError):
        decompress_sequence_interp(bytes(bad_stride))
    bad_mode = bytearray(payload)
    bad_mode[18] = 250
    with pytest.raises(DecodeError):
        decompress_sequence_interp(bytes(bad_mode))


@given(seed=st.integers(0, 10**6), stride=st.integers(1, 5),
       motion=st.booleans())
@settings(max_examples=12, deadline=None)
def test_interp_roundtrip_property(seed, stride, motion):
    rng = np.random.default_rng(seed)
    count = int(rng.integers(2, 6))
    h = int(rng.integers(1, 14))
    w = int(rng.integers(1, 14))
    frames = [rng.integers(0, 256, size=(h, w), dtype=np.uint8)
              for _ in range(count)]
    seq = _sequence_from(frames, rate=float(rng.integers(1, 120)))
    payload, _ = compress_sequence_interp(seq, stride=stride, motion=motion)
    assert decompress_sequence_interp(payload) == seq


# ---------------------------------------------------------------------------
# blob codec


def test_blob_video_recovers_trajectory_and_beats_interp():
    seq, trajectory = gen_blob_video(96, 64, 24, 16, start=(8, 24),
                                     velocity=(2, 0), noise_sigma=0.0,
                                     seed=31)
    payload, report = compress_sequence_blob(seq)
    assert decompress_sequence_blob(payload) == seq
    assert report.has_blob
    # generator velocity is (vx, vy); the report carries (vy, vx)
    assert report.velocity == pytest.approx((0.0, 2.0), abs=1e-9)
    x0, y0 = trajectory[report.start_frame]
    assert report.box == (y0, x0, y0 + 16, x0 + 16)
    interp_payload, _ = compress_sequence_interp(seq, stride=4, motion=False)
    assert len(payload) <= 0.8 * len(interp_payload)
    assert MODE_BLOB in report.modes


def test_blob_empty_scene_delegates_to_interp():
    rng = np.random.default_rng(32)
    bg = textured(64, 48, seed=33)
    frames = [np.clip(bg.astype(np.float64)
                      + rng.normal(0, 1.0, bg.shape), 0, 255).astype(np.uint8)
              for _ in range(12)]
    seq = _sequence_from(frames)
    payload, report = compress_sequence_blob(seq)
    assert not report.has_blob
    assert report.fallback is not None
    assert decompress_sequence_blob(payload) == seq
    interp_payload, _ = compress_sequence_interp(seq, stride=4, motion=False)
    assert len(payload) <= 1.02 * len(interp_payload)
    # pure delegation is exactly the interp stream behind one flag byte
    assert payload[1:] == interp_payload


def test_blob_velocity_reversal_backs_off_after_turn():
    rng = np.random.default_rng(34)
    bg = textured(96, 64, seed=35)
    blob = (0.5 * rng.uniform(0, 255, size=(12, 12)) + 128).astype(np.uint8)
    frames = []
    xs = [4 + 3 * t for t in range(8)] + [25 - 2 * t for t in range(1, 9)]
    for x in xs:
        canvas = bg.copy()
        canvas[20:32, x:x + 12] = blob
        frames.append(canvas)
    seq = _sequence_from(frames)
    payload, report = compress_sequence_blob(seq)
    assert decompress_sequence_blob(payload) == seq
    # constant-velocity prediction goes stale after the turn
    assert all(m != MODE_BLOB for m in report.modes[10:])


def test_blob_argument_errors():
    frame = np.zeros((8, 8), dtype=np.uint8)
    with pytest.raises(ValueError):
        compress_sequence_blob(_sequence_from([frame, frame]))
    seq = _sequence_from([frame] * 3)
    with pytest.raises(ValueError):
        compress_sequence_blob(seq, tau=0)
    with pytest.raises(ValueError):
        compress_sequence_blob(seq, tau=256)


def test_blob_decode_rejects_corruption():
    seq, _ = gen_blob_video(48, 32, 6, 10, start=(4, 4), velocity=(2, 1),
                            noise_sigma=0.0, seed=36)
    payload, report = compress_sequence_blob(seq)
    assert report.has_blob
    with pytest.raises(DecodeError):
        decompress_sequence_blob(b"\x02" + payload[1:])
    bad_t0 = bytearray(payload)
    bad_t0[16:18] = seq.frame_count.to_bytes(2, "big")
    with pytest.raises(DecodeError):
        decompress_sequence_blob(bytes(bad_t0))
    bad_box = bytearray(payload)
    bad_box[22:24] = (0).to_bytes(2, "big")  # y1 = 0 < y0
    with pytest.raises(DecodeError):
        decompress_sequence_blob(bytes(bad_box))
    bad_vel = bytearray(payload)
    bad_vel[26:34] = struct.pack(">d", math.nan)
    with pytest.raises(DecodeError):
        decompress_sequence_blob(bytes(bad_vel))
    for cut in (0, 10, 20, len(payload) - 1):
        with pytest.raises(DecodeError):
            decompress_sequence_blob(payload[:cut])


@given(seed=st.integers(0, 10**6))
@settings(max_examples=10, deadline=None)
def test_blob_roundtrip_property(seed):
    rng = np.random.default_rng(seed)
    count = int(rng.integers(3, 7))
    h = int(rng.integers(2, 13))
    w = int(rng.integers(2, 13))
    frames = [rng.integers(0, 256, size=(h, w), dtype=np.uint8)
              for _ in range(count)]
    seq = _sequence_from(frames, rate=float(rng.integers(1, 120)))
    payload, _ = compress_sequence_blob(seq)
    assert decompress_sequence_blob(payload) == seq


def test_video_sections_never_exceed_raw_floor():
    rng = np.random.default_rng(37)
    frames = [rng.integers(0, 256, size=(24, 24), dtype=np.uint8)
              for _ in range(6)]
    seq = _sequence_from(frames)
    for payload, report in (compress_sequence_interp(seq, 4, False),
                            compress_sequence_blob(seq)):
        sizes = getattr(report, "section_bytes", ())
        for size in sizes:
            assert size <= 24 * 24

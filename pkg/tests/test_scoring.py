"""Tests for net scoring, the archive container, verification and audits."""

import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crmbench.coding import DecodeError
from crmbench.corpus import gen_piecewise_constant, gen_random_image
from crmbench.media import serialize_pgm
from crmbench.scoring import (ARCHIVE_MAGIC, LeaderboardEntry, NetScore,
                              compare_theories, compress_archive,
                              extract_archive, leaderboard_update, net_score,
                              nfl_audit, pack_archive, parse_archive,
                              parse_leaderboard, ranked,
                              serialize_leaderboard, vastness_check,
                              verify_roundtrip)


def piecewise_pgm(seed=21) -> bytes:
    spec = [(0, 0, 32, 64, 60), (32, 0, 64, 64, 190)]
    img, _ = gen_piecewise_constant(64, 64, spec, 2.0, seed=seed)
    return serialize_pgm(img)


# ---------------------------------------------------------------------------
# net score and theory comparison


def test_net_score_total_is_eight_times_byte_sum():
    score = net_score(3, 7)
    assert score.total_bits == 80
    assert score.compressor_bytes == 3 and score.payload_bytes == 7


def test_net_score_rejects_negative_sizes():
    with pytest.raises(ValueError):
        net_score(-1, 0)
    with pytest.raises(ValueError):
        net_score(0, -1)


def test_compare_prefers_smaller_total():
    small = net_score(0, 100)
    large = net_score(50, 100)
    assert compare_theories(small, large) == "a"
    assert compare_theories(large, small) == "b"
    assert compare_theories(small, NetScore(100, 0)) == "tie"


def test_compare_rejects_corpus_mismatch():
    with pytest.raises(ValueError):
        compare_theories(net_score(0, 1), net_score(0, 2),
                         corpus_a="x", corpus_b="y")


def test_simple_theory_with_larger_payload_can_still_win():
    # a tiny compressor plus a big payload beats a huge compressor
    # whose model explains the data better
    simple = net_score(0, 3_300_000_000 // 8)
    elaborate = net_score(6_700_000_000 // 8, 2_100_000_000 // 8)
    assert simple.total_bits == 3_300_000_000
    assert elaborate.total_bits == 8_800_000_000
    assert compare_theories(simple, elaborate) == "a"


# ---------------------------------------------------------------------------
# archive container


def test_archive_round_trip_mixed_items():
    payloads = [piecewise_pgm(), b"arbitrary bytes",
                serialize_pgm(gen_random_image(16, 16, seed=22))]
    data = compress_archive("pixdiff", payloads)
    assert data[:4] == ARCHIVE_MAGIC
    assert extract_archive(data) == payloads


def test_archive_payload_bits_identity():
    payloads = [piecewise_pgm(), b"xyz"]
    data = compress_archive("segment", payloads)
    archive = parse_archive(data)
    assert (archive.payload_bits + archive.container_overhead_bits
            == 8 * len(data))
    assert archive.codec == "segment"
    assert len(archive.items) == 2


def test_empty_archive_round_trips():
    data = compress_archive("uniform", [])
    assert extract_archive(data) == []
    assert parse_archive(data).payload_bits == 0


def test_single_item_overhead_is_31_bytes():
    payload = b"q" * 100
    data = compress_archive("uniform", [payload])
    assert len(data) == len(payload) + 31


def test_parse_rejects_bad_magic_version_and_codec():
    data = compress_archive("uniform", [b"hi"])
    with pytest.raises(DecodeError):
        parse_archive(b"XRMA" + data[4:])
    with pytest.raises(DecodeError):
        parse_archive(data[:4] + b"\xff" + data[5:])
    with pytest.raises(DecodeError):
        parse_archive(data[:5] + b"\xff" + data[6:])


def test_parse_rejects_unknown_item_flags():
    data = bytearray(compress_archive("uniform", [b"hi"]))
    data[14] |= 0x80
    with pytest.raises(DecodeError):
        parse_archive(bytes(data))


def test_parse_rejects_truncation_and_trailing_bytes():
    data = compress_archive("uniform", [b"hello", b"world"])
    for cut in (0, 3, 13, 14, 20, len(data) - 1):
        with pytest.raises(DecodeError):
            parse_archive(data[:cut])
    with pytest.raises(DecodeError):
        parse_archive(data + b"\x00")


@settings(max_examples=40, deadline=None)
@given(st.lists(st.binary(max_size=200), max_size=5),
       st.sampled_from(("uniform", "pixdiff", "gaussian")))
def test_archive_round_trip_property(payloads, codec):
    assert extract_archive(compress_archive(codec, payloads)) == payloads


# ---------------------------------------------------------------------------
# verification


def test_verify_passes_on_faithful_archive():
    payloads = [piecewise_pgm(), b"raw tail"]
    data = compress_archive("pixdiff", payloads)
    report = verify_roundtrip(data, payloads)
    assert report.passed
    assert all(c.ok for c in report.items)
    assert report.payload_bits + report.container_overhead_bits \
        == 8 * len(data)


def test_verify_fails_on_wrong_originals():
    payloads = [piecewise_pgm()]
    data = compress_archive("pixdiff", payloads)
    report = verify_roundtrip(data, [piecewise_pgm(seed=99)])
    assert not report.passed
    assert report.items[0].reason == "decoded bytes differ"


def test_verify_fails_on_item_count_mismatch():
    data = compress_archive("uniform", [b"a"])
    report = verify_roundtrip(data, [b"a", b"b"])
    assert not report.passed and "count mismatch" in report.reason


def test_verify_fails_on_unreadable_archive():
    report = verify_roundtrip(b"garbage", [b"a"])
    assert not report.passed and "unreadable" in report.reason


def test_verify_catches_tampered_recorded_size():
    payloads = [b"12345678"]
    data = bytearray(compress_archive("uniform", payloads))
    # original-length field of item 0 lives right after the 14-byte
    # header and 1-byte flags
    struct.pack_into(">Q", data, 15, 9)
    report = verify_roundtrip(bytes(data), payloads)
    assert not report.passed


def test_verify_catches_every_single_bit_flip():
    payloads = [piecewise_pgm(), b"plain bytes"]
    data = compress_archive("pixdiff", payloads)
    rng = np.random.default_rng(23)
    for _ in range(40):
        pos = int(rng.integers(0, len(data)))
        bit = int(rng.integers(0, 8))
        mutated = bytearray(data)
        mutated[pos] ^= 1 << bit
        report = verify_roundtrip(bytes(mutated), payloads)
        assert not report.passed, f"flip at byte {pos} bit {bit} missed"


def test_verify_str_mentions_bad_items():
    payloads = [b"aa", b"bb"]
    data = bytearray(compress_archive("uniform", payloads))
    data[-1] ^= 0xFF
    text = str(verify_roundtrip(bytes(data), payloads))
    assert text.startswith("FAIL") and "1" in text


# ---------------------------------------------------------------------------
# vastness


def test_vastness_threshold_at_ratio_100():
    assert vastness_check(100_000, 1_000).vast
    assert not vastness_check(99_999, 1_000).vast
    assert vastness_check(99_999, 1_000).ratio == pytest.approx(99.999)


def test_vastness_rejects_nonpositive_shim():
    with pytest.raises(ValueError):
        vastness_check(1000, 0)


# ---------------------------------------------------------------------------
# NFL audit


def test_nfl_uniform_n8_mean_exactly_16():
    report = nfl_audit("uniform", 8)
    assert report.mean_bits == 16.0
    assert report.min_bits == report.max_bits == 16
    assert report.kraft_sum <= 1.0
    assert report.backoff_fraction == 1.0
    assert report.passed


def test_nfl_small_inputs_never_parse_as_containers():
    for codec in ("pixdiff", "gaussian", "interp"):
        report = nfl_audit(codec, 8)
        assert report.backoff_fraction == 1.0
        assert report.mean_bits >= 8.0
        assert report.passed


def test_nfl_non_byte_aligned_width():
    report = nfl_audit("uniform", 5)
    assert report.inputs == 32
    assert report.mean_bits == 16.0  # one payload byte plus the flag byte
    assert report.passed


def test_nfl_rejects_out_of_range_n():
    with pytest.raises(ValueError):
        nfl_audit("uniform", 0)
    with pytest.raises(ValueError):
        nfl_audit("uniform", 17)
    with pytest.raises(ValueError):
        nfl_audit("zstd", 8)


# ---------------------------------------------------------------------------
# leaderboard


def entry(corpus="c1", codec="pixdiff", comp=10, pay=20,
          status="verified", stamp="2024-01-01T00:00:00Z"):
    return LeaderboardEntry(corpus, codec, comp, pay, status, stamp)


def test_leaderboard_line_round_trip():
    first = entry()
    text = serialize_leaderboard([first])
    assert text == ("c1\tpixdiff\t10\t20\t240\tverified\t"
                    "2024-01-01T00:00:00Z\n")
    assert parse_leaderboard(text) == [first]


def test_leaderboard_parse_rejections():
    with pytest.raises(ValueError):
        parse_leaderboard("a\tb\tc\n")
    with pytest.raises(ValueError):
        parse_leaderboard("c1\tpix\tten\t20\t240\tverified\tt\n")
    with pytest.raises(ValueError):
        parse_leaderboard("c1\tpix\t10\t20\t999\tverified\tt\n")
    with pytest.raises(ValueError):
        parse_leaderboard("c1\tpix\t10\t20\t240\tmaybe\tt\n")


def test_leaderboard_update_rejects_unverified():
    for status in ("failed", "unverified"):
        with pytest.raises(ValueError):
            leaderboard_update([], entry(status=status))


def test_leaderboard_update_is_append_only():
    board = leaderboard_update([entry()], entry(codec="segment"))
    assert len(board) == 2
    assert board[0].codec == "pixdiff"


def test_ranked_sorts_by_total_within_corpus():
    rows = [entry(codec="pixdiff", comp=10, pay=30, stamp="t2"),
            entry(codec="segment", comp=10, pay=20, stamp="t3"),
            entry(corpus="c0", codec="blob", comp=1, pay=1, stamp="t1"),
            LeaderboardEntry("c1", "interp", 0, 5, "failed", "t0")]
    board = ranked(rows)
    assert [e.codec for e in board] == ["blob", "segment", "pixdiff"]
    assert all(e.status == "verified" for e in board)


def test_ranked_breaks_total_ties_by_timestamp():
    rows = [entry(codec="late", comp=5, pay=5, stamp="t9"),
            entry(codec="early", comp=5, pay=5, stamp="t1")]
    assert [e.codec for e in ranked(rows)] == ["early", "late"]


def test_entry_field_validation():
    with pytest.raises(ValueError):
        LeaderboardEntry("", "c", 1, 1, "verified", "t")
    with pytest.raises(ValueError):
        LeaderboardEntry("a\tb", "c", 1, 1, "verified", "t")
    with pytest.raises(ValueError):
        LeaderboardEntry("a", "c", -1, 1, "verified", "t")


# ---------------------------------------------------------------------------
# shim additivity


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(0, 10 ** 9),
       st.integers(0, 10 ** 9), st.integers(0, 10 ** 9),
       st.integers(0, 10 ** 6))
def test_shim_shifts_every_score_by_exactly_8s_bits(ca, pa, cb, pb, shim):
    base_a, base_b = net_score(ca, pa), net_score(cb, pb)
    shim_a, shim_b = net_score(ca + shim, pa), net_score(cb + shim, pb)
    assert shim_a.total_bits - base_a.total_bits == 8 * shim
    assert shim_b.total_bits - base_b.total_bits == 8 * shim
    assert compare_theories(shim_a, shim_b) == compare_theories(base_a,
                                                                base_b)

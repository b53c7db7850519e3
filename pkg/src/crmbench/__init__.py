"""Lossless compression benchmark: model-based codecs scored by net codelength.

A theory earns its keep by shrinking data: every codec here turns a
model into a decodable bitstream, every archive round-trips bit-exactly,
and the score is simply compressor bytes plus payload bytes, times
eight.  Exhaustive small-input audits keep the codecs honest about the
no-free-lunch floor and the Kraft inequality.
"""

from .coding import (AdaptiveFrequencyModel, BitReader, Bitstream, BitWriter,
                     DecodeError, RangeDecoder, RangeEncoder,
                     StaticFrequencyModel, decode_stream, encode_stream,
                     ideal_stream_bits, kraft_audit, shannon_codelength)
from .corpus import (CorpusItem, check_manifest_sizes, gen_blob_video,
                     gen_piecewise_constant, gen_random_image, load_manifest,
                     load_pnm, parse_manifest, save_manifest,
                     serialize_manifest, store_pnm)
from .images import (Segmentation, pixel_diff_inverse, pixel_diff_transform,
                     pixeldiff_decode_image, pixeldiff_encode_image,
                     segment_mdl, segmentation_cost, segmented_decode_image,
                     segmented_encode_image)
from .media import (FormatError, FrameSequence, Image, is_canonical_pgm,
                    is_canonical_sequence, parse_pgm, parse_sequence,
                    serialize_pgm, serialize_sequence)
from .multiview import (BlobReport, DisparityMap, FlowPrediction,
                        InterpReport, StereoReport, compress_sequence_blob,
                        compress_sequence_interp, compress_stereo_pair,
                        decompress_sequence_blob, decompress_sequence_interp,
                        decompress_stereo_pair, disparity_predict,
                        estimate_disparity, flow_codelength)
from .registry import (CODEC_NAMES, codec_id, codec_name, compress_item,
                       decompress_item)
from .scalar import (DuelReport, IntervalModel, QuantizedGaussianModel,
                     TrialSet, ballistic_generate, flight_time, parse_trials,
                     scalar_codelength, serialize_trials, theory_duel)
from .scoring import (Archive, ArchiveItem, LeaderboardEntry, NetScore,
                      NflAudit, VastnessReport, VerificationReport,
                      compare_theories, compress_archive, extract_archive,
                      leaderboard_update, net_score, nfl_audit, pack_archive,
                      parse_archive, parse_leaderboard, ranked,
                      serialize_leaderboard, vastness_check,
                      verify_roundtrip)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveFrequencyModel", "Archive", "ArchiveItem", "BitReader",
    "Bitstream", "BitWriter", "BlobReport", "CODEC_NAMES", "CorpusItem",
    "DecodeError", "DisparityMap", "DuelReport", "FlowPrediction",
    "FormatError", "FrameSequence", "Image", "IntervalModel",
    "InterpReport", "LeaderboardEntry", "NetScore", "NflAudit",
    "QuantizedGaussianModel", "RangeDecoder", "RangeEncoder",
    "Segmentation", "StaticFrequencyModel", "StereoReport", "TrialSet",
    "VastnessReport", "VerificationReport", "ballistic_generate",
    "check_manifest_sizes", "codec_id", "codec_name", "compare_theories",
    "compress_archive", "compress_item", "compress_sequence_blob",
    "compress_sequence_interp", "compress_stereo_pair", "decode_stream",
    "decompress_item", "decompress_sequence_blob",
    "decompress_sequence_interp", "decompress_stereo_pair",
    "disparity_predict", "encode_stream", "estimate_disparity",
    "extract_archive", "flight_time", "flow_codelength", "gen_blob_video",
    "gen_piecewise_constant", "gen_random_image", "ideal_stream_bits",
    "is_canonical_pgm", "is_canonical_sequence", "kraft_audit",
    "leaderboard_update", "load_manifest", "load_pnm", "net_score",
    "nfl_audit", "pack_archive", "parse_archive", "parse_leaderboard",
    "parse_manifest", "parse_pgm", "parse_sequence", "parse_trials",
    "pixel_diff_inverse", "pixel_diff_transform", "pixeldiff_decode_image",
    "pixeldiff_encode_image", "ranked", "save_manifest",
    "scalar_codelength", "segment_mdl", "segmentation_cost",
    "segmented_decode_image", "segmented_encode_image",
    "serialize_leaderboard", "serialize_manifest", "serialize_pgm",
    "serialize_sequence", "serialize_trials", "shannon_codelength",
    "store_pnm", "theory_duel", "vastness_check", "verify_roundtrip",
]

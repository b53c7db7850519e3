"""Command-line surface for the whole benchmark workflow.

Subcommands: gen, compress, decompress, verify, score, compare,
nfl-audit, leaderboard.  Exit codes: 0 success, 1 verification failure,
2 usage error, 3 I/O error.  All numeric reports print both bits and
bytes, and identical invocations produce byte-identical outputs (the
leaderboard timestamp comes from the CRM_TIMESTAMP environment
variable, defaulting to the epoch).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .coding import DecodeError
from .corpus import (CorpusItem, gen_blob_video, gen_piecewise_constant,
                     gen_random_image, load_manifest, save_manifest,
                     store_pnm)
from .media import FormatError, serialize_pgm, serialize_sequence
from .registry import CODEC_NAMES, compress_item
from .scalar import ballistic_generate, serialize_trials
from .scoring import (LeaderboardEntry, compare_theories, compress_archive,
                      extract_archive, leaderboard_update, net_score,
                      nfl_audit, pack_archive, parse_leaderboard, ranked,
                      serialize_leaderboard, verify_roundtrip)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3

DEFAULT_TIMESTAMP = "1970-01-01T00:00:00Z"


def _bits_and_bytes(bits: int) -> str:
    return f"{bits} bits ({bits // 8} bytes)"


def _read(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _write(path: str, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


def _corpus_payloads(manifest_path: str) -> list[bytes]:
    items = load_manifest(manifest_path)
    root = os.path.dirname(os.path.abspath(manifest_path))
    return [_read(os.path.join(root, it.path)) for it in items]


# ---------------------------------------------------------------------------
# gen


def _gen_payload(args) -> bytes:
    if args.kind == "random":
        img = gen_random_image(args.width, args.height, args.seed)
        return serialize_pgm(img)
    if args.kind == "piecewise":
        half = args.width // 2
        spec = [(0, 0, half, args.height, 60),
                (half, 0, args.width, args.height, 190)]
        img, _ = gen_piecewise_constant(args.width, args.height, spec,
                                        args.noise, args.seed)
        return serialize_pgm(img)
    if args.kind == "blob":
        size = min(args.blob_size, args.width // 3, args.height // 3)
        start = (2, max(0, (args.height - size) // 3))
        span = args.width - size - start[0]
        vx = min(2, span // max(1, args.frames - 1))
        seq, _ = gen_blob_video(args.width, args.height, args.frames, size,
                                start, (vx, 0), args.noise, args.seed)
        return serialize_sequence(seq)
    if args.kind == "trials":
        trials = ballistic_generate(9.8, math.pi / 2.0, 9.8, args.noise,
                                    args.n, args.seed)
        return serialize_trials(trials)
    raise ValueError(f"unknown kind {args.kind!r}")


def _cmd_gen(args) -> int:
    payload = _gen_payload(args)
    _write(args.out, payload)
    print(f"wrote {args.out}: {_bits_and_bytes(8 * len(payload))}")
    if args.manifest:
        kind = "image" if args.kind in ("random", "piecewise") else \
            ("sequence" if args.kind == "blob" else "trials")
        item_id = os.path.splitext(os.path.basename(args.out))[0]
        rel = os.path.relpath(os.path.abspath(args.out),
                              os.path.dirname(os.path.abspath(args.manifest)))
        items = (load_manifest(args.manifest)
                 if os.path.exists(args.manifest) else [])
        items = [it for it in items if it.item_id != item_id]
        items.append(CorpusItem(item_id, kind, rel, len(payload)))
        save_manifest(args.manifest, items)
        print(f"updated {args.manifest}: {len(items)} items")
    return EXIT_OK


# ---------------------------------------------------------------------------
# compress / decompress


def _compress_one(task):
    codec, stride, motion, payload = task
    body, backed_off = compress_item(codec, payload, stride=stride,
                                     motion=motion)
    return body, backed_off, len(payload)


def _cmd_compress(args) -> int:
    if bool(args.infile) == bool(args.corpus):
        print("compress needs exactly one of --in or --corpus",
              file=sys.stderr)
        return EXIT_USAGE
    payloads = ([_read(args.infile)] if args.infile
                else _corpus_payloads(args.corpus))
    motion = args.motion != "off"
    if args.jobs > 1 and len(payloads) > 1:
        tasks = [(args.codec, args.stride, motion, p) for p in payloads]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            entries = list(pool.map(_compress_one, tasks))
        archive = pack_archive(args.codec, entries)
    else:
        archive = compress_archive(args.codec, payloads,
                                   stride=args.stride, motion=motion)
    _write(args.out, archive)
    original = sum(len(p) for p in payloads)
    print(f"wrote {args.out}: {_bits_and_bytes(8 * len(archive))} "
          f"from {_bits_and_bytes(8 * original)}")
    return EXIT_OK


def _cmd_decompress(args) -> int:
    data = _read(args.archive)
    originals = extract_archive(data)
    if len(originals) == 1:
        _write(args.out, originals[0])
        print(f"wrote {args.out}: {_bits_and_bytes(8 * len(originals[0]))}")
    else:
        for idx, payload in enumerate(originals):
            path = f"{args.out}.item{idx:06d}"
            _write(path, payload)
            print(f"wrote {path}: {_bits_and_bytes(8 * len(payload))}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify / score / compare


def _cmd_verify(args) -> int:
    if bool(args.against) == bool(args.corpus):
        print("verify needs exactly one of --against or --corpus",
              file=sys.stderr)
        return EXIT_USAGE
    originals = ([_read(args.against)] if args.against
                 else _corpus_payloads(args.corpus))
    report = verify_roundtrip(_read(args.archive), originals)
    for check in report.items:
        state = "ok" if check.ok else f"FAIL ({check.reason})"
        print(f"item {check.index}: {state}")
    print(str(report))
    return EXIT_OK if report.passed else EXIT_VERIFY


def _cmd_score(args) -> int:
    compressor = os.path.getsize(args.compressor)
    payload = os.path.getsize(args.archive)
    score = net_score(compressor, payload)
    print(f"compressor: {_bits_and_bytes(8 * compressor)}")
    print(f"payload:    {_bits_and_bytes(8 * payload)}")
    print(f"net score:  {_bits_and_bytes(score.total_bits)}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    score_a = net_score(os.path.getsize(args.compressor),
                        os.path.getsize(args.archive))
    score_b = net_score(os.path.getsize(args.compressor_b),
                        os.path.getsize(args.archive_b))
    print(f"theory a: {_bits_and_bytes(score_a.total_bits)}")
    print(f"theory b: {_bits_and_bytes(score_b.total_bits)}")
    verdict = compare_theories(score_a, score_b)
    print("preferred: " + ("tie" if verdict == "tie" else f"theory {verdict}"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# nfl-audit / leaderboard


def _cmd_nfl_audit(args) -> int:
    report = nfl_audit(args.codec, args.n)
    print(f"inputs:    {report.inputs} ({args.n}-bit strings)")
    print(f"mean:      {report.mean_bits:.3f} bits "
          f"(floor {args.n}), min {report.min_bits}, max {report.max_bits}")
    print(f"kraft sum: {report.kraft_sum:.9g}")
    print(f"backoff:   {report.backoff_fraction:.3f} of inputs")
    print(str(report))
    return EXIT_OK if report.passed else EXIT_VERIFY


def _cmd_leaderboard(args) -> int:
    entries = (parse_leaderboard(open(args.manifest, encoding="ascii").read())
               if os.path.exists(args.manifest) else [])
    if args.archive:
        if not (args.corpus and args.compressor and args.codec):
            print("leaderboard add needs --corpus, --codec, --compressor "
                  "and --archive", file=sys.stderr)
            return EXIT_USAGE
        report = verify_roundtrip(_read(args.archive),
                                  _corpus_payloads(args.corpus))
        if not report.passed:
            print(f"entry rejected: verification failed: {report}")
            return EXIT_VERIFY
        entry = LeaderboardEntry(
            corpus_id=os.path.splitext(os.path.basename(args.corpus))[0],
            codec=args.codec,
            compressor_bytes=os.path.getsize(args.compressor),
            payload_bytes=os.path.getsize(args.archive),
            status="verified",
            timestamp=os.environ.get("CRM_TIMESTAMP", DEFAULT_TIMESTAMP))
        entries = leaderboard_update(entries, entry)
        with open(args.manifest, "w", encoding="ascii") as fh:
            fh.write(serialize_leaderboard(entries))
        print(f"added: {entry.to_line()}")
    board = ranked(entries)
    if not board:
        print("leaderboard empty")
        return EXIT_OK
    for rank, entry in enumerate(board, start=1):
        print(f"{rank}\t{entry.corpus_id}\t{entry.codec}\t"
              f"{_bits_and_bytes(entry.total_bits)}\t{entry.timestamp}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crmbench",
        description="Lossless-compression benchmark: compress, verify, "
                    "score, audit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a corpus item")
    p.add_argument("--kind", required=True,
                   choices=("random", "piecewise", "blob", "trials"))
    p.add_argument("--out", required=True)
    p.add_argument("--manifest")
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--frames", type=int, default=24)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--blob-size", type=int, default=16)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("compress", help="encode one file or a whole corpus")
    p.add_argument("--codec", required=True, choices=CODEC_NAMES)
    p.add_argument("--in", dest="infile")
    p.add_argument("--corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--stride", type=int, default=4)
    p.add_argument("--motion", choices=("on", "off"), default="on")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_compress)

    p = sub.add_parser("decompress", help="decode an archive")
    p.add_argument("--archive", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_decompress)

    p = sub.add_parser("verify",
                       help="decode and byte-compare against originals")
    p.add_argument("--archive", required=True)
    p.add_argument("--against")
    p.add_argument("--corpus")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("score", help="net score of compressor plus archive")
    p.add_argument("--compressor", required=True)
    p.add_argument("--archive", required=True)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("compare", help="compare two net scores")
    p.add_argument("--compressor", required=True)
    p.add_argument("--archive", required=True)
    p.add_argument("--compressor-b", required=True)
    p.add_argument("--archive-b", required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("nfl-audit",
                       help="exhaustive mean-codelength and Kraft audit")
    p.add_argument("--codec", required=True, choices=CODEC_NAMES)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_nfl_audit)

    p = sub.add_parser("leaderboard", help="print or extend a leaderboard")
    p.add_argument("--manifest", required=True)
    p.add_argument("--corpus")
    p.add_argument("--codec", choices=CODEC_NAMES)
    p.add_argument("--compressor")
    p.add_argument("--archive")
    p.set_defaults(func=_cmd_leaderboard)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError,
            OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DecodeError, FormatError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

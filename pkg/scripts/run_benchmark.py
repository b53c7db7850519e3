#!/usr/bin/env python3
"""End-to-end benchmark over the shipped natural corpus.

Compresses every fixture under each still-image codec, verifies the
archives bit-exactly, scores them, and prints a small leaderboard plus
NFL audit lines.  Run from the repository root:

    python3 scripts/run_benchmark.py [--corpus data/natural/manifest.txt]
"""

from __future__ import annotations

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from crmbench.corpus import load_manifest
from crmbench.scoring import (compress_archive, net_score, nfl_audit,
                              verify_roundtrip)

CODECS = ("uniform", "pixdiff", "segment")


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--corpus", default="data/natural/manifest.txt")
    parser.add_argument("--compressor-bytes", type=int, default=0,
                        help="declared compressor artifact size")
    args = parser.parse_args()

    items = load_manifest(args.corpus)
    root = os.path.dirname(os.path.abspath(args.corpus))
    payloads = [open(os.path.join(root, it.path), "rb").read()
                for it in items]
    total_in = sum(len(p) for p in payloads)
    print(f"corpus: {len(items)} items, {8 * total_in} bits")

    rows = []
    for codec in CODECS:
        start = time.perf_counter()
        archive = compress_archive(codec, payloads)
        elapsed = time.perf_counter() - start
        report = verify_roundtrip(archive, payloads)
        score = net_score(args.compressor_bytes, len(archive))
        state = "verified" if report.passed else "FAILED"
        rows.append((score.total_bits, codec, len(archive), elapsed, state))
        if not report.passed:
            print(f"verification failed for {codec}: {report}")
            return 1

    print(f"{'rank':<5}{'codec':<10}{'net bits':>12}{'bytes':>10}"
          f"{'ratio':>8}{'time':>8}  status")
    for rank, (bits, codec, size, elapsed, state) in \
            enumerate(sorted(rows), start=1):
        print(f"{rank:<5}{codec:<10}{bits:>12}{size:>10}"
              f"{total_in / size:>8.2f}{elapsed:>7.1f}s  {state}")

    print()
    for codec in CODECS:
        print(nfl_audit(codec, 8))
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Two theories price the same measurements; shorter total code wins.

Simulates noisy flight-time trials for a ball thrown straight up, then
scores a quantized normal model against a flat interval model, both at
millisecond resolution: first as ideal codelengths, then as actual
codecs producing decodable bytes.

    python3 scripts/duel_demo.py [--trials 1000] [--noise 0.3] [--seed 0]
"""

from __future__ import annotations

import argparse
import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from crmbench.registry import compress_item, decompress_item
from crmbench.scalar import (IntervalModel, QuantizedGaussianModel,
                             ballistic_generate, flight_time,
                             serialize_trials, theory_duel)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--noise", type=float, default=0.3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    v_i, theta, g = 9.8, math.pi / 2.0, 9.8
    t_f = flight_time(v_i, theta, g)
    print(f"predicted flight time: {t_f:.3f} s; measuring {args.trials} "
          f"trials at noise sigma {args.noise}")
    trials = ballistic_generate(v_i, theta, g, args.noise, args.trials,
                                args.seed)

    gauss = QuantizedGaussianModel(t_f, args.noise, 0.001)
    flat = IntervalModel(1.0, 30.0, 0.001)
    duel = theory_duel(trials, gauss, flat)
    print(f"ideal codelengths: gaussian {duel.total_bits_a:.1f} bits, "
          f"interval {duel.total_bits_b:.1f} bits -> theory "
          f"'{duel.preferred}' preferred")
    per = duel.total_bits_b - duel.total_bits_a
    print(f"the normal theory explains {per:.1f} bits of structure "
          f"({per / max(1, len(trials.outcomes)):.2f} bits/outcome)")

    payload = serialize_trials(trials)
    for codec in ("gaussian", "interval"):
        body, backed_off = compress_item(codec, payload)
        assert decompress_item(codec, body, backed_off) == payload
        print(f"as a codec, {codec}: {8 * len(body)} bits "
              f"({len(body)} bytes) for {len(payload)} input bytes, "
              f"round trip exact")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Build the natural-image fixture set under data/natural/.

Pulls a few classic 8-bit grayscale photographs from scikit-image's
bundled sample data, downsamples the large ones to 256x256, and stores
them as binary PGM alongside a corpus manifest.  Run once; the outputs
are committed so the test suite does not depend on scikit-image.
"""

from __future__ import annotations

import os
import sys

import numpy as np
from skimage import data

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from crmbench.corpus import CorpusItem, save_manifest, store_pnm
from crmbench.media import Image


def fixtures():
    yield "camera", data.camera()[::2, ::2]
    yield "moon", data.moon()[::2, ::2]
    yield "brick", data.brick()[::2, ::2]
    yield "clock", data.clock()


def main() -> None:
    root = os.path.join(os.path.dirname(__file__), "..", "data", "natural")
    os.makedirs(root, exist_ok=True)
    items = []
    for name, pixels in fixtures():
        img = Image(np.ascontiguousarray(pixels, dtype=np.uint8))
        path = os.path.join(root, f"{name}.pgm")
        store_pnm(path, img)
        size = os.path.getsize(path)
        items.append(CorpusItem(name, "image", f"{name}.pgm", size))
        print(f"{name}: {img.width}x{img.height}, {size} bytes")
    save_manifest(os.path.join(root, "manifest.txt"), items)
    print(f"manifest: {len(items)} items")


if __name__ == "__main__":
    main()

"""Corpus assembly: file I/O, seeded generators and the corpus manifest.

All random content comes from numpy's seedable 64-bit PCG64 generator; the
generator name is embedded in generated item ids so a manifest pins both
content and provenance.  Synthetic generators return ground truth (region
maps, blob trajectories) alongside the data for later benchmark scoring.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .media import (FormatError, FrameSequence, Image, parse_pgm,
                    serialize_pgm)

PRNG_NAME = "pcg64"

KINDS = ("image", "sequence", "trials")


def load_pnm(path) -> Image:
    with open(path, "rb") as fh:
        return parse_pgm(fh.read())


def store_pnm(path, img: Image) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_pgm(img))


def gen_random_image(width: int, height: int, seed: int) -> Image:
    """Uniform IID pixels; the incompressibility baseline."""
    if width < 1 or height < 1:
        raise ValueError("dimensions must be positive")
    rng = np.random.default_rng(seed)
    return Image(rng.integers(0, 256, size=(height, width), dtype=np.uint8))


def gen_piecewise_constant(width: int, height: int, region_spec,
                           noise_sigma: float, seed: int):
    """Piecewise-constant image from rectangles plus clipped Gaussian noise.

    ``region_spec`` is a sequence of (x0, y0, x1, y1, mean) half-open boxes
    that must tile the image exactly; overlaps and gaps are errors.
    Returns (Image, region_map) where region_map holds each pixel's
    region_spec entry index as the ground-truth segmentation.
    """
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    cover = np.zeros((height, width), dtype=np.int32)
    region_map = np.full((height, width), -1, dtype=np.int32)
    base = np.zeros((height, width), dtype=np.float64)
    for idx, (x0, y0, x1, y1, mean) in enumerate(region_spec):
        if not (0 <= x0 < x1 <= width and 0 <= y0 < y1 <= height):
            raise ValueError(f"region {idx} out of bounds")
        if not (0 <= mean <= 255):
            raise ValueError(f"region {idx} mean out of [0, 255]")
        cover[y0:y1, x0:x1] += 1
        region_map[y0:y1, x0:x1] = idx
        base[y0:y1, x0:x1] = mean
    if (cover > 1).any():
        raise ValueError("region_spec rectangles overlap")
    if (cover == 0).any():
        raise ValueError("region_spec leaves pixels uncovered")
    rng = np.random.default_rng(seed)
    noisy = base + rng.normal(0.0, noise_sigma, size=base.shape)
    px = np.clip(np.rint(noisy), 0, 255).astype(np.uint8)
    return Image(px), region_map


def _value_noise(rng, width, height, cell=8):
    """Smooth texture: bilinear interpolation of a coarse random lattice."""
    gw = width // cell + 2
    gh = height // cell + 2
    lattice = rng.uniform(0, 255, size=(gh, gw))
    ys = np.arange(height) / cell
    xs = np.arange(width) / cell
    y0 = ys.astype(int)
    x0 = xs.astype(int)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    a = lattice[np.ix_(y0, x0)]
    b = lattice[np.ix_(y0, x0 + 1)]
    c = lattice[np.ix_(y0 + 1, x0)]
    d = lattice[np.ix_(y0 + 1, x0 + 1)]
    vals = (a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx
            + c * fy * (1 - fx) + d * fy * fx)
    return vals


def gen_blob_video(width: int, height: int, frame_count: int,
                   blob_size: int, start, velocity, noise_sigma: float,
                   seed: int, frame_rate: float = 25.0):
    """Static textured background with one translating square blob.

    Returns (FrameSequence, trajectory); trajectory lists the blob's
    top-left corner per frame.  The whole trajectory must stay in frame.
    """
    if frame_count < 1:
        raise ValueError("frame_count must be >= 1")
    if not (0 < blob_size <= min(width, height)):
        raise ValueError("blob_size out of range")
    rng = np.random.default_rng(seed)
    background = _value_noise(rng, width, height)
    blob = rng.uniform(0, 255, size=(blob_size, blob_size))
    blob = 0.5 * blob + 128.0  # keep the blob bright against the texture
    x0, y0 = start
    vx, vy = velocity
    trajectory = []
    frames = []
    for t in range(frame_count):
        x = x0 + vx * t
        y = y0 + vy * t
        if not (0 <= x <= width - blob_size and 0 <= y <= height - blob_size):
            raise ValueError(f"blob leaves the frame at t={t}")
        canvas = background.copy()
        canvas[y:y + blob_size, x:x + blob_size] = blob
        if noise_sigma > 0:
            canvas = canvas + rng.normal(0.0, noise_sigma, size=canvas.shape)
        frames.append(Image(np.clip(np.rint(canvas), 0, 255).astype(np.uint8)))
        trajectory.append((x, y))
    return FrameSequence(tuple(frames), frame_rate), trajectory


@dataclass(frozen=True)
class CorpusItem:
    """One manifest row: an input file and its optional ground truth."""

    item_id: str
    kind: str
    path: str
    byte_size: int
    ground_truth: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.byte_size < 0:
            raise ValueError("byte_size must be >= 0")
        for field in (self.item_id, self.kind, self.path, self.ground_truth):
            if field is not None and ("\t" in field or "\n" in field):
                raise ValueError("manifest fields may not contain tabs")


MANIFEST_MAGIC = "CRMCORPUS 1"


def serialize_manifest(items) -> str:
    lines = [MANIFEST_MAGIC]
    for it in items:
        fields = [it.item_id, it.kind, it.path, str(it.byte_size)]
        if it.ground_truth is not None:
            fields.append(it.ground_truth)
        lines.append("\t".join(fields))
    return "\n".join(lines) + "\n"


def parse_manifest(text: str) -> list[CorpusItem]:
    lines = text.splitlines()
    if not lines or lines[0] != MANIFEST_MAGIC:
        raise FormatError("wrong magic, expected CRMCORPUS 1")
    items = []
    for ln in lines[1:]:
        if not ln:
            continue
        fields = ln.split("\t")
        if len(fields) not in (4, 5):
            raise FormatError(f"bad manifest line: {ln!r}")
        try:
            size = int(fields[3])
        except ValueError as exc:
            raise FormatError(f"bad byte size in line: {ln!r}") from exc
        gt = fields[4] if len(fields) == 5 else None
        items.append(CorpusItem(fields[0], fields[1], fields[2], size, gt))
    ids = [it.item_id for it in items]
    if len(set(ids)) != len(ids):
        raise FormatError("duplicate item ids in manifest")
    return items


def load_manifest(path) -> list[CorpusItem]:
    with open(path, "r", encoding="ascii") as fh:
        return parse_manifest(fh.read())


def save_manifest(path, items) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(serialize_manifest(items))


def check_manifest_sizes(manifest_path, items) -> None:
    """Byte sizes in the manifest must match the files on disk."""
    root = os.path.dirname(os.path.abspath(manifest_path))
    for it in items:
        actual = os.path.getsize(os.path.join(root, it.path))
        if actual != it.byte_size:
            raise FormatError(
                f"item {it.item_id}: manifest says {it.byte_size} bytes, "
                f"file has {actual}")

"""Image models: pixel-difference prediction and MDL segmentation.

Both codecs here work on Image objects and produce self-contained byte
payloads (the codec registry adds the raw back-off wrapper).  The
segmentation functional charges, per region, half the boundary crack
count times mu, the ideal Gaussian codelength of its pixels, and a flat
lambda for parameters; the emitted stream mirrors those terms: crack
chain codes at 2 bits per move, 16-bit quantized mean and sigma, and
range-coded pixels under the same quantized per-region model.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .coding import (MAX_MODEL_TOTAL, AdaptiveFrequencyModel, DecodeError,
                     RangeDecoder, RangeEncoder, StaticFrequencyModel,
                     _SENTINEL, _SENTINEL_TOTAL)
from .media import Image
from .scalar import _phi_diff

RESIDUAL_ALPHABET = 511  # residual values -255..255, biased by +255
MU_DEFAULT = 2.0
LAMBDA_DEFAULT = 64.0
SIGMA_FLOOR = 0.5
SIGMA_CEIL = 128.0
BLOCK = 8  # initial segmentation partition granularity


# ---------------------------------------------------------------------------
# pixel-difference transform


@dataclass(frozen=True, eq=False)
class ResidualPlane:
    """Prediction residuals; integers in [-255, 255], same shape as image."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 2 or vals.size == 0:
            raise ValueError("values must be a non-empty 2-D array")
        if vals.dtype.kind != "i":
            raise ValueError("values must be a signed integer array")
        if vals.min() < -255 or vals.max() > 255:
            raise ValueError("residual outside [-255, 255]")
        vals = vals.astype(np.int16, copy=True)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __eq__(self, other):
        if not isinstance(other, ResidualPlane):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))

    def to_symbols(self) -> np.ndarray:
        """Row-major symbols in [0, 510]."""
        return (self.values.astype(np.int32) + 255).ravel()

    @classmethod
    def from_symbols(cls, symbols, height: int, width: int) -> "ResidualPlane":
        arr = np.asarray(symbols, dtype=np.int32).reshape(height, width) - 255
        return cls(arr.astype(np.int16))


def pixel_diff_transform(img: Image) -> ResidualPlane:
    """Left-neighbor prediction; first column predicts from above, the
    origin from 128.  Exactly invertible."""
    px = img.pixels.astype(np.int16)
    res = np.empty_like(px)
    res[:, 1:] = px[:, 1:] - px[:, :-1]
    res[1:, 0] = px[1:, 0] - px[:-1, 0]
    res[0, 0] = px[0, 0] - 128
    return ResidualPlane(res)


def pixel_diff_inverse(plane: ResidualPlane) -> Image:
    res = plane.values.astype(np.int32)
    first_col = np.cumsum(res[:, 0]) + 128
    px = np.cumsum(np.column_stack([first_col, res[:, 1:]]), axis=1)
    if px.min() < 0 or px.max() > 255:
        raise DecodeError("residuals reconstruct outside [0, 255]")
    return Image(px.astype(np.uint8))


def _encode_u16(value: int) -> bytes:
    return int(value).to_bytes(2, "big")


def _read_u16(data: bytes, pos: int):
    if pos + 2 > len(data):
        raise DecodeError("truncated header")
    return int.from_bytes(data[pos:pos + 2], "big"), pos + 2


def pixeldiff_encode_image(img: Image) -> bytes:
    """Dims plus the adaptively coded residual plane."""
    symbols = pixel_diff_transform(img).to_symbols()
    model = AdaptiveFrequencyModel(RESIDUAL_ALPHABET)
    enc = RangeEncoder()
    for s in symbols:
        lo, hi, total = model.interval(s)
        enc.encode(lo, hi, total)
        model.update(s)
    enc.encode(_SENTINEL, _SENTINEL + 1, _SENTINEL_TOTAL)
    body = enc.finish().data
    return _encode_u16(img.width) + _encode_u16(img.height) + body


def pixeldiff_decode_image(payload: bytes) -> Image:
    w, pos = _read_u16(payload, 0)
    h, pos = _read_u16(payload, pos)
    if w < 1 or h < 1:
        raise DecodeError("bad dimensions")
    model = AdaptiveFrequencyModel(RESIDUAL_ALPHABET)
    dec = RangeDecoder(payload[pos:])
    out = np.empty(w * h, dtype=np.int32)
    for i in range(w * h):
        total = model.total
        sym = model.find(dec.decode_target(total))
        lo, hi, _ = model.interval(sym)
        dec.advance(lo, hi, total)
        model.update(sym)
        out[i] = sym
    if dec.decode_target(_SENTINEL_TOTAL) != _SENTINEL:
        raise DecodeError("end sentinel mismatch")
    return pixel_diff_inverse(ResidualPlane.from_symbols(out, h, w))


# ---------------------------------------------------------------------------
# segmentation


def discretized_gaussian_probs(mean: float, sigma: float) -> np.ndarray:
    """Gaussian masses over intensities 0..255, renormalized to the range.

    Uses tail-stable CDF differences so far-from-mean bins keep accurate
    relative mass instead of cancelling to float noise.
    """
    edges = (np.arange(257, dtype=np.float64) - 0.5 - mean) / sigma
    masses = np.array([_phi_diff(edges[i], edges[i + 1]) for i in range(256)])
    z = _phi_diff(edges[0], edges[256])
    if z <= 0:
        raise ValueError("degenerate model: no mass on [0, 255]")
    return masses / z


def quantize_mean(mean: float) -> int:
    return int(round(min(max(mean, 0.0), 255.0) * 65535.0 / 255.0))


def dequantize_mean(code: int) -> float:
    return code * 255.0 / 65535.0


def quantize_sigma(sigma: float) -> int:
    s = min(max(sigma, SIGMA_FLOOR), SIGMA_CEIL)
    return int(round((s - SIGMA_FLOOR) * 65535.0 / (SIGMA_CEIL - SIGMA_FLOOR)))


def dequantize_sigma(code: int) -> float:
    return SIGMA_FLOOR + code * (SIGMA_CEIL - SIGMA_FLOOR) / 65535.0


def _fit_params(hist: np.ndarray):
    """Quantized (mean, sigma) codes fitted to an intensity histogram."""
    n = int(hist.sum())
    vals = np.arange(256, dtype=np.float64)
    mean = float((hist * vals).sum()) / n
    var = float((hist * vals * vals).sum()) / n - mean * mean
    sigma = math.sqrt(max(var, 0.0))
    return quantize_mean(mean), quantize_sigma(sigma)


def _pixel_bits(hist: np.ndarray, mean_code: int, sigma_code: int) -> float:
    """Ideal codelength of histogrammed pixels under the quantized model."""
    probs = discretized_gaussian_probs(dequantize_mean(mean_code),
                                       dequantize_sigma(sigma_code))
    mask = hist > 0
    if not mask.any():
        raise ValueError("empty region")
    with np.errstate(divide="ignore"):
        logp = np.log2(probs[mask])
    return float(-(hist[mask] * logp).sum())


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        parent = self.parent
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True, eq=False)
class Segmentation:
    """Dense region labels with per-region quantized Gaussian parameters.

    Labels are 0..M-1, every region non-empty and 4-connected; sigmas sit
    in [0.5, 128] after quantization.
    """

    region_map: np.ndarray
    mean_codes: tuple[int, ...]
    sigma_codes: tuple[int, ...]

    def __post_init__(self):
        rmap = np.asarray(self.region_map)
        if rmap.ndim != 2 or rmap.size == 0:
            raise ValueError("region_map must be a non-empty 2-D array")
        rmap = rmap.astype(np.int32, copy=True)
        m = len(self.mean_codes)
        if m < 1 or len(self.sigma_codes) != m:
            raise ValueError("parameter list lengths disagree")
        present = np.unique(rmap)
        if present[0] != 0 or present[-1] != m - 1 or len(present) != m:
            raise ValueError("labels must be dense 0..M-1 with no empty region")
        for code in self.mean_codes + self.sigma_codes:
            if not 0 <= code <= 65535:
                raise ValueError("parameter code out of 16-bit range")
        self._check_connected(rmap, m)
        rmap.flags.writeable = False
        object.__setattr__(self, "region_map", rmap)

    @staticmethod
    def _check_connected(rmap: np.ndarray, m: int) -> None:
        h, w = rmap.shape
        uf = _UnionFind(h * w)
        flat = rmap.ravel()
        idx = np.arange(h * w).reshape(h, w)
        for a, b in ((idx[:, :-1], idx[:, 1:]), (idx[:-1, :], idx[1:, :])):
            same = flat[a.ravel()] == flat[b.ravel()]
            for i, j in zip(a.ravel()[same], b.ravel()[same]):
                uf.union(int(i), int(j))
        roots = {}
        for i in range(h * w):
            roots.setdefault(int(flat[i]), set()).add(uf.find(i))
        bad = [lbl for lbl, rs in roots.items() if len(rs) != 1]
        if bad:
            raise ValueError(f"regions not 4-connected: {bad}")

    @property
    def region_count(self) -> int:
        return len(self.mean_codes)

    def means(self) -> tuple[float, ...]:
        return tuple(dequantize_mean(c) for c in self.mean_codes)

    def sigmas(self) -> tuple[float, ...]:
        return tuple(dequantize_sigma(c) for c in self.sigma_codes)


def boundary_cracks(region_map: np.ndarray):
    """Boolean crack arrays between horizontal and vertical neighbors."""
    v = region_map[:, 1:] != region_map[:, :-1]
    hz = region_map[1:, :] != region_map[:-1, :]
    return v, hz


def boundary_length(seg: Segmentation, label: int) -> int:
    """Cracks adjacent to one region, counted once per adjacent region."""
    rmap = seg.region_map
    v, hz = boundary_cracks(rmap)
    left, right = rmap[:, :-1], rmap[:, 1:]
    top, bot = rmap[:-1, :], rmap[1:, :]
    count = int((v & ((left == label) | (right == label))).sum())
    count += int((hz & ((top == label) | (bot == label))).sum())
    return count


def segmentation_cost(img: Image, seg: Segmentation,
                      mu: float = MU_DEFAULT,
                      lam: float = LAMBDA_DEFAULT) -> float:
    """Sum over regions of (mu/2) * boundary + pixel codelength + lambda.

    Each inter-region crack borders two regions, so it contributes mu in
    total; image-border edges are free.
    """
    rmap = seg.region_map
    if rmap.shape != img.pixels.shape:
        raise ValueError("segmentation does not match image shape")
    for sigma in seg.sigmas():
        if sigma < SIGMA_FLOOR:
            raise ValueError("sigma below floor")
    v, hz = boundary_cracks(rmap)
    total_cracks = int(v.sum()) + int(hz.sum())
    cost = mu * total_cracks + lam * seg.region_count
    px = img.pixels
    for label in range(seg.region_count):
        hist = np.bincount(px[rmap == label].ravel(), minlength=256)
        cost += _pixel_bits(hist, seg.mean_codes[label],
                            seg.sigma_codes[label])
    return cost


def segment_mdl(img: Image, mu: float = MU_DEFAULT,
                lam: float = LAMBDA_DEFAULT,
                history: list | None = None) -> Segmentation:
    """Greedy merge from an 8x8 block partition.

    Repeatedly merges the adjacent pair with the largest cost decrease
    (ties: lowest region index pair) and stops when no merge decreases
    the functional.  If `history` is given, the segmentation after every
    accepted merge is appended to it (the initial partition first).
    """
    px = img.pixels
    h, w = px.shape
    bw = (w + BLOCK - 1) // BLOCK
    bh = (h + BLOCK - 1) // BLOCK
    ys, xs = np.mgrid[0:h, 0:w]
    block_map = (ys // BLOCK) * bw + (xs // BLOCK)
    n = bh * bw

    hists = []
    params = []
    pbits = []
    flat_px = px.ravel()
    flat_blk = block_map.ravel()
    order = np.argsort(flat_blk, kind="stable")
    bounds = np.searchsorted(flat_blk[order], np.arange(n + 1))
    for r in range(n):
        sel = flat_px[order[bounds[r]:bounds[r + 1]]]
        hist = np.bincount(sel, minlength=256).astype(np.int64)
        mc, sc = _fit_params(hist)
        hists.append(hist)
        params.append((mc, sc))
        pbits.append(_pixel_bits(hist, mc, sc))

    # crack counts between adjacent regions
    cracks: dict[tuple[int, int], int] = {}
    v, hz = boundary_cracks(block_map)
    for mask, a_map, b_map in (
            (v, block_map[:, :-1], block_map[:, 1:]),
            (hz, block_map[:-1, :], block_map[1:, :])):
        pairs = np.stack([a_map[mask], b_map[mask]], axis=1)
        if len(pairs):
            pairs.sort(axis=1)
            uniq, counts = np.unique(pairs, axis=0, return_counts=True)
            for (a, b), c in zip(uniq, counts):
                key = (int(a), int(b))
                cracks[key] = cracks.get(key, 0) + int(c)

    neighbors: dict[int, set[int]] = {r: set() for r in range(n)}
    for a, b in cracks:
        neighbors[a].add(b)
        neighbors[b].add(a)

    version = [0] * n
    alive = [True] * n
    uf = _UnionFind(n)
    heap: list[tuple[float, int, int, int, int]] = []

    def snapshot() -> Segmentation:
        roots = np.array([uf.find(int(r)) for r in range(n)], dtype=np.int32)
        merged_map = roots[block_map]
        # canonical labels: order of first appearance in raster scan
        uniq, first = np.unique(merged_map.ravel(), return_index=True)
        relabel = {int(lbl): rank for rank, lbl in
                   enumerate(uniq[np.argsort(first)])}
        final = np.vectorize(relabel.__getitem__, otypes=[np.int32])(merged_map)
        m = len(relabel)
        mean_codes = [0] * m
        sigma_codes = [0] * m
        for lbl, rank in relabel.items():
            mc, sc = params[lbl]
            mean_codes[rank] = mc
            sigma_codes[rank] = sc
        return Segmentation(final, tuple(mean_codes), tuple(sigma_codes))

    if history is not None:
        history.append(snapshot())

    def merge_delta(a: int, b: int) -> float:
        hist = hists[a] + hists[b]
        mc, sc = _fit_params(hist)
        joined = _pixel_bits(hist, mc, sc)
        key = (a, b) if a < b else (b, a)
        return (joined - pbits[a] - pbits[b] - lam
                - mu * cracks[key])

    def push(a: int, b: int) -> None:
        if a > b:
            a, b = b, a
        heapq.heappush(heap, (merge_delta(a, b), a, b,
                              version[a], version[b]))

    for a, b in cracks:
        push(a, b)

    while heap:
        delta, a, b, va, vb = heapq.heappop(heap)
        if not (alive[a] and alive[b]) or version[a] != va or version[b] != vb:
            continue
        if delta >= 0.0:
            break
        # merge b into a (a < b by construction)
        uf.union(a, b)
        hists[a] = hists[a] + hists[b]
        mc, sc = _fit_params(hists[a])
        params[a] = (mc, sc)
        pbits[a] = _pixel_bits(hists[a], mc, sc)
        alive[b] = False
        version[a] += 1
        for nb in neighbors[b]:
            if nb == a or not alive[nb]:
                continue
            key_old = (b, nb) if b < nb else (nb, b)
            key_new = (a, nb) if a < nb else (nb, a)
            cracks[key_new] = cracks.get(key_new, 0) + cracks.pop(key_old)
            neighbors[nb].discard(b)
            neighbors[nb].add(a)
            neighbors[a].add(nb)
        cracks.pop((a, b), None)
        neighbors[a].discard(b)
        neighbors.pop(b)
        for nb in neighbors[a]:
            push(a, nb)
        if history is not None:
            history.append(snapshot())

    return snapshot()


# ---------------------------------------------------------------------------
# segmented codec: crack chain codes + per-region static Gaussian coding

_DIRS = ((1, 0), (0, 1), (-1, 0), (0, -1))  # E, S, W, N
_REVERSE = (2, 3, 0, 1)


def _crack_for_move(cx: int, cy: int, d: int, w: int, h: int):
    """Crack id ('v'|'h', y, x) crossed by moving from corner (cx, cy)."""
    if d == 0 and cx < w and 1 <= cy <= h - 1:      # east along y=cy
        return ("h", cy - 1, cx)
    if d == 2 and cx >= 1 and 1 <= cy <= h - 1:     # west
        return ("h", cy - 1, cx - 1)
    if d == 1 and cy < h and 1 <= cx <= w - 1:      # south along x=cx
        return ("v", cy, cx - 1)
    if d == 3 and cy >= 1 and 1 <= cx <= w - 1:     # north
        return ("v", cy - 1, cx - 1)
    return None


def _walk_cover(v: np.ndarray, hz: np.ndarray, w: int, h: int):
    """Deterministic decomposition of the crack set into corner walks."""
    vund = v.copy()
    hund = hz.copy()

    def unused(kind, y, x):
        return vund[y, x] if kind == "v" else hund[y, x]

    def consume(kind, y, x):
        if kind == "v":
            vund[y, x] = False
        else:
            hund[y, x] = False

    walks = []

    def start_walk(cx, cy, first):
        # the first move always crosses the seed crack, so every seed
        # consumes its own crack even if the walk never returns here
        consume(*_crack_for_move(cx, cy, first, w, h))
        moves = [first]
        cx += _DIRS[first][0]
        cy += _DIRS[first][1]
        arrival = first
        while True:
            advanced = False
            for d in range(4):
                if d == _REVERSE[arrival]:
                    continue
                crack = _crack_for_move(cx, cy, d, w, h)
                if crack is not None and unused(*crack):
                    consume(*crack)
                    moves.append(d)
                    cx += _DIRS[d][0]
                    cy += _DIRS[d][1]
                    arrival = d
                    advanced = True
                    break
            if not advanced:
                return moves

    # seed from vertical cracks in raster order, then horizontal
    for y, xm in np.argwhere(vund):
        if vund[y, xm]:
            walks.append(((int(xm) + 1, int(y)),
                          start_walk(int(xm) + 1, int(y), 1)))
    for ym, x in np.argwhere(hund):
        if hund[ym, x]:
            walks.append(((int(x), int(ym) + 1),
                          start_walk(int(x), int(ym) + 1, 0)))
    return walks


def _labels_from_cracks(v: np.ndarray, hz: np.ndarray, w: int, h: int):
    """Regions are 4-connected components not crossing any crack."""
    uf = _UnionFind(w * h)
    idx = np.arange(w * h).reshape(h, w)
    for i, j in zip(idx[:, :-1][~v].ravel(), idx[:, 1:][~v].ravel()):
        uf.union(int(i), int(j))
    for i, j in zip(idx[:-1, :][~hz].ravel(), idx[1:, :][~hz].ravel()):
        uf.union(int(i), int(j))
    labels = np.empty(w * h, dtype=np.int32)
    mapping: dict[int, int] = {}
    for i in range(w * h):
        root = uf.find(i)
        if root not in mapping:
            mapping[root] = len(mapping)
        labels[i] = mapping[root]
    return labels.reshape(h, w), len(mapping)


def _region_coding_model(mean_code: int, sigma_code: int) -> StaticFrequencyModel:
    probs = discretized_gaussian_probs(dequantize_mean(mean_code),
                                       dequantize_sigma(sigma_code))
    scale = MAX_MODEL_TOTAL - 512
    counts = np.maximum(1, np.rint(probs * scale).astype(np.int64))
    return StaticFrequencyModel(counts.tolist())


def segmented_encode_image(img: Image, mu: float = MU_DEFAULT,
                           lam: float = LAMBDA_DEFAULT) -> bytes:
    seg = segment_mdl(img, mu, lam)
    return segmented_encode_with(img, seg)


def segmented_encode_with(img: Image, seg: Segmentation) -> bytes:
    w, h = img.width, img.height
    m = seg.region_count
    # the decoder labels regions by first appearance in the raster scan,
    # so parameters must be transmitted in that order
    uniq, first = np.unique(seg.region_map.ravel(), return_index=True)
    order = uniq[np.argsort(first)]
    rank = np.empty(m, dtype=np.int32)
    rank[order] = np.arange(m, dtype=np.int32)
    region_map = rank[seg.region_map]
    mean_codes = tuple(seg.mean_codes[lbl] for lbl in order)
    sigma_codes = tuple(seg.sigma_codes[lbl] for lbl in order)

    head = bytearray()
    head += _encode_u16(w) + _encode_u16(h) + _encode_u16(m)
    for mc, sc in zip(mean_codes, sigma_codes):
        head += _encode_u16(mc) + _encode_u16(sc)
    v, hz = boundary_cracks(region_map)
    walks = _walk_cover(v, hz, w, h)
    if len(walks) > 0xFFFF:
        raise ValueError("boundary too fragmented to encode")
    head += _encode_u16(len(walks))
    for (sx, sy), _ in walks:
        head += _encode_u16(sx) + _encode_u16(sy)

    enc = RangeEncoder()
    for _, moves in walks:
        for d in moves:
            enc.encode(d, d + 1, 4)
        # stop symbol: the reverse of the final direction, which can never
        # be a real move because that crack was just consumed
        stop = _REVERSE[moves[-1]]
        enc.encode(stop, stop + 1, 4)

    tables = [_region_coding_model(mc, sc)
              for mc, sc in zip(mean_codes, sigma_codes)]
    flat_labels = region_map.ravel()
    flat_px = img.pixels.ravel()
    for lbl, value in zip(flat_labels, flat_px):
        table = tables[lbl]
        lo, hi, total = table.interval(int(value))
        enc.encode(lo, hi, total)
    enc.encode(_SENTINEL, _SENTINEL + 1, _SENTINEL_TOTAL)
    return bytes(head) + enc.finish().data


def segmented_decode_image(payload: bytes) -> Image:
    w, pos = _read_u16(payload, 0)
    h, pos = _read_u16(payload, pos)
    m, pos = _read_u16(payload, pos)
    if w < 1 or h < 1 or m < 1:
        raise DecodeError("bad header")
    param_codes = []
    for _ in range(m):
        mc, pos = _read_u16(payload, pos)
        sc, pos = _read_u16(payload, pos)
        param_codes.append((mc, sc))
    walk_count, pos = _read_u16(payload, pos)
    starts = []
    for _ in range(walk_count):
        sx, pos = _read_u16(payload, pos)
        sy, pos = _read_u16(payload, pos)
        if sx > w or sy > h:
            raise DecodeError("walk start outside corner lattice")
        starts.append((sx, sy))

    dec = RangeDecoder(payload[pos:])
    v = np.zeros((h, max(w - 1, 0)), dtype=bool)
    hz = np.zeros((max(h - 1, 0), w), dtype=bool)
    for sx, sy in starts:
        cx, cy = sx, sy
        arrival = None
        while True:
            d = dec.decode_target(4)
            dec.advance(d, d + 1, 4)
            if arrival is not None and d == _REVERSE[arrival]:
                break
            crack = _crack_for_move(cx, cy, d, w, h)
            if crack is None:
                raise DecodeError("walk leaves the crack lattice")
            kind, y, x = crack
            if kind == "v":
                if v[y, x]:
                    raise DecodeError("crack encoded twice")
                v[y, x] = True
            else:
                if hz[y, x]:
                    raise DecodeError("crack encoded twice")
                hz[y, x] = True
            cx += _DIRS[d][0]
            cy += _DIRS[d][1]
            arrival = d

    labels, found = _labels_from_cracks(v, hz, w, h)
    if found != m:
        raise DecodeError(f"crack set yields {found} regions, header says {m}")
    tables = [_region_coding_model(mc, sc) for mc, sc in param_codes]
    flat_labels = labels.ravel()
    out = np.empty(w * h, dtype=np.uint8)
    for i in range(w * h):
        table = tables[flat_labels[i]]
        total = table.total
        sym = table.find(dec.decode_target(total))
        lo, hi, _ = table.interval(sym)
        dec.advance(lo, hi, total)
        out[i] = sym
    if dec.decode_target(_SENTINEL_TOTAL) != _SENTINEL:
        raise DecodeError("end sentinel mismatch")
    return Image(out.reshape(h, w))

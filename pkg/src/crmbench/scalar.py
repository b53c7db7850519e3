"""Scalar outcome models and the two-theory codelength duel.

A theory about a real-valued measurement is priced by the codelength it
assigns to outcomes quantized at resolution delta.  Two model families are
implemented: a quantized Gaussian (bins centered on integer multiples of
delta, mass from the normal CDF) and a uniform interval (equal mass over
(hi - lo)/delta bins).  Outcomes outside a model's support cost a fixed
escape of 32 bits (reserved mass 2^-32).  Lower total codelength on the
same trials is the better theory; equivalently the higher product of
outcome probabilities, and the report states both directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .media import FormatError

DELTA_DEFAULT = 0.001
ESCAPE_MASS = 2.0 ** -32
ESCAPE_BITS = 32.0
SUPPORT_SIGMAS = 8.0


def _phi_diff(a: float, b: float) -> float:
    """Phi(b) - Phi(a) for a <= b, stable in both tails via erfc."""
    rt2 = math.sqrt(2.0)
    if a >= 0.0:
        return 0.5 * (math.erfc(a / rt2) - math.erfc(b / rt2))
    if b <= 0.0:
        return 0.5 * (math.erfc(-b / rt2) - math.erfc(-a / rt2))
    return 0.5 * (math.erf(b / rt2) - math.erf(a / rt2))


@dataclass(frozen=True)
class QuantizedGaussianModel:
    """Normal theory over delta-wide bins centered at multiples of delta.

    Support spans mean +- 8 sigma by default; bin masses are renormalized
    so in-support mass plus the escape mass sum to one.
    """

    mean: float
    sigma: float
    delta: float = DELTA_DEFAULT
    support_lo: float = field(default=None)  # type: ignore[assignment]
    support_hi: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be positive and finite")
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError("delta must be positive and finite")
        if self.support_lo is None:
            object.__setattr__(self, "support_lo",
                               self.mean - SUPPORT_SIGMAS * self.sigma)
        if self.support_hi is None:
            object.__setattr__(self, "support_hi",
                               self.mean + SUPPORT_SIGMAS * self.sigma)
        if not self.support_lo < self.support_hi:
            raise ValueError("support_lo must be below support_hi")

    @property
    def bin_lo(self) -> int:
        return int(round(self.support_lo / self.delta))

    @property
    def bin_hi(self) -> int:
        return int(round(self.support_hi / self.delta))

    def bin_index(self, x: float) -> int:
        return int(round(x / self.delta))

    def in_support(self, x: float) -> bool:
        return self.bin_lo <= self.bin_index(x) <= self.bin_hi

    def _normalizer(self) -> float:
        lo_edge = (self.bin_lo - 0.5) * self.delta
        hi_edge = (self.bin_hi + 0.5) * self.delta
        return _phi_diff((lo_edge - self.mean) / self.sigma,
                         (hi_edge - self.mean) / self.sigma)

    def bin_mass(self, index: int) -> float:
        """Probability of one in-support bin, escape mass accounted."""
        if not self.bin_lo <= index <= self.bin_hi:
            raise ValueError("bin outside support")
        c = index * self.delta
        raw = _phi_diff((c - 0.5 * self.delta - self.mean) / self.sigma,
                        (c + 0.5 * self.delta - self.mean) / self.sigma)
        return raw * (1.0 - ESCAPE_MASS) / self._normalizer()

    def codelength(self, x: float) -> float:
        if not math.isfinite(x):
            raise ValueError("outcome must be finite")
        if not self.in_support(x):
            return ESCAPE_BITS
        mass = self.bin_mass(self.bin_index(x))
        if mass <= 0.0:
            return ESCAPE_BITS
        return -math.log2(mass)

    def bin_masses(self) -> np.ndarray:
        """All in-support bin masses, index bin_lo..bin_hi."""
        idx = np.arange(self.bin_lo, self.bin_hi + 1)
        lo_z = ((idx - 0.5) * self.delta - self.mean) / self.sigma
        hi_z = ((idx + 0.5) * self.delta - self.mean) / self.sigma
        raw = np.array([_phi_diff(a, b) for a, b in zip(lo_z, hi_z)])
        return raw * (1.0 - ESCAPE_MASS) / self._normalizer()


@dataclass(frozen=True)
class IntervalModel:
    """Flat theory: every delta-bin inside (lo, hi) is equally likely."""

    lo: float
    hi: float
    delta: float = DELTA_DEFAULT

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError("delta must be positive and finite")
        if not self.lo < self.hi:
            raise ValueError("lo must be below hi")
        if self.bin_count < 1:
            raise ValueError("interval narrower than one bin")

    @property
    def bin_count(self) -> int:
        span = (self.hi - self.lo) / self.delta
        bins = int(round(span))
        if abs(span - bins) > 1e-6 or bins < 1:
            bins = int(math.ceil(span))
        return bins

    def bin_index(self, x: float) -> int:
        return int(math.floor((x - self.lo) / self.delta))

    def in_support(self, x: float) -> bool:
        return self.lo < x < self.hi

    def bin_mass(self, index: int) -> float:
        if not 0 <= index < self.bin_count:
            raise ValueError("bin outside support")
        return (1.0 - ESCAPE_MASS) / self.bin_count

    def codelength(self, x: float) -> float:
        if not math.isfinite(x):
            raise ValueError("outcome must be finite")
        if not self.in_support(x):
            return ESCAPE_BITS
        index = min(self.bin_index(x), self.bin_count - 1)
        return -math.log2(self.bin_mass(index))


def scalar_codelength(x: float, model) -> float:
    """Bits to encode outcome x at the model's resolution."""
    return model.codelength(x)


@dataclass(frozen=True)
class TrialSet:
    """Measured outcomes plus the experiment metadata that produced them."""

    outcomes: tuple[float, ...]
    metadata: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        outs = tuple(float(x) for x in self.outcomes)
        for x in outs:
            if not math.isfinite(x):
                raise ValueError("outcomes must be finite")
        object.__setattr__(self, "outcomes", outs)
        meta = tuple((str(k), str(v)) for k, v in self.metadata)
        for k, v in meta:
            if "=" in k or "\n" in k or "\n" in v or not k:
                raise ValueError(f"bad metadata entry {k!r}={v!r}")
        object.__setattr__(self, "metadata", meta)

    def get(self, key: str) -> str | None:
        for k, v in self.metadata:
            if k == key:
                return v
        return None


TRIALS_MAGIC = "CRMTRIALS 1"


def serialize_trials(trials: TrialSet) -> bytes:
    lines = [TRIALS_MAGIC]
    lines.extend(f"{k}={v}" for k, v in trials.metadata)
    lines.extend(f"{x:.3f}" for x in trials.outcomes)
    return ("\n".join(lines) + "\n").encode("ascii")


def parse_trials(data: bytes) -> TrialSet:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError("trials file is not ASCII") from exc
    lines = text.splitlines()
    if not lines or lines[0] != TRIALS_MAGIC:
        raise FormatError("wrong magic, expected CRMTRIALS 1")
    meta = []
    outcomes = []
    for ln in lines[1:]:
        if not ln:
            continue
        if "=" in ln and not outcomes:
            key, _, value = ln.partition("=")
            meta.append((key, value))
        else:
            try:
                outcomes.append(float(ln))
            except ValueError as exc:
                raise FormatError(f"bad outcome line {ln!r}") from exc
    return TrialSet(tuple(outcomes), tuple(meta))


def flight_time(v_i: float, theta: float, g: float) -> float:
    """Projectile time aloft for launch speed v_i at angle theta."""
    if g <= 0:
        raise ValueError("g must be positive")
    return 2.0 * v_i * math.sin(theta) / g

def ballistic_generate(v_i: float, theta: float, g: float,
                       noise_sigma: float, count: int, seed: int,
                       delta: float = DELTA_DEFAULT) -> TrialSet:
    """Simulate noisy flight-time measurements, quantized at delta.

    Outcomes are t = 2 v_i sin(theta) / g plus IID Gaussian measurement
    noise, rounded to the delta grid.  Deterministic per seed.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    t_f = flight_time(v_i, theta, g)
    rng = np.random.default_rng(seed)
    raw = t_f + rng.normal(0.0, noise_sigma, size=count)
    outs = tuple(round(round(x / delta) * delta, 10) for x in raw)
    meta = (("v_i", repr(float(v_i))),
            ("theta", repr(float(theta))),
            ("g", repr(float(g))),
            ("noise_sigma", repr(float(noise_sigma))),
            ("seed", str(seed)))
    return TrialSet(outs, meta)


@dataclass(frozen=True)
class DuelReport:
    """Total codelengths of two theories on shared trials, both framings."""

    total_bits_a: float
    total_bits_b: float
    bits_a: tuple[float, ...]
    bits_b: tuple[float, ...]
    preferred: str              # shorter total codelength: 'a', 'b' or 'tie'
    log2_prob_a: float
    log2_prob_b: float
    higher_probability: str     # larger outcome-probability product

    def __str__(self):
        return (f"theory a: {self.total_bits_a:.3f} bits, "
                f"theory b: {self.total_bits_b:.3f} bits, "
                f"preferred: {self.preferred} "
                f"(probability product favors {self.higher_probability})")


def theory_duel(trials: TrialSet, model_a, model_b) -> DuelReport:
    """Price every outcome under both models and compare the totals.

    The shorter-code side and the higher-probability side are computed
    separately; they agree because L = -log2 P is monotone.
    """
    bits_a = tuple(scalar_codelength(x, model_a) for x in trials.outcomes)
    bits_b = tuple(scalar_codelength(x, model_b) for x in trials.outcomes)
    total_a = math.fsum(bits_a)
    total_b = math.fsum(bits_b)
    if total_a < total_b:
        preferred = "a"
    elif total_b < total_a:
        preferred = "b"
    else:
        preferred = "tie"
    log2_pa = -math.fsum(bits_a)
    log2_pb = -math.fsum(bits_b)
    if log2_pa > log2_pb:
        higher = "a"
    elif log2_pb > log2_pa:
        higher = "b"
    else:
        higher = "tie"
    return DuelReport(total_a, total_b, bits_a, bits_b, preferred,
                      log2_pa, log2_pb, higher)

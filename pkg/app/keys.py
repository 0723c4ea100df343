"""BIKE-style keys: generation, public key derivation and the cycle-based key filter."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.config import logger
from app.cycles import mci_cross, mci_single, profile_array
from app.errors import ConfigError, MismatchedModulus, ParameterError
from app.gf2ring import SparsePoly, invert, mul
from app.models import BikeParams, FilterConfig, FilterMode, WeakKeyProfile, validate_r
from app.spectrum import gamma_histogram, gathering_weight, longest_run, multiplicities
from app.utils.rng import sample_support

__all__ = [
    "FilterVerdict",
    "QcKey",
    "classify_gathering",
    "default_filter",
    "derive_public_key",
    "filter_key",
    "generate_key",
    "sample_key",
    "threshold_filter",
    "validate_r",
    "weak_key_types",
]


@dataclass(frozen=True)
class QcKey:
    params: BikeParams
    h0: SparsePoly
    h1: SparsePoly
    checked: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        for h in (self.h0, self.h1):
            if h.r != self.params.r:
                raise MismatchedModulus(self.params.r, h.r)
        if self.checked and (self.h0.weight != self.params.d or self.h1.weight != self.params.d):
            raise ParameterError(
                f"Key blocks have weights ({self.h0.weight}, {self.h1.weight}), expected {self.params.d}"
            )


@dataclass(frozen=True)
class FilterVerdict:
    accepted: bool
    score: int
    witness: Optional[int] = None


def _invertible_block(h: SparsePoly) -> bool:
    # for r with 2 primitive, x^r - 1 = (x + 1) * irreducible
    return h.weight % 2 == 1 and h.weight != h.r


def sample_key(params: BikeParams, rng: np.random.Generator) -> QcKey:
    r, d = params.r, params.d
    if d % 2 == 0 or d == r:
        raise ParameterError(f"Block weight d={d} never yields an invertible h0 for r={r}")
    while True:
        h0 = SparsePoly(r, tuple(sample_support(rng, r, d).tolist()))
        if _invertible_block(h0):
            break
    h1 = SparsePoly(r, tuple(sample_support(rng, r, d).tolist()))
    return QcKey(params, h0, h1)


def generate_key(params: BikeParams, seed: int) -> QcKey:
    """Deterministic in (params, seed)."""
    return sample_key(params, np.random.default_rng(seed))


def derive_public_key(key: QcKey) -> SparsePoly:
    return mul(invert(key.h0), key.h1)


def _pad(values: np.ndarray, length: int) -> np.ndarray:
    return np.pad(values, (0, length - values.size))


def filter_histograms(key: QcKey) -> np.ndarray:
    """S_0 + S_1 + Q indexed by multiplicity m."""
    top = max(key.params.d, key.h0.weight, key.h1.weight)
    s0 = gamma_histogram(multiplicities(key.h0), top)
    s1 = gamma_histogram(multiplicities(key.h1), top)
    q = np.bincount(profile_array(key.h0, key.h1), minlength=top + 1)
    length = max(s0.size, s1.size, q.size)
    return _pad(s0, length) + _pad(s1, length) + _pad(q, length)


def filter_key(key: QcKey, config: FilterConfig) -> FilterVerdict:
    if len(config.weights) < key.params.d:
        raise ConfigError(f"{len(config.weights)} weights for a filter over d={key.params.d}")
    counts = filter_histograms(key)
    weights = np.array([config.weight(m) for m in range(counts.size)], dtype=np.int64)
    scores = weights * counts
    if config.mode == FilterMode.CUM:
        total = int(scores.sum())
        return FilterVerdict(accepted=total < config.threshold, score=total)
    offending = np.flatnonzero(scores >= config.threshold)
    if offending.size:
        m = int(offending[0])
        return FilterVerdict(accepted=False, score=int(scores[m]), witness=m)
    return FilterVerdict(accepted=True, score=int(scores.max(initial=0)))


def threshold_filter(d: int, T: int) -> FilterConfig:
    """Accept iff no within-block multiplicity and no cross intersection reaches T."""
    if T < 1:
        raise ParameterError(f"Threshold T must be positive, got {T}")
    return FilterConfig.max_intersection(d, T)


def default_filter(d: int, s: int, mode: FilterMode = FilterMode.PER) -> FilterConfig:
    return FilterConfig.cycle_weights(d, s, mode)


def classify_gathering(key: QcKey, m: int, eps: int) -> bool:
    """True when some length-m window of h0 holds all but eps of its support."""
    if eps < 0:
        raise ParameterError(f"eps must be nonnegative, got {eps}")
    return gathering_weight(key.h0, m) >= key.h0.weight - eps


def weak_key_types(key: QcKey, threshold: int) -> WeakKeyProfile:
    run = max(longest_run(key.h0), longest_run(key.h1))
    single_0, single_1 = mci_single(key.h0), mci_single(key.h1)
    cross = mci_cross(key.h0, key.h1)
    profile = WeakKeyProfile(
        threshold=threshold,
        longest_run=run,
        mci_h0=single_0,
        mci_h1=single_1,
        mci_cross=cross,
        type_i=run >= threshold,
        type_ii=max(single_0, single_1) >= threshold,
        type_iii=cross >= threshold,
    )
    if profile.type_i or profile.type_ii or profile.type_iii:
        logger.debug(f"Weak key at threshold {threshold}: {profile.model_dump()}")
    return profile

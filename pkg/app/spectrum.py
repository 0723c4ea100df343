"""Distances, multiplicities and the distance-multiplicity spectrum of a polynomial.

For h of weight d in F2[x]/(x^r - 1):
    mu[delta]   number of unordered support pairs at cyclic distance delta,
    gamma[m]    number of distances delta in [1, r//2] whose multiplicity is m.
"""
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel

from app.errors import IndexOutOfRange, WindowOutOfRange
from app.gf2ring import SparsePoly, to_dense


class SpectrumReport(BaseModel):
    r: int
    d: int
    mu: Dict[int, int]
    full_spectrum: List[int]
    gamma: Dict[int, int]

    @property
    def spec(self) -> List[Tuple[int, int]]:
        return sorted(self.mu.items())


def distance(i: int, j: int, r: int) -> int:
    if not (0 <= i < r and 0 <= j < r):
        raise IndexOutOfRange(f"Positions ({i}, {j}) outside [0, {r})")
    diff = (j - i) % r
    return min(diff, r - diff)


@lru_cache(maxsize=256)
def _pair_indices(weight: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(weight, 1)


def pair_distances(h: SparsePoly) -> np.ndarray:
    """Distance of every unordered support pair, in pair order (k < l)."""
    if h.weight < 2:
        return np.zeros(0, dtype=np.int64)
    first, second = _pair_indices(h.weight)
    diff = (h.array[second] - h.array[first]) % h.r
    return np.minimum(diff, h.r - diff)


def multiplicities(h: SparsePoly) -> np.ndarray:
    """mu indexed by distance; entry 0 is always 0 (pairs never sit at distance 0)."""
    return np.bincount(pair_distances(h), minlength=h.r // 2 + 1)


def gamma_histogram(mu: np.ndarray, d: int) -> np.ndarray:
    """gamma over m in [0, d], counted on distances [1, r//2]."""
    return np.bincount(mu[1:], minlength=d + 1)[: max(d + 1, 1)]


def compute_spectrum(h: SparsePoly) -> SpectrumReport:
    mu = multiplicities(h)
    gamma = gamma_histogram(mu, h.weight)
    return SpectrumReport(
        r=h.r,
        d=h.weight,
        mu={delta: int(mu[delta]) for delta in range(1, h.r // 2 + 1)},
        full_spectrum=sorted(pair_distances(h).tolist()),
        gamma={m: int(count) for m, count in enumerate(gamma)},
    )


def mspec(report: SpectrumReport) -> List[Tuple[int, int]]:
    """(m, gamma(m)) for m in [1, d-1]; (d, gamma(d)) is appended only when it occurs."""
    pairs = [(m, report.gamma.get(m, 0)) for m in range(1, report.d)]
    if report.d >= 1 and report.gamma.get(report.d, 0) > 0:
        pairs.append((report.d, report.gamma[report.d]))
    return pairs


def gathering_weight(h: SparsePoly, m: int) -> int:
    """Largest weight of h seen through a cyclic window [a, a+m)."""
    if not 1 <= m <= h.r:
        raise WindowOutOfRange(f"Window length {m} outside [1, {h.r}]")
    dense = to_dense(h).astype(np.int64)
    running = np.concatenate(([0], np.cumsum(np.concatenate((dense, dense)))))
    starts = np.arange(h.r)
    return int((running[starts + m] - running[starts]).max())


def longest_run(h: SparsePoly) -> int:
    """Longest cyclic run of consecutive exponents in the support."""
    if h.weight in (0, h.r):
        return h.weight
    present = set(h.support)
    best = 0
    for e in h.support:
        if (e - 1) % h.r in present:
            continue
        length = 1
        while (e + length) % h.r in present:
            length += 1
        best = max(best, length)
    return best

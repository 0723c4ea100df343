"""Closed-form 4-cycle counts for quasi-cyclic parity-check matrices.

A 4-cycle is a pair of columns sharing two checks. Inside one circulant block the
number of checks shared by two columns only depends on their cyclic distance, so
the count reduces to the multiplicity spectrum; across blocks it reduces to the
intersection profile c_k = |supp(h0) & supp(x^k h1)|.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, log
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel
from scipy.special import gammaln

from app.config import logger
from app.errors import DomainError, IndexOutOfRange, InvalidGrid, MismatchedModulus, SameIndex
from app.gf2ring import SparsePoly, from_support, to_dense
from app.spectrum import distance, gamma_histogram, multiplicities

# exact integer binomials up to this many bits in the denominator, log-gamma above
_EXACT_BITS = 200_000


@dataclass(frozen=True)
class GeneralQcMatrix:
    """c x n0 grid of circulant blocks, all over the same r."""

    r: int
    blocks: tuple[tuple[SparsePoly, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(row) for row in self.blocks)
        if not blocks or not blocks[0]:
            raise InvalidGrid("Block grid must have at least one row and one column")
        width = len(blocks[0])
        for i, row in enumerate(blocks):
            if len(row) != width:
                raise InvalidGrid(f"Block row {i} has {len(row)} blocks, expected {width}")
            for block in row:
                if block.r != self.r:
                    raise InvalidGrid(f"Block over r={block.r} in a grid over r={self.r}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def c(self) -> int:
        return len(self.blocks)

    @property
    def n0(self) -> int:
        return len(self.blocks[0])

    def block(self, i: int, j: int) -> SparsePoly:
        if not (0 <= i < self.c and 0 <= j < self.n0):
            raise IndexOutOfRange(f"Block ({i}, {j}) outside {self.c}x{self.n0} grid")
        return self.blocks[i][j]

    @classmethod
    def from_supports(cls, r: int, supports: Sequence[Sequence[Sequence[int]]]):
        return cls(r, tuple(tuple(from_support(r, s) for s in row) for row in supports))

    @classmethod
    def bike(cls, h0: SparsePoly, h1: SparsePoly):
        if h0.r != h1.r:
            raise MismatchedModulus(h0.r, h1.r)
        return cls(h0.r, ((h0, h1),))


class PairCount(BaseModel):
    fixed: int
    first: int
    second: int
    count: int


class CycleCensus(BaseModel):
    r: int
    within: List[List[int]]
    cross_row: List[PairCount]
    cross_col: List[PairCount]
    cross_quad: int
    total: int
    oracle: Optional[int] = None

    @property
    def within_total(self) -> int:
        return sum(sum(row) for row in self.within)

    @property
    def cross_row_total(self) -> int:
        return sum(p.count for p in self.cross_row)

    @property
    def cross_col_total(self) -> int:
        return sum(p.count for p in self.cross_col)


def _pairs(values: np.ndarray) -> int:
    values = values.astype(np.int64)
    return int((values * (values - 1) // 2).sum())


# single circulant


def column_intersection(h: SparsePoly, i: int, j: int) -> int:
    """Checks shared by columns i and j of the circulant of h."""
    if i == j:
        raise SameIndex(f"Column {i} compared with itself")
    delta = distance(i, j, h.r)
    mu = multiplicities(h)
    # at the antipode both orientations of a pair land on the same column
    if h.r % 2 == 0 and delta == h.r // 2:
        return 2 * int(mu[delta])
    return int(mu[delta])


def _column_overlaps(mu: np.ndarray, r: int) -> np.ndarray:
    overlaps = mu[1:].astype(np.int64)
    if r % 2 == 0 and overlaps.size:
        overlaps[-1] *= 2
    return overlaps


def mci_single(h: SparsePoly) -> int:
    overlaps = _column_overlaps(multiplicities(h), h.r)
    return int(overlaps.max()) if overlaps.size else 0


def count_within(h: SparsePoly) -> int:
    mu = multiplicities(h)
    r = h.r
    if r % 2 == 1:
        return r * _pairs(mu[1:])
    half = r // 2
    antipodal = 2 * int(mu[half])
    return r * _pairs(mu[1:half]) + half * comb(antipodal, 2)


def count_within_via_gamma(h: SparsePoly) -> int:
    """Same count as count_within, read off the gamma histogram."""
    mu = multiplicities(h)
    gamma = gamma_histogram(mu, h.weight)
    m = np.arange(gamma.size, dtype=np.int64)
    total = h.r * int((gamma * (m * (m - 1) // 2)).sum())
    if h.r % 2 == 0:
        antipodal = int(mu[h.r // 2])
        total += (h.r // 2) * comb(2 * antipodal, 2) - h.r * comb(antipodal, 2)
    return total


# two blocks


def profile_array(h0: SparsePoly, h1: SparsePoly) -> np.ndarray:
    if h0.r != h1.r:
        raise MismatchedModulus(h0.r, h1.r)
    diffs = (h0.array[:, None] - h1.array[None, :]) % h0.r
    return np.bincount(diffs.ravel(), minlength=h0.r)


def cross_profile(h0: SparsePoly, h1: SparsePoly) -> List[int]:
    """c_k = |supp(h0) & supp(x^k h1)| for k in [0, r)."""
    return profile_array(h0, h1).tolist()


def mci_cross(h0: SparsePoly, h1: SparsePoly) -> int:
    return int(profile_array(h0, h1).max())


def mri_cross(h: SparsePoly, h_other: SparsePoly) -> int:
    """Largest row intersection between two circulants stacked in one block column."""
    return int(profile_array(h, h_other).max())


def count_cross(h0: SparsePoly, h1: SparsePoly) -> int:
    return h0.r * _pairs(profile_array(h0, h1))


def count_cross_rows(h: SparsePoly, h_other: SparsePoly) -> int:
    """4-cycles between vertically adjacent blocks; row m and row m' overlap in r_{m'-m}."""
    return h.r * _pairs(profile_array(h, h_other))


def count_quad(a: SparsePoly, b: SparsePoly, c: SparsePoly, e: SparsePoly) -> int:
    """4-cycles through all four blocks of [[a, b], [c, e]].

    Counted by enumerating the cycles whose first check is row 0 of a and
    multiplying by r.
    """
    r = a.r
    for other in (b, c, e):
        if other.r != r:
            raise MismatchedModulus(r, other.r)
    if min(a.weight, b.weight, c.weight, e.weight) == 0:
        return 0
    lookup = to_dense(e).astype(bool)
    # n in supp(a), n' in supp(b), m' = n - c_elem; closed when n' - m' in supp(e)
    idx = (b.array[None, :, None] - a.array[:, None, None] + c.array[None, None, :]) % r
    return r * int(lookup[idx].sum())


def count_total_bike(h0: SparsePoly, h1: SparsePoly) -> int:
    return count_within(h0) + count_within(h1) + count_cross(h0, h1)


def census_general(matrix: GeneralQcMatrix) -> CycleCensus:
    c, n0 = matrix.c, matrix.n0
    within = [[count_within(matrix.block(i, j)) for j in range(n0)] for i in range(c)]
    cross_row = [
        PairCount(fixed=i, first=j, second=k, count=count_cross(matrix.block(i, j), matrix.block(i, k)))
        for i in range(c)
        for j in range(n0)
        for k in range(j + 1, n0)
    ]
    cross_col = [
        PairCount(fixed=j, first=i, second=k, count=count_cross_rows(matrix.block(i, j), matrix.block(k, j)))
        for j in range(n0)
        for i in range(c)
        for k in range(i + 1, c)
    ]
    quad = sum(
        count_quad(matrix.block(i, j), matrix.block(i, k), matrix.block(ip, j), matrix.block(ip, k))
        for i in range(c)
        for ip in range(i + 1, c)
        for j in range(n0)
        for k in range(j + 1, n0)
    )
    total = (
        sum(map(sum, within))
        + sum(p.count for p in cross_row)
        + sum(p.count for p in cross_col)
        + quad
    )
    logger.debug(f"Census of {c}x{n0} grid over r={matrix.r}: {total} 4-cycles")
    return CycleCensus(
        r=matrix.r,
        within=within,
        cross_row=cross_row,
        cross_col=cross_col,
        cross_quad=quad,
        total=total,
    )


def bike_census(h0: SparsePoly, h1: SparsePoly) -> CycleCensus:
    return census_general(GeneralQcMatrix.bike(h0, h1))


def girth6_bound(matrix: GeneralQcMatrix) -> int:
    """Lower bound on r for any choice of supports with these block weights to be 4-cycle free."""
    weights = np.array([[block.weight for block in row] for row in matrix.blocks], dtype=np.int64)
    pairs = weights * (weights - 1) // 2
    by_row = int(2 * pairs.sum(axis=1).max())
    by_col = int(2 * pairs.sum(axis=0).max())
    by_row_pair = 0
    for i in range(matrix.c):
        for k in range(i + 1, matrix.c):
            by_row_pair = max(by_row_pair, int((weights[i] * weights[k]).sum()))
    return max(by_row, by_col, by_row_pair)


# probabilities for a random weight-d support


def _log_comb(n: int, k: int) -> float:
    if n < 0 or k < 0 or k > n:
        return float("-inf")
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def _check_domain(r: int, d: int):
    if r < 1 or not 1 <= d <= r:
        raise DomainError(f"Need 1 <= d <= r, got r={r}, d={d}")


def prob_multiplicity(r: int, d: int, m: int) -> float:
    """P(mu(delta) = m) for a fixed distance delta coprime to r and a uniform weight-d support.

    Stepping by delta walks the whole cycle, so mu(delta) = d - (number of runs).
    """
    _check_domain(r, d)
    if not 0 <= m < d:
        raise DomainError(f"Multiplicity {m} outside [0, {d})")
    runs = d - m
    if r - d - 1 < runs - 1:
        return 0.0
    if comb(r, d).bit_length() <= _EXACT_BITS:
        num = r * comb(d - 1, runs - 1) * comb(r - d - 1, runs - 1)
        return num / (runs * comb(r, d))
    logp = (
        log(r)
        + _log_comb(d - 1, runs - 1)
        + _log_comb(r - d - 1, runs - 1)
        - log(runs)
        - _log_comb(r, d)
    )
    return float(np.exp(logp))


def prob_max_below(r: int, d: int, m: int, tail: bool = False) -> float:
    """Approximate P(mu(delta) < m for every distance) as (1 - pi_m)^floor(r/2).

    pi_m is P(mu = m) by default; tail=True uses P(mu >= m) instead.
    """
    _check_domain(r, d)
    if not 1 <= m <= d:
        raise DomainError(f"Multiplicity bound {m} outside [1, {d}]")
    if tail:
        pi = sum(prob_multiplicity(r, d, k) for k in range(m, d))
    else:
        pi = prob_multiplicity(r, d, m) if m < d else 0.0
    if pi >= 1.0:
        return 0.0
    return float(np.exp((r // 2) * np.log1p(-pi)))


def fourcycle_free_feasible(r: int, d: int) -> bool:
    """Enough distances for every pair of both supports to sit at its own distance."""
    if r < 1 or d < 1:
        raise DomainError(f"Need positive r and d, got r={r}, d={d}")
    return r // 2 >= 2 * comb(d, 2)


def fourcycle_free_feasible_simplified(r: int, d: int) -> bool:
    if r < 1 or d < 1:
        raise DomainError(f"Need positive r and d, got r={r}, d={d}")
    return r > 2 * d * d


def max_fourcycle_free_d(r: int) -> int:
    d = 1
    while fourcycle_free_feasible(r, d + 1):
        d += 1
    return d

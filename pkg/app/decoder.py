"""Syndromes and a Black-Gray-Flip bit-flipping decoder for QC-MDPC keys.

Column j < r of H = [H0 | H1] has support {(j - e) mod r : e in h0}; column r + j the
same with h1. Counters and syndrome updates are gathered through those column
index tables, so one iteration costs O(r * d).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.errors import LengthMismatch, ParameterError
from app.gf2ring import SparsePoly, from_dense, to_dense
from app.keys import QcKey
from app.models import DecoderConfig
from app.utils.rng import sample_support


@dataclass(frozen=True)
class ErrorVector:
    length: int
    support: tuple[int, ...]

    def __post_init__(self):
        support = tuple(int(e) for e in self.support)
        if any(b <= a for a, b in zip(support, support[1:])):
            raise ParameterError("Error support must be strictly increasing")
        if support and (support[0] < 0 or support[-1] >= self.length):
            raise ParameterError(f"Error support leaves [0, {self.length})")
        object.__setattr__(self, "support", support)

    @property
    def weight(self) -> int:
        return len(self.support)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.length, dtype=np.uint8)
        dense[list(self.support)] = 1
        return dense

    @classmethod
    def from_dense(cls, bits) -> ErrorVector:
        bits = np.asarray(bits)
        return cls(bits.size, tuple(np.flatnonzero(bits & 1).tolist()))

    @classmethod
    def random(cls, length: int, t: int, rng: np.random.Generator) -> ErrorVector:
        return cls(length, tuple(sample_support(rng, length, t).tolist()))


@dataclass
class DecodeResult:
    success: bool
    iterations: int
    error: Optional[ErrorVector] = None
    residual_weight: int = 0


class _ColumnTables:
    """Check indices of every column of H, one (r, d) table per block."""

    def __init__(self, key: QcKey):
        self.r = key.params.r
        rows = np.arange(self.r, dtype=np.int64)[:, None]
        self.blocks = [(rows - h.array[None, :]) % self.r for h in (key.h0, key.h1)]

    def counters(self, state: np.ndarray) -> np.ndarray:
        return np.concatenate([state[table].sum(axis=1, dtype=np.int64) for table in self.blocks])

    def parity(self, positions: np.ndarray) -> np.ndarray:
        """Syndrome contribution of flipping the given columns."""
        low = positions[positions < self.r]
        high = positions[positions >= self.r] - self.r
        hits = np.concatenate((self.blocks[0][low].ravel(), self.blocks[1][high].ravel()))
        return (np.bincount(hits, minlength=self.r) & 1).astype(np.uint8)


def syndrome(key: QcKey, error: ErrorVector) -> SparsePoly:
    r = key.params.r
    if error.length != 2 * r:
        raise LengthMismatch(f"Error of length {error.length} for a code of length {2 * r}")
    tables = _ColumnTables(key)
    return from_dense(r, tables.parity(np.asarray(error.support, dtype=np.int64)))


def unsatisfied_counters(key: QcKey, s: SparsePoly) -> np.ndarray:
    """For each column, the number of its checks that are unsatisfied by s."""
    if s.r != key.params.r:
        raise LengthMismatch(f"Syndrome over r={s.r} for a key over r={key.params.r}")
    return _ColumnTables(key).counters(to_dense(s))


class _Decoding:
    def __init__(self, key: QcKey, s: SparsePoly):
        self.tables = _ColumnTables(key)
        self.state = to_dense(s).copy()
        self.flipped = np.zeros(2 * key.params.r, dtype=np.uint8)

    def counters(self) -> np.ndarray:
        return self.tables.counters(self.state)

    def flip(self, mask: np.ndarray):
        positions = np.flatnonzero(mask)
        if positions.size:
            self.flipped[positions] ^= 1
            self.state ^= self.tables.parity(positions)

    def done(self) -> bool:
        return not self.state.any()


def bgf_decode(key: QcKey, s: SparsePoly, config: Optional[DecoderConfig] = None) -> DecodeResult:
    """Recover a low-weight e with H e^T = s, or report failure after max_iterations."""
    if s.r != key.params.r:
        raise LengthMismatch(f"Syndrome over r={s.r} for a key over r={key.params.r}")
    config = config or DecoderConfig()
    d = key.params.d
    run = _Decoding(key, s)

    iteration = 0
    while not run.done() and iteration < config.max_iterations:
        iteration += 1
        tau = config.threshold(int(run.state.sum()), d)
        ctr = run.counters()
        black = ctr >= tau
        if iteration == 1:
            gray = (ctr >= tau - config.black_gray_margin) & ~black
            run.flip(black)
            masked = config.masked_for(d)
            run.flip(black & (run.counters() >= masked))
            run.flip(gray & (run.counters() >= masked))
        else:
            run.flip(black)

    if run.done():
        return DecodeResult(
            success=True, iterations=iteration, error=ErrorVector.from_dense(run.flipped)
        )
    return DecodeResult(success=False, iterations=iteration, residual_weight=int(run.state.sum()))

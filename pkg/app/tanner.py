"""Explicit Tanner graphs, used as a brute-force check on the closed-form counts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from app.config import logger
from app.cycles import GeneralQcMatrix
from app.errors import ParameterError


@dataclass(frozen=True)
class TannerGraph:
    n_vars: int
    n_checks: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n_checks:
            raise ParameterError(f"{len(self.adjacency)} adjacency lists for {self.n_checks} checks")
        adjacency = tuple(tuple(int(v) for v in row) for row in self.adjacency)
        for check, row in enumerate(adjacency):
            if any(b <= a for a, b in zip(row, row[1:])):
                raise ParameterError(f"Check {check} neighbours not strictly increasing")
            if row and (row[0] < 0 or row[-1] >= self.n_vars):
                raise ParameterError(f"Check {check} touches a variable outside [0, {self.n_vars})")
        object.__setattr__(self, "adjacency", adjacency)

    def biadjacency(self) -> sparse.csr_matrix:
        indptr = np.zeros(self.n_checks + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(row) for row in self.adjacency])
        indices = np.fromiter((v for row in self.adjacency for v in row), dtype=np.int64, count=indptr[-1])
        data = np.ones(indices.size, dtype=np.int64)
        return sparse.csr_matrix((data, indices, indptr), shape=(self.n_checks, self.n_vars))

    def to_dense(self) -> np.ndarray:
        return self.biadjacency().toarray().astype(np.uint8)


def from_dense(matrix) -> TannerGraph:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ParameterError(f"Parity-check matrix must be 2-D, got shape {matrix.shape}")
    rows = tuple(tuple(np.flatnonzero(row & 1).tolist()) for row in matrix)
    return TannerGraph(n_vars=matrix.shape[1], n_checks=matrix.shape[0], adjacency=rows)


def from_general_qc(matrix: GeneralQcMatrix) -> TannerGraph:
    """Expand the block grid; block (i, j) row m holds ones at columns (e + m) mod r."""
    r = matrix.r
    offsets = np.arange(r, dtype=np.int64)[:, None]
    adjacency = []
    for i in range(matrix.c):
        per_block = []
        for j in range(matrix.n0):
            h = matrix.block(i, j)
            cols = np.sort((h.array[None, :] + offsets) % r, axis=1) + j * r
            per_block.append(cols)
        rows = np.concatenate(per_block, axis=1)
        adjacency.extend(tuple(row) for row in rows.tolist())
    return TannerGraph(n_vars=matrix.n0 * r, n_checks=matrix.c * r, adjacency=tuple(adjacency))


def _check_overlaps(graph: TannerGraph) -> np.ndarray:
    a = graph.biadjacency()
    shared = sparse.triu(a @ a.T, k=1)
    return shared.data.astype(np.int64)


def oracle_count(graph: TannerGraph) -> int:
    """Number of 4-cycles: sum over check pairs of C(shared variables, 2)."""
    shared = _check_overlaps(graph)
    count = int((shared * (shared - 1) // 2).sum())
    logger.debug(f"Oracle over {graph.n_checks} checks x {graph.n_vars} variables: {count} 4-cycles")
    return count


def girth_at_most_4(graph: TannerGraph) -> bool:
    shared = _check_overlaps(graph)
    return bool(shared.size and shared.max() >= 2)

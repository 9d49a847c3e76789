"""Spherical embedding of a scheme with respect to one primitive idempotent.

Point ``x`` goes to the column ``sqrt(n / m_j) E_j e_x``.  Only the Gram
matrix ``(n / m_j) E_j`` is canonical.  Coordinates are reported in a fixed
gauge: the first vertex lies on the first axis, the next independent vertex
in the first coordinate plane, and so on, with positive leading coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .scheme import AdjacencySet, SchemeError
from .spectral import SpectralData
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "EmbeddingData",
    "NeighborGraph",
    "DegenerateIdempotent",
    "RankMismatch",
    "NonRegular",
    "embed",
    "max_inner_relation",
    "nearest_neighbor_graph",
]


class DegenerateIdempotent(SchemeError):
    pass


class RankMismatch(SchemeError):
    pass


class NonRegular(SchemeError):
    pass


@dataclass(frozen=True, eq=False)
class EmbeddingData:
    j: int
    m: int
    points: np.ndarray
    gram: np.ndarray
    values: tuple  # inner product on relation i, from Q[i, j] / m_j
    alpha: float
    gamma_alpha: tuple
    faithful: bool
    valencies: tuple

    @property
    def n(self):
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Pairs at the maximum inner product ``alpha``."""

    adjacency: np.ndarray  # bool, (n, n)
    valency: int
    components: tuple  # tuple of sorted vertex tuples

    @property
    def n(self):
        return self.adjacency.shape[0]

    @property
    def connected(self):
        return len(self.components) == 1

    def edges(self):
        x, y = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(x.tolist(), y.tolist()))


def _canonical_gauge(points, tol=1e-8):
    n, m = points.shape
    basis = []
    span = np.zeros((0, m))
    for x in range(n):
        v = points[x] - span.T @ (span @ points[x])
        norm = np.linalg.norm(v)
        if norm > tol:
            basis.append(x)
            span = np.vstack([span, v / norm])
            if len(basis) == m:
                break
    if len(basis) < m:
        return points
    q, r = np.linalg.qr(points[basis].T)
    q = q * np.sign(np.diag(r))
    return points @ q


def embed(A: AdjacencySet, S: SpectralData, j: int, tol: Tolerances = DEFAULT) -> EmbeddingData:
    if j == 0:
        raise DegenerateIdempotent("the embedding with respect to E_0 sends every point to one vector")
    if not 0 < j <= S.d:
        raise IndexError(f"idempotent index {j} outside 1..{S.d}")
    n, m = S.n, S.m[j]
    gram = (n / m) * S.E[j]
    w, V = np.linalg.eigh(gram)
    positive = int(np.sum(w > tol.integral))
    if positive != m:
        raise RankMismatch(f"(n/m) E_{j} has {positive} positive eigenvalues, rank is {m}")
    top = np.argsort(w)[::-1][:m]
    points = _canonical_gauge(V[:, top] * np.sqrt(w[top]))
    points.setflags(write=False)
    gram = np.array(gram)
    gram.setflags(write=False)

    values = tuple(float(v) for v in S.Q[:, j] / m)
    others = np.array(values[1:])
    alpha = float(others.max())
    gamma = tuple(int(i) + 1 for i in np.flatnonzero(np.abs(others - alpha) <= tol.gram))
    faithful = not bool(np.any(others > 1 - tol.faithful))
    return EmbeddingData(
        j=j,
        m=m,
        points=points,
        gram=gram,
        values=values,
        alpha=alpha,
        gamma_alpha=gamma,
        faithful=faithful,
        valencies=tuple(S.k),
    )


def max_inner_relation(emb: EmbeddingData):
    """``(alpha, gamma_alpha, valency of the graph (X, Gamma_alpha))``."""
    valency = sum(emb.valencies[i] for i in emb.gamma_alpha)
    return emb.alpha, emb.gamma_alpha, valency


def nearest_neighbor_graph(emb: EmbeddingData, tol: Tolerances = DEFAULT) -> NeighborGraph:
    adj = np.abs(emb.gram - emb.alpha) <= tol.gram
    np.fill_diagonal(adj, False)
    degrees = adj.sum(axis=1)
    if degrees.min() != degrees.max():
        raise NonRegular(f"Gamma_alpha degrees range over {degrees.min()}..{degrees.max()}")
    ncomp, labels = connected_components(adj, directed=False)
    comps = sorted(tuple(np.flatnonzero(labels == c).tolist()) for c in range(ncomp))
    adj.setflags(write=False)
    return NeighborGraph(adjacency=adj, valency=int(degrees[0]), components=tuple(comps))

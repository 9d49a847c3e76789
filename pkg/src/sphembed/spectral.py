"""Primitive idempotents and eigenmatrices of a symmetric scheme.

The common eigenspaces of ``A_0 .. A_d`` are separated by diagonalising one
random positive integer combination ``sum_i c_i A_i``.  Each cluster of equal
eigenvalues spans one eigenspace; its projector gives the eigenvalue row of
``P`` through traces, and the idempotents are then rebuilt inside the
Bose-Mesner algebra from ``Q = n P^-1`` so that they are exactly constant on
every relation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scheme import AdjacencySet, IntersectionTensor, SchemeError
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "SpectralData",
    "DegenerateSplit",
    "SingularP",
    "compute_idempotents",
    "eigenmatrices",
    "is_q_polynomial_for",
    "cluster_eigenvalues",
    "SEED",
    "MAX_REDRAWS",
]

SEED = 20180611
MAX_REDRAWS = 5
COEFF_RANGE = (1, 10**6)


class DegenerateSplit(SchemeError):
    """The random combination did not split into ``d + 1`` eigenspaces."""


class SingularP(SchemeError):
    pass


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Idempotents ``E[j]``, ``P[j, i]`` (eigenvalue of ``A_i`` on ``E_j``),
    ``Q[i, j]`` with ``E_j = (1/n) sum_i Q[i, j] A_i``, multiplicities and valencies."""

    E: np.ndarray  # (d + 1, n, n)
    P: np.ndarray
    Q: np.ndarray
    m: tuple
    k: tuple

    @property
    def n(self):
        return self.E.shape[1]

    @property
    def d(self):
        return len(self.m) - 1

    def rank3(self):
        """Indices ``j >= 1`` with ``m_j = 3``."""
        return [j for j in range(1, self.d + 1) if self.m[j] == 3]


def cluster_eigenvalues(w, rel_tol):
    """Split sorted eigenvalues wherever consecutive gaps exceed ``rel_tol * max|w|``."""
    w = np.asarray(w)
    scale = max(float(np.abs(w).max()), 1.0)
    breaks = np.flatnonzero(np.diff(w) > rel_tol * scale) + 1
    return np.split(np.arange(len(w)), breaks)


def _split_eigenspaces(A, d, rng, tol):
    Af = A.A.astype(np.float64)
    for _ in range(MAX_REDRAWS + 1):
        c = rng.integers(COEFF_RANGE[0], COEFF_RANGE[1], size=d + 1, endpoint=True)
        B = np.tensordot(c.astype(np.float64), Af, axes=1)
        w, V = np.linalg.eigh(B)
        clusters = cluster_eigenvalues(w, tol.eig_rel)
        if len(clusters) == d + 1:
            return [V[:, idx] for idx in clusters]
    raise DegenerateSplit(
        f"expected {d + 1} common eigenspaces, found {len(clusters)} "
        f"after {MAX_REDRAWS} redraws"
    )


def _as_integer(x, what, tol):
    r = int(round(float(x)))
    if abs(x - r) > tol:
        raise DegenerateSplit(f"{what} = {x!r} is not integral")
    return r


def compute_idempotents(
    A: AdjacencySet,
    p: IntersectionTensor | None = None,
    *,
    seed: int = SEED,
    tol: Tolerances = DEFAULT,
) -> SpectralData:
    """Primitive idempotents with ``E_0 = J/n`` first, the rest sorted by
    descending rank and then descending eigenvalue rows ``P[j, 1:]``."""
    n, d = A.n, A.d
    k = tuple(p.k) if p is not None else A.valencies
    rng = np.random.default_rng(seed)
    bases = _split_eigenspaces(A, d, rng, tol)

    Af = A.A.astype(np.float64)
    m = []
    rows = []
    for V in bases:
        # tr(A_i V V^T) = sum over columns of v^T A_i v
        tr = np.einsum("xa,ixy,ya->i", V, Af, V)
        mj = V.shape[1]
        m.append(mj)
        rows.append(tr / mj)
    m = np.array(m)
    P = np.array(rows)

    trivial = [j for j in range(d + 1) if np.allclose(P[j], k, atol=tol.integral, rtol=0)]
    if len(trivial) != 1 or m[trivial[0]] != 1:
        raise DegenerateSplit("could not identify the trivial idempotent J/n")
    t = trivial[0]
    rest = [j for j in range(d + 1) if j != t]
    rest.sort(key=lambda j: (-m[j], *(-np.round(P[j, 1:], 8))))
    order = [t] + rest
    P = P[order]
    m = m[order]
    P[0] = k
    if m.sum() != n:
        raise DegenerateSplit(f"multiplicities {m.tolist()} do not sum to {n}")

    P, Q = eigenmatrices_from(P, n, m, tol)
    # rebuild E_j inside the algebra; exact per-relation constancy
    E = np.einsum("ij,ixy->jxy", Q, Af) / n
    for j in range(d + 1):
        if _as_integer(np.trace(E[j]), f"trace of E_{j}", tol.integral) != m[j]:
            raise DegenerateSplit(f"trace of E_{j} disagrees with its rank {m[j]}")
    E.setflags(write=False)
    return SpectralData(E=E, P=P, Q=Q, m=tuple(int(x) for x in m), k=tuple(int(x) for x in k))


def eigenmatrices_from(P, n, m, tol=DEFAULT):
    """``Q = n P^-1`` with the first row of ``Q`` snapped to the multiplicities."""
    P = np.array(P, dtype=np.float64)
    try:
        Q = n * np.linalg.inv(P)
    except np.linalg.LinAlgError as exc:
        raise SingularP("eigenmatrix P is singular") from exc
    if not np.all(np.isfinite(Q)):
        raise SingularP("eigenmatrix P is singular")
    for j, mj in enumerate(m):
        if abs(Q[0, j] - mj) > tol.integral:
            raise SingularP(f"Q[0, {j}] = {Q[0, j]!r} but rank is {mj}")
    Q[0] = m
    P.setflags(write=False)
    Q.setflags(write=False)
    return P, Q


def eigenmatrices(S: SpectralData):
    """``(P, Q)`` where ``P[j, i]`` is the eigenvalue of ``A_i`` on the j-th eigenspace."""
    return S.P, S.Q


def is_q_polynomial_for(S: SpectralData, j: int, tol: float = 1e-8) -> bool:
    """True when ``Q[0, j], ..., Q[d, j]`` are pairwise distinct.

    This is the necessary condition for ``E_j`` to generate a Q-polynomial
    ordering; the full cometric structure is not checked.
    """
    col = np.sort(S.Q[:, j])
    return bool(np.all(np.diff(col) > tol))

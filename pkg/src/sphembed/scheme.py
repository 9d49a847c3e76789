"""Symmetric association schemes given as relation matrices.

A scheme on ``n`` points with ``d`` non-identity relations is stored as an
``n x n`` integer matrix whose ``(x, y)`` entry is the index of the relation
containing the pair.  Everything in this module is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SchemeError",
    "MalformedRelationMatrix",
    "NotSymmetric",
    "IdentityRelationBroken",
    "EmptyRelation",
    "NotCoherent",
    "RelationMatrix",
    "AdjacencySet",
    "IntersectionTensor",
    "validate_scheme",
    "intersection_numbers",
    "relabel_relations",
    "coherent_closure",
    "MAX_POINTS",
]

# Dense matrices throughout; larger inputs work but are slow and memory hungry.
MAX_POINTS = 10_000


class SchemeError(ValueError):
    """Base class for violations of the scheme axioms."""


class MalformedRelationMatrix(SchemeError):
    pass


class NotSymmetric(SchemeError):
    def __init__(self, x, y, forward, backward):
        self.pair = (int(x), int(y))
        super().__init__(
            f"relation matrix is not symmetric at ({x}, {y}): "
            f"entry {forward} but transposed entry {backward}"
        )


class IdentityRelationBroken(SchemeError):
    def __init__(self, x, y, value):
        self.pair = (int(x), int(y))
        if x == y:
            msg = f"diagonal entry ({x}, {x}) is {value}, expected 0"
        else:
            msg = f"off-diagonal entry ({x}, {y}) uses the identity relation 0"
        super().__init__(msg)


class EmptyRelation(SchemeError):
    def __init__(self, index, d):
        self.index = int(index)
        super().__init__(f"relation {index} of 0..{d} has no pairs")


class NotCoherent(SchemeError):
    """Some product ``A_i A_j`` is not an integer combination of the ``A_k``."""

    def __init__(self, i, j, k, entries, values):
        self.pair = (int(i), int(j))
        self.relation = int(k)
        self.entries = [tuple(map(int, e)) for e in entries]
        self.values = [int(v) for v in values]
        super().__init__(
            f"A_{i} A_{j} is not in the span of the adjacency matrices: "
            f"on relation {k} it takes values {self.values[0]} at {self.entries[0]} "
            f"and {self.values[1]} at {self.entries[1]}"
        )


@dataclass(frozen=True, eq=False)
class RelationMatrix:
    """``entries[x, y]`` is the relation index of the pair ``(x, y)``.

    ``d`` defaults to the largest entry.  Only local well-formedness (square,
    integral, within ``[0, d]``) is checked here; the scheme axioms are checked
    by :func:`validate_scheme`.
    """

    entries: np.ndarray
    d: int = None

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] == 0:
            raise MalformedRelationMatrix(f"expected a non-empty square matrix, got shape {entries.shape}")
        if not np.issubdtype(entries.dtype, np.integer):
            if not np.all(np.equal(np.mod(entries, 1), 0)):
                raise MalformedRelationMatrix("relation indices must be integers")
        entries = entries.astype(np.int64)
        d = int(entries.max()) if self.d is None else int(self.d)
        if entries.min() < 0 or entries.max() > d:
            raise MalformedRelationMatrix(f"relation indices must lie in [0, {d}]")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "d", d)

    @property
    def n(self):
        return self.entries.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RelationMatrix):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.d, self.entries.tobytes()))

    def __repr__(self):
        return f"RelationMatrix(n={self.n}, d={self.d})"


@dataclass(frozen=True, eq=False)
class IntersectionTensor:
    """Structure constants ``p[i, j, k]`` with ``A_i A_j = sum_k p[i, j, k] A_k``."""

    p: np.ndarray
    k: tuple

    @property
    def d(self):
        return self.p.shape[0] - 1

    # The helpers below read the tensor as a distance-regular graph whose
    # distance-i relation is relation i.  They are only meaningful in that case.
    def a(self, i):
        return int(self.p[1, i, i])

    def b(self, i):
        return int(self.p[1, i + 1, i]) if i < self.d else 0

    def c(self, i):
        return int(self.p[1, i - 1, i]) if i > 0 else 0

    def intersection_array(self):
        """``(b_0, ..., b_{d-1}; c_1, ..., c_d)`` under the distance reading."""
        return (
            tuple(self.b(i) for i in range(self.d)),
            tuple(self.c(i) for i in range(1, self.d + 1)),
        )


@dataclass(frozen=True, eq=False)
class AdjacencySet:
    """The 0/1 adjacency matrices ``A_0 .. A_d`` of a validated scheme."""

    A: np.ndarray  # shape (d + 1, n, n), int64
    relations: RelationMatrix = field(repr=False)

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def d(self):
        return self.A.shape[0] - 1

    @property
    def valencies(self):
        return tuple(int(a[0].sum()) for a in self.A)

    def __len__(self):
        return self.A.shape[0]

    def __getitem__(self, i):
        return self.A[i]


def _adjacency(M):
    e = M.entries
    return np.stack([(e == i).astype(np.int64) for i in range(M.d + 1)])


def _structure_constants(M, A):
    """Return ``p`` or raise :class:`NotCoherent` naming the first bad pair."""
    e = M.entries
    d = M.d
    flat = e.ravel()
    # one representative entry per relation
    reps = np.array([np.argmax(flat == k) for k in range(d + 1)])
    Af = A.astype(np.float64)
    p = np.zeros((d + 1, d + 1, d + 1), dtype=np.int64)
    for i in range(d + 1):
        for j in range(i, d + 1):
            # float matmul is exact for integer entries below 2**53
            C = np.rint(Af[i] @ Af[j]).astype(np.int64)
            coeffs = C.ravel()[reps]
            bad = C != coeffs[e]
            if bad.any():
                x, y = np.argwhere(bad)[0]
                k = e[x, y]
                rx, ry = divmod(int(reps[k]), M.n)
                raise NotCoherent(i, j, k, [(rx, ry), (x, y)], [C[rx, ry], C[x, y]])
            p[i, j] = coeffs
            p[j, i] = coeffs
    return p


def validate_scheme(M: RelationMatrix) -> AdjacencySet:
    """Check the symmetric association scheme axioms and return ``A_0 .. A_d``."""
    e = M.entries
    diag = np.diagonal(e)
    if diag.any():
        x = int(np.flatnonzero(diag)[0])
        raise IdentityRelationBroken(x, x, diag[x])
    zeros = np.argwhere(e == 0)
    off = zeros[zeros[:, 0] != zeros[:, 1]]
    if len(off):
        raise IdentityRelationBroken(off[0][0], off[0][1], 0)
    asym = np.argwhere(e != e.T)
    if len(asym):
        x, y = asym[0]
        raise NotSymmetric(x, y, e[x, y], e[y, x])
    used = np.bincount(e.ravel(), minlength=M.d + 1)
    if (used == 0).any():
        raise EmptyRelation(int(np.flatnonzero(used == 0)[0]), M.d)
    A = _adjacency(M)
    _structure_constants(M, A)
    return AdjacencySet(A=A, relations=M)


def intersection_numbers(A: AdjacencySet) -> IntersectionTensor:
    p = _structure_constants(A.relations, A.A)
    p.setflags(write=False)
    return IntersectionTensor(p=p, k=A.valencies)


def relabel_relations(M: RelationMatrix, order) -> RelationMatrix:
    """Rename relation ``i`` to ``order[i]``; ``order`` must fix 0."""
    order = np.asarray(order, dtype=np.int64)
    if sorted(order.tolist()) != list(range(M.d + 1)) or order[0] != 0:
        raise ValueError("order must be a permutation of 0..d fixing 0")
    return RelationMatrix(order[M.entries], d=M.d)


def coherent_closure(M: RelationMatrix) -> RelationMatrix:
    """Coarsest coherent configuration refining ``M`` (2-dimensional Weisfeiler-Leman).

    New relations are numbered so that each refined class keeps the relative
    order of the class it came from.  The result need not be symmetric.
    """
    e = M.entries
    n = M.n
    while True:
        colors = int(e.max()) + 1
        A = np.stack([(e == c).astype(np.float64) for c in range(colors)])
        counts = np.einsum("axz,bzy->xyab", A, A).reshape(n * n, colors * colors)
        signature = np.column_stack([e.ravel(), np.rint(counts).astype(np.int64)])
        _, inv = np.unique(signature, axis=0, return_inverse=True)
        refined = inv.reshape(n, n)
        if refined.max() == e.max():
            return RelationMatrix(refined)
        e = refined

"""The seven solids on the unit 2-sphere, their schemes, and negative controls.

Generated schemes take one relation per distinct inner product, ordered by
descending value, and are then pushed through :func:`validate_scheme`.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
import re
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .scheme import (
    NotCoherent,
    NotSymmetric,
    RelationMatrix,
    SchemeError,
    coherent_closure,
    validate_scheme,
)

__all__ = [
    "Polyhedron",
    "PolyhedronSpec",
    "CoherenceFailure",
    "UnknownName",
    "polyhedron",
    "polyhedron_spec",
    "generate",
    "generate_negative",
    "NEGATIVE_NAMES",
    "relation_matrix_from_points",
    "Fingerprint",
    "fingerprint_of_points",
    "catalog_fingerprints",
]

PHI = (1 + math.sqrt(5)) / 2
SQRT5 = math.sqrt(5)


class Polyhedron(enum.Enum):
    TETRAHEDRON = ("Tetrahedron", 4)
    OCTAHEDRON = ("Octahedron", 6)
    CUBE = ("Cube", 8)
    ICOSAHEDRON = ("Icosahedron", 12)
    CUBOCTAHEDRON = ("Cuboctahedron-[3,4,3,4]", 12)
    DODECAHEDRON = ("Dodecahedron", 20)
    ICOSIDODECAHEDRON = ("Icosidodecahedron-[3,5,3,5]", 30)

    @property
    def display(self):
        return self.value[0]

    @property
    def n(self):
        return self.value[1]

    @property
    def slug(self):
        return self.name.lower()

    def __str__(self):
        return self.display


# (valency of Gamma_alpha, alpha)
EXPECTED = {
    Polyhedron.TETRAHEDRON: (3, -1 / 3),
    Polyhedron.OCTAHEDRON: (4, 0.0),
    Polyhedron.CUBE: (3, 1 / 3),
    Polyhedron.ICOSAHEDRON: (5, 1 / SQRT5),
    Polyhedron.CUBOCTAHEDRON: (4, 0.5),
    Polyhedron.DODECAHEDRON: (3, SQRT5 / 3),
    Polyhedron.ICOSIDODECAHEDRON: (4, (1 + SQRT5) / 4),
}

_ALIASES = {
    "tetra": Polyhedron.TETRAHEDRON,
    "octa": Polyhedron.OCTAHEDRON,
    "hexahedron": Polyhedron.CUBE,
    "icosa": Polyhedron.ICOSAHEDRON,
    "[3,4,3,4]": Polyhedron.CUBOCTAHEDRON,
    "dodeca": Polyhedron.DODECAHEDRON,
    "[3,5,3,5]": Polyhedron.ICOSIDODECAHEDRON,
}


class UnknownName(KeyError):
    def __str__(self):
        return f"unknown catalog name {self.args[0]!r}"


class CoherenceFailure(SchemeError):
    """The inner-product partition of a point set is not a symmetric scheme.

    ``spec`` and ``relations`` are kept so callers can still report the
    geometry.  ``closure_symmetric`` tells whether the coherent closure of the
    partition is symmetric; when it is not, no symmetric scheme realises the
    point set as a spherical embedding.
    """

    def __init__(self, spec, relations, cause, closure):
        self.spec = spec
        self.relations = relations
        self.cause = cause
        self.closure = closure
        self.closure_symmetric = bool(np.array_equal(closure.entries, closure.entries.T))
        super().__init__(
            f"{spec.label.slug}: inner-product classes do not form a scheme ({cause}); "
            f"coherent closure has {closure.d + 1} relations and is "
            f"{'symmetric' if self.closure_symmetric else 'not symmetric'}"
        )


@dataclass(frozen=True, eq=False)
class PolyhedronSpec:
    label: Polyhedron
    vertices: np.ndarray
    expected_n: int
    expected_valency: int
    expected_alpha: float

    @property
    def gram(self):
        return self.vertices @ self.vertices.T


def polyhedron(name) -> Polyhedron:
    if isinstance(name, Polyhedron):
        return name
    key = str(name).strip().lower().replace(" ", "")
    for p in Polyhedron:
        if key in (p.slug, p.display.lower()):
            return p
    if key in _ALIASES:
        return _ALIASES[key]
    raise UnknownName(name)


def _signed(v):
    """All sign changes of the nonzero coordinates of ``v``."""
    out = set()
    for s in itertools.product((1, -1), repeat=3):
        out.add(tuple(a * b for a, b in zip(s, v)))
    return out


def _cyclic(v):
    a, b, c = v
    return [(a, b, c), (b, c, a), (c, a, b)]


def _normalize(points):
    pts = np.array(sorted(set(tuple(np.round(p, 12)) for p in points)), dtype=np.float64)
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    # deterministic vertex order
    order = np.lexsort(pts.T[::-1])[::-1]
    return pts[order]


def _raw_vertices(label):
    cube = list(itertools.product((1, -1), repeat=3))
    icosa = [w for v in _signed((0, 1, PHI)) for w in _cyclic(v)]
    if label is Polyhedron.TETRAHEDRON:
        return [p for p in cube if p[0] * p[1] * p[2] == 1]
    if label is Polyhedron.OCTAHEDRON:
        return [tuple(s * (i == k) for k in range(3)) for i in range(3) for s in (1, -1)]
    if label is Polyhedron.CUBE:
        return cube
    if label is Polyhedron.ICOSAHEDRON:
        return icosa
    if label is Polyhedron.CUBOCTAHEDRON:
        return [w for v in _signed((1, 1, 0)) for w in _cyclic(v)]
    if label is Polyhedron.DODECAHEDRON:
        return cube + [w for v in _signed((0, 1 / PHI, PHI)) for w in _cyclic(v)]
    if label is Polyhedron.ICOSIDODECAHEDRON:
        ico = _normalize(icosa)
        g = ico @ ico.T
        edge = 1 / SQRT5
        return [ico[x] + ico[y] for x, y in zip(*np.nonzero(np.triu(np.abs(g - edge) < 1e-9, 1)))]
    raise UnknownName(label)


@functools.lru_cache(maxsize=None)
def polyhedron_spec(name) -> PolyhedronSpec:
    label = polyhedron(name)
    vertices = _normalize(_raw_vertices(label))
    vertices.setflags(write=False)
    valency, alpha = EXPECTED[label]
    spec = PolyhedronSpec(label, vertices, label.n, valency, alpha)
    _check_spec(spec)
    return spec


def _check_spec(spec):
    v = spec.vertices
    assert len(v) == spec.expected_n, (spec.label, len(v))
    assert np.allclose(np.linalg.norm(v, axis=1), 1, atol=1e-12, rtol=0)
    g = np.sort(np.round(v @ v.T, 9), axis=1)
    # every vertex sees the same inner-product multiset
    assert (g == g[0]).all(), spec.label


def _cluster_values(values, tol):
    """Distinct values (descending) where neighbours closer than ``tol`` merge."""
    out = []
    for x in sorted(values, reverse=True):
        if not out or out[-1] - x > tol:
            out.append(x)
    return out


def relation_matrix_from_points(points, tol=1e-9) -> RelationMatrix:
    g = points @ points.T
    classes = _cluster_values(np.unique(g.round(12)), tol)
    e = np.full(g.shape, -1, dtype=np.int64)
    for i, c in enumerate(classes):
        e[np.abs(g - c) <= tol] = i
    if (e < 0).any():
        raise ValueError("inner products did not cluster cleanly")
    return RelationMatrix(e, d=len(classes) - 1)


def generate(name):
    """``(PolyhedronSpec, RelationMatrix)`` for one of the seven solids.

    Raises :class:`CoherenceFailure` when the inner-product classes are not a
    symmetric scheme; this happens for the icosidodecahedron, whose inner
    product 0 class splits into two mutually transposed orbitals.
    """
    spec = polyhedron_spec(name)
    M = relation_matrix_from_points(spec.vertices)
    try:
        validate_scheme(M)
    except (NotCoherent, NotSymmetric) as exc:
        raise CoherenceFailure(spec, M, exc, coherent_closure(M)) from exc
    return spec, M


# ---------------------------------------------------------------------------
# negative controls

def _cycle(l):
    a = np.arange(l)
    diff = np.abs(a[:, None] - a[None, :])
    return np.minimum(diff, l - diff)


def _hamming(n, q):
    words = np.array(list(itertools.product(range(q), repeat=n)))
    return (words[:, None, :] != words[None, :, :]).sum(axis=2)


def _pairs(v):
    return [frozenset(s) for s in itertools.combinations(range(v), 2)]


def _johnson(v, k):
    sets = [frozenset(s) for s in itertools.combinations(range(v), k)]
    return np.array([[k - len(a & b) for b in sets] for a in sets])


def _petersen():
    # Kneser graph K(5, 2): disjoint pairs adjacent, meeting pairs at distance 2
    sets = _pairs(5)
    return np.array([[0 if a == b else (1 if not a & b else 2) for b in sets] for a in sets])


def _group_divisible(groups, size):
    g = np.repeat(np.arange(groups), size)
    e = np.where(g[:, None] == g[None, :], 1, 2)
    np.fill_diagonal(e, 0)
    return e


_NEGATIVE_BUILDERS = {f"C{l}": functools.partial(_cycle, l) for l in range(3, 13)}
_NEGATIVE_BUILDERS.update(
    {
        "Petersen": _petersen,
        "H(2,2)": functools.partial(_hamming, 2, 2),
        "H(4,2)": functools.partial(_hamming, 4, 2),
        "J(5,2)": functools.partial(_johnson, 5, 2),
        "K2": lambda: np.array([[0, 1], [1, 0]]),
        # two groups of three points
        "GD(2,3)": functools.partial(_group_divisible, 2, 3),
    }
)
NEGATIVE_NAMES = tuple(_NEGATIVE_BUILDERS)


def _negative_key(name):
    key = re.sub(r"\s+", "", str(name)).lower()
    for known in NEGATIVE_NAMES:
        if known.lower() == key:
            return known
    raise UnknownName(name)


def generate_negative(name) -> RelationMatrix:
    return RelationMatrix(_NEGATIVE_BUILDERS[_negative_key(name)]())


# ---------------------------------------------------------------------------
# fingerprints used by the classifier

@dataclass(frozen=True, eq=False)
class Fingerprint:
    n: int
    valency: int
    values: tuple  # ((inner product, count over ordered pairs x != y), ...) descending
    graph: nx.Graph

    def matches(self, other, tol=1e-6):
        if (self.n, self.valency, len(self.values)) != (other.n, other.valency, len(other.values)):
            return False
        return all(
            c1 == c2 and abs(v1 - v2) <= tol
            for (v1, c1), (v2, c2) in zip(self.values, other.values)
        )


def fingerprint_of_gram(gram, alpha, tol=1e-9):
    n = gram.shape[0]
    off = gram[~np.eye(n, dtype=bool)]
    values = []
    for c in _cluster_values(off, tol):
        values.append((float(c), int(np.sum(np.abs(off - c) <= tol))))
    adj = np.abs(gram - alpha) <= tol
    np.fill_diagonal(adj, False)
    graph = nx.from_numpy_array(adj.astype(int))
    valency = int(adj.sum(axis=1)[0])
    return Fingerprint(n=n, valency=valency, values=tuple(values), graph=graph)


def fingerprint_of_points(points, tol=1e-9):
    gram = points @ points.T
    n = gram.shape[0]
    alpha = gram[~np.eye(n, dtype=bool)].max()
    return fingerprint_of_gram(gram, alpha, tol)


@functools.lru_cache(maxsize=None)
def catalog_fingerprints():
    return {p: fingerprint_of_points(polyhedron_spec(p).vertices) for p in Polyhedron}

"""Classification of schemes with a faithful spherical embedding in R^3.

For every rank-3 idempotent the embedding is built and the case analysis is
run in order: faithfulness, antipodal valency-1 relations, polygon valency-2
relations, the valency bound on the maximum inner product graph, a single
relation realising ``alpha``, and finally a catalog match of a connected
``Gamma_alpha`` graph.  A scheme is accepted if any rank-3 idempotent yields a
match.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .catalog import Polyhedron, catalog_fingerprints, fingerprint_of_gram, generate_negative
from .embedding import EmbeddingData, NeighborGraph, embed, max_inner_relation, nearest_neighbor_graph
from .scheme import AdjacencySet, RelationMatrix, intersection_numbers, validate_scheme
from .spectral import SpectralData, compute_idempotents
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "RejectReason",
    "Rejection",
    "ClassificationResult",
    "AntipodalFinding",
    "PolygonReport",
    "ClassifierError",
    "FaithfulnessContradiction",
    "ProfileMismatch",
    "UnequalCycleLengths",
    "DistanceRelationSplit",
    "NotCoprimeT",
    "TNotOne",
    "NotCoplanar",
    "check_valency_one",
    "analyze_valency_two",
    "exclude_valency_two_in_S2",
    "component_fingerprint",
    "judge_embedding",
    "classify_m1_3",
    "MAX_VALENCY",
]

# bound on the valency of Gamma_alpha for a faithful embedding on S^2
MAX_VALENCY = 5


class RejectReason(enum.Enum):
    # declaration order is pipeline depth; the deepest reason over all
    # rank-3 idempotents is reported
    NO_RANK3 = "NoRank3Idempotent"
    UNFAITHFUL = "Unfaithful"
    VALENCY_ONE = "ValencyOneAntipodalPair"
    VALENCY_TWO = "ValencyTwoExcluded"
    VALENCY_BOUND = "ValencyBoundExceeded"
    COMPONENT_MISMATCH = "ComponentMismatch"
    DISCONNECTED = "Disconnected"

    @property
    def depth(self):
        return list(RejectReason).index(self)

    def __str__(self):
        return self.value


class ClassifierError(ValueError):
    pass


class FaithfulnessContradiction(ClassifierError):
    pass


class ProfileMismatch(ClassifierError):
    """Inner products disagree with the values forced by the relation structure."""


class UnequalCycleLengths(ClassifierError):
    pass


class DistanceRelationSplit(ClassifierError):
    pass


class NotCoprimeT(ClassifierError):
    pass


class TNotOne(ClassifierError):
    pass


class NotCoplanar(ClassifierError):
    pass


@dataclass(frozen=True)
class Rejection:
    reason: RejectReason
    detail: str = ""


@dataclass(frozen=True)
class ClassificationResult:
    verdict: Polyhedron | None
    reason: RejectReason | None
    n: int
    j: int | None = None
    alpha: float | None = None
    witness: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if (self.verdict is None) == (self.reason is None):
            raise ValueError("exactly one of verdict and reason must be set")
        if self.verdict is not None and self.verdict.n != self.n:
            raise ValueError(f"{self.verdict} has {self.verdict.n} vertices, scheme has {self.n}")

    @property
    def rejected(self):
        return self.verdict is None

    @property
    def label(self):
        return f"REJECTED:{self.reason}" if self.rejected else self.verdict.display

    def to_line(self, input_id):
        j = "-" if self.j is None else self.j
        if self.alpha is None:
            alpha = "-"
        else:
            alpha = f"{0.0 if abs(self.alpha) < 1e-14 else self.alpha:.12g}"
        return f"{input_id} {self.label} n={self.n} j={j} alpha={alpha}"

    def to_dict(self):
        return {
            "verdict": None if self.verdict is None else self.verdict.name,
            "reason": None if self.reason is None else self.reason.value,
            "n": self.n,
            "j": self.j,
            "alpha": self.alpha,
            "witness": self.witness,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            verdict=None if data["verdict"] is None else Polyhedron[data["verdict"]],
            reason=None if data["reason"] is None else RejectReason(data["reason"]),
            n=data["n"],
            j=data["j"],
            alpha=data["alpha"],
            witness=data.get("witness", {}),
        )


@dataclass(frozen=True)
class AntipodalFinding:
    relation: int
    value: float
    partner: tuple  # partner[x] is the antipode of x
    two_point: bool  # the scheme is {R_0, R_r} with r in Gamma_alpha, forcing |X| = 2


@dataclass(frozen=True)
class PolygonReport:
    ell: int
    t: int
    components: int
    coplanarity_defect: float
    gcd: int
    cycles: tuple
    profile: tuple  # inner product at cycle distance i = 1 .. ell // 2
    distance_relations: tuple  # scheme relation realising cycle distance i


# ---------------------------------------------------------------------------
# valency 1

def check_valency_one(A: AdjacencySet, S: SpectralData, emb: EmbeddingData, r: int,
                      tol: Tolerances = DEFAULT) -> AntipodalFinding:
    if S.k[r] != 1:
        raise ValueError(f"relation {r} has valency {S.k[r]}, expected 1")
    v = emb.values[r]
    if v > 1 - tol.faithful:
        raise FaithfulnessContradiction(
            f"relation {r} has inner product {v!r}: the embedding identifies paired points"
        )
    if abs(v + 1) > tol.gram:
        raise ProfileMismatch(f"valency-1 relation {r} has inner product {v!r}, expected -1")
    partner = tuple(int(y) for y in A[r].argmax(axis=1))
    two_point = S.d == 1 and r in emb.gamma_alpha
    return AntipodalFinding(relation=r, value=v, partner=partner, two_point=two_point)


# ---------------------------------------------------------------------------
# valency 2

def _cycles(adj):
    n = adj.shape[0]
    nbrs = [np.flatnonzero(adj[x]).tolist() for x in range(n)]
    seen = np.zeros(n, dtype=bool)
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        prev, cur = start, min(nbrs[start])
        while cur != start:
            cyc.append(cur)
            seen[cur] = True
            a, b = nbrs[cur]
            prev, cur = cur, (b if a == prev else a)
        cycles.append(tuple(cyc))
    return cycles


def _plane_defect(points, cycle):
    """Largest third singular value of consecutive triples along the cycle."""
    if points.shape[1] < 3:
        return 0.0
    ell = len(cycle)
    worst = 0.0
    for a in range(ell):
        tri = points[[cycle[a], cycle[(a + 1) % ell], cycle[(a + 2) % ell]]]
        worst = max(worst, float(np.linalg.svd(tri, compute_uv=False)[-1]))
    return worst


def analyze_valency_two(A: AdjacencySet, S: SpectralData, emb: EmbeddingData, r: int,
                        tol: Tolerances = DEFAULT, require_t_one: bool | None = None) -> PolygonReport:
    """Polygon structure of the valency-2 relation ``r``.

    ``require_t_one`` defaults to ``r in gamma_alpha``: when ``R_r`` realises
    the maximum inner product the rotation parameter must be 1.
    """
    if S.k[r] != 2:
        raise ValueError(f"relation {r} has valency {S.k[r]}, expected 2")
    if require_t_one is None:
        require_t_one = r in emb.gamma_alpha
    cycles = _cycles(A[r])
    lengths = sorted({len(c) for c in cycles})
    if len(lengths) != 1:
        raise UnequalCycleLengths(f"relation {r} has cycles of lengths {lengths}")
    ell = lengths[0]

    v = emb.values[r]
    half = ell // 2
    t = min(range(1, half + 1), key=lambda s: abs(v - math.cos(2 * math.pi * s / ell)))
    if abs(v - math.cos(2 * math.pi * t / ell)) > tol.gram:
        raise ProfileMismatch(f"inner product {v!r} on relation {r} is not cos(2 pi t / {ell})")

    # distance-i pairs inside the cycles must form exactly one scheme relation
    e = A.relations.entries
    pos = np.empty(A.n, dtype=np.int64)
    which = np.empty(A.n, dtype=np.int64)
    for c, cyc in enumerate(cycles):
        pos[list(cyc)] = np.arange(ell)
        which[list(cyc)] = c
    same = which[:, None] == which[None, :]
    gap = np.abs(pos[:, None] - pos[None, :])
    dist = np.where(same, np.minimum(gap, ell - gap), -1)
    profile = []
    distance_relations = []
    for i in range(1, half + 1):
        mask = dist == i
        rels = sorted(set(e[mask].tolist()))
        union = np.isin(e, rels)
        if not np.array_equal(union, mask):
            raise DistanceRelationSplit(f"cycle distance {i} is not a union of scheme relations")
        if len(rels) > 1:
            raise DistanceRelationSplit(f"cycle distance {i} splits into relations {rels}")
        expected = math.cos(2 * math.pi * i * t / ell)
        got = emb.values[rels[0]]
        if abs(got - expected) > tol.gram:
            raise ProfileMismatch(
                f"cycle distance {i}: inner product {got!r}, expected cos(2 pi {i} {t} / {ell}) = {expected!r}"
            )
        profile.append(got)
        distance_relations.append(rels[0])

    g = math.gcd(t, ell)
    if emb.faithful and g != 1:
        raise NotCoprimeT(f"faithful embedding with t = {t}, ell = {ell}")
    if require_t_one and t != 1:
        raise TNotOne(f"relation {r} realises alpha but has t = {t} on {ell}-gons")
    defect = max(_plane_defect(emb.points, c) for c in cycles)
    if defect > tol.coplanar:
        raise NotCoplanar(f"consecutive polygon vertices leave a plane by {defect:.3e}")
    return PolygonReport(
        ell=ell,
        t=t,
        components=len(cycles),
        coplanarity_defect=defect,
        gcd=g,
        cycles=tuple(cycles),
        profile=tuple(profile),
        distance_relations=tuple(distance_relations),
    )


def _cycle_multiplicities(ell):
    M = generate_negative(f"C{ell}")
    A = validate_scheme(M)
    return compute_idempotents(A).m


def exclude_valency_two_in_S2(report: PolygonReport, m: int) -> Rejection | None:
    """Valency-2 relations inside ``Gamma_alpha`` cannot occur on ``S^2``.

    Returns ``None`` (pass) when ``m != 3``.
    """
    if m != 3:
        return None
    if report.components == 1:
        mult = _cycle_multiplicities(report.ell) if report.ell >= 3 else (1, 1)
        # a lone polygon scheme never has a rank-3 idempotent
        assert 3 not in mult, mult
        detail = f"single {report.ell}-gon; polygon scheme multiplicities {list(mult)} have no 3"
    else:
        detail = f"{report.components} great-circle {report.ell}-gons on S^2 must intersect"
    return Rejection(RejectReason.VALENCY_TWO, detail)


# ---------------------------------------------------------------------------
# valency 3, 4, 5

def component_fingerprint(G: NeighborGraph, emb: EmbeddingData, component=None,
                          tol: Tolerances = DEFAULT) -> Polyhedron | None:
    """Catalog solid matching one component of ``Gamma_alpha``, or ``None``."""
    if emb.m != 3 or not 3 <= G.valency <= MAX_VALENCY:
        return None
    verts = list(G.components[0] if component is None else component)
    sub = emb.gram[np.ix_(verts, verts)]
    fp = fingerprint_of_gram(sub, emb.alpha, tol.gram)
    for label, ref in catalog_fingerprints().items():
        if fp.matches(ref, tol.fingerprint) and nx.is_isomorphic(fp.graph, ref.graph):
            return label
    return None


def _reject(reason, emb, witness, detail=""):
    witness = dict(witness, detail=detail) if detail else witness
    return ClassificationResult(None, reason, emb.n, emb.j, emb.alpha, witness)


def judge_embedding(A: AdjacencySet, S: SpectralData, emb: EmbeddingData,
                    tol: Tolerances = DEFAULT) -> ClassificationResult:
    """Run the case analysis on one embedding; ``emb.m`` is expected to be 3."""
    witness = {"idempotent": emb.j, "gamma_alpha": list(emb.gamma_alpha)}
    if not emb.faithful:
        collapsed = [i for i in range(1, len(emb.values)) if emb.values[i] > 1 - tol.faithful]
        return _reject(RejectReason.UNFAITHFUL, emb, dict(witness, collapsed=collapsed))

    antipodal = [r for r in range(1, S.d + 1) if S.k[r] == 1]
    for r in antipodal:
        check_valency_one(A, S, emb, r, tol)
    witness["antipodal"] = antipodal

    alpha, gamma, valency = max_inner_relation(emb)
    witness["valency"] = valency
    for r in gamma:
        if S.k[r] == 1:
            return _reject(RejectReason.VALENCY_ONE, emb, witness,
                           f"relation {r} is antipodal and realises alpha, forcing |X| = 2")
        if S.k[r] == 2:
            try:
                report = analyze_valency_two(A, S, emb, r, tol, require_t_one=True)
            except ClassifierError as exc:
                return _reject(RejectReason.VALENCY_TWO, emb, witness, f"relation {r}: {exc}")
            rejection = exclude_valency_two_in_S2(report, emb.m)
            if rejection is not None:
                return _reject(rejection.reason, emb, witness, f"relation {r}: {rejection.detail}")
    if valency > MAX_VALENCY:
        return _reject(RejectReason.VALENCY_BOUND, emb, witness)
    if len(gamma) != 1:
        return _reject(RejectReason.COMPONENT_MISMATCH, emb, witness,
                       f"alpha is realised by relations {list(gamma)}")

    G = nearest_neighbor_graph(emb, tol)
    labels = [component_fingerprint(G, emb, comp, tol) for comp in G.components]
    witness["components"] = [len(c) for c in G.components]
    if any(lab is None for lab in labels):
        return _reject(RejectReason.COMPONENT_MISMATCH, emb, witness)
    if not G.connected:
        return _reject(RejectReason.DISCONNECTED, emb, witness,
                       f"components {[str(lab) for lab in labels]}")
    return ClassificationResult(labels[0], None, emb.n, emb.j, emb.alpha, witness)


def classify_m1_3(M: RelationMatrix, tol: Tolerances = DEFAULT) -> ClassificationResult:
    """Full pipeline from a relation matrix to a solid or a structured rejection.

    Scheme-axiom violations propagate as :class:`~sphembed.scheme.SchemeError`.
    """
    A = validate_scheme(M)
    p = intersection_numbers(A)
    S = compute_idempotents(A, p, tol=tol)
    rank3 = S.rank3()
    if not rank3:
        return ClassificationResult(None, RejectReason.NO_RANK3, M.n,
                                    witness={"multiplicities": list(S.m)})
    outcomes = [judge_embedding(A, S, embed(A, S, j, tol), tol) for j in rank3]
    accepted = [o for o in outcomes if not o.rejected]
    if accepted:
        order = list(Polyhedron)
        best = min(accepted, key=lambda o: order.index(o.verdict))
    else:
        best = max(outcomes, key=lambda o: o.reason.depth)
    tried = [{"idempotent": o.j, "outcome": o.label} for o in outcomes]
    return ClassificationResult(best.verdict, best.reason, best.n, best.j, best.alpha,
                                dict(best.witness, tried=tried))

import dataclasses
import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphembed.catalog import (
    CoherenceFailure,
    Polyhedron,
    generate,
    generate_negative,
    polyhedron_spec,
)
from sphembed.classifier import (
    ClassificationResult,
    DistanceRelationSplit,
    FaithfulnessContradiction,
    NotCoplanar,
    PolygonReport,
    RejectReason,
    TNotOne,
    UnequalCycleLengths,
    analyze_valency_two,
    check_valency_one,
    classify_m1_3,
    component_fingerprint,
    exclude_valency_two_in_S2,
    judge_embedding,
)
from sphembed.embedding import EmbeddingData, embed, nearest_neighbor_graph
from sphembed.scheme import AdjacencySet, RelationMatrix, relabel_relations

from conftest import GENERABLE, pipeline, product_scheme

K4 = RelationMatrix(np.ones((4, 4), dtype=int) - np.eye(4, dtype=int))
K2 = RelationMatrix([[0, 1], [1, 0]])
K3 = RelationMatrix(np.ones((3, 3), dtype=int) - np.eye(3, dtype=int))


def embedding(M, j=None, rank=None):
    A, _, S = pipeline(M)
    if j is None:
        j = S.m.index(rank, 1)
    return A, S, embed(A, S, j)


def fake_embedding(gram, values, valencies, m=3, j=1):
    gram = np.asarray(gram, dtype=float)
    others = np.array(values[1:])
    alpha = float(others.max())
    gamma = tuple(int(i) + 1 for i in np.flatnonzero(np.abs(others - alpha) < 1e-9))
    return EmbeddingData(
        j=j, m=m, points=np.zeros((len(gram), m)), gram=gram, values=tuple(values),
        alpha=alpha, gamma_alpha=gamma, faithful=True, valencies=tuple(valencies),
    )


def stub_spectra(valencies):
    return SimpleNamespace(k=tuple(valencies), d=len(valencies) - 1)


# ---------------------------------------------------------------------------
# valency one


def test_square_antipodes():
    A, S, emb = embedding(generate_negative("C4"), rank=2)
    found = check_valency_one(A, S, emb, 2)
    assert found.value == pytest.approx(-1, abs=1e-12)
    assert found.partner == (2, 3, 0, 1)
    assert not found.two_point


def test_two_point_scheme():
    A, S, emb = embedding(K2, j=1)
    found = check_valency_one(A, S, emb, 1)
    assert found.two_point
    assert judge_embedding(A, S, emb).reason is RejectReason.VALENCY_ONE


def test_octahedron_antipodes():
    _, M = generate("octahedron")
    A, S, emb = embedding(M, j=1)
    r = S.k.index(1, 1)
    found = check_valency_one(A, S, emb, r)
    assert found.value == pytest.approx(-1, abs=1e-12)
    pts = emb.points
    np.testing.assert_allclose(pts[list(found.partner)], -pts, atol=1e-12)


def test_valency_one_on_collapsed_pair():
    _, M = generate("cube")
    A, S, emb = embedding(M, j=2)
    assert not emb.faithful
    with pytest.raises(FaithfulnessContradiction):
        check_valency_one(A, S, emb, 3)


# ---------------------------------------------------------------------------
# valency two


def test_hexagon_polygon_report():
    A, S, emb = embedding(generate_negative("C6"), rank=2)
    assert emb.alpha == pytest.approx(0.5)
    report = analyze_valency_two(A, S, emb, 1)
    assert (report.ell, report.t, report.components, report.gcd) == (6, 1, 1, 1)
    np.testing.assert_allclose(report.profile, [0.5, -0.5, -1], atol=1e-12)
    assert report.distance_relations == (1, 2, 3)


def test_pentagram_has_t_two():
    A, _, S = pipeline(generate_negative("C5"))
    j = [j for j in range(1, 3) if S.P[j, 1] < 0][0]
    emb = embed(A, S, j)
    report = analyze_valency_two(A, S, emb, 1, require_t_one=False)
    assert (report.ell, report.t) == (5, 2)
    with pytest.raises(TNotOne):
        analyze_valency_two(A, S, emb, 1, require_t_one=True)


def test_triangle():
    A, S, emb = embedding(K3, j=1)
    report = analyze_valency_two(A, S, emb, 1)
    assert (report.ell, report.t, report.components) == (3, 1, 1)


def test_polygon_leaving_its_plane():
    A, S, emb = embedding(generate_negative("C6"), rank=2)
    lifted = np.column_stack([emb.points, np.zeros(6)])
    lifted[0, 2] = 0.1
    with pytest.raises(NotCoplanar):
        analyze_valency_two(A, S, dataclasses.replace(emb, m=3, points=lifted), 1)


def test_rotated_polygon_is_coplanar():
    A, S, emb = embedding(generate_negative("C8"), rank=2)
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    lifted = np.column_stack([emb.points, np.zeros(8)]) @ q
    report = analyze_valency_two(A, S, dataclasses.replace(emb, m=3, points=lifted), 1)
    assert report.coplanarity_defect < 1e-12


def test_unequal_cycle_lengths():
    # a triangle and a square in one valency-2 relation
    e = np.full((7, 7), 2)
    for cyc in ((0, 1, 2), (3, 4, 5, 6)):
        for a in range(len(cyc)):
            x, y = cyc[a], cyc[(a + 1) % len(cyc)]
            e[x, y] = e[y, x] = 1
    np.fill_diagonal(e, 0)
    M = RelationMatrix(e)
    A = AdjacencySet(np.stack([(e == i).astype(np.int64) for i in range(3)]), M)
    emb = fake_embedding(np.eye(7), (1, 0.5, -0.1), (1, 2, 4))
    with pytest.raises(UnequalCycleLengths):
        analyze_valency_two(A, stub_spectra((1, 2, 4)), emb, 1)


def test_distance_relation_split():
    # hexagon whose antipodal pairs are spread over two relations
    e = generate_negative("C6").entries.copy()
    e[0, 3] = e[3, 0] = 4
    M = RelationMatrix(e)
    A = AdjacencySet(np.stack([(e == i).astype(np.int64) for i in range(5)]), M)
    emb = fake_embedding(np.eye(6), (1, 0.5, -0.5, -1, -1), (1, 2, 2, 1, 1), m=2)
    with pytest.raises(DistanceRelationSplit):
        analyze_valency_two(A, stub_spectra((1, 2, 2, 1, 1)), emb, 1)


def test_exclusion_only_in_dimension_three():
    A, S, emb = embedding(generate_negative("C6"), rank=2)
    report = analyze_valency_two(A, S, emb, 1)
    assert exclude_valency_two_in_S2(report, 2) is None
    rejection = exclude_valency_two_in_S2(report, 3)
    assert rejection.reason is RejectReason.VALENCY_TWO
    two = dataclasses.replace(report, components=2)
    assert exclude_valency_two_in_S2(two, 3).reason is RejectReason.VALENCY_TWO


def test_judge_rejects_lifted_polygon():
    A, _, S = pipeline(generate_negative("C7"))
    j = [j for j in range(1, 4) if abs(S.P[j, 1] - 2 * math.cos(2 * math.pi / 7)) < 1e-9][0]
    emb = embed(A, S, j)
    lifted = dataclasses.replace(emb, m=3, points=np.column_stack([emb.points, np.zeros(7)]))
    assert judge_embedding(A, S, lifted).reason is RejectReason.VALENCY_TWO


# ---------------------------------------------------------------------------
# valency three to five and the full pipeline


def icosahedron_gram():
    return polyhedron_spec("icosahedron").gram


def test_valency_bound():
    emb = fake_embedding(np.eye(8), (1, 0.2, -0.5), (1, 6, 7))
    assert judge_embedding(None, stub_spectra((1, 6, 7)), emb).reason is RejectReason.VALENCY_BOUND


def test_triangular_prism_is_not_catalogued():
    r2, h2 = 4 / 7, 3 / 7
    pts = np.array([
        (math.sqrt(r2) * math.cos(a), math.sqrt(r2) * math.sin(a), s * math.sqrt(h2))
        for s in (1, -1) for a in (0, 2 * math.pi / 3, 4 * math.pi / 3)
    ])
    gram = pts @ pts.T
    assert np.isclose(np.sort(gram[0])[-2], 1 / 7)
    emb = fake_embedding(gram, (1, 1 / 7, -5 / 7), (1, 3, 2))
    G = nearest_neighbor_graph(emb)
    assert G.valency == 3 and G.connected
    assert component_fingerprint(G, emb) is None
    assert judge_embedding(None, stub_spectra((1, 3, 2)), emb).reason is RejectReason.COMPONENT_MISMATCH


def test_two_icosahedra_are_disconnected():
    g = icosahedron_gram()
    gram = np.full((24, 24), -0.9)
    gram[:12, :12] = g
    gram[12:, 12:] = g
    emb = fake_embedding(gram, (1, 1 / math.sqrt(5), -0.9), (1, 5, 18))
    result = judge_embedding(None, stub_spectra((1, 5, 18)), emb)
    assert result.reason is RejectReason.DISCONNECTED
    assert result.witness["components"] == [12, 12]


@pytest.mark.parametrize("label", list(GENERABLE), ids=lambda p: p.slug)
def test_fingerprint_recognises_catalogue(label):
    spec = polyhedron_spec(label)
    g = spec.gram
    alpha = float(g[~np.eye(len(g), dtype=bool)].max())
    emb = fake_embedding(g, (1, alpha), (1, label.n - 1))
    assert component_fingerprint(nearest_neighbor_graph(emb), emb) is label


def test_cube_classification():
    result = classify_m1_3(GENERABLE[Polyhedron.CUBE][1])
    assert result.verdict is Polyhedron.CUBE
    assert result.alpha == pytest.approx(1 / 3, abs=1e-12)
    assert {t["outcome"] for t in result.witness["tried"]} == {"Cube", "REJECTED:Unfaithful"}


def test_petersen_has_no_rank_three():
    result = classify_m1_3(generate_negative("Petersen"))
    assert result.reason is RejectReason.NO_RANK3
    assert result.witness["multiplicities"] == [1, 5, 4]


def test_product_scheme_is_unfaithful():
    M = product_scheme(K4, K3)
    result = classify_m1_3(M)
    assert result.reason is RejectReason.UNFAITHFUL


def test_icosidodecahedron_cannot_be_generated():
    with pytest.raises(CoherenceFailure) as err:
        generate("icosidodecahedron")
    assert err.value.closure.d + 1 == 10
    assert not err.value.closure_symmetric


def test_result_validation_and_round_trip():
    with pytest.raises(ValueError):
        ClassificationResult(Polyhedron.CUBE, RejectReason.NO_RANK3, 8)
    with pytest.raises(ValueError):
        ClassificationResult(Polyhedron.CUBE, None, 6)
    r = ClassificationResult(Polyhedron.OCTAHEDRON, None, 6, 1, -3e-17, {"x": 1})
    assert r.to_line("oct") == "oct Octahedron n=6 j=1 alpha=0"
    assert ClassificationResult.from_dict(r.to_dict()) == r
    rej = ClassificationResult(None, RejectReason.DISCONNECTED, 24)
    assert rej.to_line("x") == "x REJECTED:Disconnected n=24 j=- alpha=-"


def test_reject_reasons_are_ordered():
    depths = [r.depth for r in RejectReason]
    assert depths == sorted(depths)
    assert str(RejectReason.VALENCY_TWO) == "ValencyTwoExcluded"


def permuted(M, perm):
    perm = np.asarray(perm)
    return RelationMatrix(M.entries[np.ix_(perm, perm)], d=M.d)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(list(GENERABLE)), st.randoms(use_true_random=False))
def test_verdict_invariant_under_relabelling(label, rnd):
    M = GENERABLE[label][1]
    perm = rnd.sample(range(M.n), M.n)
    order = [0] + rnd.sample(range(1, M.d + 1), M.d)
    result = classify_m1_3(relabel_relations(permuted(M, perm), order))
    assert result.verdict is label


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["C6", "Petersen", "J(5,2)", "GD(2,3)"]), st.randoms(use_true_random=False))
def test_rejection_invariant_under_relabelling(name, rnd):
    M = generate_negative(name)
    perm = rnd.sample(range(M.n), M.n)
    base = classify_m1_3(M)
    assert classify_m1_3(permuted(M, perm)).reason is base.reason

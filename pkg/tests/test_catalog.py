import itertools
import math

import networkx as nx
import numpy as np
import pytest

from sphembed.catalog import (
    EXPECTED,
    NEGATIVE_NAMES,
    CoherenceFailure,
    Polyhedron,
    UnknownName,
    generate,
    generate_negative,
    polyhedron,
    polyhedron_spec,
    relation_matrix_from_points,
)
from sphembed.scheme import intersection_numbers, validate_scheme

from conftest import GENERABLE, distance_scheme

PHI = (1 + math.sqrt(5)) / 2


def signs(v):
    nz = [i for i, x in enumerate(v) if x != 0]
    for s in itertools.product((1, -1), repeat=len(nz)):
        w = list(v)
        for i, si in zip(nz, s):
            w[i] *= si
        yield tuple(w)


def cyclic(v):
    return [v, v[1:] + v[:1], v[2:] + v[:2]]


def oracle_vertices(label):
    """Textbook coordinates, built without the package."""
    cube = list(itertools.product((1, -1), repeat=3))
    if label is Polyhedron.TETRAHEDRON:
        pts = [p for p in cube if p[0] * p[1] * p[2] == 1]
    elif label is Polyhedron.OCTAHEDRON:
        pts = [tuple(s * (i == k) for k in range(3)) for i in range(3) for s in (1, -1)]
    elif label is Polyhedron.CUBE:
        pts = cube
    elif label is Polyhedron.ICOSAHEDRON:
        pts = {w for c in cyclic((0, 1, PHI)) for w in signs(c)}
    elif label is Polyhedron.CUBOCTAHEDRON:
        pts = {w for c in cyclic((1, 1, 0)) for w in signs(c)}
    elif label is Polyhedron.DODECAHEDRON:
        pts = set(cube) | {w for c in cyclic((0, 1 / PHI, PHI)) for w in signs(c)}
    else:
        pts = {w for c in cyclic((0, 0, PHI)) for w in signs(c)}
        pts |= {w for c in cyclic((0.5, PHI / 2, PHI**2 / 2)) for w in signs(c)}
    pts = np.array(sorted(pts), dtype=float)
    return pts / np.linalg.norm(pts, axis=1)[:, None]


def inner_product_profile(points):
    g = points @ points.T
    return np.sort(g[~np.eye(len(g), dtype=bool)])


@pytest.mark.parametrize("label", list(Polyhedron), ids=lambda p: p.slug)
def test_vertices_match_oracle(label):
    spec = polyhedron_spec(label)
    oracle = oracle_vertices(label)
    assert len(oracle) == label.n == spec.expected_n
    np.testing.assert_allclose(np.linalg.norm(spec.vertices, axis=1), 1, atol=1e-12)
    np.testing.assert_allclose(inner_product_profile(spec.vertices), inner_product_profile(oracle), atol=1e-12)


@pytest.mark.parametrize("label", list(Polyhedron), ids=lambda p: p.slug)
def test_alpha_and_valency_from_oracle(label):
    oracle = oracle_vertices(label)
    g = oracle @ oracle.T
    np.fill_diagonal(g, -2)
    alpha = g.max()
    valency, expected_alpha = EXPECTED[label]
    assert abs(alpha - expected_alpha) < 1e-10
    assert set(np.sum(np.abs(g - alpha) < 1e-9, axis=1).tolist()) == {valency}
    spec = polyhedron_spec(label)
    assert spec.expected_valency == valency
    assert spec.expected_alpha == pytest.approx(expected_alpha, abs=1e-12)


def test_tetrahedron_scheme():
    spec, M = generate("tetrahedron")
    assert M.d == 1
    g = spec.gram
    assert g[M.entries == 1] == pytest.approx(-1 / 3, abs=1e-12)


def test_octahedron_scheme():
    spec, M = generate("octahedron")
    assert M.d == 2
    g = spec.gram
    assert sorted({round(float(x), 9) + 0.0 for x in g[M.entries > 0]}) == [-1.0, 0.0]


@pytest.mark.parametrize("label", list(GENERABLE), ids=lambda p: p.slug)
def test_generated_relations_are_inner_product_classes(label):
    spec, M = GENERABLE[label]
    g = spec.gram
    values = [float(g[M.entries == i][0]) for i in range(M.d + 1)]
    assert values == sorted(values, reverse=True)
    for i, v in enumerate(values):
        np.testing.assert_allclose(g[M.entries == i], v, atol=1e-9)
    validate_scheme(M)


def test_icosidodecahedron_partition():
    spec = polyhedron_spec("icosidodecahedron")
    M = relation_matrix_from_points(spec.vertices)
    assert M.d == 8
    g = spec.gram
    assert float(g[M.entries == 1][0]) == pytest.approx((1 + math.sqrt(5)) / 4, abs=1e-12)
    with pytest.raises(CoherenceFailure) as err:
        generate("icosidodecahedron")
    exc = err.value
    assert exc.relations == M
    assert not exc.closure_symmetric
    assert exc.closure.d + 1 == 10


def test_negative_names_table():
    assert set(NEGATIVE_NAMES) == {f"C{l}" for l in range(3, 13)} | {
        "Petersen", "H(2,2)", "H(4,2)", "J(5,2)", "K2", "GD(2,3)"}


def test_hexagon_distance_classes():
    M = generate_negative("C6")
    assert M.d == 3
    assert M == distance_scheme(nx.cycle_graph(6))


def test_petersen_parameters():
    M = generate_negative("petersen")
    p = intersection_numbers(validate_scheme(M))
    G = nx.petersen_graph()
    lam = {len(list(nx.common_neighbors(G, x, y))) for x, y in G.edges()}
    mu = {len(list(nx.common_neighbors(G, x, y))) for x, y in itertools.combinations(G, 2)
          if not G.has_edge(x, y)}
    assert (M.n, p.k[1], p.p[1, 1, 1], p.p[1, 1, 2]) == (10, 3, *lam, *mu) == (10, 3, 0, 1)


@pytest.mark.parametrize("name, graph", [
    ("H(2,2)", nx.hypercube_graph(2)),
    ("H(4,2)", nx.hypercube_graph(4)),
    ("C9", nx.cycle_graph(9)),
])
def test_negative_distance_schemes(name, graph):
    graph = nx.convert_node_labels_to_integers(graph)
    ours = generate_negative(name)
    oracle = distance_scheme(graph)
    assert ours.n == oracle.n and ours.d == oracle.d
    assert np.array_equal(np.sort(ours.entries, axis=1), np.sort(oracle.entries, axis=1))


def test_johnson_valencies():
    p = intersection_numbers(validate_scheme(generate_negative("J(5,2)")))
    assert p.k == (1, 6, 3)


def test_group_divisible_is_two_groups_of_three():
    M = generate_negative("GD(2,3)")
    p = intersection_numbers(validate_scheme(M))
    assert M.n == 6
    assert sorted(p.k) == [1, 2, 3]


def test_name_lookup():
    assert polyhedron("Cuboctahedron-[3,4,3,4]") is Polyhedron.CUBOCTAHEDRON
    assert polyhedron("hexahedron") is Polyhedron.CUBE
    assert polyhedron(Polyhedron.CUBE) is Polyhedron.CUBE
    assert generate_negative("h(4, 2)").n == 16
    with pytest.raises(UnknownName):
        polyhedron("rhombicosidodecahedron")
    with pytest.raises(UnknownName):
        generate_negative("C13")

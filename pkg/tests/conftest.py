import itertools

import networkx as nx
import numpy as np
import pytest

from sphembed.catalog import NEGATIVE_NAMES, CoherenceFailure, Polyhedron, generate, generate_negative
from sphembed.scheme import RelationMatrix, intersection_numbers, validate_scheme
from sphembed.spectral import compute_idempotents
from sphembed.embedding import embed


def distance_scheme(graph):
    """Distance partition of a networkx graph, independent of the catalog code."""
    D = nx.floyd_warshall_numpy(graph, nodelist=sorted(graph))
    return RelationMatrix(D.astype(int))


def product_scheme(M1, M2):
    """Direct product: relation (i, j) on pairs, numbered i * (d2 + 1) + j."""
    e1, e2 = M1.entries, M2.entries
    e = e1[:, None, :, None] * (M2.d + 1) + e2[None, :, None, :]
    n = M1.n * M2.n
    return RelationMatrix(e.reshape(n, n))


def pipeline(M):
    A = validate_scheme(M)
    p = intersection_numbers(A)
    S = compute_idempotents(A, p)
    return A, p, S


def generable():
    out = {}
    for label in Polyhedron:
        try:
            out[label] = generate(label)
        except CoherenceFailure:
            pass
    return out


GENERABLE = generable()


def corpus():
    items = {label.slug: M for label, (_, M) in GENERABLE.items()}
    items.update({name: generate_negative(name) for name in NEGATIVE_NAMES})
    return items


CORPUS = corpus()


@pytest.fixture(scope="session")
def corpus_pipelines():
    return {name: pipeline(M) for name, M in CORPUS.items()}


def embedding_for(M, j):
    A, p, S = pipeline(M)
    return A, S, embed(A, S, j)


# ---------------------------------------------------------------------------
# one PASS/FAIL line per acceptance criterion

_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        name = report.nodeid.split("::")[-1].split("[")[0].removeprefix("test_criterion_")
        ok = report.outcome == "passed"
        _CRITERIA[name] = _CRITERIA.get(name, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split("_")[0])):
        number, _, title = name.partition("_")
        status = "PASS" if _CRITERIA[name] else "FAIL"
        terminalreporter.write_line(f"criterion {number} ({title.replace('_', ' ')}): {status}")

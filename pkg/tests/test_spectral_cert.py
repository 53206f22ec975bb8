from __future__ import annotations

import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hardlab import FIXTURES
from hardlab.graph_core import MultiGraph, load_graph
from hardlab.spectral_cert import (NOT_RAMANUJAN, RAMANUJAN, PreconditionError, Violation, Witness, cut_fraction,
                                   independent_set_fraction, is_ramanujan, jacobi_eigenvalues, load_witness,
                                   psd_exact, score_pair, spectrum)


def _graph(h: nx.Graph) -> MultiGraph:
    h = nx.convert_node_labels_to_integers(h)
    return MultiGraph.from_pairs(h.number_of_nodes(), h.edges())


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)).map(lambda t: (t[0], t[0])),
              elements=st.floats(-50, 50, allow_nan=False)))
def test_jacobi_matches_lapack(a):
    sym = (a + a.T) / 2
    evals, off, _ = jacobi_eigenvalues(sym)
    ref = np.linalg.eigvalsh(sym)
    scale = max(1.0, float(np.linalg.norm(sym)))
    assert np.allclose(np.sort(evals), ref, atol=1e-9 * scale)
    assert off <= 1e-9 * scale


def test_jacobi_sorted_descending():
    evals, _, _ = jacobi_eigenvalues(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert evals[0] == pytest.approx(3.0) and evals[1] == pytest.approx(1.0)


@settings(max_examples=120, deadline=None)
@given(arrays(np.int64, st.integers(1, 6).map(lambda n: (n, n)), elements=st.integers(-4, 4)))
def test_psd_exact_agrees_with_float(b):
    # B B^T is PSD; shifting by a negative multiple of I breaks it when min eig < shift
    m = b @ b.T
    assert psd_exact(m.tolist())
    low = float(np.linalg.eigvalsh(m.astype(float))[0])
    shift = math.floor(low + 1e-6) + 1
    shifted = m - shift * np.eye(len(m), dtype=np.int64)
    assert not psd_exact(shifted.tolist())


def test_psd_exact_singular_cases():
    assert psd_exact([[0, 0], [0, 0]])
    assert not psd_exact([[0, 1], [1, 0]])
    assert psd_exact([[1, 1], [1, 1]])


@pytest.mark.parametrize("name,kind,frac", [("g4mc", "cut", Fraction(113, 124)),
                                             ("g3is", "independent_set", Fraction(17, 36)),
                                             ("g4is", "independent_set", Fraction(74, 163))])
def test_fixture_pairs_float(name, kind, frac):
    g = load_graph(FIXTURES / "avg" / f"{name}.s6")
    w = load_witness(FIXTURES / "avg" / f"{name}.witness", kind)
    rep = is_ramanujan(g, "float")
    assert rep.verdict == RAMANUJAN
    assert rep.lambda_star < rep.threshold - rep.error_bound
    assert score_pair(g, w) == frac


def test_petersen_is_ramanujan_both_modes():
    g = _graph(nx.petersen_graph())
    for mode in ("float", "exact"):
        rep = is_ramanujan(g, mode)
        assert rep.verdict == RAMANUJAN
    assert spectrum(g).eigenvalues[0] == pytest.approx(3.0)


def test_bipartite_counts_minus_d():
    g = _graph(nx.complete_bipartite_graph(3, 3))
    assert is_ramanujan(g, "float").verdict == NOT_RAMANUJAN
    assert is_ramanujan(g, "exact").verdict == NOT_RAMANUJAN
    assert score_pair(g, Witness("cut", frozenset({0, 1, 2}))) == -math.inf


def test_modes_agree_on_random_regular():
    for seed in range(25):
        h = nx.random_regular_graph(3, 16, seed=seed)
        g = _graph(h)
        assert is_ramanujan(g, "float").verdict == is_ramanujan(g, "exact").verdict


def test_preconditions():
    with pytest.raises(PreconditionError):
        is_ramanujan(MultiGraph.from_pairs(3, [(0, 1), (1, 2)]))
    assert score_pair(MultiGraph.from_pairs(3, [(0, 1), (1, 2)]), Witness("cut")) == -math.inf


def test_witness_fractions():
    g = _graph(nx.cycle_graph(6))
    assert cut_fraction(g, Witness("cut", frozenset({0, 2, 4}))) == 1
    assert independent_set_fraction(g, Witness("independent_set", frozenset({0, 2, 4}))) == Fraction(1, 2)
    bad = independent_set_fraction(g, Witness("independent_set", frozenset({0, 1})))
    assert isinstance(bad, Violation) and bad.edges == ((0, 1),)
    with pytest.raises(ValueError):
        cut_fraction(g, Witness("cut", frozenset({9})))
    with pytest.raises(ValueError):
        Witness("clique")


def test_load_witness_rejects_duplicates(tmp_path):
    p = tmp_path / "w.witness"
    p.write_text("1 2 2\n")
    with pytest.raises(ValueError):
        load_witness(p, "cut")

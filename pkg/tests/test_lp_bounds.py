from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from hardlab.graph_core import MultiGraph
from hardlab.lp_bounds import (INDEPENDENT_SET, MAX_CUT, assemble_lp, build_tree, certify_upper_bound,
                               check_lift, enumerate_classes, export_lp, hoffman_bound, lift_distribution,
                               lift_labeling, solve_lp, walk_distribution, walk_vertex_probability, walk_window)
from hardlab.lp_solvers import INFEASIBLE, OPTIMAL


@pytest.mark.parametrize("d,L,size", [(3, 0, 1), (4, 0, 1), (4, 2, 17), (3, 4, 46), (3, 1, 4)])
def test_tree_size(d, L, size):
    tree = build_tree(d, L)
    assert len(tree.vertices) == size == sum(tree.depth_counts())


def test_walk_distribution_small():
    p = walk_distribution(3, 2)
    assert p == [Fraction(1, 3), 0, Fraction(2, 3)]
    per = walk_vertex_probability(3, 2)
    assert per[()] == Fraction(1, 3)
    assert all(per[a] == Fraction(1, 9) for a in per if len(a) == 2)


@pytest.mark.parametrize("d,L", [(3, 1), (3, 5), (4, 4), (5, 3)])
def test_walk_distribution_sums_to_one(d, L):
    p = walk_distribution(d, L)
    assert sum(p) == 1
    # parity: an L-step walk ends at depth of the same parity as L
    assert all(pj == 0 for j, pj in enumerate(p) if (j - L) % 2)


# ---- brute-force oracle for the labeling classes

def _parent(a):
    return a[:-1]


def _edges(tree):
    return [(_parent(a), a) for a in tree.vertices if a]


def _subtree(tree, v):
    return [a for a in tree.vertices if a[:len(v)] == v]


def _score(mode, lab, verts, edges):
    if mode == MAX_CUT:
        return sum(1 for u, w in edges if lab[u] != lab[w])
    if any(lab[u] == lab[w] == 1 for u, w in edges):
        return None
    return sum(1 for a in verts if lab[a] == 1)


def _locally_optimal(tree, lab, mode):
    for v in tree.vertices:
        if len(v) == tree.L:
            continue
        verts = _subtree(tree, v)
        internal = [a for a in verts if len(a) < tree.L]
        edges = [(u, w) for u, w in _edges(tree) if u in verts and w in verts]
        cur = _score(mode, lab, verts, edges)
        for alt in itertools.product((1, -1), repeat=len(internal)):
            trial = dict(lab)
            trial.update(zip(internal, alt))
            s = _score(mode, trial, verts, edges)
            if s is not None and s > cur:
                return False
    return True


def _brute(d, L, mode, pruned):
    tree = build_tree(d, L)
    out = []
    for labs in itertools.product((1, -1), repeat=len(tree.vertices)):
        lab = dict(zip(tree.vertices, labs))
        if mode == INDEPENDENT_SET and _score(mode, lab, tree.vertices, _edges(tree)) is None:
            continue
        if pruned and not _locally_optimal(tree, lab, mode):
            continue
        out.append(lab)
    return out


@pytest.mark.parametrize("mode", [MAX_CUT, INDEPENDENT_SET])
@pytest.mark.parametrize("pruned", [True, False])
def test_classes_partition_all_labelings(mode, pruned):
    system = enumerate_classes(3, 2, mode, pruned)
    brute = _brute(3, 2, mode, pruned)
    assert sum(c.orbit for c in system.classes) == len(brute)
    counts = {}
    for lab in brute:
        cid = system.classify(lab)
        assert cid is not None
        counts[cid] = counts.get(cid, 0) + 1
    assert counts == {i: c.orbit for i, c in enumerate(system.classes)}


@pytest.mark.parametrize("d,L,mode", [(3, 2, MAX_CUT), (4, 2, MAX_CUT), (3, 3, INDEPENDENT_SET), (3, 1, MAX_CUT)])
def test_expand_classify_and_coefficients(d, L, mode):
    system = enumerate_classes(d, L, mode)
    walk = system.walk_correlation()
    wp = walk_vertex_probability(d, L)
    for i in range(len(system)):
        lab = system.expand(i)
        assert system.classify(lab) == i
        root = lab[()]
        assert Fraction(root) == system.classes[i].label
        nbr = Fraction(sum(root * lab[(q,)] for q in range(d)), d)
        assert system.neighbor_correlation()[i] == nbr
        assert walk[i] == sum(wp[a] * root * lab[a] for a in lab)
        if mode == MAX_CUT:
            assert system.objective_coefficients()[i] == Fraction(sum(1 for q in range(d) if lab[(q,)] != root), d)


def test_known_class_counts():
    assert len(enumerate_classes(4, 2, MAX_CUT)) == 44
    assert len(enumerate_classes(3, 4, INDEPENDENT_SET)) == 1771


def test_walk_window_single_alpha():
    lam = 2 * math.sqrt(2)
    rho = lam / 3
    assert walk_window(0.0, 0.0, rho, 1) == pytest.approx((-rho, rho))
    system = enumerate_classes(3, 1, MAX_CUT)
    lp = assemble_lp(system, Fraction(1, 2), 0, lam)
    assert lp.walk_window == pytest.approx((-rho, rho))
    lo, hi = walk_window(-0.5, 0.2, 0.1, 2)
    assert lo == 0.0 and hi == pytest.approx(0.25 + 0.1 * 0.75)


def test_l0_feasible_everywhere():
    system = enumerate_classes(4, 0, INDEPENDENT_SET)
    for a in (0, Fraction(1, 4), Fraction(1, 2), 1):
        assert solve_lp(assemble_lp(system, a, Fraction(1, 1000), 3.0)).status == OPTIMAL
    with pytest.raises(ValueError):
        assemble_lp(enumerate_classes(4, 0, MAX_CUT), Fraction(1, 2), 0, 3.0)


@pytest.mark.parametrize("d,mode", [(3, MAX_CUT), (4, MAX_CUT), (3, INDEPENDENT_SET), (4, INDEPENDENT_SET)])
def test_hoffman_recovered_at_radius_one(d, mode):
    r = certify_upper_bound(d, 1, mode)
    assert abs(float(r.bound) - hoffman_bound(d, mode)) <= 0.002


def test_longer_radius_is_no_worse():
    assert certify_upper_bound(4, 2).bound <= certify_upper_bound(4, 1).bound
    assert certify_upper_bound(3, 2, INDEPENDENT_SET).bound <= certify_upper_bound(3, 1, INDEPENDENT_SET).bound


def test_is_bound_infeasible_above():
    r = certify_upper_bound(3, 1, INDEPENDENT_SET)
    system = enumerate_classes(3, 1, INDEPENDENT_SET)
    lam = 2 * math.sqrt(2) + 1e-5
    assert solve_lp(assemble_lp(system, r.arg_alpha, r.delta, lam)).status == OPTIMAL
    assert solve_lp(assemble_lp(system, r.arg_alpha + 2 * r.delta, r.delta, lam)).status == INFEASIBLE


def test_lp_three_ways(tmp_path):
    highspy = pytest.importorskip("highspy")
    system = enumerate_classes(4, 2, MAX_CUT)
    lp = assemble_lp(system, Fraction(1, 2), Fraction(1, 2000), 2 * math.sqrt(3) + 1e-5)
    via_scipy = solve_lp(lp, "highs").objective
    via_simplex = solve_lp(lp, "simplex").objective
    via_exact = float(solve_lp(lp, "exact").objective)
    path = tmp_path / "lp.lp"
    export_lp(lp, path)
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.readModel(str(path))
    h.run()
    via_file = h.getInfo().objective_function_value
    for v in (via_simplex, via_exact, via_file):
        assert v == pytest.approx(via_scipy, abs=1e-7)


def _k4():
    return MultiGraph.from_pairs(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def test_lift_of_k4():
    g = _k4()
    labels = [1, -1, 1, -1]
    system = enumerate_classes(3, 2, MAX_CUT, pruned=False)
    canon, lost = lift_distribution(g, labels, system)
    full, lost2 = lift_distribution(g, labels, system, exhaustive=True)
    assert canon == full and lost == lost2 == 0
    assert sum(canon.values()) == 1
    ball = lift_labeling(g, labels, 0, 2)
    assert len(ball) == 10 and ball[()] == 1
    chk = check_lift(g, labels, system)
    assert chk.feasible and chk.objective == chk.true_value == Fraction(2, 3)


def test_lift_rejects_irregular():
    g = MultiGraph.from_pairs(3, [(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        lift_distribution(g, [1, 1, 1], enumerate_classes(2, 1, MAX_CUT))


def test_certified_value_matches_round_up():
    r = certify_upper_bound(4, 2)
    assert r.classes == len(enumerate_classes(4, 2))
    assert float(r.bound) >= r.raw
    assert r.bound * 1000 == int(r.bound * 1000)
    assert np.isfinite(r.raw)

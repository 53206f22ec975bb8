from __future__ import annotations

import random
from fractions import Fraction

import pytest

from hardlab import FIXTURES
from hardlab.gadget_core import Gadget, GadgetParams, gadget_params, load_gadget
from hardlab.kcut_solver import SolverTimeout
from hardlab.reduction_calc import (LinClause, LinInstance, complete_family, completeness_assignment,
                                    compose_instance, cyclic_rotation, family_by_rotation, negation_rotation,
                                    reduction_summary, rotate_globals, summarize)


@pytest.fixture(scope="module")
def k3_family():
    i0 = load_gadget(FIXTURES / "gadgets" / "k3_I0.gad")
    i1 = load_gadget(FIXTURES / "gadgets" / "k3_I1.gad")
    return complete_family([i0, i1], 3)


def test_rotation_basics():
    g = Gadget.build(4, 1, [(1, 4, 1), (5, 8, 2), (6, 7, 3)])
    assert rotate_globals(g, [4, 5, 6, 7]) == g
    r = rotate_globals(g, cyclic_rotation(4))
    assert r.clauses == ((1, 7, 1), (4, 8, 2), (5, 6, 3))
    assert cyclic_rotation(4) == [7, 4, 5, 6]
    assert negation_rotation(3) == [4, 6, 5]
    with pytest.raises(ValueError):
        rotate_globals(g, [4, 5, 6, 8])


def test_family_completion_shapes(k3_family):
    i1 = k3_family[1]
    assert k3_family[2] == rotate_globals(i1, [4, 6, 5])
    k4 = load_gadget(FIXTURES / "gadgets" / "k4_I0.gad")
    assert complete_family([k4], 4) == family_by_rotation(k4, 4)


def test_k3_summary(k3_family):
    summ = reduction_summary(k3_family)
    assert (summ.a, summ.b, summ.ratio) == (Fraction(57, 62), Fraction(55, 62), Fraction(55, 57))
    assert summ.r_perm[0] == 0
    assert "55/57" in summ.statement()
    assert summ.to_json()["ratio"] == "55/57"


def test_trivial_family():
    # a clause between two globals is cut whenever y = (0, 1, 2)
    fam = [Gadget.build(3, 0, [(4, 5, 1)]) for _ in range(3)]
    summ = reduction_summary(fam)
    assert summ.a == summ.b == summ.ratio == 1
    # between primaries it is uncut at x = (0, 0, 0), so completeness drops to 0
    prim = [Gadget.build(3, 0, [(1, 2, 1)]) for _ in range(3)]
    assert gadget_params(prim[0], 0).as_tuple() == (0, 1, 1, 1)
    with pytest.raises(AssertionError):
        reduction_summary(prim)


def test_scaling_invariance(k3_family):
    base = reduction_summary(k3_family)
    scaled = [Gadget(g.k, g.n_aux, tuple((a, b, w * Fraction(7, 3)) for a, b, w in g.clauses)) for g in k3_family]
    summ = reduction_summary(scaled)
    assert (summ.ratio, summ.r_perm, summ.a, summ.b) == (base.ratio, base.r_perm, base.a, base.b)


def test_r0_tie_break_and_soundness_guard():
    p = [GadgetParams(Fraction(8), Fraction(8), Fraction(6), Fraction(10)),
         GadgetParams(Fraction(8), Fraction(9), Fraction(6), Fraction(10))]
    assert summarize(p).r_perm == [1, 0]
    bad = [GadgetParams(Fraction(1), Fraction(9), Fraction(9), Fraction(10))] * 2
    with pytest.raises(AssertionError):
        summarize(bad)


def test_timeout_propagates():
    k4 = load_gadget(FIXTURES / "gadgets" / "k4_I0.gad")
    with pytest.raises(SolverTimeout):
        reduction_summary(family_by_rotation(k4, 4), solver="brute", deadline_ms=1)


def test_compose_single_clause(k3_family):
    src = LinInstance(3, 3, (LinClause((1, 2, 3), 0),))
    comp = compose_instance(src, k3_family)
    assert sum(w for _, _, w in comp.instance.clauses) == 18
    assert comp.global_ids == [4, 5, 6]


def test_compose_empty_source(k3_family):
    comp = compose_instance(LinInstance(3, 0, ()), k3_family)
    assert comp.instance.m == 3 and comp.instance.clauses == ()


def test_compose_cap(k3_family):
    src = LinInstance(3, 3, tuple(LinClause((1, 2, 3), 0) for _ in range(10)))
    with pytest.raises(ValueError):
        compose_instance(src, k3_family, max_vars=20)


def test_completeness_on_small_source(k3_family):
    params = [gadget_params(g, i, "brute") for i, g in enumerate(k3_family)]
    rng = random.Random(4)
    x = [rng.randrange(3) for _ in range(5)]
    clauses = []
    for i in range(3):
        vs = tuple(rng.sample(range(1, 6), 3))
        r = sum(x[v - 1] for v in vs) % 3
        clauses.append(LinClause(vs, r))
    src = LinInstance(3, 5, tuple(clauses))
    assert src.satisfied(x)
    comp = compose_instance(src, k3_family)
    colors = completeness_assignment(comp, src, x, [p.witness_map for p in params])
    total = comp.instance.value(colors)
    assert total == sum(params[c.residue].per_x[tuple(x[v - 1] for v in c.vars)] for c in clauses)
    assert total >= sum(params[c.residue].c for c in clauses)

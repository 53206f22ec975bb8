from __future__ import annotations

import random

import pytest

from hardlab import bench_harness as bh
from hardlab.kcut_solver import max_value_bnb, max_value_brute


def test_dataset_is_deterministic():
    a = bh.dataset_to_json(bh.generate_instances(3, 5, 20, 7))
    b = bh.dataset_to_json(bh.generate_instances(3, 5, 20, 7))
    assert a == b
    assert [mid for mid, _ in bh.generate_instances(3, 5, 20, 7)] == list(range(1, 21))
    assert a != bh.dataset_to_json(bh.generate_instances(3, 5, 20, 8))


def test_json_round_trip():
    data = bh.generate_instances(4, 6, 10, 1)
    back = bh.dataset_from_json(bh.dataset_to_json(data))
    assert [(m, i.k, i.m, i.clauses) for m, i in back] == [(m, i.k, i.m, i.clauses) for m, i in data]


@pytest.mark.parametrize("model_id", range(1, 21))
def test_instances_are_well_formed(model_id):
    model = bh.InstanceModel.from_id(model_id)
    inst, _ = bh.generate(model, 3, 8, random.Random(model_id))
    assert inst.m == 8 and not inst.fixed
    for a, b, w in inst.clauses:
        assert 1 <= a <= 8 and 1 <= b <= 8 and a != b and w > 0
    assert max_value_brute(inst).value == max_value_bnb(inst).value


@pytest.mark.parametrize("k,m", [(2, 8), (3, 9), (4, 10)])
def test_noiseless_planted_partition_is_optimal(k, m):
    model = bh.InstanceModel.from_id(5)
    assert model.family == "planted-k-partition" and model.param == 0.0
    for seed in range(3):
        inst, planted = bh.generate(model, k, m, random.Random(seed))
        # no edge inside a part, so the planted coloring cuts everything
        assert inst.value(planted) == sum(w for _, _, w in inst.clauses)
        assert max_value_brute(inst).value == inst.value(planted)


def test_bad_model_ids():
    for bad in (0, 21):
        with pytest.raises(ValueError):
            bh.InstanceModel.from_id(bad)


def test_run_bench_report():
    data = bh.generate_instances(3, 6, 6, 3)
    rep = bh.run_bench(data, ["brute", "bnb"], deadline_ms=5000)
    assert rep["schema_version"] == bh.REPORT_SCHEMA
    assert rep["agree"] and rep["instances"] == 6
    assert rep["backends"]["brute"]["values"] == rep["backends"]["bnb"]["values"]
    assert rep["backends"]["bnb"]["solved"] == 6


def test_run_bench_rejects_bad_input():
    data = bh.generate_instances(3, 5, 2, 0)
    with pytest.raises(ValueError):
        bh.run_bench(data, [])
    with pytest.raises(ValueError):
        bh.run_bench([], ["bnb"])
    with pytest.raises(ValueError):
        bh.run_bench(data, ["nope"])


def test_disagreement_is_fatal(monkeypatch):
    from hardlab import kcut_solver

    def broken(inst, deadline_ms=None):
        sol = max_value_bnb(inst, deadline_ms)
        return kcut_solver.Solution(sol.value + 1, sol.assignment)

    monkeypatch.setitem(bh.BACKENDS, "broken", broken)
    data = bh.generate_instances(3, 5, 2, 0)
    with pytest.raises(bh.BenchDisagreement):
        bh.run_bench(data, ["bnb", "broken"])


def test_headline_bnb_beats_brute():
    kw = dict(k=3, seed=1, m_start=6, m_max=30, count=4, limit_s=0.05)
    brute = bh.headline_m(backend="brute", **kw)["headline_m"]
    bnb = bh.headline_m(backend="bnb", **kw)["headline_m"]
    assert brute is not None and bnb is not None
    assert bnb > brute

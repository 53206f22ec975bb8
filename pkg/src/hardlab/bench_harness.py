"""Synthetic MAX-k-CUT datasets and solver benchmarking.

Twenty instance models: five families, each at four parameter settings.

==  ==================  =============================================
id  family              swept parameter
==  ==================  =============================================
1-4   uniform-random      edge density 0.3, 0.5, 0.7, 0.9
5-8   planted-k-partition noise (inside-part edge rate) 0, 0.05, 0.15, 0.3
9-12  gadget-shaped       auxiliary density 0.4, 0.6, 0.8, 1.0
13-16 power-law-degree    exponent 2.1, 2.5, 3.0, 3.5
17-20 bipartite-like      within-side edge rate 0, 0.1, 0.2, 0.4
==  ==================  =============================================
"""
from __future__ import annotations

import json
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .kcut_solver import BACKENDS, KCutInstance, SolverTimeout

FAMILIES = ["uniform-random", "planted-k-partition", "gadget-shaped", "power-law-degree", "bipartite-like"]
SETTINGS = {
    "uniform-random": [0.3, 0.5, 0.7, 0.9],
    "planted-k-partition": [0.0, 0.05, 0.15, 0.3],
    "gadget-shaped": [0.4, 0.6, 0.8, 1.0],
    "power-law-degree": [2.1, 2.5, 3.0, 3.5],
    "bipartite-like": [0.0, 0.1, 0.2, 0.4],
}
REPORT_SCHEMA = 1


@dataclass(frozen=True)
class InstanceModel:
    model_id: int
    family: str
    param: float
    max_weight: int = 10

    @classmethod
    def from_id(cls, model_id: int) -> "InstanceModel":
        if not 1 <= model_id <= 20:
            raise ValueError("model ids run from 1 to 20")
        fam = FAMILIES[(model_id - 1) // 4]
        return cls(model_id, fam, SETTINGS[fam][(model_id - 1) % 4])


def _edge(rng: random.Random, a: int, b: int, wmax: int):
    return (a, b, Fraction(rng.randint(1, wmax))) if rng.random() < 0.5 else (b, a, Fraction(rng.randint(1, wmax)))


def planted_coloring(k: int, m: int, rng: random.Random) -> list[int]:
    cols = [i % k for i in range(m)]
    rng.shuffle(cols)
    return cols


def generate(model: InstanceModel, k: int, m: int, rng: random.Random):
    """One instance of ``model``; returns (instance, planted coloring or None)."""
    clauses = []
    planted = None
    wmax = model.max_weight
    p = model.param
    if model.family == "uniform-random":
        for a in range(1, m + 1):
            for b in range(a + 1, m + 1):
                if rng.random() < p:
                    clauses.append(_edge(rng, a, b, wmax))
    elif model.family == "planted-k-partition":
        planted = planted_coloring(k, m, rng)
        for a in range(1, m + 1):
            for b in range(a + 1, m + 1):
                same = planted[a - 1] == planted[b - 1]
                if rng.random() < (p if same else 0.6):
                    clauses.append(_edge(rng, a, b, wmax))
    elif model.family == "gadget-shaped":
        # a heavy core on the first 3 + k variables, light auxiliaries around it
        core = min(m, 3 + k)
        for a in range(1, core + 1):
            for b in range(a + 1, core + 1):
                clauses.append((a, b, Fraction(rng.randint(wmax, 20 * wmax))))
        for a in range(core + 1, m + 1):
            for b in range(1, a):
                if rng.random() < p * (0.9 if b <= core else 0.5):
                    clauses.append(_edge(rng, a, b, wmax))
    elif model.family == "power-law-degree":
        w = [(i + 1) ** (-1.0 / (p - 1.0)) for i in range(m)]
        tot = sum(w) or 1.0
        target = 0.5 * m
        for a in range(1, m + 1):
            for b in range(a + 1, m + 1):
                if rng.random() < min(1.0, target * w[a - 1] * w[b - 1] * m / tot):
                    clauses.append(_edge(rng, a, b, wmax))
    elif model.family == "bipartite-like":
        side = [rng.random() < 0.5 for _ in range(m)]
        for a in range(1, m + 1):
            for b in range(a + 1, m + 1):
                cross = side[a - 1] != side[b - 1]
                if rng.random() < (0.7 if cross else p):
                    clauses.append(_edge(rng, a, b, wmax))
    else:
        raise ValueError(f"unknown family {model.family!r}")
    return KCutInstance(k, m, tuple(clauses), {}), planted


def generate_instances(k: int, m: int, count: int, seed: int, models=None) -> list[tuple[int, KCutInstance]]:
    """``count`` instances cycling through the twenty models (or the given ids)."""
    if count < 1:
        raise ValueError("count must be at least 1")
    ids = list(models) if models else list(range(1, 21))
    out = []
    for j in range(count):
        mid = ids[j % len(ids)]
        rng = random.Random(f"{seed}:{mid}:{k}:{m}:{j}")
        inst, _ = generate(InstanceModel.from_id(mid), k, m, rng)
        out.append((mid, inst))
    return out


def dataset_to_json(dataset) -> str:
    return json.dumps([
        {"model": mid, "k": inst.k, "m": inst.m, "clauses": [[a, b, str(w)] for a, b, w in inst.clauses]}
        for mid, inst in dataset
    ], sort_keys=True)


def dataset_from_json(text: str):
    return [(row["model"], KCutInstance.build(row["k"], row["m"], [(a, b, Fraction(w)) for a, b, w in row["clauses"]]))
            for row in json.loads(text)]


class BenchDisagreement(AssertionError):
    pass


def _timed(args):
    backend, inst, deadline_ms = args
    t0 = time.perf_counter()
    try:
        sol = BACKENDS[backend](inst, deadline_ms=deadline_ms)
    except SolverTimeout:
        return None, time.perf_counter() - t0
    return (sol.value, sol.assignment), time.perf_counter() - t0


def run_bench(dataset, backends, deadline_ms: float | None = 1000.0, threads: int = 1) -> dict:
    """Time each backend on each instance; any value disagreement is fatal."""
    if not backends:
        raise ValueError("no backends given")
    if not dataset:
        raise ValueError("empty dataset")
    for b in backends:
        if b not in BACKENDS:
            raise ValueError(f"unknown backend {b!r}")
    jobs = [(b, inst, deadline_ms) for b in backends for _, inst in dataset]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_timed, jobs))
    else:
        results = [_timed(j) for j in jobs]
    n = len(dataset)
    per = {b: results[i * n:(i + 1) * n] for i, b in enumerate(backends)}
    for j, (mid, inst) in enumerate(dataset):
        vals = {b: per[b][j][0][0] for b in backends if per[b][j][0] is not None}
        if len(set(vals.values())) > 1:
            raise BenchDisagreement(f"backends disagree on instance {j} (model {mid}): {vals}")
    report = {"schema_version": REPORT_SCHEMA, "instances": n, "deadline_ms": deadline_ms,
              "concurrency": threads, "backends": {}}
    for b in backends:
        times = [t for _, t in per[b]]
        solved = sum(1 for r, _ in per[b] if r is not None)
        report["backends"][b] = {
            "mean_s": statistics.fmean(times),
            "median_s": statistics.median(times),
            "solved": solved,
            "values": [None if r is None else str(r[0]) for r, _ in per[b]],
        }
    report["agree"] = True
    return report


def headline_m(k: int, backend: str, seed: int, m_start: int = 4, m_max: int = 40, count: int = 20,
               limit_s: float = 1.0) -> dict:
    """Largest m whose mean solve time stays within ``limit_s`` (deadline = limit)."""
    best = None
    timings = {}
    for m in range(m_start, m_max + 1):
        data = generate_instances(k, m, count, seed)
        rep = run_bench(data, [backend], deadline_ms=limit_s * 1000.0)
        mean = rep["backends"][backend]["mean_s"]
        timings[m] = mean
        if rep["backends"][backend]["solved"] < count or mean > limit_s:
            break
        best = m
    return {"schema_version": REPORT_SCHEMA, "backend": backend, "k": k, "headline_m": best, "mean_s": timings}

"""Timing of fresh and incremental evaluation as the tree grows.

Cost should scale with the number of internal nodes, i.e. roughly linearly
in |T| at fixed n and q, on top of a fixed ``nd x nd`` output product. Timings
are reported as measured; only the recomputation counts are exact.
"""
from __future__ import annotations

import statistics
import time

from .errors import PreconditionError
from .kihprf import EvalCache, eval_incremental, flip_cost, keygen, prf_eval, sample_instance
from .modmath import Params


def _median_time(fn, reps: int) -> float:
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def flip(y: str, i: int) -> str:
    return y[:i] + ("1" if y[i] == "0" else "0") + y[i + 1:]


def bench_size(params: Params, k: int, entropy, reps: int = 5) -> dict:
    inst = sample_instance(params.with_tree(f"balanced:{k}"), entropy.child(f"bench/{k}"))
    seed = keygen(inst.params, entropy)
    y = entropy.bits(2 * k)
    fresh = _median_time(lambda: prf_eval(inst, seed, y), reps)

    cache = EvalCache()
    prf_eval(inst, seed, y, cache)
    counts_exact = True
    worst = 0
    inc_times = []
    cur = y
    for i in range(2 * k):
        nxt = flip(cur, i)
        t0 = time.perf_counter()
        eval_incremental(inst, seed, nxt, i, cache)
        inc_times.append(time.perf_counter() - t0)
        counts_exact &= cache.recomputed == flip_cost(inst.tree, i)
        worst = max(worst, cache.recomputed)
        cur = nxt
    inc = statistics.median(inc_times)
    return {"fresh": fresh, "incremental": inc, "counts_exact": counts_exact, "max_recomputed": worst,
            "internal_nodes": k - 1}


def bench(params: Params, sizes: list[int], entropy, reps: int = 5) -> dict:
    if not sizes:
        raise PreconditionError("bench needs at least one tree size")
    rows = {k: bench_size(params, k, entropy, reps) for k in sizes}
    fields = {"n": params.n, "q": params.q, "p": params.p, "sizes": sizes, "reps": reps}
    prev = None
    for k in sizes:
        r = rows[k]
        fields[f"T{k:02d}.fresh_seconds"] = r["fresh"]
        fields[f"T{k:02d}.incremental_seconds"] = r["incremental"]
        fields[f"T{k:02d}.incremental_speedup"] = r["fresh"] / r["incremental"] if r["incremental"] else 0.0
        fields[f"T{k:02d}.recompute_counts_exact"] = r["counts_exact"]
        fields[f"T{k:02d}.max_recomputed_nodes"] = r["max_recomputed"]
        if prev is not None:
            fields[f"T{k:02d}.ratio_vs_T{prev:02d}"] = r["fresh"] / rows[prev]["fresh"]
            fields[f"T{k:02d}.linear_ratio_vs_T{prev:02d}"] = k / prev
        prev = k
    return fields

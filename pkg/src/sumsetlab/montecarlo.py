"""Seeded sampling of random windows.

Trial ``i`` of a run with seed ``s`` draws its window from stream ``i`` of
:class:`~sumsetlab.rng.CounterRNG`, so a run can be split over any number of
workers and merged by adding counters without changing a single bit of output.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from statistics import NormalDist
from typing import Iterable

from .core import UsageError
from .decomposer import SearchConfig, Verdict, _search, event_parameter
from .rng import random_window

CHUNK = 2048
CSV_COLUMNS = ("n", "k", "trials", "hits", "p_hat", "ci_low", "ci_high", "p_bound", "seed")


def wilson_interval(hits: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval; with zero hits the upper end is ``-ln(1 - confidence) / trials``.

    At 95% that zero-hit limit is the rule of three (``2.996 / trials``).
    """
    if trials < 1 or not 0 <= hits <= trials:
        raise UsageError("need 0 <= hits <= trials and trials >= 1")
    if not 0 < confidence < 1:
        raise UsageError("confidence must lie in (0, 1)")
    if hits == 0:
        return 0.0, min(1.0, -math.log(1 - confidence) / trials)
    z = NormalDist().inv_cdf(1 - (1 - confidence) / 2)
    p = hits / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class Estimate:
    kind: str
    n: int
    k: int | None
    config: dict | None
    trials: int
    hits: int
    inconclusive: int
    p_hat: float
    ci_low: float
    ci_high: float
    ci99_high: float
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _make_estimate(kind, n, k, config, trials, hits, inconclusive, seed) -> Estimate:
    lo, hi = wilson_interval(hits, trials, 0.95)
    _, hi99 = wilson_interval(hits, trials, 0.99)
    return Estimate(kind, n, k, config, trials, hits, inconclusive, hits / trials, lo, hi, hi99, seed)


def _trial_chunk(job: tuple[int, SearchConfig | None, int, int, int, int]) -> tuple[int, int]:
    n, cfg, k, seed, start, stop = job
    hits = inconclusive = 0
    for i in range(start, stop):
        x = random_window(seed, i, n)
        if cfg is None:
            # n // k == 0: only the empty window qualifies
            hits += x == 0
            continue
        v = _search(x, n, cfg).verdict
        if v is Verdict.DECOMPOSABLE:
            hits += 1
        elif v is Verdict.INCONCLUSIVE:
            inconclusive += 1
    return hits, inconclusive


def _run(n: int, cfg: SearchConfig | None, k: int, trials: int, seed: int, workers: int) -> tuple[int, int]:
    if trials < 1:
        raise UsageError("trials must be >= 1")
    if n < 0:
        raise UsageError("n must be >= 0")
    jobs = [(n, cfg, k, seed, lo, min(lo + CHUNK, trials)) for lo in range(0, trials, CHUNK)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_trial_chunk, jobs))
    else:
        parts = [_trial_chunk(j) for j in jobs]
    return sum(p[0] for p in parts), sum(p[1] for p in parts)


def estimate_event(
    n: int, k: int, trials: int, seed: int, workers: int = 1, node_limit: int | None = None
) -> Estimate:
    """Estimate the probability that a uniform ``X ⊆ [0, n]`` is in the small-sumset event."""
    cap = event_parameter(n, k)
    cfg = SearchConfig(min_size=1, budget=cap, size_cap=cap, node_limit=node_limit) if cap else None
    hits, inc = _run(n, cfg, k, trials, seed, workers)
    return _make_estimate("event", n, k, None, trials, hits, inc, seed)


def estimate_decomposable(
    n: int, config: SearchConfig, trials: int, seed: int, workers: int = 1
) -> Estimate:
    if config.budget > n + 1:
        raise UsageError(f"budget {config.budget} exceeds window size {n + 1}")
    hits, inc = _run(n, config, 0, trials, seed, workers)
    return _make_estimate("decide", n, None, asdict(config), trials, hits, inc, seed)


def append_result(path: str | Path, estimate: Estimate, wall_time: float, p_bound: float | None = None) -> dict:
    """Append one JSON-lines record for a finished run and return it."""
    record = {"inputs": {"kind": estimate.kind, "n": estimate.n, "k": estimate.k, "config": estimate.config,
                         "trials": estimate.trials, "seed": estimate.seed},
              "outputs": estimate.to_dict(),
              "p_bound": p_bound,
              "wall_time_s": round(wall_time, 6),
              "timestamp": time.time()}
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")
    return record


def read_results(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def export_csv(records: Iterable[dict], path: str | Path) -> int:
    rows = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for rec in records:
            out = rec["outputs"]
            writer.writerow({
                "n": out["n"], "k": out["k"] if out["k"] is not None else "",
                "trials": out["trials"], "hits": out["hits"], "p_hat": out["p_hat"],
                "ci_low": out["ci_low"], "ci_high": out["ci_high"],
                "p_bound": rec.get("p_bound") if rec.get("p_bound") is not None else "",
                "seed": out["seed"],
            })
            rows += 1
    return rows

"""Seeded Monte Carlo experiments and the runtime benchmark."""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analysis import SupportModel
from .hashing import build_family
from .peeling import EPS_RATIO, EPS_ZERO, MAX_PASSES, sparse_fht
from .wht import fht

SUCCESS_FIELDS = ["alpha", "C", "trials", "successes", "rate", "stderr"]
BETA_FIELDS = ["beta", "trials", "successes", "rate"]
BENCH_FIELDS = ["n", "alpha", "t_fht_ms", "t_sfht_ms"]

VALUE_RTOL = 1e-6


def trial_rng(seed: int, *counters: int) -> np.random.Generator:
    """Independent stream for one trial, derived from the root seed by counters."""
    return np.random.default_rng([int(seed), *(int(c) for c in counters)])


def sparsity_for(n: int, alpha: float) -> int:
    """``K = round(N^alpha)``."""
    return max(int(round(2.0 ** (n * alpha))), 1)


def gen_sparse_signal(n: int, K: int, rng, model: str = "RS1"):
    """Signal whose WHT has a random ``K``-point support with standard normal values.

    Returns ``(x, truth)`` where ``truth`` maps index to coefficient.  RS2
    supports may hold fewer than ``K`` points.
    """
    N = 1 << n
    if not 0 <= K <= N:
        raise ValueError(f"need 0 <= K <= N={N}, got {K}")
    rng = np.random.default_rng(rng)
    support = SupportModel(model, N, K).draw(rng)
    values = rng.standard_normal(support.size)
    X = np.zeros(N)
    X[support] = values
    truth = {int(i): float(v) for i, v in zip(support, values)}
    return fht(X), truth


def recovery_matches(recovered: dict[int, float], truth: dict[int, float], rtol: float = VALUE_RTOL) -> bool:
    """Exact support match and every value within ``rtol`` relative error."""
    if set(recovered) != set(truth):
        return False
    return all(abs(recovered[i] - v) <= rtol * abs(v) for i, v in truth.items())


def _decode_trial(n, K, b, C, construction, rng, family=None, **decode_kw) -> bool:
    x, truth = gen_sparse_signal(n, K, rng)
    if family is None:
        family = build_family(construction, n, b, C, rng)
    report = sparse_fht(x, family, **decode_kw)
    return report.success and recovery_matches(report.recovered, truth)


def _stderr(successes: int, trials: int) -> float:
    p = successes / trials
    return float(np.sqrt(p * (1 - p) / trials))


@dataclass
class ExperimentGrid:
    n: int = 18
    alphas: Sequence[float] = (1 / 3,)
    C_values: Sequence[int] = (4,)
    trials: int = 200
    construction: str = "circular"
    seed: int = 0
    beta: float = 1.0
    b_bits: int | None = None
    eps_zero: float = EPS_ZERO
    eps_ratio: float = EPS_RATIO
    max_passes: int = MAX_PASSES

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(not 0 < a < 1 for a in self.alphas):
            raise ValueError("alphas must lie in (0, 1)")
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    def bins_for(self, K: int) -> int:
        if self.b_bits is not None:
            return int(self.b_bits)
        b = int(round(np.log2(K / self.beta)))
        return min(max(b, 1), self.n - 1)

    def decode_kw(self) -> dict:
        return dict(eps_zero=self.eps_zero, eps_ratio=self.eps_ratio, max_passes=self.max_passes)


def run_success_experiment(grid: ExperimentGrid) -> list[dict]:
    """Success rate over a grid of ``(alpha, C)``, checked against ground truth."""
    rows = []
    point = 0
    for alpha in grid.alphas:
        K = sparsity_for(grid.n, alpha)
        b = grid.bins_for(K)
        for C in grid.C_values:
            family = None
            if grid.construction != "random":
                family = build_family(grid.construction, grid.n, b, C)
            successes = sum(
                _decode_trial(grid.n, K, b, C, grid.construction, trial_rng(grid.seed, point, t),
                              family, **grid.decode_kw())
                for t in range(grid.trials)
            )
            rows.append({
                "alpha": alpha,
                "C": C,
                "trials": grid.trials,
                "successes": successes,
                "rate": successes / grid.trials,
                "stderr": _stderr(successes, grid.trials),
            })
            point += 1
    return rows


def run_beta_sweep(
    n: int,
    b_fixed: int,
    C: int,
    alphas: Sequence[float],
    trials: int,
    seed: int = 0,
    construction: str = "circular",
    **decode_kw,
) -> list[dict]:
    """Success rate against bin load ``beta = K / B`` with ``B = 2^b_fixed`` held fixed."""
    B = 1 << b_fixed
    family = None if construction == "random" else build_family(construction, n, b_fixed, C)
    rows = []
    for point, alpha in enumerate(alphas):
        K = sparsity_for(n, alpha)
        successes = sum(
            _decode_trial(n, K, b_fixed, C, construction, trial_rng(seed, point, t), family, **decode_kw)
            for t in range(trials)
        )
        rows.append({"beta": K / B, "trials": trials, "successes": successes, "rate": successes / trials})
    return rows


def _median_ms(fn, reps: int) -> float:
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return 1e3 * float(np.median(times))


def bench_runtime(
    n_values: Sequence[int],
    alphas: Sequence[float],
    reps: int = 7,
    seed: int = 0,
    C: int = 4,
    construction: str = "circular",
) -> list[dict]:
    """Median wall-clock of the full transform against hashing plus peeling.

    Family construction is excluded from the sparse timing.
    """
    if reps < 5:
        raise ValueError("reps must be >= 5")
    rows = []
    for n in n_values:
        for point, alpha in enumerate(alphas):
            rng = trial_rng(seed, n, point)
            K = sparsity_for(n, alpha)
            b = min(max(int(round(np.log2(K))), 1), n - 1)
            x, _ = gen_sparse_signal(n, K, rng)
            family = build_family(construction, n, b, C, rng)
            fht(x)
            sparse_fht(x, family)
            rows.append({
                "n": n,
                "alpha": alpha,
                "t_fht_ms": _median_ms(lambda: fht(x), reps),
                "t_sfht_ms": _median_ms(lambda: sparse_fht(x, family), reps),
            })
    return rows


def alpha_star(rows: Sequence[dict], n: int) -> float:
    """Largest benchmarked ``alpha`` below which the sparse transform always wins (0 if never)."""
    best = 0.0
    for row in sorted((r for r in rows if r["n"] == n), key=lambda r: r["alpha"]):
        if row["t_sfht_ms"] < row["t_fht_ms"]:
            best = row["alpha"]
        else:
            break
    return best


def format_csv(rows: Sequence[dict], fields: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(float(v)) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    """Read harness CSV back, restoring ints and floats."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed = {}
        for k, v in row.items():
            try:
                parsed[k] = int(v)
            except ValueError:
                parsed[k] = float(v)
        out.append(parsed)
    return out

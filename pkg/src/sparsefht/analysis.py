"""Density evolution, check-degree statistics, random supports and trapping sets."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Iterable

import numpy as np

from .hashing import HashFamily

DE_MARGIN = 1e-12
BETA_BRACKET = (0.1, 10.0)
TRAPPING_MAX_BITS = 12


@dataclass(frozen=True)
class DegreePolynomials:
    """Edge-degree polynomials of the hashed graph: ``lambda(x) = x^(C-1)``, ``rho(x) = exp(-beta (1 - x))``."""

    C: int
    beta: float

    def __post_init__(self):
        if self.C < 2:
            raise ValueError("C must be >= 2")
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    def lam(self, x):
        return np.power(x, self.C - 1)

    def rho(self, x):
        return np.exp(-self.beta * (1.0 - np.asarray(x, dtype=np.float64)))


def de_iterate(poly: DegreePolynomials, p0: float = 1.0, steps: int = 100) -> np.ndarray:
    """``p_{j+1} = lambda(1 - rho(1 - p_j))``; returns ``p_0 .. p_steps``."""
    if not 0.0 <= p0 <= 1.0:
        raise ValueError("p0 must be in [0, 1]")
    out = np.empty(steps + 1)
    out[0] = p = float(p0)
    for j in range(1, steps + 1):
        p = float(poly.lam(1.0 - poly.rho(1.0 - p)))
        out[j] = p
    return out


def de_success_condition(poly: DegreePolynomials, grid_size: int = 10_000) -> bool:
    """True iff ``rho(1 - lambda(x)) > 1 - x`` on a uniform grid of ``(0, 1]``."""
    if grid_size < 1000:
        raise ValueError("grid_size must be >= 1000")
    x = np.arange(1, grid_size + 1, dtype=np.float64) / grid_size
    return bool(np.all(poly.rho(1.0 - poly.lam(x)) - (1.0 - x) > DE_MARGIN))


def de_threshold(C: int, tol: float = 1e-3, grid_size: int = 10_000) -> float:
    """Largest ``beta`` for which the success condition holds, by bisection."""
    if C < 3:
        raise ValueError("threshold search needs C >= 3")
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = BETA_BRACKET
    if not de_success_condition(DegreePolynomials(C, lo), grid_size):
        return lo
    if de_success_condition(DegreePolynomials(C, hi), grid_size):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if de_success_condition(DegreePolynomials(C, mid), grid_size):
            lo = mid
        else:
            hi = mid
    return lo


def check_degree_pmf(beta: float, i: int) -> float:
    """Poisson(beta) probability that a bin holds ``i`` coefficients."""
    if i < 0:
        return 0.0
    return math.exp(-beta + i * math.log(beta) - math.lgamma(i + 1)) if beta > 0 else float(i == 0)


def edge_degree_pmf(beta: float, i: int) -> float:
    """Fraction of edges attached to bins of degree ``i`` in the Poisson limit."""
    return check_degree_pmf(beta, i - 1) if i >= 1 else 0.0


def balls_and_bins(K: int, B: int, C: int, rng) -> np.ndarray:
    """Draw a graph from the ensemble ``G(K, B, C)``; returns ``(K, C)`` bin choices."""
    rng = np.random.default_rng(rng)
    return rng.integers(0, B, size=(K, C))


def check_degree_histogram(choices: np.ndarray, B: int) -> np.ndarray:
    """Empirical fraction of bins with degree ``i`` (pooled over hashes)."""
    deg = np.stack([np.bincount(choices[:, c], minlength=B) for c in range(choices.shape[1])])
    counts = np.bincount(deg.ravel())
    return counts / counts.sum()


def edge_degree_histogram(choices: np.ndarray, B: int) -> np.ndarray:
    """Empirical ``rho_i``: fraction of edges landing in a bin of degree ``i``."""
    frac = check_degree_histogram(choices, B)
    i = np.arange(frac.size)
    w = i * frac
    return w / w.sum()


def total_variation(p, q) -> float:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    m = max(p.size, q.size)
    p = np.pad(p, (0, m - p.size))
    q = np.pad(q, (0, m - q.size))
    return 0.5 * float(np.abs(p - q).sum())


# ---------------------------------------------------------------- supports


@dataclass(frozen=True)
class SupportModel:
    """RS1 draws ``K`` distinct indices; RS2 draws ``K`` with replacement."""

    variant: str
    N: int
    K: int

    def __post_init__(self):
        if self.variant not in ("RS1", "RS2"):
            raise ValueError(f"unknown support model {self.variant!r}")
        if not 0 <= self.K <= self.N:
            raise ValueError(f"need 0 <= K <= N, got K={self.K}, N={self.N}")

    def draw(self, rng) -> np.ndarray:
        rng = np.random.default_rng(rng)
        if self.variant == "RS1":
            return draw_without_replacement(self.N, self.K, rng)
        return np.unique(rng.integers(0, self.N, size=self.K))


def draw_without_replacement(N: int, K: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform ``K``-subset of ``range(N)``, sorted; cheap when ``K << N``."""
    if K > N // 4:
        return np.sort(rng.choice(N, size=K, replace=False))
    out = np.unique(rng.integers(0, N, size=K))
    while out.size < K:
        out = np.unique(np.concatenate([out, rng.integers(0, N, size=K - out.size)]))
    return out


def rs2_expected_support(N: int, K: int) -> float:
    """Expected number of distinct indices among ``K`` uniform draws from ``N``."""
    if not 0 <= K <= N:
        raise ValueError("need 0 <= K <= N")
    return N * -math.expm1(K * math.log1p(-1.0 / N)) if N > 1 else float(K > 0)


def simulate_rs2(N: int, K: int, trials: int, rng, chunk: int = 1000) -> np.ndarray:
    """Distinct-count ratios ``H / K`` over ``trials`` independent RS2 draws."""
    rng = np.random.default_rng(rng)
    out = np.empty(trials)
    for start in range(0, trials, chunk):
        m = min(chunk, trials - start)
        draws = np.sort(rng.integers(0, N, size=(m, K)), axis=1)
        distinct = 1 + np.count_nonzero(np.diff(draws, axis=1), axis=1)
        out[start : start + m] = distinct / K
    return out


# ---------------------------------------------------------------- trapping sets


def is_trapping_set(support: Iterable[int], family: HashFamily) -> bool:
    """Every member collides with another member in every hash."""
    support = sorted(set(int(v) for v in support))
    if not support:
        raise ValueError("support must be nonempty")
    idx = np.asarray(support, dtype=np.int64)
    for cfg in family:
        counts = Counter(cfg.hash_index(idx).tolist())
        if min(counts.values()) < 2:
            return False
    return True


def minimal_trapping_sets(family: HashFamily, max_size: int) -> set[frozenset[int]]:
    """All inclusion-minimal trapping sets with at most ``max_size`` elements.

    Grows a candidate from its smallest element: whenever some member lacks a
    partner in some hash, one of that bin's other occupants must be added.
    The member with the fewest eligible partners is resolved first, and each
    candidate set is expanded once.  Exhaustive over the whole index space, so
    only small ``n`` is allowed.
    """
    if family.n > TRAPPING_MAX_BITS:
        raise ValueError(f"exhaustive search limited to n <= {TRAPPING_MAX_BITS}")
    N = 1 << family.n
    universe = np.arange(N, dtype=np.int64)
    bins = [cfg.hash_index(universe).tolist() for cfg in family]
    occupants = []
    for b_list in bins:
        groups: dict[int, list[int]] = {}
        for i, k in enumerate(b_list):
            groups.setdefault(k, []).append(i)
        occupants.append(groups)
    found: set[frozenset[int]] = set()
    seen: set[frozenset[int]] = set()

    def partners_needed(S, lo):
        """Eligible additions for the most constrained lonely member, or None if ``S`` is trapping."""
        best = None
        for c, b_list in enumerate(bins):
            load = Counter(b_list[v] for v in S)
            for v in S:
                if load[b_list[v]] == 1:
                    cand = [u for u in occupants[c][b_list[v]] if u > lo and u not in S]
                    if best is None or len(cand) < len(best):
                        best = cand
                        if not cand:
                            return best
        return best

    def grow(S, lo):
        if S in seen:
            return
        seen.add(S)
        cand = partners_needed(S, lo)
        if cand is None:
            found.add(S)
            return
        if len(S) >= max_size:
            return
        for u in cand:
            grow(S | {u}, lo)

    for v0 in range(N):
        grow(frozenset([v0]), v0)
    return {s for s in found if not any(t < s for t in found)}


def smallest_trapping_set_size(family: HashFamily, max_size: int) -> int | None:
    sets = minimal_trapping_sets(family, max_size)
    return min((len(s) for s in sets), default=None)


def cube_support(n: int, C: int, low: Iterable[int], high: Iterable[int]) -> set[int]:
    """The ``2^C`` indices whose window ``i`` (width ``n / C``) is ``low[i]`` or ``high[i]``."""
    if n % C:
        raise ValueError("C must divide n")
    t = n // C
    low, high = list(low), list(high)
    if len(low) != C or len(high) != C:
        raise ValueError("need one low/high window value per axis")
    out = set()
    for pick in product((0, 1), repeat=C):
        idx = 0
        for i, bit in enumerate(pick):
            idx |= (high[i] if bit else low[i]) << (i * t)
        out.add(idx)
    return out

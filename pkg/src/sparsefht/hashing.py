"""Spectral hashing by time-domain subsampling.

A hash is defined by an invertible ``Sigma`` and a bin count ``B = 2**b``.
Spectral index ``j`` lands in bin ``H j`` with ``H = Psi_b^T Sigma^T``, i.e.
bin bit ``s`` is ``<sigma_{n-b+s}, j>``.  The first ``n - b`` columns of
``Sigma`` serve as probe offsets for collision detection.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .gf2 import (
    GF2Matrix,
    circular_shift_matrix,
    mat_inverse,
    parity,
    random_invertible,
    selection_matrix,
)
from .validation import signal_bits
from .wht import fht, fht_rows

CONSTRUCTIONS = ("disjoint", "projection", "circular", "random")


@dataclass(frozen=True, eq=False)
class HashConfig:
    """One hash: ``Sigma``, its inverse transpose, ``b`` and the probe offsets."""

    sigma: GF2Matrix
    b: int
    sigma_inv_t: GF2Matrix = field(default=None)
    shifts: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        n = self.sigma.n_rows
        if self.sigma.shape != (n, n):
            raise ValueError("Sigma must be square")
        if not 1 <= self.b <= n:
            raise ValueError(f"b must be in [1, {n}], got {self.b}")
        if self.sigma_inv_t is None:
            object.__setattr__(self, "sigma_inv_t", mat_inverse(self.sigma).T)
        cols = self.sigma.columns()
        if self.shifts is None:
            object.__setattr__(self, "shifts", tuple(cols[: n - self.b]))
        if len(self.shifts) != n - self.b:
            raise ValueError(f"need {n - self.b} probe offsets, got {len(self.shifts)}")
        # H rows (bin bits) and the sample pattern Sigma Psi_b m for m in [0, B)
        object.__setattr__(self, "_bin_rows", tuple(cols[n - self.b :]))
        base = np.zeros(1, dtype=np.int64)
        for col in cols[n - self.b :]:
            base = np.concatenate([base, base ^ col])
        object.__setattr__(self, "_sample_base", base)
        object.__setattr__(self, "_inv_t_cols", tuple(self.sigma_inv_t.columns()))

    @property
    def n(self) -> int:
        return self.sigma.n_rows

    @property
    def n_bins(self) -> int:
        return 1 << self.b

    @property
    def n_probes(self) -> int:
        return self.n - self.b

    def sample_indices(self, p: int = 0) -> np.ndarray:
        """Time indices ``Sigma Psi_b m + p`` read by one hashing call."""
        return self._sample_base ^ p

    def hash_index(self, j):
        """Bin of spectral index ``j`` (int or integer array)."""
        if isinstance(j, np.ndarray):
            out = np.zeros(j.shape, dtype=np.int64)
            for s, row in enumerate(self._bin_rows):
                out |= parity(j & row).astype(np.int64) << s
            return out
        out = 0
        for s, row in enumerate(self._bin_rows):
            out |= parity(j & row) << s
        return out

    def reconstruct(self, k, vhat):
        """``Sigma^{-T} (Psi_b k + vhat)``; vectorised over integer arrays."""
        w = (k << self.n_probes) | vhat
        if isinstance(w, np.ndarray):
            out = np.zeros(w.shape, dtype=np.int64)
            for t, col in enumerate(self._inv_t_cols):
                out ^= ((w >> t) & 1) * col
            return out
        out = 0
        for t, col in enumerate(self._inv_t_cols):
            if (w >> t) & 1:
                out ^= col
        return out


def hash_index(cfg: HashConfig, j):
    return cfg.hash_index(j)


@dataclass(frozen=True, eq=False)
class HashFamily:
    n: int
    b: int
    configs: tuple[HashConfig, ...]
    construction: str = "custom"
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "configs", tuple(self.configs))
        if not self.configs:
            raise ValueError("a family needs at least one hash")
        for cfg in self.configs:
            if cfg.n != self.n or cfg.b != self.b:
                raise ValueError("all hashes in a family must share n and b")

    @property
    def C(self) -> int:
        return len(self.configs)

    @property
    def n_bins(self) -> int:
        return 1 << self.b

    @property
    def n_probes(self) -> int:
        return self.n - self.b

    def __len__(self) -> int:
        return len(self.configs)

    def __iter__(self):
        return iter(self.configs)

    def __getitem__(self, c: int) -> HashConfig:
        return self.configs[c]

    def samples_per_signal(self) -> int:
        return self.C * (self.n_probes + 1) * self.n_bins

    def to_text(self) -> str:
        seed = "-" if self.seed is None else str(self.seed)
        parts = [f"{self.n} {self.b} {self.C} {self.construction} {seed}\n"]
        parts += [cfg.sigma.to_text() for cfg in self.configs]
        return "".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "HashFamily":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty hash family file")
        head = lines[0].split()
        if len(head) != 5:
            raise ValueError(f"bad family header {lines[0]!r}")
        try:
            n, b, C = (int(t) for t in head[:3])
            seed = None if head[4] == "-" else int(head[4])
        except ValueError as exc:
            raise ValueError(f"bad family header {lines[0]!r}") from exc
        rest = lines[1:]
        configs = []
        for _ in range(C):
            sigma, rest = GF2Matrix._from_lines(rest)
            if sigma.shape != (n, n):
                raise ValueError(f"matrix shape {sigma.shape} does not match n={n}")
            configs.append(HashConfig(sigma, b))
        if rest:
            raise ValueError("trailing data after hash family")
        return cls(n, b, tuple(configs), head[3], seed)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "HashFamily":
        with open(path) as fh:
            return cls.from_text(fh.read())


# ---------------------------------------------------------------- families


def _window_shift(n: int, b: int, start: int) -> GF2Matrix:
    # the last b columns of the rotated identity are e_start .. e_{start+b-1} (mod n)
    return circular_shift_matrix(n, (start + b) % n)


def build_disjoint_family(n: int, C: int) -> HashFamily:
    """``C`` hashes reading the non-overlapping bit windows ``[i b, (i+1) b)``."""
    if C < 1 or n % C:
        raise ValueError(f"C={C} must divide n={n}")
    b = n // C
    if C == 1:
        return HashFamily(n, n, (HashConfig(GF2Matrix.identity(n), n),), "disjoint")
    configs = [HashConfig(circular_shift_matrix(n, ((i + 1) * b) % n), b) for i in range(C)]
    return HashFamily(n, b, tuple(configs), "disjoint")


def build_projection_family(n: int, C: int) -> HashFamily:
    """Hash ``i`` drops window ``r_{(i-1) mod C}`` and keeps the other ``C-1`` in order."""
    if C < 2 or n % C:
        raise ValueError(f"need C >= 2 dividing n={n}, got C={C}")
    t = n // C
    b = (C - 1) * t
    configs = []
    for i in range(C):
        dropped = (i + C - 1) % C
        kept = [w for w in range(C) if w != dropped]
        positions = [w * t + s for w in kept for s in range(t)]
        configs.append(HashConfig(selection_matrix(n, positions), b))
    return HashFamily(n, b, tuple(configs), "projection")


def window_step(n: int, C: int) -> int:
    return int(round(n / C))


def build_generalized_family(n: int, b: int, C: int) -> HashFamily:
    """Hash ``i`` reads the circular window of ``b`` bits starting at ``i * round(n / C)``."""
    if not 1 <= b <= n - 1:
        raise ValueError(f"b must be in [1, {n - 1}], got {b}")
    if C < 1:
        raise ValueError("C must be positive")
    t = window_step(n, C)
    configs = [HashConfig(_window_shift(n, b, (i * t) % n), b) for i in range(C)]
    return HashFamily(n, b, tuple(configs), "circular")


def build_random_family(n: int, b: int, C: int, rng) -> HashFamily:
    """``C`` independent uniform draws from GL(n, F2)."""
    if not 1 <= b <= n - 1:
        raise ValueError(f"b must be in [1, {n - 1}], got {b}")
    seed = None
    if not isinstance(rng, np.random.Generator):
        seed = None if rng is None else int(rng)
        rng = np.random.default_rng(rng)
    configs = [HashConfig(random_invertible(n, rng), b) for _ in range(C)]
    return HashFamily(n, b, tuple(configs), "random", seed)


def build_family(construction: str, n: int, b: int, C: int, rng=None) -> HashFamily:
    """Dispatch on ``construction``.

    ``disjoint`` and ``projection`` fix ``b`` themselves and fall back to the
    circular-window construction when their shape constraint fails.
    """
    if construction == "disjoint":
        if C >= 1 and n % C == 0 and b == n // C:
            return build_disjoint_family(n, C)
        return build_generalized_family(n, b, C)
    if construction == "projection":
        if C >= 2 and n % C == 0 and b == (C - 1) * (n // C):
            return build_projection_family(n, C)
        return build_generalized_family(n, b, C)
    if construction == "circular":
        return build_generalized_family(n, b, C)
    if construction == "random":
        return build_random_family(n, b, C, rng)
    raise ValueError(f"unknown construction {construction!r}; choose from {CONSTRUCTIONS}")


# ---------------------------------------------------------------- hashing


def fast_hadamard_hashing(x, cfg: HashConfig, p: int = 0) -> np.ndarray:
    """Hashed spectrum ``U(k) = sum_{H j = k} X_j (-1)^{<p, j>}``.

    Reads exactly ``B`` samples of ``x`` (any object supporting integer-array
    indexing and ``len``) and runs one length-``B`` transform.
    """
    n = signal_bits(x)
    if n != cfg.n:
        raise ValueError(f"signal has {n} index bits, hash expects {cfg.n}")
    if not 0 <= p < (1 << n):
        raise ValueError(f"offset {p} is not an {n}-bit index")
    u = np.asarray(x[cfg.sample_indices(p)], dtype=np.float64)
    return np.sqrt(float(1 << (n - cfg.b))) * fht(u)


@dataclass
class HashState:
    """Bin observations ``U[c, d, k]``; slice ``d = 0`` is the unshifted hash."""

    U: np.ndarray
    scale: float

    @property
    def shape(self):
        return self.U.shape

    def copy(self) -> "HashState":
        return HashState(self.U.copy(), self.scale)


def compute_hash_state(x, family: HashFamily) -> HashState:
    """All ``C * (n - b + 1)`` hashing calls: ``p = 0`` and each probe column.

    The probes of one hash are gathered and transformed as a single batch;
    the samples read are exactly those of the individual calls.
    """
    n = signal_bits(x)
    if n != family.n:
        raise ValueError(f"signal has {n} index bits, family expects {family.n}")
    D = family.n_probes
    gain = np.sqrt(float(1 << D))
    U = np.empty((family.C, D + 1, family.n_bins), dtype=np.float64)
    for c, cfg in enumerate(family):
        offsets = np.asarray((0, *cfg.shifts), dtype=np.int64)
        idx = cfg.sample_indices()[None, :] ^ offsets[:, None]
        U[c] = gain * fht_rows(np.asarray(x[idx], dtype=np.float64))
    scale = float(np.max(np.abs(U))) if U.size else 0.0
    return HashState(U, scale)


def state_from_spectrum(spectrum: dict[int, float], family: HashFamily) -> HashState:
    """Exact bin contents of a sparse spectrum, computed in the index domain.

    Independent of the time-domain path; used as a reference in tests and for
    synthetic decoding experiments.
    """
    D = family.n_probes
    U = np.zeros((family.C, D + 1, family.n_bins), dtype=np.float64)
    if spectrum:
        idx = np.fromiter(spectrum.keys(), dtype=np.int64, count=len(spectrum))
        val = np.fromiter(spectrum.values(), dtype=np.float64, count=len(spectrum))
        for c, cfg in enumerate(family):
            bins = cfg.hash_index(idx)
            np.add.at(U[c, 0], bins, val)
            for d, p in enumerate(cfg.shifts, start=1):
                sign = 1.0 - 2.0 * parity(idx & p)
                np.add.at(U[c, d], bins, val * sign)
    scale = float(np.max(np.abs(U))) if U.size else 0.0
    return HashState(U, scale)

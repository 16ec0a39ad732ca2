"""Collision detection, support estimation and the peeling decoder."""
from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .gf2 import parity
from .hashing import HashFamily, HashState, compute_hash_state
from .validation import check_signal, signal_bits

EPS_ZERO = 1e-9
EPS_RATIO = 1e-6
MAX_PASSES = 32

ZEROTON = "zeroton"
SINGLETON = "singleton"
MULTITON = "multiton"


@dataclass(frozen=True)
class BinClassification:
    kind: str
    index: int | None = None
    value: float | None = None

    @property
    def is_singleton(self) -> bool:
        return self.kind == SINGLETON


def classify_bin(
    state: HashState,
    family: HashFamily,
    c: int,
    k: int,
    eps_zero: float = EPS_ZERO,
    eps_ratio: float = EPS_RATIO,
) -> BinClassification:
    """Ratio test on bin ``k`` of hash ``c``.

    Every probe ratio ``U[c,d,k] / U[c,0,k]`` must be within ``eps_ratio`` of
    +-1 for a singleton; the signs spell the missing ``n - b`` coordinates of
    ``Sigma^T j``.
    """
    u = state.U[c, :, k]
    if abs(u[0]) <= eps_zero * state.scale:
        return BinClassification(ZEROTON)
    ratios = u[1:] / u[0]
    if np.any(np.abs(np.abs(ratios) - 1.0) > eps_ratio):
        return BinClassification(MULTITON)
    vhat = 0
    for d, r in enumerate(ratios):
        if r < 0:
            vhat |= 1 << d
    index = family[c].reconstruct(int(k), vhat)
    return BinClassification(SINGLETON, index, float(u[0]))


def _classify_hash(Uc: np.ndarray, cfg, zero_tol: float, eps_ratio: float):
    """Vectorised :func:`classify_bin` over all bins of one hash.

    Returns ``(nonzero, singleton_bins, indices)``.
    """
    u0 = Uc[0]
    nonzero = np.abs(u0) > zero_tol
    bins = np.flatnonzero(nonzero)
    if bins.size == 0 or Uc.shape[0] == 1:
        return nonzero, bins, cfg.reconstruct(bins, np.zeros_like(bins))
    ratios = Uc[1:, bins] / u0[bins]
    single = np.all(np.abs(np.abs(ratios) - 1.0) <= eps_ratio, axis=0)
    bins = bins[single]
    neg = ratios[:, single] < 0
    weights = np.left_shift(np.int64(1), np.arange(neg.shape[0], dtype=np.int64))
    vhat = (neg.astype(np.int64) * weights[:, None]).sum(axis=0)
    return nonzero, bins, cfg.reconstruct(bins, vhat)


def _peel_many(state: HashState, family: HashFamily, idx: np.ndarray, val: np.ndarray) -> None:
    B = family.n_bins
    D = family.n_probes
    for c, cfg in enumerate(family):
        bins = cfg.hash_index(idx)
        if D:
            shifts = np.asarray(cfg.shifts, dtype=np.int64)
            signs = 1.0 - 2.0 * parity(idx[:, None] & shifts[None, :])
            w = np.concatenate([val[:, None], val[:, None] * signs], axis=1)
        else:
            w = val[:, None]
        flat = (np.arange(D + 1, dtype=np.int64)[None, :] * B + bins[:, None]).ravel()
        delta = np.bincount(flat, weights=w.ravel(), minlength=(D + 1) * B)
        state.U[c] -= delta.reshape(D + 1, B)


def peel(state: HashState, family: HashFamily, index: int, value: float) -> None:
    """Subtract coefficient ``value`` at ``index`` from every hash and probe slice."""
    if not np.isfinite(value):
        raise ValueError("peeled value must be finite")
    for c, cfg in enumerate(family):
        k = cfg.hash_index(index)
        state.U[c, 0, k] -= value
        for d, p in enumerate(cfg.shifts, start=1):
            state.U[c, d, k] -= -value if parity(p & index) else value


@dataclass
class DecodeReport:
    recovered: dict[int, float]
    success: bool
    passes: int
    peeled: int
    residual_energy: float
    failure_support_size_bound: int
    residual_bins: int = 0
    scale: float = 0.0
    state: HashState | None = field(default=None, repr=False)

    @property
    def recovered_count(self) -> int:
        return len(self.recovered)

    def to_dict(self) -> dict:
        return {
            "recovered_count": self.recovered_count,
            "success": self.success,
            "passes": self.passes,
            "peeled": self.peeled,
            "residual_energy": self.residual_energy,
            "failure_support_size_bound": self.failure_support_size_bound,
            "residual_bins": self.residual_bins,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def decode_state(
    state: HashState,
    family: HashFamily,
    eps_zero: float = EPS_ZERO,
    eps_ratio: float = EPS_RATIO,
    max_passes: int = MAX_PASSES,
) -> DecodeReport:
    """Run the peeling loop on ``state`` in place.

    Each pass sweeps the hashes in order and peels every singleton found
    before moving to the next hash.  Peeling an index only touches its own
    bin inside the current hash, so classifying one hash's bins together is
    the same as visiting them one at a time.
    """
    if max_passes < 1:
        raise ValueError("max_passes must be >= 1")
    zero_tol = eps_zero * state.scale
    recovered: dict[int, float] = {}
    peeled = 0
    passes = 0
    done = state.scale == 0.0
    while passes < max_passes:
        passes += 1
        progress = 0
        for c, cfg in enumerate(family):
            _, bins, idx = _classify_hash(state.U[c], cfg, zero_tol, eps_ratio)
            if bins.size == 0:
                continue
            val = state.U[c, 0, bins].copy()
            _peel_many(state, family, idx, val)
            for i, v in zip(idx.tolist(), val.tolist()):
                recovered[i] = recovered.get(i, 0.0) + v
            progress += bins.size
        peeled += progress
        done = not np.any(np.abs(state.U[:, 0, :]) > zero_tol)
        if done or progress == 0:
            break
    recovered = {i: v for i, v in recovered.items() if abs(v) > zero_tol}
    nonzero = np.abs(state.U[:, 0, :]) > zero_tol
    return DecodeReport(
        recovered=dict(sorted(recovered.items())),
        success=bool(done),
        passes=passes,
        peeled=peeled,
        residual_energy=float(np.sum(state.U[:, 0, :] ** 2)),
        # every unrecovered coefficient occupies a live bin in each hash
        failure_support_size_bound=int(nonzero.sum(axis=1).max()) if nonzero.size else 0,
        residual_bins=int(nonzero.sum()),
        scale=state.scale,
        state=state,
    )


def sparse_fht(
    x,
    family: HashFamily,
    eps_zero: float = EPS_ZERO,
    eps_ratio: float = EPS_RATIO,
    max_passes: int = MAX_PASSES,
) -> DecodeReport:
    """Recover the sparse WHT of ``x`` from ``C (n - b + 1) B`` of its samples."""
    if isinstance(x, np.ndarray) or isinstance(x, (list, tuple)):
        x = check_signal(x)
    if signal_bits(x) != family.n:
        raise ValueError(f"signal has {signal_bits(x)} index bits, family expects {family.n}")
    state = compute_hash_state(x, family)
    return decode_state(state, family, eps_zero, eps_ratio, max_passes)


# ---------------------------------------------------------------- spectra


def spectrum_to_dense(spectrum: dict[int, float], n: int) -> np.ndarray:
    out = np.zeros(1 << n)
    for i, v in spectrum.items():
        out[i] = v
    return out


def dense_to_spectrum(X, tol: float = 0.0) -> dict[int, float]:
    X = np.asarray(X, dtype=np.float64)
    idx = np.flatnonzero(np.abs(X) > tol)
    return {int(i): float(X[i]) for i in idx}


def format_spectrum_csv(spectrum: dict[int, float]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "value"])
    for i, v in sorted(spectrum.items()):
        w.writerow([i, repr(float(v))])
    return buf.getvalue()


def parse_spectrum_csv(text: str) -> dict[int, float]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [h.strip() for h in rows[0]] != ["index", "value"]:
        raise ValueError("spectrum CSV must start with header 'index,value'")
    out = {}
    for row in rows[1:]:
        if not row:
            continue
        if len(row) != 2:
            raise ValueError(f"bad spectrum row {row!r}")
        i, v = int(row[0]), float(row[1])
        if i < 0:
            raise ValueError(f"negative index {i}")
        out[i] = v
    return out


def write_spectrum(path: str | os.PathLike, spectrum: dict[int, float]) -> None:
    with open(path, "w") as fh:
        fh.write(format_spectrum_csv(spectrum))


def read_spectrum(path: str | os.PathLike) -> dict[int, float]:
    with open(path) as fh:
        return parse_spectrum_csv(fh.read())

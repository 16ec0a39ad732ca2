"""Unitary Walsh-Hadamard transform and its index-domain identities."""
from __future__ import annotations

import os

import numpy as np

from .gf2 import GF2Matrix
from .validation import check_signal, signal_bits


def fht(x) -> np.ndarray:
    """Unitary fast Walsh-Hadamard transform (natural/Hadamard order).

    ``X_k = N^{-1/2} sum_m (-1)^{<k,m>} x_m``.  Self-inverse.  Uses
    ``log2 N`` butterfly stages over a single working copy.
    """
    return fht_rows(check_signal(x))


def fht_rows(a: np.ndarray) -> np.ndarray:
    """Unitary WHT along the last axis of an already validated float array."""
    n_total = a.shape[-1]
    out = np.array(a, dtype=np.float64, copy=True)
    lead = out.shape[:-1]
    h = 1
    while h < n_total:
        v = out.reshape(*lead, -1, 2, h)
        top = v[..., 0, :].copy()
        v[..., 0, :] += v[..., 1, :]
        np.subtract(top, v[..., 1, :], out=v[..., 1, :])
        h *= 2
    out *= 1.0 / np.sqrt(n_total)
    return out


def naive_wht(x) -> np.ndarray:
    """Quadratic-time reference WHT straight from the definition."""
    x = check_signal(x)
    n_total = x.shape[0]
    idx = np.arange(n_total, dtype=np.int64)
    signs = 1 - 2 * (np.bitwise_count(idx[:, None] & idx[None, :]) & 1).astype(np.float64)
    return signs @ x / np.sqrt(n_total)


def apply_shift(x, p: int) -> np.ndarray:
    """``y_m = x_{m XOR p}``."""
    x = check_signal(x)
    n = signal_bits(x)
    if not 0 <= p < x.shape[0]:
        raise ValueError(f"shift {p} is not an {n}-bit index")
    return x[np.arange(x.shape[0], dtype=np.int64) ^ p]


def apply_permutation(x, sigma: GF2Matrix) -> np.ndarray:
    """``y_m = x_{Sigma m}``; ``Sigma`` must be invertible."""
    x = check_signal(x)
    n = signal_bits(x)
    if sigma.shape != (n, n):
        raise ValueError(f"permutation must be {n}x{n}, got {sigma.shape}")
    if not sigma.is_invertible():
        raise ValueError("permutation matrix is singular")
    return x[sigma.matvec(np.arange(x.shape[0], dtype=np.int64))]


def subsample(x, b: int, p: int = 0) -> np.ndarray:
    """``u_m = x_{Psi_b m + p}`` for ``m`` in ``F2^b``.

    ``Psi_b m`` places ``m`` in the top ``b`` bits, so ``p`` must be zero
    there.
    """
    x = check_signal(x)
    n = signal_bits(x)
    if not 0 <= b < n:
        raise ValueError(f"need 0 <= b < n={n}, got b={b}")
    if not 0 <= p < x.shape[0] or p >> (n - b):
        raise ValueError(f"offset {p} must have its top {b} bits clear")
    return x[(np.arange(1 << b, dtype=np.int64) << (n - b)) | p]


def read_signal(path: str | os.PathLike) -> np.ndarray:
    """Read raw little-endian float64 samples; length must be a power of two."""
    size = os.path.getsize(path)
    if size % 8:
        raise ValueError(f"{path}: size {size} is not a multiple of 8 bytes")
    x = np.fromfile(path, dtype="<f8").astype(np.float64)
    return check_signal(x)


def write_signal(path: str | os.PathLike, x) -> None:
    np.asarray(x, dtype="<f8").tofile(path)

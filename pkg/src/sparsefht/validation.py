"""Input checks shared by the transforms, decoder and estimators."""
from __future__ import annotations

import numpy as np


def is_power_of_two(v: int) -> bool:
    return v > 0 and v & (v - 1) == 0


def check_signal(x, *, copy: bool = False) -> np.ndarray:
    """Return ``x`` as a finite 1-D float64 array whose length is a power of two."""
    x = np.array(x, dtype=np.float64, copy=copy) if copy else np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"signal must be 1-D, got shape {x.shape}")
    if not is_power_of_two(x.shape[0]):
        raise ValueError(f"signal length must be a power of two, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains NaN or Inf")
    return x


def signal_bits(x) -> int:
    """``n`` such that ``len(x) == 2**n``."""
    n_total = len(x)
    if not is_power_of_two(n_total):
        raise ValueError(f"signal length must be a power of two, got {n_total}")
    return n_total.bit_length() - 1


def check_signals(X) -> np.ndarray:
    """Validate a batch: 2-D ``(n_signals, 2**n)`` float array, all finite."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected 1-D or 2-D input, got shape {X.shape}")
    if not is_power_of_two(X.shape[1]):
        raise ValueError(f"signal length must be a power of two, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains NaN or Inf")
    return X


def resolve_bins(n: int, b_bits=None, alpha=None, sparsity=None) -> int:
    """Pick the per-hash bin exponent ``b``.

    Precedence: explicit ``b_bits``, then ``round(log2 sparsity)`` (load near
    one), then ``round(n * alpha)``; clipped to ``[1, n - 1]``.
    """
    if b_bits is not None:
        b = int(b_bits)
        if not 1 <= b <= n - 1:
            raise ValueError(f"b_bits must be in [1, {n - 1}], got {b}")
        return b
    if sparsity is not None:
        if sparsity < 1:
            raise ValueError("sparsity must be >= 1")
        b = int(round(np.log2(sparsity)))
    else:
        a = 1 / 3 if alpha is None else float(alpha)
        if not 0 < a < 1:
            raise ValueError(f"alpha must be in (0, 1), got {a}")
        b = int(round(n * a))
    return min(max(b, 1), n - 1)

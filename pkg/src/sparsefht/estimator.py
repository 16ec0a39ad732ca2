"""scikit-learn style wrappers around the dense and sparse transforms."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .hashing import CONSTRUCTIONS, HashFamily, build_family
from .peeling import EPS_RATIO, EPS_ZERO, MAX_PASSES, DecodeReport, sparse_fht, spectrum_to_dense
from .validation import check_signal, check_signals, is_power_of_two, resolve_bins
from .wht import fht_rows


class FastWalshHadamard(TransformerMixin, BaseEstimator):
    """Row-wise unitary Walsh-Hadamard transform.  Stateless; ``fit`` only records the length."""

    def fit(self, X, y=None):
        X = check_signals(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_signals(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} samples per signal, got {X.shape[1]}")
        return fht_rows(X)

    def inverse_transform(self, X):
        return self.transform(X)


class SparseWalshHadamard(TransformerMixin, BaseEstimator):
    """Sparse WHT by hashing and peeling.

    ``fit`` fixes the hash family for signals of one length; ``transform``
    decodes each row and returns the dense spectrum, while :meth:`decode`
    returns the full :class:`~sparsefht.peeling.DecodeReport`.

    Parameters
    ----------
    n_hashes : int
        Number of hashes ``C``.
    construction : {"circular", "disjoint", "projection", "random"}
    b_bits, sparsity, alpha :
        Ways to size each hash; the first one given wins.  ``sparsity`` picks
        ``B`` as the power of two nearest ``K``.  With none, ``alpha = 1/3``.
    eps_zero, eps_ratio : float
        Zero and ratio-test tolerances, relative to the largest bin magnitude.
    max_passes : int
    random_state : int, Generator or None
        Only used by ``construction="random"``.
    """

    def __init__(
        self,
        n_hashes=4,
        construction="circular",
        b_bits=None,
        sparsity=None,
        alpha=None,
        eps_zero=EPS_ZERO,
        eps_ratio=EPS_RATIO,
        max_passes=MAX_PASSES,
        random_state=None,
    ):
        self.n_hashes = n_hashes
        self.construction = construction
        self.b_bits = b_bits
        self.sparsity = sparsity
        self.alpha = alpha
        self.eps_zero = eps_zero
        self.eps_ratio = eps_ratio
        self.max_passes = max_passes
        self.random_state = random_state

    def fit(self, X, y=None):
        X = np.asarray(X)
        length = X.shape[-1] if X.ndim else 0
        if not is_power_of_two(length):
            raise ValueError(f"signal length must be a power of two, got {length}")
        n = length.bit_length() - 1
        if n < 2:
            raise ValueError("signals need at least 4 samples")
        if self.construction not in CONSTRUCTIONS:
            raise ValueError(f"construction must be one of {CONSTRUCTIONS}")
        if self.n_hashes < 1:
            raise ValueError("n_hashes must be >= 1")
        b = resolve_bins(n, self.b_bits, self.alpha, self.sparsity)
        self.family_ = build_family(self.construction, n, b, self.n_hashes, self.random_state)
        self.n_bits_ = n
        self.n_features_in_ = 1 << n
        return self

    @classmethod
    def from_family(cls, family: HashFamily, **params):
        est = cls(n_hashes=family.C, construction=family.construction, b_bits=family.b, **params)
        est.family_ = family
        est.n_bits_ = family.n
        est.n_features_in_ = 1 << family.n
        return est

    def decode(self, x) -> DecodeReport:
        check_is_fitted(self, "family_")
        x = check_signal(x)
        if x.shape[0] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} samples, got {x.shape[0]}")
        return sparse_fht(x, self.family_, self.eps_zero, self.eps_ratio, self.max_passes)

    def transform(self, X):
        check_is_fitted(self, "family_")
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        X = check_signals(X)
        self.reports_ = [self.decode(row) for row in X]
        out = np.stack([spectrum_to_dense(r.recovered, self.n_bits_) for r in self.reports_])
        return out[0] if single else out

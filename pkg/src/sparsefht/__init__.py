"""Sparse fast Walsh-Hadamard transform via GF(2) hashing and peeling."""
from .estimator import FastWalshHadamard, SparseWalshHadamard
from .gf2 import GF2Matrix, SingularMatrixError, gf2_inner_product, mat_inverse, mat_mul, random_invertible
from .hashing import (
    HashConfig,
    HashFamily,
    HashState,
    build_disjoint_family,
    build_family,
    build_generalized_family,
    build_projection_family,
    build_random_family,
    compute_hash_state,
    fast_hadamard_hashing,
)
from .peeling import DecodeReport, classify_bin, peel, sparse_fht
from .wht import fht, naive_wht

__version__ = "0.1.0"

__all__ = [
    "DecodeReport",
    "FastWalshHadamard",
    "GF2Matrix",
    "HashConfig",
    "HashFamily",
    "HashState",
    "SingularMatrixError",
    "SparseWalshHadamard",
    "build_disjoint_family",
    "build_family",
    "build_generalized_family",
    "build_projection_family",
    "build_random_family",
    "classify_bin",
    "compute_hash_state",
    "fast_hadamard_hashing",
    "fht",
    "gf2_inner_product",
    "mat_inverse",
    "mat_mul",
    "naive_wht",
    "peel",
    "random_invertible",
    "sparse_fht",
]

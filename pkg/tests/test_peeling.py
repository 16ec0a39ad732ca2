import json
from itertools import combinations

import numpy as np
import pytest

from oracles import brute_state, dense
from sparsefht.hashing import (
    build_disjoint_family,
    build_generalized_family,
    build_projection_family,
    build_random_family,
    compute_hash_state,
    state_from_spectrum,
)
from sparsefht.peeling import (
    EPS_ZERO,
    MULTITON,
    SINGLETON,
    ZEROTON,
    DecodeReport,
    classify_bin,
    decode_state,
    dense_to_spectrum,
    format_spectrum_csv,
    parse_spectrum_csv,
    peel,
    read_spectrum,
    sparse_fht,
    spectrum_to_dense,
    write_spectrum,
)
from sparsefht.wht import fht, naive_wht

N6_FAMILIES = {
    "disjoint": lambda: build_disjoint_family(6, 3),
    "projection": lambda: build_projection_family(6, 3),
    "circular": lambda: build_generalized_family(6, 3, 3),
}


def one_sparse(n, j, v):
    X = np.zeros(1 << n)
    X[j] = v
    return fht(X)


def test_classify_zeroton():
    fam = build_disjoint_family(6, 3)
    state = compute_hash_state(one_sparse(6, 5, 1.0), fam)
    empty = next(k for k in range(4) if k != fam[0].hash_index(5))
    assert classify_bin(state, fam, 0, empty).kind == ZEROTON


def test_classify_singleton_example():
    fam = build_projection_family(6, 3)
    j = 0b101101
    state = compute_hash_state(one_sparse(6, j, 3.7), fam)
    for c, cfg in enumerate(fam):
        k = cfg.hash_index(j)
        ratios = state.U[c, 1:, k] / state.U[c, 0, k]
        assert np.abs(np.abs(ratios) - 1).max() <= 1e-12
        got = classify_bin(state, fam, c, k)
        assert got.is_singleton and got.index == j
        assert got.value == pytest.approx(3.7, abs=1e-12)


def test_classify_two_collision_example():
    fam = build_disjoint_family(6, 3)
    a, b = 0b000001, 0b000101  # same low window
    state = state_from_spectrum({a: 1.0, b: 1.0}, fam)
    got = classify_bin(state, fam, 0, fam[0].hash_index(a))
    assert got.kind == MULTITON
    k = fam[0].hash_index(a)
    assert np.any(np.abs(state.U[0, 1:, k]) < 1e-12)


@pytest.mark.parametrize("name", sorted(N6_FAMILIES))
def test_no_false_singletons_exhaustive(name):
    fam = N6_FAMILIES[name]()
    rng = np.random.default_rng(sorted(N6_FAMILIES).index(name))
    checked = 0
    for a, b in combinations(range(64), 2):
        va, vb = rng.standard_normal(2)
        state = state_from_spectrum({a: va, b: vb}, fam)
        for c, cfg in enumerate(fam):
            if cfg.hash_index(a) == cfg.hash_index(b):
                assert classify_bin(state, fam, c, cfg.hash_index(a)).kind == MULTITON
                checked += 1
    assert checked > 0


def test_peel_unique_coefficient_empties_state():
    fam = build_generalized_family(9, 4, 3)
    state = compute_hash_state(one_sparse(9, 300, -1.25), fam)
    peel(state, fam, 300, -1.25)
    assert np.abs(state.U).max() <= EPS_ZERO * state.scale


def test_peel_zero_is_noop():
    fam = build_disjoint_family(6, 3)
    state = state_from_spectrum({7: 2.0, 40: -1.0}, fam)
    before = state.U.copy()
    peel(state, fam, 7, 0.0)
    assert np.array_equal(state.U, before)
    with pytest.raises(ValueError):
        peel(state, fam, 7, np.nan)


def test_peel_reveals_partner():
    fam = build_disjoint_family(6, 3)
    a, b = 0b010011, 0b110111
    assert fam[0].hash_index(a) == fam[0].hash_index(b)
    state = state_from_spectrum({a: 0.8, b: -1.9}, fam)
    k = fam[0].hash_index(a)
    assert classify_bin(state, fam, 0, k).kind == MULTITON
    peel(state, fam, a, 0.8)
    got = classify_bin(state, fam, 0, k)
    assert got.kind == SINGLETON and got.index == b
    assert got.value == pytest.approx(-1.9)


def test_conservation_against_brute_force_shadow():
    rng = np.random.default_rng(5)
    n = 8
    for fam in (build_random_family(n, 3, 3, rng), build_disjoint_family(n, 4), build_projection_family(8, 4)):
        support = [int(i) for i in rng.choice(1 << n, 7, replace=False)]
        X = np.zeros(1 << n)
        X[support] = rng.standard_normal(7)
        state = compute_hash_state(fht(X), fam)
        for j in support:
            peel(state, fam, j, X[j])
            X[j] = 0.0
            assert np.abs(state.U - brute_state(X, fam)).max() <= EPS_ZERO * state.scale


def test_singleton_index_lands_in_queried_bin():
    rng = np.random.default_rng(6)
    fam = build_random_family(8, 3, 3, rng)
    for _ in range(30):
        spectrum = {int(i): float(v) for i, v in zip(rng.choice(256, 5, replace=False), rng.standard_normal(5))}
        state = state_from_spectrum(spectrum, fam)
        for c, cfg in enumerate(fam):
            for k in range(fam.n_bins):
                got = classify_bin(state, fam, c, k)
                if got.is_singleton:
                    assert cfg.hash_index(got.index) == k
                    assert got.index in spectrum


def test_sparse_fht_zero_signal():
    rep = sparse_fht(np.zeros(1 << 10), build_generalized_family(10, 4, 3))
    assert rep.success and rep.recovered == {} and rep.passes == 1


@pytest.mark.parametrize(
    "family",
    [build_disjoint_family(9, 3), build_projection_family(9, 3), build_generalized_family(9, 4, 4), build_random_family(9, 3, 2, 1)],
    ids=["disjoint", "projection", "circular", "random"],
)
def test_sparse_fht_one_sparse(family):
    rep = sparse_fht(one_sparse(9, 333, 2.5), family)
    assert rep.success and rep.passes == 1
    assert list(rep.recovered) == [333]
    assert rep.recovered[333] == pytest.approx(2.5, abs=1e-12)


def test_sparse_fht_rejects_bad_input():
    fam = build_disjoint_family(6, 3)
    with pytest.raises(ValueError):
        sparse_fht(np.full(64, np.inf), fam)
    with pytest.raises(ValueError):
        sparse_fht(np.zeros(128), fam)


def test_sparse_fht_matches_full_transform_n12():
    fam = build_disjoint_family(12, 3)
    ok = 0
    for trial in range(100):
        rng = np.random.default_rng([12, trial])
        X = np.zeros(1 << 12)
        X[rng.choice(1 << 12, 16, replace=False)] = rng.standard_normal(16)
        x = fht(X)
        rep = sparse_fht(x, fam)
        full = fht(x)
        expected = dense_to_spectrum(full, EPS_ZERO * rep.scale)
        ok += rep.success and rep.recovered.keys() == expected.keys() and all(
            abs(rep.recovered[i] - expected[i]) <= 1e-9 for i in expected
        )
    assert ok >= 95


def test_single_hash_fails_on_collision():
    fam = build_generalized_family(6, 2, 1)
    x = fht(dense({0b000001: 1.0, 0b000101: 2.0}, 6))
    rep = sparse_fht(x, fam)
    assert not rep.success and rep.recovered == {}
    assert rep.failure_support_size_bound == 1 and rep.residual_bins == 1


def test_passes_monotone_and_bounded():
    rng = np.random.default_rng(7)
    fam = build_generalized_family(12, 5, 3)
    X = np.zeros(1 << 12)
    X[rng.choice(1 << 12, 60, replace=False)] = rng.standard_normal(60)
    x = fht(X)
    base = compute_hash_state(x, fam)
    prev = -1
    for limit in range(1, 8):
        rep = decode_state(base.copy(), fam, max_passes=limit)
        assert rep.passes <= limit
        assert rep.peeled >= prev
        prev = rep.peeled
    with pytest.raises(ValueError):
        decode_state(base.copy(), fam, max_passes=0)


def test_success_bounds_residual_energy():
    rng = np.random.default_rng(8)
    fam = build_generalized_family(12, 5, 4)
    for _ in range(20):
        X = np.zeros(1 << 12)
        X[rng.choice(1 << 12, 24, replace=False)] = rng.standard_normal(24)
        rep = sparse_fht(fht(X), fam)
        if rep.success:
            bins = fam.C * fam.n_bins
            assert rep.residual_energy <= EPS_ZERO**2 * rep.scale**2 * bins
            assert all(v != 0 for v in rep.recovered.values())


def test_repeat_recovery_accumulates():
    fam = build_disjoint_family(6, 3)
    state = state_from_spectrum({9: 1.0}, fam)
    # an extra unpeeled copy of the same coefficient in the state
    state.U *= 2.0
    rep = decode_state(state, fam)
    assert rep.success and rep.recovered == {9: pytest.approx(2.0)}


def test_spectrum_csv_round_trip(tmp_path):
    spectrum = {0: 1.0, 17: -2.5e-300, 4095: 0.1 + 0.2}
    text = format_spectrum_csv(spectrum)
    assert text.splitlines()[0] == "index,value"
    assert parse_spectrum_csv(text) == spectrum
    write_spectrum(tmp_path / "s.csv", spectrum)
    assert read_spectrum(tmp_path / "s.csv") == spectrum
    for bad in ("", "i,v\n1,2\n", "index,value\n1\n", "index,value\n-1,2\n"):
        with pytest.raises(ValueError):
            parse_spectrum_csv(bad)


def test_dense_spectrum_helpers():
    X = np.array([0.0, 1.5, 0.0, -2.0])
    assert dense_to_spectrum(X) == {1: 1.5, 3: -2.0}
    assert np.array_equal(spectrum_to_dense({1: 1.5, 3: -2.0}, 2), X)
    assert np.allclose(naive_wht(fht(X)), X)


def test_report_json_keys():
    rep = sparse_fht(one_sparse(6, 3, 1.0), build_disjoint_family(6, 3))
    assert isinstance(rep, DecodeReport)
    payload = json.loads(rep.to_json())
    for key in ("recovered_count", "success", "passes", "residual_energy", "failure_support_size_bound", "peeled"):
        assert key in payload
    assert payload["recovered_count"] == 1 and payload["success"] is True

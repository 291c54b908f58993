import math

import numpy as np
import pytest

from conftest import random_spin_bank, random_spins, random_unitary
from wavebank import (
    NotFactorableError,
    PolyLoop,
    SpinFactorization,
    factor_to_spins,
    filters_to_loop,
    loop_to_filters,
    orthogonality_check,
    preset_bank,
    symbol_eval,
    synthesize_from_spins,
    unitarity_check,
)

SQRT2 = math.sqrt(2.0)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / SQRT2


def root_sum_eval(bank, z):
    """Independent oracle: the polyphase matrix by the N-th-root sum.

    Entry (j, k) is ``(1/N) * sum_{w^N = z} w^{-k} m_j(w)`` with the symbols
    evaluated directly from the taps.
    """
    N = bank.N
    w0 = complex(z) ** (1.0 / N)
    roots = w0 * np.exp(2j * np.pi * np.arange(N) / N)
    A = np.zeros((N, N), dtype=complex)
    for j, f in enumerate(bank.filters):
        for k in range(N):
            A[j, k] = sum(w ** (-k) * symbol_eval(f, N, w) for w in roots) / N
    return A


@pytest.mark.parametrize("name", ["haar", "db4", "stretched-haar:1", "stretched-haar:2"])
def test_filters_to_loop_matches_root_sum(name):
    bank = preset_bank(name)
    loop = filters_to_loop(bank)
    for z in np.exp(2j * np.pi * np.arange(64) / 64):
        assert np.abs(loop(z) - root_sum_eval(bank, z)).max() <= 1e-12


def test_filters_to_loop_matches_root_sum_random():
    rng = np.random.default_rng(10)
    for _ in range(10):
        bank = random_spin_bank(rng, int(rng.integers(2, 5)), int(rng.integers(1, 5)))
        loop = filters_to_loop(bank)
        for z in np.exp(2j * np.pi * np.arange(16) / 16):
            assert np.abs(loop(z) - root_sum_eval(bank, z)).max() <= 1e-12


def test_haar_loop_is_constant_hadamard():
    loop = filters_to_loop(preset_bank("haar"))
    assert loop.degree == 0
    assert np.allclose(loop.coeffs[0], HADAMARD, atol=1e-15)


def test_stretched_loop_coefficients():
    loop = filters_to_loop(preset_bank("stretched-haar:1"))
    assert loop.degree == 1
    assert np.allclose(loop.coeffs[0], [[1 / SQRT2, 0], [1 / SQRT2, 0]], atol=1e-15)
    assert np.allclose(loop.coeffs[1], [[0, 1 / SQRT2], [0, -1 / SQRT2]], atol=1e-15)


def _delta_bank(N):
    from wavebank import FilterCoeffs, FilterBank

    root = math.sqrt(N)
    return FilterBank(
        N,
        1,
        tuple(FilterCoeffs([root], offset=j) for j in range(N)),
        lowpass_normalized=False,
        name="delta",
    )


def test_delta_bank_gives_identity_loop():
    for N in (2, 3, 4):
        loop = filters_to_loop(_delta_bank(N))
        assert loop.degree == 0
        assert np.allclose(loop.coeffs[0], np.eye(N), atol=1e-15)


def test_identity_loop_gives_monomial_filters():
    bank = loop_to_filters(PolyLoop(3, np.eye(3, dtype=complex)[None]))
    for j, f in enumerate(bank.filters):
        dense = np.zeros(3, dtype=complex)
        dense[j] = math.sqrt(3)
        assert np.allclose(f.dense(3), dense, atol=1e-15)
    assert not bank.lowpass_normalized


def test_hadamard_loop_gives_haar():
    bank = loop_to_filters(PolyLoop(2, HADAMARD[None].astype(complex)))
    haar = preset_bank("haar")
    for f, h in zip(bank.filters, haar.filters):
        assert np.allclose(f.dense(2), h.dense(2), rtol=5e-16, atol=0.0)


def test_round_trips_are_lossless():
    # The index pairing is an exact permutation; the only arithmetic is one
    # sqrt(N) scaling per direction, so every value round-trips within 2 ulp
    # (bitwise equality is unattainable in IEEE doubles for non-square N).
    rng = np.random.default_rng(31)
    banks = [preset_bank(n) for n in ("haar", "db4", "stretched-haar:1")]
    banks += [random_spin_bank(rng, int(rng.integers(2, 5)), int(rng.integers(1, 7))) for _ in range(20)]
    for bank in banks:
        loop = filters_to_loop(bank)
        back = loop_to_filters(loop)
        assert back.N == bank.N
        width = bank.N * max(bank.g, back.g)
        for f1, f2 in zip(bank.filters, back.filters):
            assert np.allclose(f1.dense(width), f2.dense(width), rtol=5e-16, atol=0.0)
        again = filters_to_loop(back)
        assert np.allclose(again.coeffs, loop.coeffs, rtol=5e-16, atol=0.0)
        # zero taps stay exactly zero: the permutation itself adds nothing
        assert np.array_equal(f1.dense(width) == 0, f2.dense(width) == 0)


def test_unitarity_check():
    haar_loop = filters_to_loop(preset_bank("haar"))
    rep = unitarity_check(haar_loop)
    assert rep.passed and rep.max_residual <= 1e-15
    bad = PolyLoop(2, np.array([[[1.0, 0.0], [0.0, 0.0]]], dtype=complex))
    assert not unitarity_check(bad).passed
    with pytest.raises(ValueError):
        unitarity_check(filters_to_loop(preset_bank("db4")), num_samples=2)


def test_unitarity_random_spins():
    rng = np.random.default_rng(8)
    for _ in range(100):
        sf = random_spins(rng, int(rng.integers(2, 5)), int(rng.integers(0, 9)))
        loop = synthesize_from_spins(sf)
        rep = unitarity_check(loop, 2 * loop.degree + 1)
        assert rep.max_residual <= 1e-12


def test_unitarity_iff_orthogonality():
    rng = np.random.default_rng(12)
    for _ in range(20):
        bank = random_spin_bank(rng, int(rng.integers(2, 4)), int(rng.integers(1, 5)))
        loop = filters_to_loop(bank)
        assert unitarity_check(loop, 2 * loop.degree + 1).passed
        assert all(orthogonality_check(f, bank.N).passed for f in bank.filters)
        # perturb one tap: the broken bank fails on both sides of the equivalence
        taps = bank.filters[0].taps.copy()
        taps[0] += 1e-3
        from wavebank import FilterBank, FilterCoeffs

        broken = FilterBank(
            bank.N,
            bank.g,
            (FilterCoeffs(taps, offset=bank.filters[0].offset, unpruned=True),)
            + bank.filters[1:],
            lowpass_normalized=False,
        )
        assert not orthogonality_check(broken.filters[0], bank.N).passed
        assert not unitarity_check(filters_to_loop(broken)).passed


def test_synthesize_trivial_cases():
    assert synthesize_from_spins(SpinFactorization(2, np.eye(2), ())).degree == 0
    loop = synthesize_from_spins(SpinFactorization(2, HADAMARD, ()))
    haar_loop = filters_to_loop(preset_bank("haar"))
    assert np.allclose(loop.coeffs, haar_loop.coeffs, atol=1e-15)


def test_spin_validation():
    with pytest.raises(ValueError):
        SpinFactorization(2, np.eye(2) * 2.0, ())  # not unitary
    with pytest.raises(ValueError):
        SpinFactorization(2, np.eye(2), (np.array([[1.0, 1.0]]),))  # not unit norm
    with pytest.raises(ValueError):
        SpinFactorization(2, np.eye(2), (np.eye(2),))  # rank N not allowed


def test_higher_rank_factors_supported():
    # spin vectors are rank one, but factors of any rank below N synthesize
    # and peel the same way
    rng = np.random.default_rng(44)
    z = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    q, _ = np.linalg.qr(z)
    sf = SpinFactorization(4, np.eye(4), (q.T.conj(),))
    loop = synthesize_from_spins(sf)
    assert loop.degree == 1
    assert unitarity_check(loop).passed
    back = synthesize_from_spins(factor_to_spins(loop))
    assert np.abs(back.coeffs - loop.coeffs).max() <= 1e-12


def test_degree_additivity():
    rng = np.random.default_rng(77)
    for _ in range(30):
        N = int(rng.integers(2, 5))
        k = int(rng.integers(1, 9))
        assert synthesize_from_spins(random_spins(rng, N, k)).degree == k


def test_db4_loop_from_single_spin_angle_search():
    """A one-dimensional search over real spin angles lands on the db4 loop."""
    target = filters_to_loop(preset_bank("db4"))
    V = factor_to_spins(target).V

    def err(theta):
        v = np.array([[math.cos(theta), math.sin(theta)]], dtype=complex)
        loop = synthesize_from_spins(SpinFactorization(2, V, (v,)))
        if loop.degree != target.degree:
            return 1.0
        return float(np.abs(loop.coeffs - target.coeffs).max())

    thetas = np.linspace(0.0, np.pi, 2001)
    best = min(thetas, key=err)
    lo, hi = best - 2e-3, best + 2e-3
    golden = (math.sqrt(5) - 1) / 2
    for _ in range(80):
        m1 = hi - golden * (hi - lo)
        m2 = lo + golden * (hi - lo)
        if err(m1) <= err(m2):
            hi = m2
        else:
            lo = m1
    assert err((lo + hi) / 2) <= 1e-8


def test_factor_constant_loop():
    sf = factor_to_spins(filters_to_loop(preset_bank("haar")))
    assert sf.factors == ()
    assert np.allclose(sf.V, HADAMARD, atol=1e-15)


def test_factor_db4_single_factor():
    sf = factor_to_spins(filters_to_loop(preset_bank("db4")))
    assert len(sf.factors) == 1
    assert sf.factors[0].shape[0] == 1


def test_factor_round_trip_random():
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(100):
        N = int(rng.integers(2, 5))
        k = int(rng.integers(1, 9))
        loop = synthesize_from_spins(random_spins(rng, N, k))
        sf = factor_to_spins(loop)
        assert len(sf.factors) == loop.degree
        back = synthesize_from_spins(sf)
        assert back.degree == loop.degree
        worst = max(worst, float(np.abs(back.coeffs - loop.coeffs).max()))
    assert worst <= 1e-10


def test_factor_pure_delay():
    for N in (2, 3):
        z_eye = PolyLoop(N, np.stack([np.zeros((N, N)), np.eye(N)]).astype(complex))
        sf = factor_to_spins(z_eye)
        assert len(sf.factors) == 2
        assert all(1 <= vecs.shape[0] <= N - 1 for vecs in sf.factors)
        back = synthesize_from_spins(sf)
        assert np.abs(back.coeffs - z_eye.coeffs).max() <= 1e-14


def test_factor_rejects_non_paraunitary():
    loop = filters_to_loop(preset_bank("db4"))
    coeffs = loop.coeffs.copy()
    coeffs[1, 0, 0] += 1e-3
    with pytest.raises(NotFactorableError) as exc:
        factor_to_spins(PolyLoop(2, coeffs))
    assert exc.value.residual > 1e-8


def test_left_unitary_twist_changes_only_v():
    rng = np.random.default_rng(123)
    loop = synthesize_from_spins(random_spins(rng, 3, 4))
    W = random_unitary(rng, 3)
    twisted = PolyLoop(3, W @ loop.coeffs)
    sf = factor_to_spins(loop)
    sft = factor_to_spins(twisted)
    assert len(sf.factors) == len(sft.factors)
    assert np.abs(W @ sf.V - sft.V).max() <= 1e-9
    back = synthesize_from_spins(sft)
    assert np.abs(back.coeffs - twisted.coeffs).max() <= 1e-10

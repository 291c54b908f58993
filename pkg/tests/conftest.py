"""Shared deterministic generators for the test suite."""

import numpy as np

from wavebank import FilterBank, SpinFactorization, loop_to_filters, synthesize_from_spins


def random_unitary(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    # fix the QR phase ambiguity so draws are deterministic across BLAS builds
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_spin_vector(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return (v / np.linalg.norm(v))[None, :]


def random_spins(rng, N, k):
    factors = tuple(random_spin_vector(rng, N) for _ in range(k))
    return SpinFactorization(N, random_unitary(rng, N), factors)


def random_spin_bank(rng, N, k) -> FilterBank:
    return loop_to_filters(synthesize_from_spins(random_spins(rng, N, k)))


def random_signal(rng, L):
    return rng.standard_normal(L) + 1j * rng.standard_normal(L)

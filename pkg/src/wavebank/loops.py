"""Polynomial unitary loops: the polyphase form of a filter bank.

A loop is a matrix polynomial ``A(z) = sum_d A_d z^d`` that maps the unit
circle into the N-by-N unitary group.  Loops and banks carry the same data:
``A_d[j, k] = a^{(j)}_{N d + k} / sqrt(N)``, so converting either way is pure
index bookkeeping with no arithmetic beyond the ``sqrt(N)`` scaling.

Degree-one elementary factors ``I - P + z P`` built from orthogonal
projections generate every polynomial loop; `synthesize_from_spins` expands a
constant unitary times such factors, and `factor_to_spins` peels the factors
back off by degree reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .filters import FilterBank, coeffs_from_dense, normalization_check

__all__ = [
    "UNITARITY_TOL",
    "SV_TOL",
    "PolyLoop",
    "SpinFactorization",
    "UnitarityReport",
    "NotFactorableError",
    "filters_to_loop",
    "loop_to_filters",
    "unitarity_check",
    "synthesize_from_spins",
    "factor_to_spins",
]

UNITARITY_TOL = 1e-10
# Singular values below this are treated as numerically zero when extracting
# projection ranges; two orders above the accumulation error at desk degrees.
SV_TOL = 1e-9
_PRUNE_TOL = 1e-12


class NotFactorableError(ValueError):
    """Degree reduction failed: the input is not numerically paraunitary."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def _as_coeffs(coeffs, N: int | None = None) -> np.ndarray:
    arr = np.asarray(coeffs, dtype=np.complex128)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[0] == 0:
        raise ValueError("coefficients must form a nonempty stack of square matrices")
    if N is not None and arr.shape[1] != N:
        raise ValueError(f"coefficient matrices are {arr.shape[1]}x{arr.shape[2]}, expected {N}x{N}")
    return arr


def _prune(coeffs: np.ndarray) -> np.ndarray:
    """Drop numerically zero trailing coefficient matrices (keep at least one)."""
    scale = np.abs(coeffs).max()
    if scale == 0.0:
        raise ValueError("loop is identically zero")
    d = coeffs.shape[0]
    while d > 1 and np.abs(coeffs[d - 1]).max() <= _PRUNE_TOL * scale:
        d -= 1
    return np.ascontiguousarray(coeffs[:d])


@dataclass(frozen=True, eq=False)
class PolyLoop:
    """Coefficients ``(A_0, ..., A_D)`` of a matrix polynomial on the circle.

    The trailing coefficient must be nonzero (pruned representation).
    """

    N: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("scale N must be at least 2")
        coeffs = _as_coeffs(self.coeffs, self.N)
        if np.abs(coeffs[-1]).max() == 0.0:
            raise ValueError("trailing coefficient is zero; store loops pruned")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __call__(self, z: complex) -> np.ndarray:
        """Evaluate ``A(z)`` by Horner's rule."""
        out = np.array(self.coeffs[-1])
        for d in range(self.coeffs.shape[0] - 2, -1, -1):
            out = out * z + self.coeffs[d]
        return out

    def eval_many(self, zs) -> np.ndarray:
        """Evaluate at a batch of points; returns ``(len(zs), N, N)``."""
        zs = np.asarray(zs, dtype=np.complex128)
        out = np.broadcast_to(self.coeffs[-1], (zs.size, self.N, self.N)).copy()
        for d in range(self.coeffs.shape[0] - 2, -1, -1):
            out = out * zs[:, None, None] + self.coeffs[d]
        return out


def _projection(vectors: np.ndarray) -> np.ndarray:
    # rows of `vectors` are an orthonormal basis of the projection's range
    return vectors.T @ vectors.conj()


@dataclass(frozen=True, eq=False)
class SpinFactorization:
    """A constant unitary ``V`` plus projection factors given by spin vectors.

    Each factor stores an orthonormal basis of its range as the rows of an
    ``(r, N)`` array with ``1 <= r <= N-1``; rank one (a single spin vector)
    is the generic case.  The loop it generates is
    ``V * prod_i (I - P_i + z P_i)`` in list order.
    """

    N: int
    V: np.ndarray
    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("scale N must be at least 2")
        V = np.asarray(self.V, dtype=np.complex128)
        if V.shape != (self.N, self.N):
            raise ValueError(f"V must be {self.N}x{self.N}")
        if np.abs(V.conj().T @ V - np.eye(self.N)).max() > 1e-12:
            raise ValueError("V is not unitary within 1e-12")
        factors = []
        for i, vecs in enumerate(self.factors):
            vecs = np.asarray(vecs, dtype=np.complex128)
            if vecs.ndim != 2 or vecs.shape[1] != self.N:
                raise ValueError(f"factor {i} vectors must be rows of length {self.N}")
            r = vecs.shape[0]
            if not 1 <= r <= self.N - 1:
                raise ValueError(f"factor {i} has rank {r}, expected 1..{self.N - 1}")
            if np.abs(vecs @ vecs.conj().T - np.eye(r)).max() > 1e-12:
                raise ValueError(f"factor {i} vectors are not orthonormal within 1e-12")
            factors.append(vecs)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "factors", tuple(factors))

    def projections(self) -> list[np.ndarray]:
        return [_projection(vecs) for vecs in self.factors]


@dataclass(frozen=True)
class UnitarityReport:
    passed: bool
    max_residual: float
    num_samples: int
    tol: float


def filters_to_loop(bank: FilterBank) -> PolyLoop:
    """Regroup bank taps into the polyphase loop ``A_d[j, k] = a^{(j)}_{Nd+k} / sqrt(N)``."""
    N, g = bank.N, bank.g
    dense = bank.dense_taps()  # (N, N*g)
    coeffs = dense.reshape(N, g, N).transpose(1, 0, 2) / math.sqrt(N)
    return PolyLoop(N, _prune(coeffs))


def loop_to_filters(loop: PolyLoop) -> FilterBank:
    """Inverse tap regrouping; the resulting bank has genus ``degree + 1``.

    The caller is expected to pass a verified unitary loop.  The bank's
    ``lowpass_normalized`` flag is set from the actual DC sum of channel 0.
    """
    N = loop.N
    g = loop.degree + 1
    dense = loop.coeffs.transpose(1, 0, 2).reshape(N, N * g) * math.sqrt(N)
    filters = tuple(coeffs_from_dense(row) for row in dense)
    normalized = normalization_check(filters[0], N).passed
    return FilterBank(N, g, filters, lowpass_normalized=normalized)


def unitarity_check(loop: PolyLoop, num_samples: int | None = None) -> UnitarityReport:
    """Sample ``max |A(z) A(z)^* - I|`` at equispaced points of the circle.

    ``A(z) A(z)^* - I`` is a Laurent polynomial with ``2*degree + 1``
    coefficients, so a pass at ``num_samples >= 2*degree + 1`` distinct points
    certifies the polynomial identity itself, not just the samples.
    """
    need = 2 * loop.degree + 1
    if num_samples is None:
        num_samples = max(need, 16)
    if num_samples < need:
        raise ValueError(f"need at least {need} samples to certify degree {loop.degree}")
    zs = np.exp(2j * np.pi * np.arange(num_samples) / num_samples)
    vals = loop.eval_many(zs)
    gram = vals @ vals.conj().transpose(0, 2, 1)
    residual = float(np.abs(gram - np.eye(loop.N)).max())
    return UnitarityReport(residual <= UNITARITY_TOL, residual, num_samples, UNITARITY_TOL)


def _polymul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    N = A.shape[1]
    out = np.zeros((A.shape[0] + B.shape[0] - 1, N, N), dtype=np.complex128)
    for i in range(A.shape[0]):
        out[i : i + B.shape[0]] += A[i] @ B
    return out


def synthesize_from_spins(sf: SpinFactorization) -> PolyLoop:
    """Expand ``V * prod_i (I - P_i + z P_i)`` into coefficient form.

    The degree is at most the number of factors, with equality whenever the
    consecutive products are nondegenerate.
    """
    N = sf.N
    eye = np.eye(N, dtype=np.complex128)
    coeffs = sf.V[None, :, :].copy()
    for P in sf.projections():
        coeffs = _polymul(coeffs, np.stack([eye - P, P]))
    return PolyLoop(N, _prune(coeffs))


def factor_to_spins(loop: PolyLoop, sv_tol: float = SV_TOL) -> SpinFactorization:
    """Peel degree-one projection factors off a unitary loop.

    Each step takes ``P`` = the orthogonal projection onto the row space of
    the leading coefficient ``A_D`` (its right singular vectors above
    ``sv_tol``, conjugated) and multiplies by ``I - P + P/z``.  Unitarity on
    the circle forces ``A_0 P = 0``, so the quotient stays polynomial and the
    degree drops by one; what survives at degree zero is the constant ``V``.
    The factor list is ordered so that `synthesize_from_spins` reproduces the
    input.

    The same subspace is the null space of the constant coefficient, and the
    two estimates are complementary in conditioning (a nearly rank-deficient
    leading coefficient goes with a well-separated constant-term kernel and
    vice versa), so each step computes both and keeps whichever violates the
    two cancellation constraints less.

    A leading coefficient of full rank can only occur when the constant term
    vanishes (the loop is ``z`` times a lower-degree loop); that pure delay is
    peeled as two complementary projections so every stored factor keeps rank
    at most ``N - 1``.

    Raises NotFactorableError when the constant term leaks past ``P`` beyond
    ``10 * sv_tol``, which signals a numerically non-paraunitary input.
    """
    N = loop.N
    eye = np.eye(N, dtype=np.complex128)
    leak_tol = 10.0 * sv_tol
    coeffs = loop.coeffs.copy()
    peeled: list[np.ndarray] = []  # projections in peel order (rightmost factor first)
    while coeffs.shape[0] > 1:
        _, s, Vh = np.linalg.svd(coeffs[-1])
        rank = int(np.sum(s > sv_tol))
        if rank == 0:
            raise NotFactorableError("leading coefficient is numerically zero", float(s[0]))
        if rank == N:
            leak = float(np.abs(coeffs[0]).max())
            if leak > leak_tol:
                raise NotFactorableError(
                    "full-rank leading coefficient with nonzero constant term", leak
                )
            # z*I = (I - P + zP)(I - (I-P) + z(I-P)) for any projection P;
            # emit the pair right factor first, then divide the loop by z.
            head = np.zeros((N - 1, N), dtype=np.complex128)
            head[:, 1:] = np.eye(N - 1)
            tail = np.zeros((1, N), dtype=np.complex128)
            tail[0, 0] = 1.0
            peeled.append(tail)
            peeled.append(head)
            coeffs = _prune(coeffs[1:])
            continue
        candidates = [Vh[:rank].conj()]  # orthonormal rows spanning range(A_D^*)
        _, s0, Vh0 = np.linalg.svd(coeffs[0])
        s0 = np.concatenate([s0, np.zeros(N - s0.size)])
        if int(np.sum(s0 <= sv_tol)) == rank:
            candidates.append(Vh0[N - rank :].conj())  # rows spanning ker(A_0)
        best = None
        for vectors in candidates:
            P = _projection(vectors)
            leak = float(np.abs(coeffs[0] @ P).max())
            drop = float(np.abs(coeffs[-1] @ (eye - P)).max())
            if best is None or max(leak, drop) < best[0]:
                best = (max(leak, drop), vectors, P)
        residual, vectors, P = best
        if residual > leak_tol:
            raise NotFactorableError(
                "constant term not annihilated by the extracted projection", residual
            )
        coeffs = _prune(coeffs[:-1] @ (eye - P) + coeffs[1:] @ P)
        peeled.append(vectors)
    return SpinFactorization(N, coeffs[0], tuple(reversed(peeled)))

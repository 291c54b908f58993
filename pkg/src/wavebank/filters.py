"""Finite N-band filter banks: tap containers, verification checks, presets.

Conventions used throughout the package:

* a filter is a finite complex tap sequence ``a_offset, ..., a_{offset+L-1}``,
  with out-of-range indices contributing zero;
* the symbol of a filter is ``m(z) = N^{-1/2} sum_k a_k z^k`` on ``|z| = 1``;
* a scale-``N`` bank of genus ``g`` holds ``N`` filters whose taps lie in
  ``[0, N*g)``, channel 0 being the low-pass;
* an orthogonal low-pass satisfies ``sum_k a_{k+N*l} conj(a_k) = N delta_l``
  and, when additionally DC-normalized, ``sum_k a_k = N`` (i.e. ``m(1) =
  sqrt(N)``).

All operations are pure and deterministic; the container types are treated
as immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ALG_TOL",
    "CIRCLE_TOL",
    "FilterCoeffs",
    "FilterBank",
    "NormalizationReport",
    "OrthogonalityReport",
    "QmfReport",
    "BankReport",
    "coeffs_from_dense",
    "normalization_check",
    "orthogonality_check",
    "symbol_eval",
    "qmf_identity_check",
    "haar_complement",
    "preset_bank",
    "verify_bank",
]

# Algebraic identities evaluated in closed form vs. identities checked by
# sampling the unit circle (the latter accumulate a little more noise).
ALG_TOL = 1e-10
CIRCLE_TOL = 1e-8


def _as_taps(values) -> np.ndarray:
    taps = np.asarray(values, dtype=np.complex128)
    if taps.ndim != 1 or taps.size == 0:
        raise ValueError("taps must be a nonempty one-dimensional sequence")
    return taps


@dataclass(frozen=True, eq=False)
class FilterCoeffs:
    """A finite complex tap sequence starting at grid index ``offset``.

    Leading/trailing zero taps are rejected unless ``unpruned=True``, so a
    stored sequence always spans exactly its support.
    """

    taps: np.ndarray
    offset: int = 0
    unpruned: bool = False

    def __post_init__(self):
        taps = _as_taps(self.taps)
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "offset", int(self.offset))
        if not self.unpruned and (taps[0] == 0 or taps[-1] == 0):
            raise ValueError(
                "leading/trailing taps are zero; pass unpruned=True to keep them"
            )

    def __len__(self) -> int:
        return self.taps.size

    @property
    def span(self) -> int:
        """One past the index of the last tap (counted from 0)."""
        return self.offset + self.taps.size

    def dense(self, length: int | None = None) -> np.ndarray:
        """Taps re-indexed from 0 and zero-padded to ``length`` entries."""
        if self.offset < 0:
            raise ValueError("dense layout requires a nonnegative offset")
        n = self.span if length is None else int(length)
        if n < self.span:
            raise ValueError(f"length {n} would clip taps ending at index {self.span - 1}")
        out = np.zeros(n, dtype=np.complex128)
        out[self.offset : self.span] = self.taps
        return out


def coeffs_from_dense(values) -> FilterCoeffs:
    """Build a pruned FilterCoeffs from a dense 0-indexed array.

    Exact zero margins become the offset / a shorter tap vector; interior
    zeros are kept.
    """
    dense = _as_taps(values)
    nonzero = np.nonzero(dense)[0]
    if nonzero.size == 0:
        raise ValueError("all taps are zero")
    lo, hi = int(nonzero[0]), int(nonzero[-1])
    return FilterCoeffs(dense[lo : hi + 1], offset=lo)


@dataclass(frozen=True, eq=False)
class FilterBank:
    """``N`` filters on a common scale; channel 0 is the low-pass.

    ``lowpass_normalized`` records whether the DC condition ``sum a_k = N``
    is part of the bank's contract; orthogonal-but-unnormalized banks (pure
    delay systems, for instance) carry ``False``.
    """

    N: int
    g: int
    filters: tuple[FilterCoeffs, ...]
    lowpass_normalized: bool = True
    name: str = ""

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("scale N must be at least 2")
        if self.g < 1:
            raise ValueError("genus g must be at least 1")
        filters = tuple(self.filters)
        if len(filters) != self.N:
            raise ValueError(f"expected {self.N} filters, got {len(filters)}")
        for j, f in enumerate(filters):
            if f.offset < 0 or f.span > self.N * self.g:
                raise ValueError(
                    f"filter {j} taps occupy [{f.offset}, {f.span}) outside [0, {self.N * self.g})"
                )
        object.__setattr__(self, "filters", filters)

    @property
    def lowpass(self) -> FilterCoeffs:
        return self.filters[0]

    def dense_taps(self) -> np.ndarray:
        """All channels re-indexed from 0, as an ``(N, N*g)`` array."""
        return np.stack([f.dense(self.N * self.g) for f in self.filters])


@dataclass(frozen=True)
class NormalizationReport:
    passed: bool
    residual: float
    tol: float


@dataclass(frozen=True)
class OrthogonalityReport:
    passed: bool
    worst_lag: int
    residual: float
    tol: float


@dataclass(frozen=True)
class QmfReport:
    passed: bool
    max_residual: float
    num_samples: int
    tol: float


@dataclass(frozen=True)
class BankReport:
    """Aggregate of the per-filter and low-pass checks for a whole bank."""

    passed: bool
    orthogonality: tuple[OrthogonalityReport, ...]
    qmf: QmfReport
    normalization: NormalizationReport | None


def normalization_check(f: FilterCoeffs, N: int, tol: float = ALG_TOL) -> NormalizationReport:
    """Check the DC condition ``sum_k a_k = N``."""
    residual = float(abs(f.taps.sum() - N))
    return NormalizationReport(residual <= tol, residual, tol)


def orthogonality_check(f: FilterCoeffs, N: int, tol: float = ALG_TOL) -> OrthogonalityReport:
    """Check translate orthonormality ``sum_k a_{k+N*l} conj(a_k) = N delta_l``.

    Every lag ``l`` with a nonempty overlap is evaluated; negative lags are
    conjugates of positive ones, so ``worst_lag`` is reported nonnegative.
    The correlation is invariant under a common index shift, so the offset
    plays no role here.
    """
    a = f.taps
    lmax = (a.size - 1) // N
    worst_lag = 0
    residual = 0.0
    for l in range(lmax + 1):
        s = np.vdot(a[: a.size - N * l], a[N * l :]) if l else np.vdot(a, a)
        target = N if l == 0 else 0.0
        dev = float(abs(s - target))
        if dev > residual:
            residual = dev
            worst_lag = l
    return OrthogonalityReport(residual <= tol, worst_lag, residual, tol)


def symbol_eval(f: FilterCoeffs, N: int, z: complex) -> complex:
    """Evaluate ``m(z) = N^{-1/2} sum_k a_k z^{k+offset}`` for ``|z| = 1``."""
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-12:
        raise ValueError(f"z must lie on the unit circle, got |z| = {abs(z)}")
    powers = z ** np.arange(f.offset, f.span)
    return complex(np.dot(f.taps, powers) / math.sqrt(N))


def qmf_identity_check(
    f: FilterCoeffs, N: int, num_samples: int = 256, tol: float = CIRCLE_TOL
) -> QmfReport:
    """Check ``sum_{k<N} |m(z e^{2 pi i k / N})|^2 = N`` at sampled circle points."""
    if num_samples < 1:
        raise ValueError("num_samples must be at least 1")
    z = np.exp(2j * np.pi * np.arange(num_samples) / num_samples)
    rot = np.exp(2j * np.pi * np.arange(N) / N)
    pts = z[:, None] * rot[None, :]
    powers = pts[..., None] ** np.arange(f.offset, f.span)
    vals = powers @ f.taps / math.sqrt(N)
    totals = np.sum(np.abs(vals) ** 2, axis=1)
    max_residual = float(np.max(np.abs(totals - N)))
    return QmfReport(max_residual <= tol, max_residual, num_samples, tol)


def haar_complement(f: FilterCoeffs, g: int, N: int = 2) -> FilterCoeffs:
    """High-pass completion ``b_k = (-1)^k conj(a_{2g-1-k})`` for scale 2.

    Applied twice this returns ``(-1)^{2g-1}`` times the original taps.
    """
    if N != 2:
        raise ValueError("high-pass completion is only implemented for scale N = 2")
    if g < 1:
        raise ValueError("genus g must be at least 1")
    L = 2 * g
    if f.offset < 0 or f.span > L:
        raise ValueError(f"taps occupy [{f.offset}, {f.span}) outside [0, {L})")
    a = f.dense(L)
    k = np.arange(L)
    b = (-1.0) ** k * np.conj(a[L - 1 - k])
    return coeffs_from_dense(b)


def _daubechies4_taps() -> np.ndarray:
    # Closed form for four real taps with sum 2, translate orthonormality and
    # a double symbol zero at z = -1 (the first zero is automatic from the sum
    # plus the power identity; the second isolates the solution up to index
    # reflection).  tests/test_filters.py re-derives these by a Newton solve.
    r = math.sqrt(3.0)
    return np.array([1.0 + r, 3.0 + r, 3.0 - r, 1.0 - r]) / 4.0


def preset_bank(name: str) -> FilterBank:
    """Return a named, fully verified dyadic bank.

    Known names: ``"haar"``, ``"db4"``, and ``"stretched-haar:k"`` for k >= 1
    (low-pass ``(1 + z^{2k+1}) / sqrt(2)``).
    """
    if name == "haar":
        low = FilterCoeffs([1.0, 1.0])
        g = 1
    elif name == "db4":
        low = FilterCoeffs(_daubechies4_taps())
        g = 2
    elif name.startswith("stretched-haar:"):
        try:
            k = int(name.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"malformed stretch count in preset {name!r}") from None
        if k < 1:
            raise ValueError("stretched-haar requires k >= 1")
        taps = np.zeros(2 * k + 2)
        taps[0] = 1.0
        taps[-1] = 1.0
        low = FilterCoeffs(taps)
        g = k + 1
    else:
        raise ValueError(f"unknown preset {name!r}")
    bank = FilterBank(2, g, (low, haar_complement(low, g)), name=name)
    report = verify_bank(bank)
    if not report.passed:
        raise AssertionError(f"preset {name!r} failed its own verification: {report}")
    return bank


def verify_bank(
    bank: FilterBank,
    tol: float = ALG_TOL,
    num_samples: int = 256,
    circle_tol: float = CIRCLE_TOL,
) -> BankReport:
    """Run translate orthonormality on every channel plus the low-pass checks."""
    orth = tuple(orthogonality_check(f, bank.N, tol) for f in bank.filters)
    qmf = qmf_identity_check(bank.lowpass, bank.N, num_samples, circle_tol)
    norm = normalization_check(bank.lowpass, bank.N, tol) if bank.lowpass_normalized else None
    passed = all(r.passed for r in orth) and qmf.passed and (norm is None or norm.passed)
    return BankReport(passed, orth, qmf, norm)

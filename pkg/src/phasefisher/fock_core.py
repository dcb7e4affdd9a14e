"""Truncated two-mode Fock-space linear algebra.

States and operators live on the product basis |n1, n2> with 0 <= ni <= n_max,
ordered row-major with mode 1 major: index(n1, n2) = n1 * (n_max + 1) + n2.
The fixed ordering keeps golden-file comparisons bit-stable.

All arrays are dense complex128. Values are treated as immutable after
construction; the wrappers mark their buffers read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch, NotHermitian, TruncationTooSmall

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-10
NORM_ATOL = 1e-10

# Coherent tail weight sum_{n > n_max} |c_n|^2 guaranteed by the default policy.
DEFAULT_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class FockTruncation:
    """Per-mode Fock cutoff. Two-mode dimension is (n_max + 1)**2."""

    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < 0:
            raise ValueError(f"n_max must be nonnegative, got {self.n_max}")

    @property
    def dim_single(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return (self.n_max + 1) ** 2

    def index(self, n1: int, n2: int) -> int:
        if not (0 <= n1 <= self.n_max and 0 <= n2 <= self.n_max):
            raise ValueError(f"occupation ({n1}, {n2}) outside cutoff {self.n_max}")
        return n1 * self.dim_single + n2

    def occupations(self) -> tuple[np.ndarray, np.ndarray]:
        """Arrays (n1, n2) over the basis, in index order."""
        d = self.dim_single
        return np.repeat(np.arange(d), d), np.tile(np.arange(d), d)

    def totals(self) -> np.ndarray:
        """Total photon number n1 + n2 per basis index."""
        n1, n2 = self.occupations()
        return n1 + n2


def default_truncation(alpha: complex) -> FockTruncation:
    # Poisson tail decay makes every reported digit truncation-insensitive
    # at this margin; see truncation_for_tolerance for the adaptive variant.
    a = abs(alpha)
    return FockTruncation(math.ceil(a * a + 10.0 * a + 20.0))


def truncation_for_tolerance(alpha: complex, tail_tol: float) -> FockTruncation:
    """Smallest cutoff whose coherent tail weight is below tail_tol.

    The tail is sum_{n > n_max} |c_n|^2 for the coherent amplitudes of
    strength |alpha|; it bounds the weight any state built here can lose.
    """
    if not 0.0 < tail_tol < 1.0:
        raise ValueError(f"tail tolerance must be in (0, 1), got {tail_tol}")
    lam = abs(alpha) ** 2
    if lam == 0.0:
        return FockTruncation(0)
    # walk the Poisson pmf until the remaining mass drops below tolerance
    term = math.exp(-lam)
    cumulative = term
    n = 0
    while 1.0 - cumulative > tail_tol:
        n += 1
        term *= lam / n
        cumulative += term
        if n > 100000:
            raise TruncationTooSmall(
                f"no cutoff below 100000 reaches tail {tail_tol} for alpha={alpha}"
            )
    return FockTruncation(n)


def _read_only(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state over the two-mode basis."""

    amplitudes: np.ndarray
    truncation: FockTruncation

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (self.truncation.dim,):
            raise DimensionMismatch(
                f"amplitude shape {self.amplitudes.shape} for dim {self.truncation.dim}"
            )
        nrm = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(nrm - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm^2 = {nrm!r} deviates from 1 beyond {NORM_ATOL}")
        _read_only(self.amplitudes)

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.truncation)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, trace-one operator over the two-mode basis.

    Hermiticity and trace are enforced at construction; positivity is
    enforced where spectra are actually taken (the eigendecomposition
    clips roundoff-negative eigenvalues and rejects anything worse).
    """

    matrix: np.ndarray
    truncation: FockTruncation

    def __post_init__(self) -> None:
        d = self.truncation.dim
        if self.matrix.shape != (d, d):
            raise DimensionMismatch(f"matrix shape {self.matrix.shape} for dim {d}")
        dev = float(np.abs(self.matrix - self.matrix.conj().T).max())
        if dev > HERMITICITY_ATOL:
            raise NotHermitian(f"hermiticity deviation {dev:.3e} beyond {HERMITICITY_ATOL}")
        tr = complex(np.trace(self.matrix))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace {tr!r} deviates from 1 beyond {TRACE_ATOL}")
        _read_only(self.matrix)


@dataclass(frozen=True)
class ModeOperator:
    """Operator acting on one mode, embedded in the two-mode space."""

    matrix: np.ndarray
    mode_label: int = field(default=1)

    def __post_init__(self) -> None:
        if self.mode_label not in (1, 2):
            raise ValueError(f"mode_label must be 1 or 2, got {self.mode_label}")
        _read_only(self.matrix)

    def dagger(self) -> "ModeOperator":
        return ModeOperator(self.matrix.conj().T.copy(), self.mode_label)


def _annihilation_single(d: int) -> np.ndarray:
    # <n-1| a |n> = sqrt(n)
    return np.diag(np.sqrt(np.arange(1.0, d)), 1).astype(complex)


def annihilation(mode: int, trunc: FockTruncation) -> ModeOperator:
    """Annihilation operator a_mode (x) identity on the other mode."""
    d = trunc.dim_single
    a = _annihilation_single(d)
    eye = np.eye(d, dtype=complex)
    mat = np.kron(a, eye) if mode == 1 else np.kron(eye, a)
    return ModeOperator(mat, mode)


def creation(mode: int, trunc: FockTruncation) -> ModeOperator:
    return annihilation(mode, trunc).dagger()


def number_operator(mode: int, trunc: FockTruncation) -> ModeOperator:
    n1, n2 = trunc.occupations()
    diag = n1 if mode == 1 else n2
    return ModeOperator(np.diag(diag.astype(complex)), mode)


def coherent_vector(
    alpha: complex, trunc: FockTruncation, tail_tol: float = DEFAULT_TAIL_TOL
) -> np.ndarray:
    """Single-mode coherent amplitudes c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!).

    Raises TruncationTooSmall when the weight beyond the cutoff exceeds
    tail_tol, so downstream norms are trustworthy to that tolerance.
    """
    d = trunc.dim_single
    c = np.zeros(d, dtype=complex)
    c[0] = math.exp(-abs(alpha) ** 2 / 2.0)
    for n in range(1, d):
        # recurrence avoids overflowing alpha**n / sqrt(n!) separately
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    tail = 1.0 - float(np.vdot(c, c).real)
    if tail > tail_tol:
        raise TruncationTooSmall(
            f"coherent tail {tail:.3e} at n_max={trunc.n_max} exceeds {tail_tol} for alpha={alpha}"
        )
    return c


def eigendecompose_hermitian(rho: DensityOperator) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching orthonormal eigenvector columns."""
    return eigendecompose_hermitian_matrix(rho.matrix)


def eigendecompose_hermitian_matrix(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dev = float(np.abs(matrix - matrix.conj().T).max())
    if dev > HERMITICITY_ATOL:
        raise NotHermitian(f"hermiticity deviation {dev:.3e} beyond {HERMITICITY_ATOL}")
    w, v = np.linalg.eigh(matrix)
    return w[::-1].copy(), v[:, ::-1].copy()


def partial_trace(matrix: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    """Trace out every subsystem not listed in keep.

    matrix is a square array over the tensor product of subsystems with the
    given dims, subsystem 0 major. keep lists subsystem positions to retain,
    in their original order.
    """
    total = 1
    for d in dims:
        total *= d
    if matrix.shape != (total, total):
        raise DimensionMismatch(f"matrix shape {matrix.shape} for dims {dims}")
    keep = tuple(keep)
    if any(k < 0 or k >= len(dims) for k in keep) or len(set(keep)) != len(keep):
        raise DimensionMismatch(f"keep {keep} invalid for {len(dims)} subsystems")
    traced = tuple(i for i in range(len(dims)) if i not in keep)
    t = matrix.reshape(dims + dims)
    n = len(dims)
    for count, sub in enumerate(sorted(traced)):
        # axes shift down as earlier subsystems are consumed
        ax = sub - count
        t = np.trace(t, axis1=ax, axis2=ax + n - count)
    kept_dim = 1
    for k in keep:
        kept_dim *= dims[k]
    return np.ascontiguousarray(t.reshape(kept_dim, kept_dim))

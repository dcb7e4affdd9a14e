"""Closed-form quantum Fisher information of the lossy probes.

Two measurement scenarios are covered for the entangled coherent state.

Without a phase reference the probe dephases into total-photon sectors; the
sector-resolved information is a weighted sum of lossy NOON contributions
and collapses to the compact form

    F_noref = 2 N^2 e^{-|alpha|^2 (1 - eta)} (|alpha|^4 eta^2 + |alpha|^2 eta).

With a reference beam the lossy ECS stays a rank-two mixture of the
nonorthogonal pair |Psi_1> = |sqrt(eta) alpha, 0>, |Psi_2> = |0, sqrt(eta)
alpha>. Its spectrum is worked out exactly in a Gram-Schmidt basis (overlap
p = e^{-eta |alpha|^2}, coherence p_perp = e^{-(1-eta)|alpha|^2}) and fed to
the two-level mixed-state QFI formula

    F = 4 (g+ Var+ + g- Var- - 4 g+ g- |<g+|G|g->|^2).

Every quantity here is validated against the brute-force oracle in
qfi_oracle; the spectral coefficients additionally against a numeric
eigensolve of the two-level matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateSpectrum,
    InvalidEta,
    InvalidWeights,
    NonpositiveFisher,
)
from .fock_core import FockTruncation
from .states import ProbeSpec, ecs_normalization, ecs_scalars

CLOSED_FORM = "closed_form"
ASYMPTOTIC = "asymptotic"
NUMERIC = "numeric"

# below this weight the minor eigenvalue carries no cross term worth keeping
GAMMA_MINUS_FLOOR = 1e-14


@dataclass(frozen=True)
class QFIResult:
    """A Fisher information value plus how it was obtained."""

    value: float
    method: str
    generator: str = "two_arm"
    inputs: ProbeSpec | None = None

    def __post_init__(self) -> None:
        if self.value < 0.0:
            raise ValueError(f"QFI must be nonnegative, got {self.value}")

    def sensitivity(self, repetitions: int = 1) -> float:
        return sensitivity(self.value, repetitions)


@dataclass(frozen=True)
class EcsLossySpectrum:
    """Exact two-level spectral data of the lossy ECS with a reference beam.

    p is the overlap <Psi_1|Psi_2>, p_perp the surviving coherence weight.
    The eigenstates expand as |g+> = c_plus |Psi_1> + d_minus |Psi_2> and
    |g-> = c_minus |Psi_1> + d_plus |Psi_2> over the nonorthogonal pair.
    """

    p: float
    p_perp: float
    det_sigma: float
    gamma_plus: float
    gamma_minus: float
    zeta_plus: float
    zeta_minus: float
    c_plus: float
    c_minus: float
    d_plus: float
    d_minus: float
    sigma3_expect: float


def qfi_ecs_noref(alpha: complex, eta: float) -> QFIResult:
    """Sector-resolved QFI of the lossy ECS without a reference beam."""
    _check_eta(eta)
    a2 = abs(alpha) ** 2
    if a2 == 0.0 or eta == 0.0:
        return QFIResult(0.0, CLOSED_FORM)
    nsq = ecs_normalization(alpha) ** 2
    value = 2.0 * nsq * math.exp(-a2 * (1.0 - eta)) * (a2 * a2 * eta * eta + a2 * eta)
    return QFIResult(value, CLOSED_FORM)


def qfi_ecs_noref_blocksum(alpha: complex, eta: float, trunc: FockTruncation) -> QFIResult:
    """Same quantity as an explicit sum of lossy NOON terms over sectors.

    Each total-photon sector n contributes weight(n) * n^2 eta^n; the sum
    telescopes into qfi_ecs_noref, which the tests pin to 1e-10.
    """
    _check_eta(eta)
    a2 = abs(alpha) ** 2
    if a2 == 0.0 or eta == 0.0:
        return QFIResult(0.0, CLOSED_FORM)
    weights = ecs_scalars(alpha, trunc).noon_weights
    n = np.arange(len(weights), dtype=float)
    value = float(np.sum(weights * n * n * eta**n))
    return QFIResult(value, CLOSED_FORM)


def qfi_noon(n: int, eta: float) -> QFIResult:
    """F = n^2 eta^n for the lossy NOON probe, Heisenberg-limited at eta = 1."""
    _check_eta(eta)
    if n < 1:
        raise ValueError(f"NOON index must be >= 1, got {n}")
    return QFIResult(n * n * eta**n, CLOSED_FORM)


def qfi_noon_continuous(n_mean: float, eta: float) -> float:
    """NOON benchmark with the photon number treated as a real variable.

    Sweeps and crossing searches interpolate F(N) = N^2 e^{N ln eta}; the
    exact logarithm matters once N is large enough that (eta - 1) N would
    misplace the decay.
    """
    _check_eta(eta)
    if n_mean <= 0.0:
        raise ValueError(f"mean photon number must be positive, got {n_mean}")
    if eta == 0.0:
        return 0.0
    return n_mean * n_mean * math.exp(n_mean * math.log(eta))


def sigma_spectrum(alpha: complex, eta: float) -> EcsLossySpectrum:
    """Exact spectral data of the lossy ECS under a reference beam.

    Eigenvalues are gamma_pm = (1 +/- sqrt(1 - 4 det)) / 2; the radicand
    carries the factor 4 required by the trace-one determinant relation of
    a 2x2 density matrix (and by the zeta coefficients below, which use the
    same radical). The numeric two-level eigensolve in qfi_oracle arbitrates
    this choice.
    """
    _check_eta(eta)
    a2 = abs(alpha) ** 2
    if a2 == 0.0:
        raise ValueError("spectrum undefined at alpha = 0")
    if eta == 0.0:
        raise InvalidEta("spectrum undefined at eta = 0: both branches collapse to vacuum")
    nsq = ecs_normalization(alpha) ** 2
    p = math.exp(-eta * a2)
    p_perp = math.exp(-(1.0 - eta) * a2)
    one_minus_p2 = -math.expm1(-2.0 * eta * a2)  # 1 - p^2 without cancellation
    det = nsq * nsq * one_minus_p2 * (-math.expm1(-2.0 * (1.0 - eta) * a2))
    radicand = 1.0 - 4.0 * det
    if radicand < -1e-12:
        raise DegenerateSpectrum(f"1 - 4 det = {radicand!r} below tolerance")
    r = math.sqrt(max(radicand, 0.0))
    gamma_plus = 0.5 * (1.0 + r)
    # algebraically (1 - r)/2, rewritten to survive det -> 0
    gamma_minus = 2.0 * det / (1.0 + r)
    sigma3 = 1.0 - 2.0 * nsq * one_minus_p2
    zeta_plus = math.sqrt((r + sigma3) / (2.0 * r))
    zeta_minus = math.sqrt((r - sigma3) / (2.0 * r))
    root = math.sqrt(one_minus_p2)
    d_minus = zeta_minus / root
    d_plus = zeta_plus / root
    c_plus = zeta_plus - p * d_minus
    c_minus = -zeta_minus - p * d_plus
    return EcsLossySpectrum(
        p=p,
        p_perp=p_perp,
        det_sigma=det,
        gamma_plus=gamma_plus,
        gamma_minus=gamma_minus,
        zeta_plus=zeta_plus,
        zeta_minus=zeta_minus,
        c_plus=c_plus,
        c_minus=c_minus,
        d_plus=d_plus,
        d_minus=d_minus,
        sigma3_expect=sigma3,
    )


def basis_overlap_matrix(alpha: complex, eta: float) -> np.ndarray:
    """The two-level density matrix in the Gram-Schmidt orthonormal basis.

    Entry (2, 2) is N^2 (1 - p^2) with no coherence factor: the cross terms
    of the mixture vanish on the orthogonal complement of |Psi_1>, and the
    trace must come out one. The numeric reconstruction in qfi_oracle checks
    every entry.
    """
    a2 = abs(alpha) ** 2
    nsq = ecs_normalization(alpha) ** 2
    p = math.exp(-eta * a2)
    p_perp = math.exp(-(1.0 - eta) * a2)
    off = (p + p_perp) * math.sqrt(-math.expm1(-2.0 * eta * a2))
    return nsq * np.array(
        [
            [1.0 + 2.0 * p * p_perp + p * p, off],
            [off, -math.expm1(-2.0 * eta * a2)],
        ]
    )


def qfi_two_level(
    gamma_plus: float,
    gamma_minus: float,
    variance_plus: float,
    variance_minus: float,
    cross_term_sq: float,
) -> float:
    """Mixed-state QFI of a rank-two state with the given spectral data.

    F = 4 (g+ Var+ + g- Var- - 4 g+ g- |cross|^2). Variances are taken in
    the full space, so leakage of G out of the rank-two support is already
    inside Var+/-. When the minor weight is below GAMMA_MINUS_FLOOR the
    cross term is dropped rather than multiplied out, avoiding 0 * inf.
    """
    if gamma_plus < 0.0 or gamma_minus < 0.0 or gamma_plus + gamma_minus > 1.0 + 1e-12:
        raise InvalidWeights(f"weights ({gamma_plus}, {gamma_minus}) invalid")
    value = 4.0 * (gamma_plus * variance_plus + gamma_minus * variance_minus)
    if gamma_minus >= GAMMA_MINUS_FLOOR:
        value -= 16.0 * gamma_plus * gamma_minus * cross_term_sq
    return value


def qfi_ecs_ref(alpha: complex, eta: float) -> QFIResult:
    """QFI of the lossy ECS when a reference beam fixes the sum phase.

    Expectation values of the two-arm generator over the nonorthogonal pair
    are <Psi_1|G|Psi_1> = -<Psi_2|G|Psi_2> = eta |alpha|^2 / 2 and
    <Psi_i|G^2|Psi_i> = (eta |alpha|^2 + eta^2 |alpha|^4)/4, with both cross
    matrix elements zero; everything else comes from sigma_spectrum.
    """
    _check_eta(eta)
    a2 = abs(alpha) ** 2
    if a2 == 0.0 or eta == 0.0:
        return QFIResult(0.0, CLOSED_FORM)
    s = sigma_spectrum(alpha, eta)
    x = eta * a2
    g1 = 0.5 * x
    g2 = 0.25 * (x + x * x)
    var_plus = (s.c_plus**2 + s.d_minus**2) * g2 - ((s.c_plus**2 - s.d_minus**2) * g1) ** 2
    var_minus = (s.c_minus**2 + s.d_plus**2) * g2 - ((s.c_minus**2 - s.d_plus**2) * g1) ** 2
    cross = (s.c_plus * s.c_minus - s.d_minus * s.d_plus) * g1
    value = qfi_two_level(s.gamma_plus, s.gamma_minus, var_plus, var_minus, cross * cross)
    return QFIResult(value, CLOSED_FORM)


def qfi_ecs_ref_reduced(alpha: complex, eta: float) -> float:
    """Algebraic reduction of qfi_ecs_ref, kept as an internal cross-check.

    Substituting the exact coefficient values collapses the spectral route to

        F = (x + x^2)/(1 + p p_perp) - x^2 (1 - p_perp^2)/(1 + p p_perp)^2

    with x = eta |alpha|^2. Tests assert agreement with the spectral route
    at 1e-12; any divergence means one of the two transcriptions drifted.
    """
    _check_eta(eta)
    a2 = abs(alpha) ** 2
    if a2 == 0.0 or eta == 0.0:
        return 0.0
    x = eta * a2
    pp = math.exp(-eta * a2) * math.exp(-(1.0 - eta) * a2)
    denominator = 1.0 + pp
    return (x + x * x) / denominator - x * x * (-math.expm1(-2.0 * (1.0 - eta) * a2)) / denominator**2


def qfi_ecs_ref_asymptotic(alpha: complex, eta: float) -> QFIResult:
    """Large-field limit of qfi_ecs_ref, valid once p = e^{-eta |alpha|^2} is negligible."""
    _check_eta(eta)
    a2 = abs(alpha) ** 2
    if a2 == 0.0 or eta == 0.0:
        return QFIResult(0.0, ASYMPTOTIC)
    nsq = ecs_normalization(alpha) ** 2
    value = 2.0 * nsq * (math.exp(-2.0 * a2 * (1.0 - eta)) * a2 * a2 * eta * eta + a2 * eta)
    return QFIResult(value, ASYMPTOTIC)


def sensitivity(fisher: float, repetitions: int = 1) -> float:
    """Cramer-Rao phase uncertainty (m F)^{-1/2} in radians."""
    if fisher <= 0.0:
        raise NonpositiveFisher(f"sensitivity needs F > 0, got {fisher}")
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    return 1.0 / math.sqrt(repetitions * fisher)


def _check_eta(eta: float) -> None:
    if not 0.0 <= eta <= 1.0:
        raise InvalidEta(f"transmittance must lie in [0, 1], got {eta}")

"""First-principles QFI on the truncated Fock space.

Everything here is assembled from generic pieces: probe vectors, Kraus
loss, eigendecomposition, and the spectral QFI double sum

    F = sum_{i,j} 2 (p_i - p_j)^2 / (p_i + p_j) |<i|G|j>|^2.

No analytic structure of the ECS enters, so agreement with qfi_analytic is
independent evidence rather than a tautology.

Scenario semantics. With a reference beam the probe is the lossy ECS
itself, a single density operator. Without one, the total photon number of
the input can be read out nondestructively before the interferometer (a
number measurement needs no phase reference), so the experimenter holds a
labeled ensemble of fixed-total-photon states and the Fisher information
averages over the labels. build_scenario keeps the labels as separate
weighted components; scenario_mixture deliberately discards them, which
reproduces the plain dephase-then-lose pipeline and strictly less
information once loss mixes neighboring sectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import (
    SINGLE_ARM,
    TWO_ARM,
    apply_loss,
    apply_loss_via_bs,
    phase_average,
    single_arm_generator,
    two_arm_generator,
    PhaseGenerator,
)
from .exceptions import (
    DimensionMismatch,
    InvalidWeights,
    NegativeEigenvalue,
    PhaseFisherError,
    TruncationTooSmall,
)
from .fock_core import (
    DEFAULT_TAIL_TOL,
    DensityOperator,
    FockTruncation,
    StateVector,
    coherent_vector,
    default_truncation,
    truncation_for_tolerance,
)
from .qfi_analytic import (
    GAMMA_MINUS_FLOOR,
    NUMERIC,
    QFIResult,
    basis_overlap_matrix,
    qfi_ecs_noref,
    qfi_ecs_noref_blocksum,
    qfi_ecs_ref,
    qfi_ecs_ref_asymptotic,
    qfi_noon,
    sigma_spectrum,
)
from .states import ProbeSpec, alpha_for_mean_photon, ecs_vector, noon_vector

WITH_REFERENCE = "with"
WITHOUT_REFERENCE = "without"

# sectors lighter than this cannot move any tested tolerance
SECTOR_WEIGHT_FLOOR = 1e-14

DEFAULT_GRID_ALPHAS = (0.5, 1.0, 1.5, 2.0)
DEFAULT_GRID_ETAS = (0.6, 0.9, 0.99, 1.0)

# e^{-eta alpha^2} < 1e-8 at each, where the asymptotic form is in regime
ASYMPTOTIC_POINTS = ((5.0, 0.9), (4.5, 0.99), (5.0, 0.99))

_CHECK_ERRORS = (PhaseFisherError, ValueError, np.linalg.LinAlgError)


@dataclass(frozen=True)
class OracleConfig:
    """Numerical knobs of the brute-force QFI.

    truncation = None lets each probe pick its own default cutoff
    (default_truncation for ECS, the minimal space for NOON). Eigenvalues
    below eigenvalue_floor are treated as exact zeros; eigenvalue pairs
    whose sum is below pair_skip_threshold are formally 0/0 and skipped.
    """

    truncation: FockTruncation | None = None
    eigenvalue_floor: float = 1e-12
    pair_skip_threshold: float = 1e-12
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self) -> None:
        if self.eigenvalue_floor <= 0.0 or self.pair_skip_threshold <= 0.0:
            raise ValueError("floors must be positive")
        if not 0.0 < self.tail_tol < 1.0:
            raise ValueError(f"tail tolerance must be in (0, 1), got {self.tail_tol}")


_DEFAULT_CFG = OracleConfig()


def qfi_numeric(
    rho: DensityOperator, generator: PhaseGenerator, cfg: OracleConfig = _DEFAULT_CFG
) -> QFIResult:
    """Spectral QFI sum over the eigenpairs of rho.

    The sum is evaluated on the basis states that actually carry support
    (rows or columns of rho with any exact nonzero). For a diagonal
    generator this restriction is exact: every excluded basis state is a
    zero-weight eigenvector of rho and an eigenvector of G, so its pair
    contributions vanish identically. Support restriction is what keeps
    rank-two states on large cutoffs cheap.
    """
    if rho.truncation != generator.truncation:
        raise DimensionMismatch(
            f"state cutoff {rho.truncation} vs generator cutoff {generator.truncation}"
        )
    m = rho.matrix
    nz = m != 0
    idx = np.nonzero(nz.any(axis=0) | nz.any(axis=1))[0]
    sub = m[np.ix_(idx, idx)]
    g = generator.diagonal[idx]

    w, v = np.linalg.eigh(sub)
    if w.min() < -cfg.eigenvalue_floor:
        raise NegativeEigenvalue(f"eigenvalue {w.min():.3e} below -{cfg.eigenvalue_floor}")
    w = np.clip(w, 0.0, None)
    w[w < cfg.eigenvalue_floor] = 0.0

    gt = v.conj().T @ (g[:, None] * v)
    num = (w[:, None] - w[None, :]) ** 2
    den = w[:, None] + w[None, :]
    ratio = np.zeros_like(den)
    np.divide(num, den, out=ratio, where=den > cfg.pair_skip_threshold)
    value = float(np.sum(2.0 * ratio * np.abs(gt) ** 2))
    return QFIResult(value, NUMERIC, generator.kind)


@dataclass(frozen=True)
class Scenario:
    """A weighted ensemble of density operators sharing one phase generator kind.

    Reference-beam scenarios hold a single unit-weight component; the
    reference-free scenario holds one component per surviving total-photon
    sector, each on its own minimal cutoff.
    """

    probe: ProbeSpec
    reference: str
    components: tuple[tuple[float, DensityOperator], ...]
    generator_kind: str = TWO_ARM

    def __post_init__(self) -> None:
        if self.reference not in (WITH_REFERENCE, WITHOUT_REFERENCE):
            raise ValueError(f"reference must be 'with' or 'without', got {self.reference!r}")
        if not self.components:
            raise InvalidWeights("scenario needs at least one component")
        total = 0.0
        for weight, _ in self.components:
            if weight <= 0.0:
                raise InvalidWeights(f"component weight {weight} must be positive")
            total += weight
        if total > 1.0 + 1e-10:
            raise InvalidWeights(f"component weights sum to {total} > 1")


def _probe_truncation(probe: ProbeSpec, cfg: OracleConfig) -> FockTruncation:
    if cfg.truncation is not None:
        return cfg.truncation
    if probe.family == "noon":
        return FockTruncation(probe.n)
    return default_truncation(probe.alpha)


def _probe_vector(probe: ProbeSpec, trunc: FockTruncation, tail_tol: float) -> StateVector:
    if probe.family == "noon":
        return noon_vector(probe.n, trunc)
    return ecs_vector(probe.alpha, trunc, tail_tol)


def _sector_components(
    psi: StateVector, eta: float
) -> tuple[tuple[float, DensityOperator], ...]:
    """Split a pure state into total-photon sectors, then lose photons per sector.

    Each sector block is re-expressed on the minimal cutoff that can hold
    it (total photons only decrease under loss), which keeps the later
    eigendecompositions small.
    """
    trunc = psi.truncation
    amp = psi.amplitudes
    totals = trunc.totals()
    n1s, n2s = trunc.occupations()
    components = []
    for n in range(int(totals.max()) + 1):
        mask = totals == n
        weight = float(np.sum(np.abs(amp[mask]) ** 2))
        if weight <= SECTOR_WEIGHT_FLOOR:
            continue
        small = FockTruncation(n)
        vec = np.zeros(small.dim, dtype=complex)
        for i in np.nonzero(mask & (amp != 0))[0]:
            vec[small.index(int(n1s[i]), int(n2s[i]))] = amp[i]
        vec /= math.sqrt(weight)
        block = StateVector(vec, small).density()
        components.append((weight, apply_loss(block, eta)))
    return tuple(components)


def build_scenario(
    probe: ProbeSpec, reference: str, cfg: OracleConfig = _DEFAULT_CFG
) -> Scenario:
    """Assemble the numeric state(s) seen by the estimator.

    "with": the probe goes through the loss channel intact.
    "without": the sector label from the input number readout is kept, so
    the result is an ensemble rather than the label-free mixture (see the
    module docstring; scenario_mixture gives the label-free state).
    """
    if reference not in (WITH_REFERENCE, WITHOUT_REFERENCE):
        raise ValueError(f"reference must be 'with' or 'without', got {reference!r}")
    trunc = _probe_truncation(probe, cfg)
    psi = _probe_vector(probe, trunc, cfg.tail_tol)
    if reference == WITH_REFERENCE:
        components = ((1.0, apply_loss(psi.density(), probe.eta)),)
    else:
        components = _sector_components(psi, probe.eta)
    return Scenario(probe=probe, reference=reference, components=components)


def scenario_qfi(
    scenario: Scenario,
    cfg: OracleConfig = _DEFAULT_CFG,
    generator_kind: str | None = None,
) -> QFIResult:
    """Weighted sum of per-component QFI values."""
    kind = generator_kind or scenario.generator_kind
    total = 0.0
    for weight, rho in scenario.components:
        if kind == TWO_ARM:
            gen = two_arm_generator(rho.truncation)
        elif kind == SINGLE_ARM:
            gen = single_arm_generator(rho.truncation)
        else:
            raise ValueError(f"unknown generator kind {kind!r}")
        total += weight * qfi_numeric(rho, gen, cfg).value
    return QFIResult(total, NUMERIC, kind, scenario.probe)


def scenario_mixture(
    scenario: Scenario, trunc: FockTruncation | None = None
) -> DensityOperator:
    """Forget the component labels: the plain weighted sum as one operator.

    For the reference-free ECS this equals dephasing followed by loss of
    the full probe, and its QFI drops below the ensemble value once loss
    couples neighboring sectors.
    """
    target = trunc
    if target is None:
        target = max((rho.truncation for _, rho in scenario.components), key=lambda t: t.n_max)
    acc = np.zeros((target.dim, target.dim), dtype=complex)
    for weight, rho in scenario.components:
        small = rho.truncation
        if small.n_max > target.n_max:
            raise TruncationTooSmall(
                f"component cutoff {small.n_max} exceeds target {target.n_max}"
            )
        n1s, n2s = small.occupations()
        idx = n1s * (target.n_max + 1) + n2s
        acc[np.ix_(idx, idx)] += weight * rho.matrix
    return DensityOperator(acc, target)


def two_level_matrix_numeric(
    alpha: complex,
    eta: float,
    trunc: FockTruncation | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> np.ndarray:
    """Numeric 2x2 matrix of the lossy ECS in its Gram-Schmidt basis.

    Built entirely from vectors and the Kraus channel; arbitrates the
    closed-form spectrum and basis matrix (and in particular their two
    easy-to-mistranscribe coefficients) without sharing any algebra.
    """
    if trunc is None:
        trunc = default_truncation(alpha)
    sigma = apply_loss(ecs_vector(alpha, trunc, tail_tol).density(), eta)
    d = trunc.dim_single
    vac = np.zeros(d, dtype=complex)
    vac[0] = 1.0
    c = coherent_vector(math.sqrt(eta) * alpha, trunc, tail_tol)
    psi1 = np.kron(c, vac)
    psi2 = np.kron(vac, c)
    p = float(np.vdot(psi1, psi2).real)
    e1 = psi1
    e2 = (psi2 - p * e1) / math.sqrt(1.0 - p * p)
    basis = (e1, e2)
    m = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            m[i, j] = float(np.vdot(basis[i], sigma.matrix @ basis[j]).real)
    return m


@dataclass(frozen=True)
class CheckResult:
    """One verification row: worst error over its points against a tolerance."""

    name: str
    passed: bool
    max_err: float
    tolerance: float
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        width = max(len(c.name) for c in self.checks) + 2
        lines = [f"{'check':<{width}}{'status':<8}{'max error':<14}{'tolerance':<12}detail"]
        lines.append("-" * (width + 34 + 6))
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(
                f"{c.name:<{width}}{status:<8}{c.max_err:<14.3e}{c.tolerance:<12.1e}{c.detail}"
            )
        done = sum(1 for c in self.checks if c.passed)
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({done}/{len(self.checks)} checks)")
        return "\n".join(lines)

    def to_csv(self) -> str:
        rows = ["check,passed,max_err,tolerance,detail"]
        for c in self.checks:
            detail = c.detail.replace(",", ";")
            rows.append(
                f"{c.name},{str(c.passed).lower()},{c.max_err!r},{c.tolerance!r},{detail}"
            )
        return "\n".join(rows) + "\n"


def _run_check(name: str, tolerance: float, body) -> CheckResult:
    """Failures never escape: any numerical error becomes a failed row."""
    try:
        err, detail = body()
    except _CHECK_ERRORS as exc:
        return CheckResult(name, False, math.inf, tolerance, f"error: {exc}")
    return CheckResult(name, bool(err <= tolerance), float(err), tolerance, detail)


def _rel(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference)


def verify_all(
    grid: list[tuple[float, float]] | None = None,
    cfg: OracleConfig | None = None,
    *,
    tail_tol: float = DEFAULT_TAIL_TOL,
    noon_orders: tuple[int, ...] = (1, 2, 3, 5),
    spectrum_fn=sigma_spectrum,
    basis_matrix_fn=basis_overlap_matrix,
) -> VerificationReport:
    """Run every closed-form-vs-oracle comparison and invariant check.

    grid entries are (alpha, eta) points; the default covers the standard
    validation grid. tail_tol picks each point's cutoff through the
    coherent-tail criterion, so loosening it degrades the oracle and the
    truncation-stability row catches that. spectrum_fn / basis_matrix_fn
    are injection seams for negative-control tests that feed deliberately
    corrupted closed forms.
    """
    if grid is None:
        grid = [(a, e) for a in DEFAULT_GRID_ALPHAS for e in DEFAULT_GRID_ETAS]
    if not grid:
        raise ValueError("verification grid must be nonempty")
    floors = cfg if cfg is not None else _DEFAULT_CFG

    def cfg_for(alpha: float) -> OracleConfig:
        # +2 margin so the probe's own tail check cannot flip at the boundary
        base = truncation_for_tolerance(alpha, tail_tol)
        return OracleConfig(
            truncation=FockTruncation(base.n_max + 2),
            eigenvalue_floor=floors.eigenvalue_floor,
            pair_skip_threshold=floors.pair_skip_threshold,
            tail_tol=tail_tol,
        )

    alphas = sorted({a for a, _ in grid})
    etas = sorted({e for _, e in grid})

    def noref_body():
        worst = 0.0
        for alpha, eta in grid:
            probe = ProbeSpec("ecs", eta, alpha=alpha)
            oracle = scenario_qfi(build_scenario(probe, WITHOUT_REFERENCE, cfg_for(alpha)))
            worst = max(worst, _rel(oracle.value, qfi_ecs_noref(alpha, eta).value))
        return worst, f"{len(grid)} points"

    def ref_body():
        worst = 0.0
        used = 0
        for alpha, eta in grid:
            if sigma_spectrum(alpha, eta).gamma_minus < GAMMA_MINUS_FLOOR:
                continue  # minor eigenvalue underflows; covered by lossless_equivalence
            used += 1
            probe = ProbeSpec("ecs", eta, alpha=alpha)
            oracle = scenario_qfi(build_scenario(probe, WITH_REFERENCE, cfg_for(alpha)))
            worst = max(worst, _rel(oracle.value, qfi_ecs_ref(alpha, eta).value))
        return worst, f"{used} points"

    def lossless_body():
        worst = 0.0
        for alpha in alphas:
            worst = max(
                worst, _rel(qfi_ecs_ref(alpha, 1.0).value, qfi_ecs_noref(alpha, 1.0).value)
            )
        return worst, f"{len(alphas)} points at eta=1"

    def sector_sum_body():
        worst = 0.0
        for alpha, eta in grid:
            block = qfi_ecs_noref_blocksum(alpha, eta, default_truncation(alpha))
            worst = max(worst, _rel(block.value, qfi_ecs_noref(alpha, eta).value))
        return worst, f"{len(grid)} points"

    def noon_body():
        worst = 0.0
        for n in noon_orders:
            for eta in etas:
                probe = ProbeSpec("noon", eta, n=n)
                closed = qfi_noon(n, eta).value
                for reference in (WITH_REFERENCE, WITHOUT_REFERENCE):
                    oracle = scenario_qfi(build_scenario(probe, reference, floors))
                    worst = max(worst, _rel(oracle.value, closed))
        return worst, f"orders {noon_orders}, both references"

    def asymptotic_body():
        worst = 0.0
        for alpha, eta in ASYMPTOTIC_POINTS:
            if math.exp(-eta * alpha * alpha) >= 1e-8:
                continue  # outside the regime the approximation claims
            worst = max(
                worst,
                _rel(qfi_ecs_ref_asymptotic(alpha, eta).value, qfi_ecs_ref(alpha, eta).value),
            )
        return worst, f"{len(ASYMPTOTIC_POINTS)} large-field points"

    def shot_noise_body():
        eta = 0.9
        n_mean = 100.0
        alpha = alpha_for_mean_photon(n_mean)
        ratio = qfi_ecs_ref(alpha, eta).value / (eta * n_mean)
        return abs(ratio - 1.0), f"F/(eta N) at N={n_mean:g}, eta={eta:g}"

    def bs_body():
        worst = 0.0
        used = 0
        for alpha in alphas:
            if alpha > 1.5:
                continue  # four-mode route gets heavy; small fields settle the equality
            for eta in (0.6, 0.9):
                used += 1
                trunc = cfg_for(alpha).truncation
                rho = ecs_vector(alpha, trunc, tail_tol).density()
                via_kraus = apply_loss(rho, eta)
                via_bs = apply_loss_via_bs(rho, eta)
                worst = max(worst, float(np.max(np.abs(via_kraus.matrix - via_bs.matrix))))
        return worst, f"{used} points, entrywise"

    def spectrum_eigen_body():
        worst = 0.0
        for alpha, eta in grid:
            if eta == 0.0:
                continue
            s = spectrum_fn(alpha, eta)
            m = two_level_matrix_numeric(alpha, eta, cfg_for(alpha).truncation, tail_tol)
            lo, hi = np.linalg.eigvalsh(m)
            worst = max(worst, abs(s.gamma_plus - hi), abs(s.gamma_minus - lo))
        return worst, f"{len(grid)} points vs 2x2 eigensolve"

    def spectrum_invariant_body():
        worst = 0.0
        for alpha, eta in grid:
            s = spectrum_fn(alpha, eta)
            worst = max(
                worst,
                abs(s.gamma_plus + s.gamma_minus - 1.0),
                abs(s.gamma_plus * s.gamma_minus - s.det_sigma),
            )
        return worst, "trace and determinant identities"

    def basis_matrix_body():
        worst = 0.0
        for alpha, eta in grid:
            if eta == 0.0:
                continue
            delta = basis_matrix_fn(alpha, eta) - two_level_matrix_numeric(
                alpha, eta, cfg_for(alpha).truncation, tail_tol
            )
            worst = max(worst, float(np.max(np.abs(delta))))
        return worst, f"{len(grid)} points, entrywise"

    def pipeline_body():
        worst = 0.0
        used = 0
        for alpha, eta in grid:
            if alpha > 1.5:
                continue
            used += 1
            local = cfg_for(alpha)
            probe = ProbeSpec("ecs", eta, alpha=alpha)
            ensemble = build_scenario(probe, WITHOUT_REFERENCE, local)
            merged = scenario_mixture(ensemble, local.truncation)
            direct = phase_average(
                apply_loss(ecs_vector(alpha, local.truncation, tail_tol).density(), eta)
            )
            worst = max(worst, float(np.max(np.abs(merged.matrix - direct.matrix))))
        return worst, f"{used} points: sector merge equals dephase-then-lose"

    def generator_body():
        worst = 0.0
        for alpha, eta in grid:
            local = cfg_for(alpha)
            probe = ProbeSpec("ecs", eta, alpha=alpha)
            mix = scenario_mixture(build_scenario(probe, WITHOUT_REFERENCE, local), local.truncation)
            two = qfi_numeric(mix, two_arm_generator(local.truncation), local).value
            one = qfi_numeric(mix, single_arm_generator(local.truncation), local).value
            worst = max(worst, abs(one - two) / max(two, 1e-300))
        return worst, f"{len(grid)} points, single-arm vs two-arm"

    def stability_body():
        worst = 0.0
        for alpha, eta in grid:
            local = cfg_for(alpha)
            doubled = OracleConfig(
                truncation=FockTruncation(2 * local.truncation.n_max),
                eigenvalue_floor=local.eigenvalue_floor,
                pair_skip_threshold=local.pair_skip_threshold,
                tail_tol=tail_tol,
            )
            probe = ProbeSpec("ecs", eta, alpha=alpha)
            for reference in (WITH_REFERENCE, WITHOUT_REFERENCE):
                base = scenario_qfi(build_scenario(probe, reference, local)).value
                wide = scenario_qfi(build_scenario(probe, reference, doubled)).value
                worst = max(worst, _rel(base, wide))
        return worst, f"{len(grid)} points, cutoff doubled"

    checks = (
        _run_check("noref_closed_vs_oracle", 1e-6, noref_body),
        _run_check("ref_closed_vs_oracle", 1e-8, ref_body),
        _run_check("lossless_equivalence", 1e-9, lossless_body),
        _run_check("sector_sum_identity", 1e-10, sector_sum_body),
        _run_check("noon_closed_vs_oracle", 1e-9, noon_body),
        _run_check("asymptotic_regime", 5e-3, asymptotic_body),
        _run_check("shot_noise_approach", 5e-2, shot_noise_body),
        _run_check("bs_vs_kraus_channel", 1e-9, bs_body),
        _run_check("spectrum_eigenvalues", 1e-10, spectrum_eigen_body),
        _run_check("spectrum_invariants", 1e-12, spectrum_invariant_body),
        _run_check("basis_matrix_vs_numeric", 1e-10, basis_matrix_body),
        _run_check("dephased_pipeline_consistency", 1e-12, pipeline_body),
        _run_check("generator_equivalence", 1e-9, generator_body),
        _run_check("truncation_stability", 1e-8, stability_body),
    )
    return VerificationReport(checks)

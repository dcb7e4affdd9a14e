"""Command-line front end.

Four subcommands: `point` evaluates one probe configuration (optionally
against the brute-force oracle), `sweep` writes a sensitivity-vs-photon-
number CSV suitable for log-log plotting, `crossings` locates where the
NOON and reference-beam ECS information curves intersect, and `verify`
runs the full closed-form-vs-oracle suite.

All output is deterministic for fixed flags: floats are rendered with
repr (shortest round-trip digits), rows in input order, no timestamps.
"""

from __future__ import annotations

import math
import os
import sys
from argparse import ArgumentParser
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidEta, NoConvergence, NoCrossingFound, PhaseFisherError
from .fock_core import DEFAULT_TAIL_TOL, FockTruncation, truncation_for_tolerance
from .qfi_analytic import (
    qfi_ecs_noref,
    qfi_ecs_ref,
    qfi_ecs_ref_asymptotic,
    qfi_noon,
    qfi_noon_continuous,
)
from .qfi_oracle import (
    WITH_REFERENCE,
    WITHOUT_REFERENCE,
    OracleConfig,
    build_scenario,
    scenario_qfi,
    verify_all,
)
from .states import ProbeSpec, alpha_for_mean_photon

CSV_HEADER = (
    "n_mean,eta,alpha,f_ecs_noref,f_ecs_ref,f_ecs_ref_asym,f_noon,"
    "dphi_ecs_noref,dphi_ecs_ref,dphi_noon,dphi_snl,is_integer_n"
)

# closed forms must match the oracle at least this tightly in `point --oracle`
ORACLE_POINT_TOL = {
    ("ecs", WITHOUT_REFERENCE): 1e-6,
    ("ecs", WITH_REFERENCE): 1e-8,
    ("noon", WITH_REFERENCE): 1e-9,
    ("noon", WITHOUT_REFERENCE): 1e-9,
}

INTEGER_N_ATOL = 1e-9

DEFAULT_SWEEP_POINTS = 200
DEFAULT_SWEEP_RANGE = (0.1, 200.0)


@dataclass(frozen=True)
class SweepConfig:
    """Axes and output target of one sensitivity sweep."""

    eta: float
    n_min: float = DEFAULT_SWEEP_RANGE[0]
    n_max: float = DEFAULT_SWEEP_RANGE[1]
    points: int = DEFAULT_SWEEP_POINTS
    spacing: str = "log"
    truncation_tol: float = DEFAULT_TAIL_TOL
    output_path: str = "sweep.csv"

    def __post_init__(self) -> None:
        if not 0.0 < self.eta <= 1.0:
            raise InvalidEta(f"sweep needs 0 < eta <= 1, got {self.eta}")
        if self.n_min <= 0.0:
            raise ValueError(f"n_min must be positive, got {self.n_min}")
        if self.n_max <= self.n_min:
            raise ValueError(f"need n_max > n_min, got [{self.n_min}, {self.n_max}]")
        if self.points < 2:
            raise ValueError(f"need at least 2 points, got {self.points}")
        if self.spacing not in ("log", "linear"):
            raise ValueError(f"spacing must be 'log' or 'linear', got {self.spacing!r}")
        if not 0.0 < self.truncation_tol < 1.0:
            raise ValueError(f"truncation tolerance must be in (0, 1), got {self.truncation_tol}")

    def grid(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.n_min, self.n_max, self.points)
        return np.linspace(self.n_min, self.n_max, self.points)


@dataclass(frozen=True)
class CrossingResult:
    """The two mean photon numbers where the NOON and ECS curves meet."""

    n1: float
    n2: float
    eta: float
    tolerance: float

    def __post_init__(self) -> None:
        if not self.n1 < self.n2:
            raise ValueError(f"crossings out of order: {self.n1} >= {self.n2}")


def _fmt(x: float) -> str:
    # repr is the shortest digit string that round-trips the exact double
    return repr(float(x))


def cmd_point(
    family: str,
    eta: float,
    alpha: float | None = None,
    n: int | None = None,
    reference: str | None = None,
    use_oracle: bool = False,
    trunc_tol: float | None = None,
) -> int:
    if family == "ecs":
        if alpha is None:
            raise ValueError("--alpha is required for the ecs family")
        if reference not in (WITH_REFERENCE, WITHOUT_REFERENCE):
            raise ValueError("--reference with|without is required for the ecs family")
        probe = ProbeSpec("ecs", eta, alpha=alpha)
        result = qfi_ecs_ref(alpha, eta) if reference == WITH_REFERENCE else qfi_ecs_noref(alpha, eta)
        label = f"family=ecs alpha={alpha:g} eta={eta:g} reference={reference}"
    elif family == "noon":
        if n is None:
            raise ValueError("--n is required for the noon family")
        reference = reference or WITH_REFERENCE
        probe = ProbeSpec("noon", eta, n=n)
        result = qfi_noon(n, eta)
        label = f"family=noon n={n} eta={eta:g}"
    else:
        raise ValueError(f"unknown family {family!r}")

    print(label)
    print(f"F    = {_fmt(result.value)}  ({result.method}, {result.generator} generator)")
    dphi = math.inf if result.value == 0.0 else result.value**-0.5
    print(f"dphi = {_fmt(dphi)}")

    if not use_oracle:
        return 0
    if trunc_tol is not None:
        cfg = OracleConfig(
            truncation=FockTruncation(truncation_for_tolerance(probe.alpha, trunc_tol).n_max + 2)
            if family == "ecs"
            else None,
            tail_tol=trunc_tol,
        )
    else:
        cfg = OracleConfig()
    numeric = scenario_qfi(build_scenario(probe, reference, cfg), cfg)
    scale = abs(result.value) if result.value != 0.0 else 1.0
    deviation = abs(numeric.value - result.value) / scale
    tolerance = ORACLE_POINT_TOL[(family, reference)]
    print(f"oracle = {_fmt(numeric.value)}  relative deviation {deviation:.3e} (tolerance {tolerance:g})")
    if deviation > tolerance:
        print(f"oracle deviation {deviation:.3e} exceeds {tolerance:g}", file=sys.stderr)
        return 3
    return 0


def sweep_rows(cfg: SweepConfig) -> list[str]:
    rows = [CSV_HEADER]
    for n_mean in cfg.grid():
        nm = float(n_mean)
        alpha = alpha_for_mean_photon(nm)
        f_noref = qfi_ecs_noref(alpha, cfg.eta).value
        f_ref = qfi_ecs_ref(alpha, cfg.eta).value
        f_asym = qfi_ecs_ref_asymptotic(alpha, cfg.eta).value
        f_noon = qfi_noon_continuous(nm, cfg.eta)
        integer_n = "true" if abs(nm - round(nm)) < INTEGER_N_ATOL else "false"
        values = (
            nm,
            cfg.eta,
            alpha,
            f_noref,
            f_ref,
            f_asym,
            f_noon,
            f_noref**-0.5,
            f_ref**-0.5,
            f_noon**-0.5,
            1.0 / math.sqrt(cfg.eta * nm),
        )
        rows.append(",".join(_fmt(v) for v in values) + f",{integer_n}")
    return rows


def cmd_sweep(cfg: SweepConfig) -> int:
    # all rows are computed before the file is opened, so a numerical
    # failure can never leave a partial CSV behind
    text = "\n".join(sweep_rows(cfg)) + "\n"
    try:
        with open(cfg.output_path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    except OSError:
        if os.path.exists(cfg.output_path):
            os.unlink(cfg.output_path)
        raise
    print(f"wrote {cfg.points} rows to {cfg.output_path}")
    return 0


def qfi_ecs_ref_at_mean_photons(n_mean: float, eta: float) -> float:
    """Reference-beam ECS QFI with alpha chosen to hit the target mean photon number."""
    return qfi_ecs_ref(alpha_for_mean_photon(n_mean), eta).value


def find_crossings(
    eta: float,
    tolerance: float = 1e-6,
    n_min: float = DEFAULT_SWEEP_RANGE[0],
    n_max: float = DEFAULT_SWEEP_RANGE[1],
    points: int = DEFAULT_SWEEP_POINTS,
) -> list[float]:
    """Mean photon numbers where the NOON and ECS information curves cross.

    Sign changes of F_noon(N) - F_ecs(N) are bracketed on a log grid and
    each is bisected until the curve gap at the midpoint is within
    tolerance. Raises NoCrossingFound when the grid shows no sign change.
    """
    if not 0.0 < eta < 1.0:
        raise InvalidEta(f"crossings are defined for 0 < eta < 1, got {eta}")

    def gap(nm: float) -> float:
        return qfi_noon_continuous(nm, eta) - qfi_ecs_ref_at_mean_photons(nm, eta)

    ns = np.geomspace(n_min, n_max, points)
    gaps = [gap(float(x)) for x in ns]
    roots: list[float] = []
    for i in range(points - 1):
        if gaps[i] == 0.0:
            roots.append(float(ns[i]))
            continue
        if gaps[i] * gaps[i + 1] >= 0.0:
            continue
        lo, hi, glo = float(ns[i]), float(ns[i + 1]), gaps[i]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            gm = gap(mid)
            if abs(gm) <= tolerance:
                roots.append(mid)
                break
            if (gm > 0.0) == (glo > 0.0):
                lo, glo = mid, gm
            else:
                hi = mid
        else:
            raise NoConvergence(f"bisection stalled on bracket [{lo}, {hi}] at eta={eta}")
    if gaps[-1] == 0.0:
        roots.append(float(ns[-1]))
    if not roots:
        raise NoCrossingFound(f"no crossing on N in [{n_min}, {n_max}] at eta={eta}")
    return roots


def cmd_crossings(eta: float, tolerance: float = 1e-6) -> int:
    try:
        roots = find_crossings(eta, tolerance)
    except NoCrossingFound as exc:
        print(str(exc))
        return 0
    if len(roots) == 2:
        result = CrossingResult(roots[0], roots[1], eta, tolerance)
        print(f"eta = {eta:g}: two crossings")
        print(f"N1 = {_fmt(result.n1)}")
        print(f"N2 = {_fmt(result.n2)}")
        mid = math.sqrt(result.n1 * result.n2)
        lead = "noon" if qfi_noon_continuous(mid, eta) > qfi_ecs_ref_at_mean_photons(mid, eta) else "ecs"
        print(f"between them the {lead} probe carries more information")
    else:
        print(f"eta = {eta:g}: found {len(roots)} crossing(s), expected 2")
        for k, root in enumerate(roots, start=1):
            print(f"N{k} = {_fmt(root)}")
    return 0


def cmd_verify(
    grid_mode: str = "full",
    alpha: float = 0.5,
    eta: float = 1.0,
    trunc_tol: float = DEFAULT_TAIL_TOL,
    output: str | None = None,
) -> int:
    grid = [(alpha, eta)] if grid_mode == "single" else None
    report = verify_all(grid, tail_tol=trunc_tol)
    print(report.render())
    if output is not None:
        with open(output, "w", encoding="ascii", newline="") as fh:
            fh.write(report.to_csv())
    return 0 if report.passed else 1


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="phasefisher",
        description="QFI and phase sensitivity of lossy ECS/NOON interferometry",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    point = sub.add_parser("point", help="evaluate one probe configuration")
    point.add_argument("--family", choices=("ecs", "noon"), required=True)
    point.add_argument("--alpha", type=float, help="coherent amplitude (ecs)")
    point.add_argument("--n", type=int, help="photon number (noon)")
    point.add_argument("--eta", type=float, required=True)
    point.add_argument("--reference", choices=(WITH_REFERENCE, WITHOUT_REFERENCE))
    point.add_argument("--oracle", action="store_true", help="cross-check against the numeric oracle")
    point.add_argument("--trunc-tol", type=float, default=None, dest="trunc_tol")

    sweep = sub.add_parser("sweep", help="write a sensitivity-vs-N CSV")
    sweep.add_argument("--eta", type=float, required=True)
    sweep.add_argument("--output", required=True)
    sweep.add_argument("--n-min", type=float, default=DEFAULT_SWEEP_RANGE[0], dest="n_min")
    sweep.add_argument("--n-max", type=float, default=DEFAULT_SWEEP_RANGE[1], dest="n_max")
    sweep.add_argument("--points", type=int, default=DEFAULT_SWEEP_POINTS)
    sweep.add_argument("--spacing", choices=("log", "linear"), default="log")
    sweep.add_argument("--trunc-tol", type=float, default=DEFAULT_TAIL_TOL, dest="trunc_tol")

    crossings = sub.add_parser("crossings", help="find where NOON and ECS curves cross")
    crossings.add_argument("--eta", type=float, required=True)
    crossings.add_argument("--tol", type=float, default=1e-6)

    verify = sub.add_parser("verify", help="run the closed-form-vs-oracle suite")
    verify.add_argument("--grid", choices=("full", "single"), default="full")
    verify.add_argument("--alpha", type=float, default=0.5)
    verify.add_argument("--eta", type=float, default=1.0)
    verify.add_argument("--trunc-tol", type=float, default=DEFAULT_TAIL_TOL, dest="trunc_tol")
    verify.add_argument("--output", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        if args.command == "point":
            return cmd_point(
                family=args.family,
                eta=args.eta,
                alpha=args.alpha,
                n=args.n,
                reference=args.reference,
                use_oracle=args.oracle,
                trunc_tol=args.trunc_tol,
            )
        if args.command == "sweep":
            cfg = SweepConfig(
                eta=args.eta,
                n_min=args.n_min,
                n_max=args.n_max,
                points=args.points,
                spacing=args.spacing,
                truncation_tol=args.trunc_tol,
                output_path=args.output,
            )
            return cmd_sweep(cfg)
        if args.command == "crossings":
            return cmd_crossings(args.eta, args.tol)
        return cmd_verify(
            grid_mode=args.grid,
            alpha=args.alpha,
            eta=args.eta,
            trunc_tol=args.trunc_tol,
            output=args.output,
        )
    except (PhaseFisherError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

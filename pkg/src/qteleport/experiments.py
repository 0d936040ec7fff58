"""Batch studies built on :mod:`qteleport.protocol`."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .protocol import (
    PremeasurementSpec,
    ProtocolReport,
    QubitState,
    correction_branches,
    fidelity_theta_closed_form,
    lueders_spec,
    probe_vector,
    run_protocol,
    t0_closed_form,
    t012_closed_form,
)
from .tensor import TOL_NORM, haar_random_qubit, kron

__all__ = [
    "DEFAULT_TOL",
    "SweepRow",
    "TrialSummary",
    "CheckResult",
    "theta_grid",
    "sweep_theta",
    "random_chi_spec",
    "random_trials",
    "coverage_report",
    "branch_coefficients",
    "branch_overlaps",
    "continuity_constant",
]

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class SweepRow:
    theta: float
    fidelity_pipeline: float
    fidelity_closed_form: float
    coincidence_expectation: float
    abs_gap: float


@dataclass(frozen=True)
class TrialSummary:
    n_trials: int
    min_fidelity: float
    max_fidelity: float
    mean_fidelity: float
    max_unitarity_defect: float
    seed: int


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    expected: float
    residual: float


def theta_grid(n_points: int) -> np.ndarray:
    """Uniform grid ``2*pi*k/n`` for k = 0..n-1 (0 included, 2*pi excluded)."""
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    return 2 * np.pi * np.arange(n_points) / n_points


def sweep_theta(
    phi: QubitState,
    spec: Optional[PremeasurementSpec] = None,
    n_points: int = 64,
    seed_label: str = "",
) -> list[SweepRow]:
    """Run the W_theta pipeline on a uniform theta grid and compare to the closed form."""
    spec = lueders_spec() if spec is None else spec
    rows = []
    for theta in theta_grid(n_points):
        report = run_protocol(phi, spec, float(theta))
        closed = fidelity_theta_closed_form(phi, float(theta))
        rows.append(SweepRow(
            theta=float(theta),
            fidelity_pipeline=report.fidelity_final,
            fidelity_closed_form=closed,
            coincidence_expectation=report.coincidence_expectation,
            abs_gap=abs(report.fidelity_final - closed),
        ))
    logger.debug("sweep %r: %d points, max gap %.3e", seed_label, n_points,
                 max(r.abs_gap for r in rows))
    return rows


def random_chi_spec(rng: np.random.Generator, label: str = "random") -> PremeasurementSpec:
    """Four independent complex-Gaussian unit vectors in C^4 (not orthogonalized)."""
    chi = []
    for _ in range(4):
        z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        chi.append(z / np.linalg.norm(z))
    return PremeasurementSpec(tuple(chi), label=label)


def random_trials(n: int, seed: int, randomize_chi: bool = False) -> TrialSummary:
    """Teleport ``n`` Haar-random qubits with the plain correction W."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    fixed_spec = lueders_spec()
    fids = np.empty(n)
    worst_defect = 0.0
    for k in range(n):
        phi = QubitState.from_vector(haar_random_qubit(int(rng.integers(2**63))))
        spec = random_chi_spec(rng, label=f"random-{k}") if randomize_chi else fixed_spec
        report = run_protocol(phi, spec)
        fids[k] = report.fidelity_final
        worst_defect = max(worst_defect, report.unitarity_defect_U)
    return TrialSummary(
        n_trials=n,
        min_fidelity=float(fids.min()),
        max_fidelity=float(fids.max()),
        # rounding in the mean can otherwise land a hair outside [min, max]
        mean_fidelity=float(min(max(fids.mean(), fids.min()), fids.max())),
        max_unitarity_defect=worst_defect,
        seed=seed,
    )


def _matrix_check(name, actual, expected, tol) -> CheckResult:
    residual = float(np.abs(np.asarray(actual) - np.asarray(expected)).max())
    return CheckResult(name, residual <= tol, residual, 0.0, residual)


def _scalar_check(name, value, expected, tol) -> CheckResult:
    residual = abs(value - expected)
    return CheckResult(name, residual <= tol, value, expected, residual)


def coverage_report(report: ProtocolReport, tol: float = DEFAULT_TOL) -> list[CheckResult]:
    """Compare one run against the closed-form values it should reproduce.

    The probe check is against I/4 when the chi_i are orthonormal and against
    the general overlap formula otherwise. Matrix checks report the max-entry residual as ``value`` with expected 0.
    The final-fidelity target is 1 for the plain correction and the closed
    form for W_theta; on an input with a = 0 or b = 0 the closed form is 1.
    """
    phi = report.input
    r = report.reduced
    spec = report.spec
    if np.abs(spec.gram() - np.eye(4)).max() <= TOL_NORM:
        t0_check = _matrix_check("T0=I/4", r["T0"].matrix, np.eye(4) / 4, tol)
    else:
        t0_check = _matrix_check("T0_structure", r["T0"].matrix, t0_closed_form(phi, spec), tol)
    checks = [
        t0_check,
        _matrix_check("T3=I/2", r["T3"].matrix, np.eye(2) / 2, tol),
        _scalar_check("fidelity_after_U=1/2", report.fidelity_after_U, 0.5, tol),
        _matrix_check("T012_structure", r["T012"].matrix,
                      t012_closed_form(phi, spec), tol),
    ]
    if report.fidelity_final is not None:
        expected = 1.0 if report.theta is None else fidelity_theta_closed_form(phi, report.theta)
        checks.append(_scalar_check("fidelity_final", report.fidelity_final, expected, tol))
    if report.coincidence_expectation is not None:
        checks.append(_scalar_check("coincidence=3/4", report.coincidence_expectation, 0.75, tol))
    return checks


def branch_coefficients(report: ProtocolReport) -> np.ndarray:
    """4x4 matrix ``<eta_i chi_i| T012 |eta_j chi_j>`` read off a run."""
    kets = [kron(probe_vector(i + 1), report.spec.chi[i]) for i in range(4)]
    t012 = report.reduced["T012"].matrix
    return np.array([[np.vdot(kets[i], t012 @ kets[j]) for j in range(4)] for i in range(4)])


def branch_overlaps(phi: QubitState) -> np.ndarray:
    """4x4 matrix with entry (i, j) equal to ``<phi_j|phi_i> / 4``."""
    b = correction_branches(phi).as_tuple()
    return np.array([[0.25 * np.vdot(b[j], b[i]) for j in range(4)] for i in range(4)])


def continuity_constant(phi: QubitState, thetas) -> float:
    """Largest observed ``|F(theta) - F(0)| / theta`` over positive ``thetas``."""
    base = run_protocol(phi, None, 0.0).fidelity_final
    ratios = [abs(run_protocol(phi, None, t).fidelity_final - base) / t
              for t in thetas if t > 0 and math.isfinite(t)]
    return max(ratios) if ratios else 0.0

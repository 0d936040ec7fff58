"""Teleportation as two unitary premeasurements, with no outcome ever sampled.

System layout is ``H0 (x) H1 (x) H2 (x) H3`` with dimensions ``(4, 2, 2, 2)``:
factor 0 is the 4-level probe with pointer basis eta_1..eta_4 (the canonical
basis of C^4), factor 1 carries the unknown input qubit, and factors 2 and 3
share the singlet. Qubit basis: ``|+> = (1, 0)``, ``|-> = (0, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import DimensionMismatch, NonFiniteParameter, NotNormalized
from .tensor import (
    TOL_NORM,
    DensityOperator,
    as_vector,
    complete_to_unitary,
    embed,
    fidelity,
    kron,
    partial_trace,
    projector,
    unitarity_defect,
)

__all__ = [
    "SHAPE",
    "PLUS",
    "MINUS",
    "QubitState",
    "BellBasis",
    "PremeasurementSpec",
    "CorrectionBranches",
    "ProtocolReport",
    "probe_vector",
    "bell_basis",
    "lueders_spec",
    "build_U",
    "correction_branches",
    "branch_expansion",
    "post_measurement_state",
    "reduced_states",
    "t0_closed_form",
    "t012_closed_form",
    "build_W",
    "build_W_theta",
    "canonical_theta",
    "apply_correction",
    "run_protocol",
    "phi_theta",
    "theta_mixture",
    "fidelity_theta_closed_form",
    "coincidence_observable",
    "coincidence_expectation",
]

SHAPE = (4, 2, 2, 2)
PLUS = np.array([1.0, 0.0], dtype=np.complex128)
MINUS = np.array([0.0, 1.0], dtype=np.complex128)

_SQRT_HALF = 1.0 / math.sqrt(2.0)


def probe_vector(i: int) -> np.ndarray:
    """Pointer state eta_i of the probe, 1-based as in the usual notation."""
    if not 1 <= i <= 4:
        raise ValueError(f"probe pointer index must be 1..4, got {i}")
    v = np.zeros(4, dtype=np.complex128)
    v[i - 1] = 1.0
    return v


@dataclass(frozen=True)
class QubitState:
    """Input state ``a|+> + b|->``."""

    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        if not all(math.isfinite(x) for x in (a.real, a.imag, b.real, b.imag)):
            raise NonFiniteParameter("amplitudes must be finite")
        norm2 = abs(a) ** 2 + abs(b) ** 2
        if abs(norm2 - 1.0) > TOL_NORM:
            raise NotNormalized(f"|a|^2 + |b|^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_vector(cls, v) -> "QubitState":
        v = as_vector(v)
        if v.size != 2:
            raise DimensionMismatch(f"a qubit state has 2 amplitudes, got {v.size}")
        return cls(v[0], v[1])

    @classmethod
    def normalized(cls, a: complex, b: complex) -> "QubitState":
        """Rescale arbitrary nonzero amplitudes to a unit vector."""
        norm = math.hypot(abs(a), abs(b))
        if norm == 0.0:
            raise NotNormalized("zero vector cannot be normalized")
        return cls(a / norm, b / norm)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=np.complex128)

    def with_phase(self, alpha: float) -> "QubitState":
        z = complex(math.cos(alpha), math.sin(alpha))
        return QubitState(z * self.a, z * self.b)


@dataclass(frozen=True, eq=False)
class BellBasis:
    psi_plus: np.ndarray
    psi_minus: np.ndarray
    phi_plus: np.ndarray
    phi_minus: np.ndarray

    def as_tuple(self) -> tuple[np.ndarray, ...]:
        """The four vectors in the order (Psi+, Psi-, Phi+, Phi-)."""
        return (self.psi_plus, self.psi_minus, self.phi_plus, self.phi_minus)

    def matrix(self) -> np.ndarray:
        """4x4 matrix whose columns are :meth:`as_tuple`."""
        return np.column_stack(self.as_tuple())


def bell_basis() -> BellBasis:
    pp, pm, mp, mm = (kron(x, y) for x in (PLUS, MINUS) for y in (PLUS, MINUS))
    return BellBasis(
        psi_plus=_SQRT_HALF * (pm + mp),
        psi_minus=_SQRT_HALF * (pm - mp),
        phi_plus=_SQRT_HALF * (pp + mm),
        phi_minus=_SQRT_HALF * (pp - mm),
    )


@dataclass(frozen=True, eq=False)
class PremeasurementSpec:
    """Targets chi_1..chi_4 in H1 (x) H2 left behind by the premeasurement.

    Each chi_i must be a unit vector; they need not be mutually orthogonal.
    """

    chi: tuple[np.ndarray, ...]
    label: str = "custom"

    def __post_init__(self):
        chi = tuple(as_vector(c).copy() for c in self.chi)
        if len(chi) != 4:
            raise DimensionMismatch(f"need exactly 4 target vectors, got {len(chi)}")
        for i, c in enumerate(chi, start=1):
            if c.size != 4:
                raise DimensionMismatch(f"chi_{i} has length {c.size}, expected 4")
            norm = np.linalg.norm(c)
            if abs(norm - 1.0) > TOL_NORM:
                raise NotNormalized(f"chi_{i} has norm {norm!r}")
            c.setflags(write=False)
        object.__setattr__(self, "chi", chi)

    def gram(self) -> np.ndarray:
        m = np.column_stack(self.chi)
        return m.conj().T @ m


def lueders_spec() -> PremeasurementSpec:
    """The von Neumann-Lueders choice chi_i = Bell_i."""
    return PremeasurementSpec(bell_basis().as_tuple(), label="lueders")


def build_U(spec: PremeasurementSpec) -> np.ndarray:
    """16x16 premeasurement unitary on H0 (x) H1 (x) H2.

    Maps ``eta_1 (x) Bell_i`` to ``eta_i (x) chi_i``. Only this four-vector
    slice is physically meaningful; the rest of the matrix comes from the
    canonical completion in :func:`complete_to_unitary`.
    """
    # change of basis whose columns 0..3 are eta_1 (x) Bell_i
    bell_frame = np.kron(np.eye(4), bell_basis().matrix())
    targets = [(i, kron(probe_vector(i + 1), spec.chi[i])) for i in range(4)]
    completed = complete_to_unitary(targets, dim=16)
    return completed @ bell_frame.conj().T


@dataclass(frozen=True, eq=False)
class CorrectionBranches:
    phi1: np.ndarray
    phi2: np.ndarray
    phi3: np.ndarray
    phi4: np.ndarray

    def as_tuple(self) -> tuple[np.ndarray, ...]:
        return (self.phi1, self.phi2, self.phi3, self.phi4)


def correction_branches(phi: QubitState) -> CorrectionBranches:
    """States of qubit 3 attached to each probe pointer after the premeasurement."""
    a, b = phi.a, phi.b
    return CorrectionBranches(
        phi1=-a * PLUS + b * MINUS,
        phi2=-phi.vector,
        phi3=a * MINUS - b * PLUS,
        phi4=a * MINUS + b * PLUS,
    )


def branch_expansion(phi: QubitState, spec: PremeasurementSpec) -> np.ndarray:
    """``1/2 sum_i eta_i chi_i phi_i`` assembled term by term."""
    branches = correction_branches(phi).as_tuple()
    return 0.5 * sum(
        kron(probe_vector(i + 1), spec.chi[i], branches[i]) for i in range(4))


def _initial_state(phi: QubitState) -> np.ndarray:
    return kron(probe_vector(1), phi.vector, bell_basis().psi_minus)


def post_measurement_state(phi: QubitState, spec: PremeasurementSpec) -> np.ndarray:
    """32-amplitude state after the premeasurement acts on probe, qubit 1, qubit 2."""
    u_full = embed(build_U(spec), (0, 1, 2), SHAPE)
    return u_full @ _initial_state(phi)


_REDUCTIONS = {
    "T0": (0,),
    "T3": (3,),
    "T12": (1, 2),
    "T012": (0, 1, 2),
    "T123": (1, 2, 3),
}


def reduced_states(total) -> dict[str, DensityOperator]:
    """Reduced density operators T0, T3, T12, T012, T123 of a 32-dim pure state."""
    rho = DensityOperator.from_vector(total, SHAPE)
    return {name: partial_trace(rho, keep) for name, keep in _REDUCTIONS.items()}


def t012_closed_form(phi: QubitState, spec: PremeasurementSpec) -> np.ndarray:
    """Probe + qubits 1, 2 reduction written out from the branch overlaps.

    Entry ``(i, j)`` in the ``eta_i chi_i`` frame is ``<phi_j|phi_i> / 4``
    (physics convention, antilinear in the bra).
    """
    branches = correction_branches(phi).as_tuple()
    kets = [kron(probe_vector(i + 1), spec.chi[i]) for i in range(4)]
    out = np.zeros((16, 16), dtype=np.complex128)
    for i in range(4):
        for j in range(4):
            out += 0.25 * np.vdot(branches[j], branches[i]) * np.outer(kets[i], kets[j].conj())
    return out


def t0_closed_form(phi: QubitState, spec: PremeasurementSpec) -> np.ndarray:
    """Probe reduction ``1/4 sum_ij <chi_j|chi_i><phi_j|phi_i> |eta_i><eta_j|``.

    Equals I/4 only when the targets chi_i are orthonormal.
    """
    branches = correction_branches(phi).as_tuple()
    out = np.zeros((4, 4), dtype=np.complex128)
    for i in range(4):
        for j in range(4):
            out[i, j] = 0.25 * np.vdot(spec.chi[j], spec.chi[i]) * np.vdot(branches[j], branches[i])
    return out


def canonical_theta(theta: float) -> float:
    """Reduce a finite angle into [0, 2*pi)."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise NonFiniteParameter(f"theta must be finite, got {theta!r}")
    reduced = math.fmod(theta, 2 * math.pi)
    if reduced < 0:
        reduced += 2 * math.pi
    if reduced >= 2 * math.pi:
        reduced = 0.0
    return reduced


def _w_matrix(phase_eta2_plus: complex) -> np.ndarray:
    # index = 2 * (pointer - 1) + (0 for |+>, 1 for |->); entries W[out, in]
    w = np.zeros((8, 8), dtype=np.complex128)
    plus, minus = 0, 1

    def put(pointer, qin, qout, value):
        w[2 * (pointer - 1) + qout, 2 * (pointer - 1) + qin] = value

    put(1, plus, plus, -1)
    put(1, minus, minus, 1)
    put(2, plus, plus, -phase_eta2_plus)
    put(2, minus, minus, -1)
    put(3, plus, minus, -1)
    put(3, minus, plus, 1)
    put(4, plus, minus, 1)
    put(4, minus, plus, 1)
    return w


def build_W() -> np.ndarray:
    """8x8 conditional correction on H0 (x) H3."""
    return _w_matrix(1.0)


def build_W_theta(theta: float) -> np.ndarray:
    """Correction with ``eta_2|+>`` sent to ``-exp(i theta) eta_2|+>``."""
    theta = canonical_theta(theta)
    return _w_matrix(complex(math.cos(theta), math.sin(theta)))


def apply_correction(state, theta: Optional[float] = None) -> np.ndarray:
    """Apply W (or W_theta) to probe and qubit 3 of a 32-dim state."""
    w = build_W() if theta is None else build_W_theta(theta)
    return embed(w, (0, 3), SHAPE) @ as_vector(state)


def phi_theta(phi: QubitState, theta: float) -> np.ndarray:
    theta = canonical_theta(theta)
    return np.array([complex(math.cos(theta), math.sin(theta)) * phi.a, phi.b])


def theta_mixture(phi: QubitState, theta: float) -> DensityOperator:
    """``3/4 P[phi] + 1/4 P[phi_theta]``, built directly from the formula."""
    mix = 0.75 * projector(phi.vector) + 0.25 * projector(phi_theta(phi, theta))
    return DensityOperator(mix, (2,))


def fidelity_theta_closed_form(phi: QubitState, theta: float) -> float:
    theta = canonical_theta(theta)
    pa, pb = abs(phi.a) ** 2, abs(phi.b) ** 2
    overlap = pa * complex(math.cos(theta), math.sin(theta)) + pb
    return 0.75 + 0.25 * abs(overlap) ** 2


def coincidence_observable(phi: QubitState) -> np.ndarray:
    """``A = P[eta_1 phi] + P[eta_3 phi] + P[eta_4 phi]`` on H0 (x) H3."""
    return sum(projector(kron(probe_vector(i), phi.vector)) for i in (1, 3, 4))


def coincidence_expectation(state, phi: QubitState) -> float:
    """``<state| A |state>`` with A lifted onto the probe and qubit 3."""
    state = as_vector(state)
    a_full = embed(coincidence_observable(phi), (0, 3), SHAPE)
    return float(np.real(np.vdot(state, a_full @ state)))


@dataclass(frozen=True, eq=False)
class ProtocolReport:
    """Everything computed in one run of the protocol."""

    input: QubitState
    spec: PremeasurementSpec
    theta: Optional[float]
    total_state_after_U: np.ndarray
    total_state_final: Optional[np.ndarray]
    reduced: Mapping[str, DensityOperator]
    fidelity_after_U: float
    fidelity_final: Optional[float]
    coincidence_expectation: Optional[float]
    unitarity_defect_U: float = field(default=0.0)

    @property
    def spec_label(self) -> str:
        return self.spec.label


def run_protocol(
    phi: QubitState,
    spec: PremeasurementSpec | None = None,
    theta: Optional[float] = None,
    *,
    correct: bool = True,
) -> ProtocolReport:
    """Premeasure, then (unless ``correct`` is False) apply W or W_theta.

    ``theta=None`` selects the plain correction W.
    """
    spec = lueders_spec() if spec is None else spec
    if theta is not None:
        theta = canonical_theta(theta)
    u = build_U(spec)
    after_u = embed(u, (0, 1, 2), SHAPE) @ _initial_state(phi)
    reduced = dict(reduced_states(after_u))
    fid_u = fidelity(phi.vector, reduced["T3"])

    final = fid_final = coinc = None
    if correct:
        final = apply_correction(after_u, theta)
        t3_final = partial_trace(DensityOperator.from_vector(final, SHAPE), (3,))
        reduced["T3_final"] = t3_final
        fid_final = fidelity(phi.vector, t3_final)
        coinc = coincidence_expectation(final, phi)

    return ProtocolReport(
        input=phi,
        spec=spec,
        theta=theta,
        total_state_after_U=after_u,
        total_state_final=final,
        reduced=reduced,
        fidelity_after_U=fid_u,
        fidelity_final=fid_final,
        coincidence_expectation=coinc,
        unitarity_defect_U=unitarity_defect(u),
    )


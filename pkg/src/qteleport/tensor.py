"""Dense complex linear algebra on small tensor-product spaces.

Vectors and operators are plain numpy arrays of dtype complex128. A tensor
shape is a tuple of factor dimensions such as ``(4, 2, 2, 2)``; the leftmost
factor is the most significant in the flattened (row-major) index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadFactorIndex,
    CompletionFailure,
    DimensionMismatch,
    InvalidDensityOperator,
    NotNormalized,
    NotOrthonormalInput,
)

__all__ = [
    "TOL_NORM",
    "TOL_UNITARY",
    "DensityOperator",
    "as_vector",
    "kron",
    "dagger",
    "projector",
    "partial_trace",
    "embed",
    "complete_to_unitary",
    "haar_random_qubit",
    "fidelity",
    "unitarity_defect",
]

TOL_NORM = 1e-12
TOL_UNITARY = 1e-10


def as_vector(v) -> np.ndarray:
    """Return ``v`` as a flat complex128 array."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {arr.shape}")
    return arr


def _as_matrix(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 1:
        return arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {arr.shape}")
    return arr


def _check_shape(shape: Sequence[int]) -> tuple[int, ...]:
    shape = tuple(int(d) for d in shape)
    if not shape or any(d < 1 for d in shape):
        raise DimensionMismatch(f"invalid tensor shape {shape}")
    return shape


def _check_positions(positions: Iterable[int], n: int) -> tuple[int, ...]:
    positions = tuple(int(p) for p in positions)
    for p in positions:
        if not 0 <= p < n:
            raise BadFactorIndex(f"factor index {p} out of range for {n} factors")
    if len(set(positions)) != len(positions):
        raise BadFactorIndex(f"repeated factor index in {positions}")
    return positions


def kron(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices.

    1-d inputs are treated as column vectors, and a product of column vectors
    is returned flat again so that ``kron(ket, ket)`` is a ket.
    """
    if not factors:
        raise ValueError("kron needs at least one factor")
    all_vectors = all(np.ndim(f) == 1 for f in factors)
    out = _as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, _as_matrix(f))
    return out.reshape(-1) if all_vectors else out


def dagger(a) -> np.ndarray:
    """Conjugate transpose. A flat vector becomes a 1-row matrix (a bra)."""
    return _as_matrix(a).conj().T


def projector(v) -> np.ndarray:
    """Rank-one projector ``|v><v|`` onto a unit vector."""
    v = as_vector(v)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > TOL_NORM:
        raise NotNormalized(f"projector needs a unit vector, got norm {norm!r}")
    return np.outer(v, v.conj())


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace operator on a tensor space.

    Validation runs on construction; a failing matrix raises
    :class:`InvalidDensityOperator`.
    """

    matrix: np.ndarray
    shape: tuple[int, ...]

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.complex128)
        shape = _check_shape(self.shape)
        dim = int(np.prod(shape))
        if mat.shape != (dim, dim):
            raise DimensionMismatch(
                f"matrix of shape {mat.shape} does not fit tensor shape {shape}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "shape", shape)
        self._validate()

    def _validate(self, tol: float = TOL_NORM):
        mat = self.matrix
        herm_err = np.abs(mat - mat.conj().T).max()
        if herm_err > tol:
            raise InvalidDensityOperator(f"not Hermitian (defect {herm_err:.3e})")
        tr = np.trace(mat)
        if abs(tr - 1.0) > tol:
            raise InvalidDensityOperator(f"trace is {tr!r}, not 1")
        lowest = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T)).min()
        if lowest < -tol:
            raise InvalidDensityOperator(f"negative eigenvalue {lowest:.3e}")

    @classmethod
    def from_vector(cls, v, shape: Sequence[int] | None = None) -> "DensityOperator":
        """Pure state ``P[v]``; ``shape`` defaults to a single factor."""
        v = as_vector(v)
        return cls(projector(v), tuple(shape) if shape is not None else (v.size,))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Trace out every factor not listed in ``keep``.

    The kept factors stay in their original order regardless of the order in
    which ``keep`` lists them.
    """
    shape = rho.shape
    n = len(shape)
    keep = sorted(set(_check_positions(keep, n)))
    if not keep:
        raise BadFactorIndex("keep must name at least one factor")

    traced = [k for k in range(n) if k not in keep]
    # einsum labels: ket indices 0..n-1, bra indices n..2n-1; traced pairs share a label
    ket = list(range(n))
    bra = [k if k in traced else n + k for k in range(n)]
    out = keep + [n + k for k in keep]
    tensor = rho.matrix.reshape(shape + shape)
    reduced = np.einsum(tensor, ket + bra, out)
    kept_shape = tuple(shape[k] for k in keep)
    d = int(np.prod(kept_shape))
    return DensityOperator(reduced.reshape(d, d), kept_shape)


def embed(op, positions: Sequence[int], shape: Sequence[int]) -> np.ndarray:
    """Lift ``op`` to the full tensor space.

    ``op`` acts on the factors named in ``positions`` (in that order, so
    ``op``'s own leftmost factor is ``positions[0]``) and the identity acts on
    every other factor.
    """
    shape = _check_shape(shape)
    n = len(shape)
    positions = _check_positions(positions, n)
    if not positions:
        raise BadFactorIndex("positions must name at least one factor")
    op = _as_matrix(op)
    sub_dims = tuple(shape[p] for p in positions)
    d_sub = int(np.prod(sub_dims))
    if op.shape != (d_sub, d_sub):
        raise DimensionMismatch(
            f"operator of shape {op.shape} does not act on factors {positions} "
            f"with dimensions {sub_dims}")

    rest = [k for k in range(n) if k not in positions]
    rest_dims = tuple(shape[k] for k in rest)
    full = np.kron(op, np.eye(int(np.prod(rest_dims, dtype=int)), dtype=np.complex128))
    # `full` lives on the permuted ordering (positions..., rest...); undo it
    order = list(positions) + rest
    perm_dims = sub_dims + rest_dims
    t = full.reshape(perm_dims + perm_dims)
    inverse = np.argsort(order)
    t = t.transpose(list(inverse) + [n + i for i in inverse])
    dim = int(np.prod(shape))
    return t.reshape(dim, dim)


def complete_to_unitary(partial_columns, dim: int | None = None) -> np.ndarray:
    """Extend prescribed columns to a full unitary matrix.

    Args:
        partial_columns: pairs ``(column_index, vector)``. The vectors must be
            orthonormal.
        dim: matrix dimension; inferred from the vectors when omitted.

    Unspecified columns are filled, in ascending column order, with the
    canonical basis vectors ``e_0, e_1, ...`` orthogonalized against
    everything already placed. Candidates whose residual norm drops below
    ``10 * TOL_NORM`` are skipped.
    """
    pairs = [(int(i), as_vector(v)) for i, v in partial_columns]
    if dim is None:
        if not pairs:
            raise DimensionMismatch("cannot infer dimension from no columns")
        dim = pairs[0][1].size
    for i, v in pairs:
        if v.size != dim:
            raise DimensionMismatch(f"column {i} has length {v.size}, expected {dim}")
        if not 0 <= i < dim:
            raise BadFactorIndex(f"column index {i} out of range for dimension {dim}")
    if len({i for i, _ in pairs}) != len(pairs):
        raise BadFactorIndex("repeated column index")

    given = np.array([v for _, v in pairs]).T if pairs else np.zeros((dim, 0), complex)
    gram = given.conj().T @ given
    if pairs and np.abs(gram - np.eye(len(pairs))).max() > TOL_NORM:
        raise NotOrthonormalInput("prescribed columns are not orthonormal")

    result = np.zeros((dim, dim), dtype=np.complex128)
    basis = [v for _, v in pairs]
    for i, v in pairs:
        result[:, i] = v

    free = sorted(set(range(dim)) - {i for i, _ in pairs})
    candidate = 0
    for col in free:
        while True:
            if candidate >= dim:
                raise CompletionFailure("ran out of canonical basis vectors")
            w = np.zeros(dim, dtype=np.complex128)
            w[candidate] = 1.0
            candidate += 1
            # two passes of modified Gram-Schmidt keep the defect at rounding level
            for _ in range(2):
                for b in basis:
                    w = w - np.vdot(b, w) * b
            norm = np.linalg.norm(w)
            if norm >= 10 * TOL_NORM:
                break
        w = w / norm
        basis.append(w)
        result[:, col] = w
    return result


def unitarity_defect(u) -> float:
    """Max-entry norm of ``U^dagger U - I``."""
    u = _as_matrix(u)
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[1])).max())


def haar_random_qubit(seed: int) -> np.ndarray:
    """Haar-distributed unit vector in C^2, reproducible from ``seed``."""
    x = np.random.default_rng(seed).standard_normal(4)
    v = np.array([x[0] + 1j * x[1], x[2] + 1j * x[3]])
    return v / np.linalg.norm(v)


def fidelity(phi, rho) -> float:
    """Overlap ``tr(P[phi] rho)`` of a pure target with a state, clamped to [0, 1]."""
    phi = as_vector(phi)
    mat = rho.matrix if isinstance(rho, DensityOperator) else _as_matrix(rho)
    if mat.shape != (phi.size, phi.size):
        raise DimensionMismatch(
            f"target of length {phi.size} vs operator of shape {mat.shape}")
    norm = np.linalg.norm(phi)
    if abs(norm - 1.0) > TOL_NORM:
        raise NotNormalized(f"target state has norm {norm!r}")
    value = float(np.real(np.vdot(phi, mat @ phi)))
    return min(1.0, max(0.0, value))

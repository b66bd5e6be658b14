"""Dense complex linear algebra for finite-dimensional pure states.

Value types (states, operators, density matrices, Gram matrices) are
immutable after construction and validated against their defining
invariants. Every operation is a pure function returning new values, so
everything here is safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.linalg

NORM_TOL = 1e-10
OP_TOL = 1e-10
RECON_TOL = 1e-9
RANK_TOL = 1e-10

State = Union["StateVector", "MultipartiteState"]


def _frozen_complex_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("amplitudes must form a nonempty one-dimensional sequence")
    arr.setflags(write=False)
    return arr


def _frozen_complex_matrix(values) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"expected a nonempty square matrix, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _check_normalized(amps: np.ndarray) -> None:
    err = abs(np.linalg.norm(amps) - 1.0)
    if err > NORM_TOL:
        raise ValueError(f"state is not normalized: |norm - 1| = {err:.3e}")


def _matrix_entries(matrix) -> np.ndarray:
    mat = np.asarray(getattr(matrix, "entries", matrix), dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    return mat


def _default_labels(count: int) -> tuple[str, ...]:
    if count == 2:
        return ("A", "B")
    if count == 3:
        return ("A", "B", "P")
    return tuple(f"S{i}" for i in range(count))


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state as a complex amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen_complex_vector(self.amplitudes)
        _check_normalized(amps)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def overlap(self, other: State) -> complex:
        return overlap(self, other)


@dataclass(frozen=True)
class MultipartiteState:
    """Normalized pure state on a tensor product of labeled subsystems."""

    amplitudes: np.ndarray
    dims: tuple[int, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        amps = _frozen_complex_vector(self.amplitudes)
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d <= 0 for d in dims):
            raise ValueError(f"subsystem dimensions must be positive, got {dims}")
        if int(np.prod(dims)) != amps.size:
            raise ValueError(
                f"product of dims {dims} does not match amplitude length {amps.size}"
            )
        labels = _default_labels(len(dims)) if self.labels is None else tuple(self.labels)
        if len(labels) != len(dims) or len(set(labels)) != len(labels):
            raise ValueError(f"labels {labels} must be distinct and match dims {dims}")
        _check_normalized(amps)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def overlap(self, other: State) -> complex:
        return overlap(self, other)


@dataclass(frozen=True)
class Operator:
    """Square complex matrix acting on a Hilbert space."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_complex_matrix(self.entries))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_unitary(self, tol: float = OP_TOL) -> bool:
        product = self.entries.conj().T @ self.entries
        return float(np.max(np.abs(product - np.eye(self.dim)))) <= tol

    def is_hermitian(self, tol: float = OP_TOL) -> bool:
        return float(np.max(np.abs(self.entries - self.entries.conj().T))) <= tol


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, trace-one, positive-semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self):
        mat = _frozen_complex_matrix(self.entries)
        residual = float(np.max(np.abs(mat - mat.conj().T)))
        if residual > OP_TOL:
            raise ValueError(f"density operator is not Hermitian: residual {residual:.3e}")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > OP_TOL:
            raise ValueError(f"density operator has trace {trace}, expected 1")
        lowest = float(np.linalg.eigvalsh(mat)[0])
        if lowest < -OP_TOL:
            raise ValueError(f"density operator has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Spectrum sorted in non-increasing order."""
        return np.linalg.eigvalsh(self.entries)[::-1]


@dataclass(frozen=True)
class GramMatrix:
    """Matrix of pairwise inner products of a state family."""

    entries: np.ndarray

    def __post_init__(self):
        mat = _frozen_complex_matrix(self.entries)
        residual = float(np.max(np.abs(mat - mat.conj().T)))
        if residual > OP_TOL:
            raise ValueError(f"Gram matrix is not Hermitian: residual {residual:.3e}")
        lowest = float(np.linalg.eigvalsh(mat)[0])
        if lowest < -OP_TOL:
            raise ValueError(f"Gram matrix has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "entries", mat)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Expansion of a bipartite pure state over matched orthonormal bases.

    ``coefficients`` holds the non-increasing singular values whose squares
    are the shared marginal spectrum; the state is the sum of
    ``coefficients[i] * left_basis[i] (x) right_basis[i]``.
    """

    coefficients: np.ndarray
    left_basis: tuple[StateVector, ...]
    right_basis: tuple[StateVector, ...]

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("coefficients must be a nonempty one-dimensional sequence")
        if np.any(coeffs < -NORM_TOL):
            raise ValueError("coefficients must be non-negative")
        if np.any(np.diff(coeffs) > NORM_TOL):
            raise ValueError("coefficients must be sorted in non-increasing order")
        if abs(float(np.sum(coeffs**2)) - 1.0) > NORM_TOL:
            raise ValueError("squared coefficients must sum to 1")
        left = tuple(self.left_basis)
        right = tuple(self.right_basis)
        if len(left) != coeffs.size or len(right) != coeffs.size:
            raise ValueError("basis lengths must match the number of coefficients")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "left_basis", left)
        object.__setattr__(self, "right_basis", right)

    def reconstruct(self) -> MultipartiteState:
        """Rebuild the decomposed state from coefficients and bases."""
        amps = sum(
            c * np.kron(u.amplitudes, v.amplitudes)
            for c, u, v in zip(self.coefficients, self.left_basis, self.right_basis)
        )
        return MultipartiteState(amps, (self.left_basis[0].dim, self.right_basis[0].dim))


def basis_state(dim: int, index: int) -> StateVector:
    """Computational basis vector |index> in dimension ``dim``."""
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} outside dimension {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps)


def overlap(u: State, v: State) -> complex:
    """Inner product <u|v>."""
    if u.amplitudes.shape != v.amplitudes.shape:
        raise ValueError(f"states have different dimensions: {u.dim} vs {v.dim}")
    return complex(np.vdot(u.amplitudes, v.amplitudes))


def fidelity(u: State, v: State) -> float:
    """Squared overlap magnitude |<u|v>|^2, the phase-insensitive state match."""
    return float(abs(overlap(u, v)) ** 2)


def _dims_of(state: State) -> tuple[int, ...]:
    return state.dims if isinstance(state, MultipartiteState) else (state.dim,)


def tensor(u: State, v: State, labels: Sequence[str] | None = None) -> MultipartiteState:
    """Kronecker product of two states, preserving subsystem structure."""
    amps = np.kron(u.amplitudes, v.amplitudes)
    dims = _dims_of(u) + _dims_of(v)
    return MultipartiteState(amps, dims, None if labels is None else tuple(labels))


def partial_trace(state: MultipartiteState, keep: str) -> DensityOperator:
    """Reduced density operator of the subsystem labeled ``keep``."""
    if keep not in state.labels:
        raise ValueError(f"unknown subsystem label {keep!r}; state has {state.labels}")
    axis = state.labels.index(keep)
    tensor_form = state.amplitudes.reshape(state.dims)
    traced = tuple(i for i in range(tensor_form.ndim) if i != axis)
    rho = np.tensordot(tensor_form, tensor_form.conj(), axes=(traced, traced))
    return DensityOperator(rho)


def schmidt(state: MultipartiteState, *, recon_tol: float = RECON_TOL) -> SchmidtDecomposition:
    """Schmidt decomposition of a bipartite pure state.

    Degenerate coefficients leave a basis freedom inside each degenerate
    block, so only basis-independent quantities (coefficients,
    reconstructions, projectors) are stable across runs or platforms.
    """
    if len(state.dims) != 2:
        raise ValueError(
            f"Schmidt decomposition needs a bipartite state, got {len(state.dims)} subsystems"
        )
    d_left, d_right = state.dims
    matrix = state.amplitudes.reshape(d_left, d_right)
    left_vecs, coeffs, right_vecs = np.linalg.svd(matrix, full_matrices=False)
    decomposition = SchmidtDecomposition(
        coeffs,
        tuple(StateVector(left_vecs[:, i]) for i in range(coeffs.size)),
        tuple(StateVector(right_vecs[i, :]) for i in range(coeffs.size)),
    )
    error = float(np.linalg.norm(decomposition.reconstruct().amplitudes - state.amplitudes))
    if error > recon_tol:
        raise ValueError(f"decomposition failed to reconstruct the input: error {error:.3e}")
    return decomposition


def _stack(states: Sequence[State]) -> np.ndarray:
    if not states:
        raise ValueError("state list is empty")
    dims = {s.amplitudes.shape[0] for s in states}
    if len(dims) != 1:
        raise ValueError(f"states have mismatched dimensions: {sorted(dims)}")
    return np.column_stack([s.amplitudes for s in states])


def gram(states: Sequence[State]) -> GramMatrix:
    """Gram matrix with entries <state_i|state_j>."""
    matrix = _stack(states)
    g = matrix.conj().T @ matrix
    return GramMatrix((g + g.conj().T) / 2.0)


def linearly_independent(states: Sequence[State], rank_tol: float = RANK_TOL) -> bool:
    """True when the family's Gram matrix has no eigenvalue at or below ``rank_tol``."""
    g = gram(states)
    return float(np.linalg.eigvalsh(g.entries)[0]) > rank_tol


def psd_check(matrix, tol: float = OP_TOL) -> tuple[bool, float]:
    """Positive-semidefiniteness test: (min eigenvalue >= -tol, min eigenvalue)."""
    mat = _matrix_entries(matrix)
    residual = float(np.max(np.abs(mat - mat.conj().T)))
    if residual > OP_TOL:
        raise ValueError(f"matrix is not Hermitian: residual {residual:.3e}")
    lowest = float(np.linalg.eigvalsh(mat)[0])
    return lowest >= -tol, lowest


def hermitian_sqrt(matrix, *, op_tol: float = OP_TOL) -> np.ndarray:
    """Hermitian PSD square root S of a Hermitian PSD matrix, with S @ S = matrix.

    Eigenvalues in [-op_tol, 0] are treated as numerical zeros; anything
    below -op_tol is rejected.
    """
    mat = _matrix_entries(matrix)
    residual = float(np.max(np.abs(mat - mat.conj().T)))
    if residual > OP_TOL:
        raise ValueError(f"matrix is not Hermitian: residual {residual:.3e}")
    eigvals, eigvecs = np.linalg.eigh(mat)
    if float(eigvals[0]) < -op_tol:
        raise ValueError(f"matrix has negative eigenvalue {float(eigvals[0]):.3e}")
    root = (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.conj().T
    return (root + root.conj().T) / 2.0


def unitary_completion(
    inputs: Sequence[State],
    outputs: Sequence[State],
    tol: float = OP_TOL,
    *,
    rank_tol: float = RANK_TOL,
) -> Operator:
    """Unitary U with U|input_i> = |output_i> for every i.

    Such a U exists exactly when the two families share their Gram matrix.
    The shared Gram is eigendecomposed once and both families are
    contracted against the same eigenvector weights, which yields two
    orthonormal frames in exact correspondence even for linearly dependent
    families (eigenvalues at or below ``rank_tol`` are dropped). Each frame
    is completed to a full basis and the basis change between the
    completions is returned; its action outside the span of the inputs is
    an arbitrary isometric completion.
    """
    src = _stack(inputs)
    dst = _stack(outputs)
    if src.shape != dst.shape:
        raise ValueError(
            f"input and output families differ in shape: {src.shape} vs {dst.shape}"
        )
    gram_in = src.conj().T @ src
    gram_out = dst.conj().T @ dst
    mismatch = float(np.max(np.abs(gram_in - gram_out)))
    if mismatch > tol:
        raise ValueError(
            f"Gram matrices differ by {mismatch:.3e} (tolerance {tol:.1e}); "
            "no unitary can map one family onto the other"
        )
    shared = (gram_in + gram_in.conj().T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(shared)
    kept = eigvals > rank_tol
    weights = eigvecs[:, kept] / np.sqrt(eigvals[kept])
    frame_in = src @ weights
    frame_out = dst @ weights
    basis_in = np.hstack([frame_in, scipy.linalg.null_space(frame_in.conj().T)])
    basis_out = np.hstack([frame_out, scipy.linalg.null_space(frame_out.conj().T)])
    raw = basis_out @ basis_in.conj().T
    # project onto the nearest unitary so tolerance slack in the Gram match
    # never leaks into U itself
    left, _, right = np.linalg.svd(raw)
    return Operator(left @ right)

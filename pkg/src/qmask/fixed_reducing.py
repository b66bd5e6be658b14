"""Families of bipartite states whose marginals hide the family index.

A family {|Psi_k>} on A (x) B is *fixed reducing* when every member has
the same reduced state on A and the same reduced state on B, so neither
subsystem alone reveals k. Every such family can be written as
sum_i sqrt(alpha_i) |i>_A (x) (V_k |i>_B) where the alpha_i form the
shared marginal spectrum and each V_k is a unitary preserving all
eigenspaces of the common B marginal; the constructors below cover the
uniform, all-distinct, and general degenerate spectra, plus the two
target families the masker builders rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .hilbert import (
    NORM_TOL,
    OP_TOL,
    DensityOperator,
    MultipartiteState,
    partial_trace,
)

MARGINAL_TOL = 1e-9


def _unitary_matrix(matrix, dim: int, name: str, tol: float = OP_TOL) -> np.ndarray:
    mat = np.asarray(getattr(matrix, "entries", matrix), dtype=complex)
    if mat.shape != (dim, dim):
        raise ValueError(f"{name} has shape {mat.shape}, expected ({dim}, {dim})")
    residual = float(np.max(np.abs(mat.conj().T @ mat - np.eye(dim))))
    if residual > tol:
        raise ValueError(f"{name} is not unitary: residual {residual:.3e}")
    return mat


def _state_from_b_unitary(alphas: np.ndarray, v: np.ndarray) -> MultipartiteState:
    # sum_i sqrt(alpha_i) |i>_A (x) V|i>_B has amplitude matrix diag(sqrt(alpha)) V^T
    matrix = np.sqrt(alphas)[:, None] * v.T
    return MultipartiteState(matrix.reshape(-1), (alphas.size, alphas.size))


@dataclass(frozen=True)
class FixedReducingSet:
    """Bipartite state family with index-independent marginals."""

    states: tuple[MultipartiteState, ...]
    common_marginal_A: DensityOperator
    common_marginal_B: DensityOperator
    alphas: np.ndarray

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ValueError("a fixed reducing set needs at least one state")
        dims = states[0].dims
        if len(dims) != 2 or dims[0] != dims[1]:
            raise ValueError(f"states must be bipartite with equal local dimensions, got {dims}")
        alphas = np.array(self.alphas, dtype=float)
        if alphas.shape != (dims[0],):
            raise ValueError(f"alphas must have length {dims[0]}")
        if np.any(alphas < -NORM_TOL) or abs(float(alphas.sum()) - 1.0) > 1e-8:
            raise ValueError("alphas must be a non-negative spectrum summing to 1")
        if np.any(np.diff(alphas) > 1e-12):
            raise ValueError("alphas must be sorted in non-increasing order")
        for which, marginal in (("A", self.common_marginal_A), ("B", self.common_marginal_B)):
            spectrum = marginal.eigenvalues()
            if float(np.max(np.abs(spectrum - alphas))) > 1e-8:
                raise ValueError(f"alphas do not match the spectrum of marginal {which}")
        for k, state in enumerate(states):
            if state.dims != dims:
                raise ValueError(f"state {k} has dims {state.dims}, expected {dims}")
            dev_a = np.max(np.abs(partial_trace(state, state.labels[0]).entries
                                  - self.common_marginal_A.entries))
            dev_b = np.max(np.abs(partial_trace(state, state.labels[1]).entries
                                  - self.common_marginal_B.entries))
            deviation = float(max(dev_a, dev_b))
            if deviation > MARGINAL_TOL:
                raise ValueError(
                    f"state {k} deviates from the common marginals by {deviation:.3e}"
                )
        alphas.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "alphas", alphas)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dims[0]


def verify_fixed_reducing(
    states: Sequence[MultipartiteState], tol: float = MARGINAL_TOL
) -> tuple[bool, float]:
    """Check that all A marginals agree and all B marginals agree.

    Returns (verdict, max_deviation) where the deviation is the largest
    absolute entry difference between any state's marginal and the first
    state's marginal on the same side.
    """
    if not states:
        raise ValueError("cannot verify an empty state family")
    dims = states[0].dims
    for k, state in enumerate(states):
        if len(state.dims) != 2:
            raise ValueError(f"state {k} is not bipartite: dims {state.dims}")
        if state.dims != dims:
            raise ValueError(f"state {k} has dims {state.dims}, expected {dims}")
    reference_a = partial_trace(states[0], states[0].labels[0]).entries
    reference_b = partial_trace(states[0], states[0].labels[1]).entries
    worst = 0.0
    for state in states[1:]:
        dev_a = np.max(np.abs(partial_trace(state, state.labels[0]).entries - reference_a))
        dev_b = np.max(np.abs(partial_trace(state, state.labels[1]).entries - reference_b))
        worst = max(worst, float(dev_a), float(dev_b))
    return worst <= tol, worst


def from_states(
    states: Sequence[MultipartiteState], tol: float = MARGINAL_TOL
) -> FixedReducingSet:
    """Wrap an already fixed-reducing family, recovering marginals and spectrum."""
    ok, deviation = verify_fixed_reducing(states, tol)
    if not ok:
        raise ValueError(
            f"family is not fixed reducing: max marginal deviation {deviation:.3e}"
        )
    marginal_a = partial_trace(states[0], states[0].labels[0])
    marginal_b = partial_trace(states[0], states[0].labels[1])
    return FixedReducingSet(tuple(states), marginal_a, marginal_b, marginal_a.eigenvalues())


def build_uniform_spectrum(d: int, unitaries: Sequence) -> FixedReducingSet:
    """Family (1/sqrt(d)) sum_i |i>_A (x) (V_k |i>_B) with flat spectrum.

    Any unitary V_k is admissible here because the common marginal is
    maximally mixed, so its single eigenspace is the whole of B.
    """
    if d <= 0:
        raise ValueError("dimension must be positive")
    if not unitaries:
        raise ValueError("need at least one unitary")
    alphas = np.full(d, 1.0 / d)
    states = tuple(
        _state_from_b_unitary(alphas, _unitary_matrix(v, d, f"unitaries[{k}]"))
        for k, v in enumerate(unitaries)
    )
    mixed = DensityOperator(np.eye(d, dtype=complex) / d)
    return FixedReducingSet(states, mixed, mixed, alphas)


def build_distinct_spectrum(
    alphas: Sequence[float], phase_rows: Sequence[Sequence[float]]
) -> FixedReducingSet:
    """Family sum_i sqrt(alpha_i) e^{i phi_ki} |i>_A |i>_B for a non-degenerate spectrum.

    With all alpha_i different, the only marginal-preserving unitaries are
    diagonal phases, one row of phases per family member.
    """
    spectrum = np.array(alphas, dtype=float)
    if spectrum.ndim != 1 or spectrum.size == 0:
        raise ValueError("alphas must be a nonempty sequence")
    if np.any(spectrum <= 0):
        raise ValueError("alphas must all be positive")
    if np.any(np.diff(spectrum) >= 0):
        raise ValueError("alphas must be strictly decreasing (all eigenvalues distinct)")
    if abs(float(spectrum.sum()) - 1.0) > NORM_TOL:
        raise ValueError(f"alphas must sum to 1, got {float(spectrum.sum())!r}")
    d = spectrum.size
    states = []
    for k, row in enumerate(phase_rows):
        phases = np.asarray(row, dtype=float)
        if phases.shape != (d,):
            raise ValueError(f"phase_rows[{k}] has shape {phases.shape}, expected ({d},)")
        amps = np.zeros(d * d, dtype=complex)
        amps[np.arange(d) * d + np.arange(d)] = np.sqrt(spectrum) * np.exp(1j * phases)
        states.append(MultipartiteState(amps, (d, d)))
    if not states:
        raise ValueError("need at least one phase row")
    diag = DensityOperator(np.diag(spectrum).astype(complex))
    return FixedReducingSet(tuple(states), diag, diag, spectrum)


def _multiplicities(spectrum: np.ndarray) -> list[int]:
    counts = [1]
    for previous, value in zip(spectrum[:-1], spectrum[1:]):
        if value == previous:
            counts[-1] += 1
        else:
            counts.append(1)
    return counts


def build_general_spectrum(
    alphas: Sequence[float], block_unitaries: Sequence[Sequence]
) -> FixedReducingSet:
    """Family for an arbitrary spectrum given per-eigenspace unitary blocks.

    ``alphas`` lists the spectrum with multiplicities, sorted non-increasing;
    equal consecutive entries share one eigenspace. ``block_unitaries[k]``
    supplies one unitary block per distinct eigenvalue (block size equal to
    its multiplicity), which is exactly the family of unitaries that keep
    every eigenspace of the common marginal invariant. A flat spectrum
    reduces this to the uniform constructor and an all-distinct spectrum to
    the diagonal-phase constructor.
    """
    spectrum = np.array(alphas, dtype=float)
    if spectrum.ndim != 1 or spectrum.size == 0:
        raise ValueError("alphas must be a nonempty sequence")
    if np.any(spectrum < 0):
        raise ValueError("alphas must be non-negative")
    if abs(float(spectrum.sum()) - 1.0) > NORM_TOL:
        raise ValueError(f"alphas must sum to 1, got {float(spectrum.sum())!r}")
    if np.any(np.diff(spectrum) > 0):
        raise ValueError("alphas must be sorted in non-increasing order")
    sizes = _multiplicities(spectrum)
    states = []
    for k, blocks in enumerate(block_unitaries):
        blocks = list(blocks)
        if len(blocks) != len(sizes):
            raise ValueError(
                f"block_unitaries[{k}] supplies {len(blocks)} blocks for "
                f"{len(sizes)} distinct eigenvalues of sizes {sizes}"
            )
        checked = [
            _unitary_matrix(block, size, f"block_unitaries[{k}][{j}]")
            for j, (block, size) in enumerate(zip(blocks, sizes))
        ]
        v = scipy.linalg.block_diag(*checked)
        states.append(_state_from_b_unitary(spectrum, v))
    if not states:
        raise ValueError("need block unitaries for at least one state")
    diag = DensityOperator(np.diag(spectrum).astype(complex))
    return FixedReducingSet(tuple(states), diag, diag, spectrum)


def cyclic_targets(n: int, d: int) -> FixedReducingSet:
    """n mutually orthogonal flat-spectrum states from powers of the full d-cycle.

    Member k pairs |i>_A with |(i + k) mod d>_B, so distinct members place
    their amplitudes on disjoint diagonals and the family's Gram matrix is
    the identity for every n <= d.
    """
    if not 1 <= n <= d:
        raise ValueError(f"need 1 <= n <= d, got n={n}, d={d}")
    shift = np.roll(np.eye(d), 1, axis=0)
    return build_uniform_spectrum(
        d, [np.linalg.matrix_power(shift, k) for k in range(n)]
    )


def targets_with_overlap(d: int, c: complex) -> FixedReducingSet:
    """Two flat-spectrum states with prescribed overlap <Psi_1|Psi_2> = c.

    The second member applies a diagonal phase unitary V with
    trace(V)/d = c: for even d the phases come in d/2 conjugate pairs
    arg(c) +/- arccos|c|, for odd d one phase sits at arg(c) and the rest
    form conjugate pairs arg(c) +/- arccos((d|c| - 1)/(d - 1)).
    """
    if d < 2:
        raise ValueError("need dimension at least 2")
    c = complex(c)
    magnitude = abs(c)
    if magnitude > 1 + 1e-12:
        raise ValueError(f"|c| = {magnitude!r} exceeds 1")
    magnitude = min(magnitude, 1.0)
    arg = float(np.angle(c)) if magnitude > 0 else 0.0
    phases = np.empty(d)
    if d % 2 == 0:
        spread = float(np.arccos(magnitude))
        phases[0::2] = arg + spread
        phases[1::2] = arg - spread
    else:
        spread = float(np.arccos((d * magnitude - 1.0) / (d - 1.0)))
        phases[0] = arg
        phases[1::2] = arg + spread
        phases[2::2] = arg - spread
    return build_uniform_spectrum(d, [np.eye(d), np.diag(np.exp(1j * phases))])

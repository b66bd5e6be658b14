"""Builders and a post-selection simulator for quantum information maskers.

A masker hides which member of a known state family was supplied: it
unitarily spreads |a_k>_A (x) |b>_B over both subsystems so that every
output has identical marginals on A and on B. Mutually orthogonal
families admit a plain unitary masker. Families that are merely linearly
independent need a probe: the joint unitary sends each prepared input to
sqrt(gamma_k) |Psi_k>|P_0> plus a failure branch supported on probe
states orthogonal to |P_0>, and post-selecting the probe on |P_0>
completes the masking with per-input success probability gamma_k. The
efficiencies are admissible exactly when the residual matrix
A - sqrt(Gamma) X sqrt(Gamma) built from the input and target Gram
matrices is positive semidefinite; its normalized form fixes the Gram
matrix of the failure branches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import optimizer
from .fixed_reducing import FixedReducingSet, cyclic_targets
from .hilbert import (
    OP_TOL,
    RANK_TOL,
    DensityOperator,
    MultipartiteState,
    Operator,
    StateVector,
    basis_state,
    fidelity,
    gram,
    hermitian_sqrt,
    linearly_independent,
    partial_trace,
    psd_check,
    unitary_completion,
)

Masker = Union["DeterministicMasker", "ProbabilisticMasker"]


@dataclass(frozen=True)
class DeterministicMasker:
    """Unitary on A (x) B sending each |a_k>|b> to its masked target."""

    inputs: tuple[StateVector, ...]
    ancilla: StateVector
    targets: FixedReducingSet
    unitary: Operator

    def __post_init__(self):
        inputs = tuple(self.inputs)
        d = self.ancilla.dim
        if not inputs or any(a.dim != d for a in inputs):
            raise ValueError("inputs and ancilla must share one dimension")
        if self.targets.dim != d or self.targets.n != len(inputs):
            raise ValueError("targets do not match the input family")
        if self.unitary.dim != d * d:
            raise ValueError(f"unitary must act on dimension {d * d}")
        if not self.unitary.is_unitary():
            raise ValueError("masker operator is not unitary")
        object.__setattr__(self, "inputs", inputs)

    @property
    def n(self) -> int:
        return len(self.inputs)

    @property
    def dim(self) -> int:
        return self.ancilla.dim


@dataclass(frozen=True)
class ProbabilisticMasker:
    """Unitary on A (x) B (x) P masking each input with efficiency gamma_k.

    The probe has dimension n + 1; basis state 0 carries every success
    branch and is the rank-one post-selection outcome, basis states 1..n
    carry the failure branches.
    """

    inputs: tuple[StateVector, ...]
    ancilla: StateVector
    targets: FixedReducingSet
    gammas: np.ndarray
    probe_initial: StateVector
    unitary: Operator
    failure_states: tuple[MultipartiteState, ...]
    success_projector_rank: int = 1

    def __post_init__(self):
        inputs = tuple(self.inputs)
        d = self.ancilla.dim
        n = len(inputs)
        if not inputs or any(a.dim != d for a in inputs):
            raise ValueError("inputs and ancilla must share one dimension")
        if self.targets.dim != d or self.targets.n != n:
            raise ValueError("targets do not match the input family")
        gammas = np.array(self.gammas, dtype=float)
        if gammas.shape != (n,) or np.any(gammas <= 0) or np.any(gammas > 1):
            raise ValueError("efficiencies must be n values in (0, 1]")
        if self.probe_initial.dim != n + 1:
            raise ValueError(f"probe dimension must be {n + 1}")
        if self.unitary.dim != d * d * (n + 1):
            raise ValueError(f"unitary must act on dimension {d * d * (n + 1)}")
        if not self.unitary.is_unitary():
            raise ValueError("masker operator is not unitary")
        failures = tuple(self.failure_states)
        if len(failures) != n or any(f.dims != (d, d, n + 1) for f in failures):
            raise ValueError("failure states must be n states on A (x) B (x) P")
        gammas.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "failure_states", failures)

    @property
    def n(self) -> int:
        return len(self.inputs)

    @property
    def dim(self) -> int:
        return self.ancilla.dim

    @property
    def probe_dim(self) -> int:
        return self.probe_initial.dim


@dataclass(frozen=True)
class MaskingOutcome:
    """Result of masking one input and post-selecting the probe."""

    success_probability: float
    post_selected_state: MultipartiteState
    fidelity_to_target: float
    marginal_A: DensityOperator
    marginal_B: DensityOperator


@dataclass(frozen=True)
class MaskingReport:
    """Aggregated verification of a masker over all of its inputs."""

    passed: bool
    tol: float
    success_probabilities: tuple[float, ...]
    expected_probabilities: tuple[float, ...]
    fidelities: tuple[float, ...]
    max_marginal_deviation: float
    unitarity_residual: float


def _checked_inputs(inputs: Sequence[StateVector], d: int | None) -> tuple[tuple[StateVector, ...], int]:
    family = tuple(inputs)
    if not family:
        raise ValueError("need at least one input state")
    dims = {a.dim for a in family}
    if len(dims) != 1:
        raise ValueError(f"inputs have mismatched dimensions: {sorted(dims)}")
    inferred = family[0].dim
    if d is not None and d != inferred:
        raise ValueError(f"declared dimension {d} does not match the inputs' dimension {inferred}")
    return family, inferred


def build_deterministic(
    inputs: Sequence[StateVector],
    d: int | None = None,
    targets: FixedReducingSet | None = None,
    *,
    ancilla: StateVector | None = None,
    op_tol: float = OP_TOL,
) -> DeterministicMasker:
    """Masker for a mutually orthogonal family.

    Defaults the targets to the orthogonal cyclic family and the ancilla
    to the first basis state; explicit targets must reproduce the inputs'
    Gram matrix (here the identity), which is the exact existence
    condition for the connecting unitary.
    """
    family, d = _checked_inputs(inputs, d)
    n = len(family)
    if n > d:
        raise ValueError(f"cannot mask {n} states in dimension {d}")
    g = gram(family).entries
    off_diagonal = g - np.diag(np.diag(g))
    worst = float(np.max(np.abs(off_diagonal))) if n > 1 else 0.0
    if worst > op_tol:
        raise ValueError(
            f"inputs are not mutually orthogonal: max off-diagonal Gram entry {worst:.6e}"
        )
    if targets is None:
        targets = cyclic_targets(n, d)
    else:
        if targets.n != n or targets.dim != d:
            raise ValueError("targets do not match the input family's size and dimension")
        mismatch = float(np.max(np.abs(gram(targets.states).entries - g)))
        if mismatch > op_tol:
            raise ValueError(
                f"targets' Gram matrix deviates from the inputs' by {mismatch:.3e}"
            )
    if ancilla is None:
        ancilla = basis_state(d, 0)
    elif ancilla.dim != d:
        raise ValueError(f"ancilla dimension {ancilla.dim} does not match d={d}")

    prepared = [
        MultipartiteState(np.kron(a.amplitudes, ancilla.amplitudes), (d, d))
        for a in family
    ]
    # both Gram matrices sit within op_tol of the identity, so allow slack
    unitary = unitary_completion(prepared, targets.states, tol=10 * op_tol)
    return DeterministicMasker(family, ancilla, targets, unitary)


def check_deterministic_feasible(
    inputs: Sequence[StateVector],
    targets,
    *,
    op_tol: float = OP_TOL,
) -> bool:
    """True when the input and target Gram matrices coincide entrywise.

    With all success probe overlaps equal to 1 this is exactly the
    condition for a deterministic (unit-efficiency) masker.
    """
    target_states = getattr(targets, "states", targets)
    if len(tuple(inputs)) != len(tuple(target_states)):
        return False
    a = gram(tuple(inputs)).entries
    x = gram(tuple(target_states)).entries
    return float(np.max(np.abs(a - x))) <= op_tol


def build_probabilistic(
    inputs: Sequence[StateVector],
    targets: FixedReducingSet,
    gammas: Sequence[float],
    *,
    ancilla: StateVector | None = None,
    op_tol: float = OP_TOL,
    rank_tol: float = RANK_TOL,
) -> ProbabilisticMasker:
    """Masker for a linearly independent family with efficiencies ``gammas``.

    Writes A = gram(inputs) and X = gram(targets) and requires the
    residual M = A - sqrt(Gamma) X sqrt(Gamma) to be positive
    semidefinite. The failure branches are built on one fixed product
    state of A (x) B spread over the n orthogonal failure probe states
    with coefficient matrix equal to the Hermitian square root of the
    normalized residual Y = (I-Gamma)^{-1/2} M (I-Gamma)^{-1/2}, which
    gives the evolved outputs the same Gram matrix as the prepared inputs
    and hence a connecting unitary. An efficiency of exactly 1 is allowed
    only where the corresponding residual row already vanishes, since the
    failure normalization is singular there.
    """
    family, d = _checked_inputs(inputs, None)
    n = len(family)
    if targets.n != n or targets.dim != d:
        raise ValueError("targets do not match the input family's size and dimension")
    efficiencies = np.asarray(gammas, dtype=float).reshape(-1)
    if efficiencies.shape != (n,):
        raise ValueError(f"need {n} efficiencies, got {efficiencies.shape}")
    if np.any(efficiencies <= 0) or np.any(efficiencies > 1):
        raise ValueError("efficiencies must lie in (0, 1]")
    if not linearly_independent(family, rank_tol):
        raise ValueError("inputs are linearly dependent; no probabilistic masker exists")
    if ancilla is None:
        ancilla = basis_state(d, 0)
    elif ancilla.dim != d:
        raise ValueError(f"ancilla dimension {ancilla.dim} does not match d={d}")

    a = gram(family).entries
    x = gram(targets.states).entries
    residual = optimizer.residual_matrix(a, x, efficiencies)
    saturated = efficiencies >= 1.0
    for i in np.flatnonzero(saturated):
        row = float(np.max(np.abs(residual[i, :])))
        if row > op_tol:
            raise ValueError(
                f"efficiency {i} equals 1 but its residual row has magnitude {row:.3e}; "
                "unit efficiency needs a vanishing residual"
            )
    ok, lowest = psd_check(residual, tol=op_tol)
    if not ok:
        raise ValueError(
            f"infeasible efficiencies: residual matrix has min eigenvalue {lowest:.6e}"
        )

    scale = np.zeros(n)
    free = ~saturated
    scale[free] = 1.0 / np.sqrt(1.0 - efficiencies[free])
    normalized = np.outer(scale, scale) * residual
    np.fill_diagonal(normalized, 1.0)
    # the congruence scaling can amplify the tolerated negative dust in M
    sqrt_tol = op_tol * (1.0 + float(np.max(scale)) ** 2)
    coefficients = hermitian_sqrt(np.conj(normalized), op_tol=sqrt_tol)

    probe_dim = n + 1
    probe_start = np.zeros(probe_dim, dtype=complex)
    probe_start[0] = 1.0
    carrier = np.zeros(d * d, dtype=complex)
    carrier[0] = 1.0  # fixed |0>_A |0>_B product carrying every failure branch

    prepared = []
    outputs = []
    failures = []
    for i in range(n):
        prepared.append(MultipartiteState(
            np.kron(np.kron(family[i].amplitudes, ancilla.amplitudes), probe_start),
            (d, d, probe_dim),
        ))
        probe_part = np.zeros(probe_dim, dtype=complex)
        probe_part[1:] = coefficients[i, :]
        failure = MultipartiteState(np.kron(carrier, probe_part), (d, d, probe_dim))
        failures.append(failure)
        amplitude = (
            np.sqrt(efficiencies[i]) * np.kron(targets.states[i].amplitudes, probe_start)
            + np.sqrt(max(1.0 - efficiencies[i], 0.0)) * failure.amplitudes
        )
        outputs.append(MultipartiteState(amplitude, (d, d, probe_dim)))

    # rows gated at op_tol above can leave a matching op_tol-sized Gram slack
    unitary = unitary_completion(prepared, outputs, tol=max(1e-8, 10 * op_tol))
    return ProbabilisticMasker(
        family,
        ancilla,
        targets,
        efficiencies,
        StateVector(probe_start),
        unitary,
        tuple(failures),
    )


def failure_branches(
    unitary: Operator,
    inputs: Sequence[StateVector],
    ancilla: StateVector,
    targets: FixedReducingSet,
    gammas: Sequence[float],
) -> tuple[MultipartiteState, ...]:
    """Normalized failure components of each evolved input.

    Recovered from the unitary itself: the evolved input minus its success
    branch, rescaled by 1/sqrt(1 - gamma). Inputs with gamma = 1 have no
    failure branch; an arbitrary placeholder on the matching failure probe
    state is returned for them.
    """
    family = tuple(inputs)
    n = len(family)
    d = ancilla.dim
    probe_dim = n + 1
    efficiencies = np.asarray(gammas, dtype=float).reshape(-1)
    probe_start = np.zeros(probe_dim, dtype=complex)
    probe_start[0] = 1.0
    branches = []
    for i in range(n):
        if efficiencies[i] >= 1.0:
            placeholder = np.zeros(probe_dim, dtype=complex)
            placeholder[i + 1] = 1.0
            carrier = np.zeros(d * d, dtype=complex)
            carrier[0] = 1.0
            branches.append(MultipartiteState(np.kron(carrier, placeholder), (d, d, probe_dim)))
            continue
        prepared = np.kron(np.kron(family[i].amplitudes, ancilla.amplitudes), probe_start)
        evolved = unitary.entries @ prepared
        success = np.sqrt(efficiencies[i]) * np.kron(targets.states[i].amplitudes, probe_start)
        branch = (evolved - success) / np.sqrt(1.0 - efficiencies[i])
        branches.append(MultipartiteState(branch, (d, d, probe_dim)))
    return tuple(branches)


def simulate(masker: Masker, k: int) -> MaskingOutcome:
    """Mask input k and post-select the probe on the success outcome.

    The success probability is the squared norm of the projected branch:
    1 for a deterministic masker, gamma_k for a probabilistic one.
    """
    n = len(masker.inputs)
    if not 0 <= k < n:
        raise IndexError(f"state index {k} outside range 0..{n - 1}")
    d = masker.dim
    if isinstance(masker, DeterministicMasker):
        prepared = np.kron(masker.inputs[k].amplitudes, masker.ancilla.amplitudes)
        branch = masker.unitary.entries @ prepared
    else:
        prepared = np.kron(
            np.kron(masker.inputs[k].amplitudes, masker.ancilla.amplitudes),
            masker.probe_initial.amplitudes,
        )
        evolved = masker.unitary.entries @ prepared
        # probe basis index 0 is the rank-one success outcome
        branch = evolved.reshape(d * d, masker.probe_dim)[:, 0]
    probability = float(np.vdot(branch, branch).real)
    post_selected = MultipartiteState(branch / np.sqrt(probability), (d, d))
    return MaskingOutcome(
        success_probability=probability,
        post_selected_state=post_selected,
        fidelity_to_target=fidelity(post_selected, masker.targets.states[k]),
        marginal_A=partial_trace(post_selected, "A"),
        marginal_B=partial_trace(post_selected, "B"),
    )


def verify_masking(masker: Masker, tol: float = 1e-8) -> MaskingReport:
    """Simulate every input and aggregate the masking checks.

    Passes when all success probabilities match their expected values
    (1 or gamma_k), every post-selected state reaches its target up to
    1 - tol in fidelity, the marginals agree across inputs entrywise, and
    the stored operator is unitary, all within ``tol``.
    """
    outcomes = [simulate(masker, k) for k in range(len(masker.inputs))]
    if isinstance(masker, DeterministicMasker):
        expected = tuple(1.0 for _ in outcomes)
    else:
        expected = tuple(float(g) for g in masker.gammas)
    probabilities = tuple(o.success_probability for o in outcomes)
    fidelities = tuple(o.fidelity_to_target for o in outcomes)
    reference_a = outcomes[0].marginal_A.entries
    reference_b = outcomes[0].marginal_B.entries
    marginal_deviation = 0.0
    for outcome in outcomes[1:]:
        dev_a = np.max(np.abs(outcome.marginal_A.entries - reference_a))
        dev_b = np.max(np.abs(outcome.marginal_B.entries - reference_b))
        marginal_deviation = max(marginal_deviation, float(dev_a), float(dev_b))
    u = masker.unitary.entries
    unitarity = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    passed = (
        marginal_deviation <= tol
        and max(abs(p - e) for p, e in zip(probabilities, expected)) <= tol
        and max(1.0 - f for f in fidelities) <= tol
        and unitarity <= tol
    )
    return MaskingReport(
        passed=passed,
        tol=tol,
        success_probabilities=probabilities,
        expected_probabilities=expected,
        fidelities=fidelities,
        max_marginal_deviation=marginal_deviation,
        unitarity_residual=unitarity,
    )

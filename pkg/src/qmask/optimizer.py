"""Feasibility analysis and maximization of the masking success probability.

A choice of efficiencies Gamma = diag(gamma_1, ..., gamma_n) is feasible
when the residual matrix A - sqrt(Gamma) X sqrt(Gamma) is positive
semidefinite, where A and X are the Gram matrices of the inputs and of
the masked targets. The overall success probability is the product of
the efficiencies; for two states its maximum has the closed form
min(((1 - s) / (1 - t))^2, ((1 + s) / (1 + t))^2) in the overlap
magnitudes s = |<a_1|a_2>| and t = |<Psi_1|Psi_2>|, attained with equal
efficiencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hilbert import OP_TOL, psd_check

DEFAULT_S_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class EfficiencyMatrix:
    """Diagonal of the efficiency matrix Gamma."""

    gammas: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(g) for g in self.gammas)
        if not values:
            raise ValueError("need at least one efficiency")
        if any(g < 0.0 or g > 1.0 for g in values):
            raise ValueError(f"efficiencies must lie in [0, 1], got {values}")
        object.__setattr__(self, "gammas", values)

    def __len__(self) -> int:
        return len(self.gammas)

    def diagonal(self) -> np.ndarray:
        return np.asarray(self.gammas, dtype=float)


@dataclass(frozen=True)
class TwoStateProblem:
    """Overlap magnitudes of a two-state masking instance."""

    s: float
    t: float

    def __post_init__(self):
        for name, value in (("s", self.s), ("t", self.t)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")

    def solve(self) -> tuple[float, tuple[float, float]]:
        return max_prob_two(self.s, self.t)


def _gammas_array(gammas) -> np.ndarray:
    values = np.asarray(getattr(gammas, "gammas", gammas), dtype=float).reshape(-1)
    if values.size == 0:
        raise ValueError("need at least one efficiency")
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise ValueError("efficiencies must lie in [0, 1]")
    return values


def _square_entries(matrix, name: str) -> np.ndarray:
    mat = np.asarray(getattr(matrix, "entries", matrix), dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {mat.shape}")
    return mat


def success_probability(gammas) -> float:
    """Product of the efficiencies."""
    return float(np.prod(_gammas_array(gammas)))


def residual_matrix(A, X_P, gammas) -> np.ndarray:
    """A - sqrt(Gamma) X sqrt(Gamma), the Gram weight left for failure branches."""
    a = _square_entries(A, "A")
    x = _square_entries(X_P, "X_P")
    if a.shape != x.shape:
        raise ValueError(f"matrix sizes differ: {a.shape} vs {x.shape}")
    values = _gammas_array(gammas)
    if values.size != a.shape[0]:
        raise ValueError(f"need {a.shape[0]} efficiencies, got {values.size}")
    root = np.sqrt(values)
    return a - np.outer(root, root) * x


def feasible(A, X_P, gammas, tol: float = OP_TOL) -> tuple[bool, float]:
    """Whether the efficiencies are admissible, plus the residual's min eigenvalue."""
    return psd_check(residual_matrix(A, X_P, gammas), tol=tol)


def _ratio_squared(numerator: float, denominator: float) -> float:
    if denominator == 0.0:
        return 1.0 if numerator == 0.0 else math.inf
    return (numerator / denominator) ** 2


def max_prob_two(s: float, t: float) -> tuple[float, tuple[float, float]]:
    """Best success probability for two inputs, with the optimal efficiencies.

    Evaluates min(((1 - s) / (1 - t))^2, ((1 + s) / (1 + t))^2) using the
    conventions x/0 = infinity for x > 0 and 0/0 = 1, and returns equal
    efficiencies gamma_1 = gamma_2 = sqrt(prob), which attain the bound.
    """
    for name, value in (("s", s), ("t", t)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    prob = float(min(
        _ratio_squared(1.0 - s, 1.0 - t),
        _ratio_squared(1.0 + s, 1.0 + t),
        1.0,
    ))
    root = math.sqrt(prob)
    return prob, (root, root)


@lru_cache(maxsize=4)
def _efficiency_grid(grid_steps: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    g = np.linspace(0.0, 1.0, grid_steps + 1)
    product = np.outer(g, g)
    complement = np.outer(1.0 - g, 1.0 - g)
    for arr in (product, complement):
        arr.setflags(write=False)
    root = np.sqrt(product)
    root.setflags(write=False)
    return product, complement, root


def max_prob_grid_oracle(s: float, t: float, grid_steps: int = 1000) -> float:
    """Brute-force maximum of gamma_1 * gamma_2 over a uniform grid.

    Keeps grid points where the two-state residual matrix
    [[1 - gamma_1, z], [conj(z), 1 - gamma_2]] is positive semidefinite,
    with |z| = |s - sqrt(gamma_1 gamma_2) t| as granted by optimal phase
    alignment. Serves as an independent check of the closed form.
    """
    product, complement, root = _efficiency_grid(grid_steps)
    determinant = complement - (s - root * t) ** 2
    feasible_points = determinant >= -1e-12
    if not np.any(feasible_points):
        return 0.0
    return float(np.max(np.where(feasible_points, product, 0.0)))


def uniform_feasibility_boundary(
    A, X_P, *, tol: float = OP_TOL, bisect_tol: float = 1e-12
) -> float:
    """Largest c for which the uniform efficiencies Gamma = c I are feasible."""
    a = _square_entries(A, "A")
    x = _square_entries(X_P, "X_P")
    if a.shape != x.shape:
        raise ValueError(f"matrix sizes differ: {a.shape} vs {x.shape}")
    if float(np.linalg.eigvalsh(a)[0]) <= tol:
        raise ValueError(
            "inputs' Gram matrix is singular: no positive efficiencies are feasible "
            "(the input states are not linearly independent)"
        )
    n = a.shape[0]

    def ok(c: float) -> bool:
        return feasible(a, x, np.full(n, c), tol=tol)[0]

    if ok(1.0):
        return 1.0
    low, high = 0.0, 1.0
    while high - low > bisect_tol:
        mid = (low + high) / 2.0
        if ok(mid):
            low = mid
        else:
            high = mid
    return low


def maximize_general(
    A,
    X_P,
    *,
    step: float = 1e-4,
    tol: float = OP_TOL,
    bisect_tol: float = 1e-10,
    max_sweeps: int = 64,
) -> tuple[np.ndarray, float]:
    """Locally maximal efficiencies for any number of inputs.

    Bisects the uniform scale first, then performs coordinate ascent on
    log gamma_i under the eigenvalue feasibility constraint: each sweep
    pushes one efficiency to its per-coordinate boundary while the others
    stay fixed. The result is feasible and locally undominated, in that
    raising any single efficiency by ``step`` breaks feasibility (or
    leaves [0, 1]); global optimality is not certified.
    """
    a = _square_entries(A, "A")
    x = _square_entries(X_P, "X_P")
    if a.shape != x.shape:
        raise ValueError(f"matrix sizes differ: {a.shape} vs {x.shape}")
    n = a.shape[0]
    if n < 2:
        raise ValueError("need at least two states to optimize over")

    def ok(values: np.ndarray) -> bool:
        return feasible(a, x, values, tol=tol)[0]

    start = uniform_feasibility_boundary(a, x, tol=tol, bisect_tol=bisect_tol)
    gammas = np.full(n, start)
    for _ in range(max_sweeps):
        moved = 0.0
        for i in range(n):
            trial = gammas.copy()
            trial[i] = 1.0
            if ok(trial):
                moved = max(moved, 1.0 - gammas[i])
                gammas = trial
                continue
            low, high = gammas[i], 1.0
            while high - low > bisect_tol:
                mid = (low + high) / 2.0
                trial[i] = mid
                if ok(trial):
                    low = mid
                else:
                    high = mid
            moved = max(moved, low - gammas[i])
            trial[i] = low
            gammas = trial
        if moved <= bisect_tol:
            break
    return gammas, float(np.prod(gammas))


def probability_curves(
    s_values: tuple[float, ...] = DEFAULT_S_VALUES, t_steps: int = 101
) -> list[tuple[float, float, float]]:
    """Rows (s, t, prob_max) over a uniform t grid for each input overlap s."""
    t_grid = np.linspace(0.0, 1.0, int(t_steps))
    return [
        (float(s), float(t), max_prob_two(float(s), float(t))[0])
        for s in s_values
        for t in t_grid
    ]

"""Lowest eigenpairs of a Hermitian operator.

Small operators (dimension <= ``dense_threshold``) go through LAPACK's
dense Hermitian solver.  Larger ones use Lanczos iteration with full
reorthogonalization; degenerate partners are found by deflation, locking
each converged eigenvector and restarting in its orthogonal complement.
The Krylov start vector is drawn from a seeded generator so repeated runs
are bit-for-bit reproducible at a fixed thread count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .hamiltonian import HermitianOperator
from .model import DomainError

DENSE_THRESHOLD = 4096
DEGENERACY_TOL = 1e-8
KRYLOV_SEED = 7


class ConvergenceError(RuntimeError):
    """The iterative solver failed to converge; carries diagnostics."""


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for the eigensolver paths (all have safe defaults)."""

    dense_threshold: int = DENSE_THRESHOLD
    seed: int = KRYLOV_SEED
    max_krylov: int = 300
    max_restarts: int = 8


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Ascending eigenvalues with orthonormal vectors and residuals.

    ``degeneracy_groups`` partitions the k indices into runs whose
    consecutive gaps stay below the grouping tolerance.
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    degeneracy_groups: tuple[tuple[int, ...], ...]


class GroundState(NamedTuple):
    energy: float
    vectors: np.ndarray
    degenerate: bool


def _group_degenerate(values: np.ndarray, tol: float) -> tuple[tuple[int, ...], ...]:
    groups: list[tuple[int, ...]] = []
    current = [0]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] < tol:
            current.append(i)
        else:
            groups.append(tuple(current))
            current = [i]
    groups.append(tuple(current))
    return tuple(groups)


def lowest_k(op: HermitianOperator, k: int, tol: float = 1e-10,
             degeneracy_tol: float = DEGENERACY_TOL,
             options: SolverOptions = DEFAULT_OPTIONS) -> EigenResult:
    """The k lowest eigenpairs, each with ||Hv - ev|| <= tol*max(1, |e|)."""
    if not 1 <= k <= op.dimension:
        raise DomainError(f"k: need 1 <= k <= {op.dimension}, got {k!r}")
    if not tol > 0:
        raise DomainError(f"tol: must be > 0, got {tol!r}")

    if op.dimension <= options.dense_threshold:
        values, vectors = _dense_lowest(op, k)
    else:
        values, vectors = _krylov_lowest(op, k, tol, options)

    residuals = np.array([
        np.linalg.norm(op.apply(vectors[:, i]) - values[i] * vectors[:, i])
        for i in range(k)
    ])
    bounds = tol * np.maximum(1.0, np.abs(values))
    if op.dimension > options.dense_threshold and np.any(residuals > bounds):
        raise ConvergenceError(
            f"Krylov residuals {residuals} exceed tolerance bounds {bounds}")
    return EigenResult(values=values, vectors=vectors, residuals=residuals,
                       degeneracy_groups=_group_degenerate(values, degeneracy_tol))


def _dense_lowest(op: HermitianOperator, k: int) -> tuple[np.ndarray, np.ndarray]:
    dense = op.to_dense()
    if k < op.dimension:
        values, vectors = sla.eigh(dense, subset_by_index=(0, k - 1),
                                   driver="evr")
    else:
        values, vectors = sla.eigh(dense)
    return values[:k], vectors[:, :k]


def _orthogonalize(vector: np.ndarray, against: list[np.ndarray]) -> np.ndarray:
    for q in against:
        vector = vector - np.vdot(q, vector) * q
    return vector


def _krylov_lowest(op: HermitianOperator, k: int, tol: float,
                   options: SolverOptions) -> tuple[np.ndarray, np.ndarray]:
    locked_values: list[float] = []
    locked_vectors: list[np.ndarray] = []
    rng = np.random.default_rng(options.seed)
    for _ in range(k):
        value, vector = _lanczos_lowest(op, locked_vectors, tol, rng, options)
        locked_values.append(value)
        locked_vectors.append(vector)
    order = np.argsort(locked_values, kind="stable")
    values = np.array([locked_values[i] for i in order])
    vectors = np.column_stack([locked_vectors[i] for i in order])
    return values, vectors


def _lanczos_lowest(op: HermitianOperator, locked: list[np.ndarray],
                    tol: float, rng: np.random.Generator,
                    options: SolverOptions) -> tuple[float, np.ndarray]:
    """Smallest eigenpair of H restricted to the complement of ``locked``."""
    n = op.dimension
    subspace_limit = min(options.max_krylov, n - len(locked))
    start = rng.standard_normal(n) + 1j * rng.standard_normal(n)

    best_residual = np.inf
    for _ in range(options.max_restarts + 1):
        start = _orthogonalize(_orthogonalize(start, locked), locked)
        norm = np.linalg.norm(start)
        if norm < 1e-12:
            start = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            continue

        basis = np.empty((subspace_limit, n), dtype=complex)
        basis[0] = start / norm
        alphas: list[float] = []
        betas: list[float] = []
        exhausted = False
        for m in range(subspace_limit):
            w = op.apply(basis[m])
            alphas.append(float(np.vdot(basis[m], w).real))
            w = w - alphas[m] * basis[m]
            if m > 0:
                w = w - betas[m - 1] * basis[m - 1]
            # Full reorthogonalization keeps the Krylov basis clean and
            # the locked directions deflated despite rounding.
            overlaps = basis[:m + 1].conj() @ w
            w = w - basis[:m + 1].T @ overlaps
            w = _orthogonalize(w, locked)
            beta = float(np.linalg.norm(w))
            if beta < 1e-13 or m + 1 == subspace_limit:
                exhausted = beta < 1e-13
                break
            betas.append(beta)
            basis[m + 1] = w / beta

        theta, ritz = _ritz_lowest(alphas, betas, basis[:len(alphas)])
        residual = np.linalg.norm(op.apply(ritz) - theta * ritz)
        if residual <= tol * max(1.0, abs(theta)) or exhausted:
            return theta, ritz
        best_residual = min(best_residual, residual)
        start = ritz  # restart from the best current estimate

    raise ConvergenceError(
        f"Lanczos failed after {options.max_restarts} restarts with "
        f"subspace size {subspace_limit}; best residual {best_residual:.3e} "
        f"> tol {tol:.3e}")


def _ritz_lowest(alphas: list[float], betas: list[float],
                 basis: np.ndarray) -> tuple[float, np.ndarray]:
    if len(alphas) == 1:
        vector = basis[0].copy()
        return alphas[0], vector / np.linalg.norm(vector)
    values, vectors = sla.eigh_tridiagonal(alphas, betas, select="i",
                                           select_range=(0, 0))
    ritz = basis.T @ vectors[:, 0]
    return float(values[0]), ritz / np.linalg.norm(ritz)


def ground_state(op: HermitianOperator, degeneracy_tol: float = DEGENERACY_TOL,
                 tol: float = 1e-10,
                 options: SolverOptions = DEFAULT_OPTIONS) -> GroundState:
    """Ground energy with every eigenvector inside the degeneracy window.

    Grows the requested pair count until the spectrum escapes the window,
    so exact crossings report all members of the degenerate multiplet.
    """
    if op.dimension < 1:
        raise DomainError("dimension: operator is empty")
    k = min(2, op.dimension)
    while True:
        result = lowest_k(op, k, tol=tol, degeneracy_tol=degeneracy_tol,
                          options=options)
        if k == op.dimension or result.values[-1] - result.values[0] > degeneracy_tol:
            break
        k = min(op.dimension, 2 * k)
    members = result.degeneracy_groups[0]
    vectors = result.vectors[:, list(members)]
    return GroundState(energy=float(result.values[0]), vectors=vectors,
                       degenerate=len(members) > 1)

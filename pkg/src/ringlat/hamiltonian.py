"""Sparse rotating-frame Hubbard Hamiltonians on a Fock basis.

The drive enters through the complex bond amplitude: hopping forward
(site j to j+1, increasing index around the ring) carries
``(-t - i*omega*K) * exp(i*twist)`` and the reverse hop its conjugate.
This orientation makes the one-particle spectrum exactly
``-2*(t*cos(phi) + omega*K*sin(phi))`` over the winding phases phi, and a
uniform bond twist theta shifts every phi to phi - theta, so the ring
current is the operator ``-dH/d(theta)`` (see :mod:`ringlat.observables`).

Interactions are diagonal: u * n * (n - 1) summed over sites for bosons
(note: twice the (u/2) n (n-1) convention some codes use) and u times the
number of doubly occupied sites for spin-1/2 fermions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import scipy.sparse as sparse

from .basis import BosonFockState, FermionFockState, FockBasis
from .model import (
    Bosons,
    DomainError,
    Fermions,
    RingSpec,
    SpeciesSpec,
    particle_content,
)

_DIAG_IMAG_TOL = 1e-14
_HERMITICITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Complex Hermitian matrix stored as its upper triangle.

    ``rows``/``cols``/``values`` hold the coordinate entries with
    row <= col; the lower triangle is the implicit conjugate mirror.
    ``matrix`` caches the reconstructed full sparse matrix for fast
    products.
    """

    dimension: int
    rows: np.ndarray = field(repr=False)
    cols: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    matrix: sparse.csr_matrix = field(repr=False, compare=False)

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Matrix-vector product, exact within floating point."""
        if len(vector) != self.dimension:
            raise ValueError(f"vector length {len(vector)} != operator "
                             f"dimension {self.dimension}")
        return self.matrix @ vector

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def expectation(self, vector: np.ndarray) -> float:
        """<v|H|v>, guaranteed real for a Hermitian operator."""
        value = np.vdot(vector, self.apply(vector))
        return float(value.real)


def operator_from_entries(dimension: int, rows, cols, values) -> HermitianOperator:
    """Assemble a :class:`HermitianOperator` from raw coordinate terms.

    The term list must describe a Hermitian matrix (every off-diagonal
    entry accompanied by its conjugate mirror); duplicates are summed.
    """
    full = sparse.coo_matrix(
        (np.asarray(values, dtype=complex),
         (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(dimension, dimension)).tocsr()
    full.sum_duplicates()

    scale = max(1.0, np.abs(full.data).max()) if full.nnz else 1.0
    defect = abs(full - full.conj().T)
    if defect.nnz and defect.data.max() > _HERMITICITY_TOL * scale:
        raise ValueError(f"generated terms are not Hermitian: max asymmetry "
                         f"{defect.data.max():.3e}")
    diag_imag = np.abs(full.diagonal().imag)
    if diag_imag.size and diag_imag.max() > _DIAG_IMAG_TOL * scale:
        raise ValueError(f"diagonal is not real: max imaginary part "
                         f"{diag_imag.max():.3e}")

    upper = sparse.triu(full).tocoo()
    rows_u = upper.row.astype(np.int64)
    cols_u = upper.col.astype(np.int64)
    values_u = upper.data.astype(complex)
    for arr in (rows_u, cols_u, values_u):
        arr.setflags(write=False)
    return HermitianOperator(dimension=dimension, rows=rows_u, cols=cols_u,
                             values=values_u, matrix=full)


def _fermion_hop(mask: int, dst: int, src: int) -> tuple[int, int] | None:
    """Apply c+_dst c_src to one spin sector; None if it annihilates.

    Signs count occupied sites below the touched position, per the
    ascending-site operator ordering.
    """
    if not (mask >> src) & 1:
        return None
    sign = -1 if (mask & ((1 << src) - 1)).bit_count() & 1 else 1
    mask ^= 1 << src
    if (mask >> dst) & 1:
        return None
    if (mask & ((1 << dst) - 1)).bit_count() & 1:
        sign = -sign
    return mask | (1 << dst), sign


def hopping_entries(basis: FockBasis,
                    forward_amplitude: complex) -> Iterator[tuple[int, int, complex]]:
    """Coordinate terms of sum over bonds of (amp * hop_forward + h.c.).

    Works for any one-body ring bilinear: the Hamiltonian hopping uses
    amp = -t - i*omega*K, the current operator amp = i*t - omega*K.
    """
    n = basis.n_sites
    amp = complex(forward_amplitude)
    amp_back = np.conj(amp)
    if isinstance(basis.species, Bosons):
        for col, occ in enumerate(basis.states):
            for j in range(n):
                jp = (j + 1) % n
                if occ[j]:
                    shifted = list(occ)
                    shifted[j] -= 1
                    shifted[jp] += 1
                    row = basis.index_of(tuple(shifted))
                    yield row, col, amp * np.sqrt(occ[j] * (occ[jp] + 1))
                if occ[jp]:
                    shifted = list(occ)
                    shifted[jp] -= 1
                    shifted[j] += 1
                    row = basis.index_of(tuple(shifted))
                    yield row, col, amp_back * np.sqrt(occ[jp] * (occ[j] + 1))
    else:
        for col, state in enumerate(basis.states):
            for sector in (0, 1):
                mask = state[sector]
                other = state[1 - sector]
                for j in range(n):
                    jp = (j + 1) % n
                    hop = _fermion_hop(mask, jp, j)
                    if hop is not None:
                        new_mask, sign = hop
                        key = (FermionFockState(new_mask, other) if sector == 0
                               else FermionFockState(other, new_mask))
                        yield basis.index_of(key), col, amp * sign
                    hop = _fermion_hop(mask, j, jp)
                    if hop is not None:
                        new_mask, sign = hop
                        key = (FermionFockState(new_mask, other) if sector == 0
                               else FermionFockState(other, new_mask))
                        yield basis.index_of(key), col, amp_back * sign


def _check_basis(ring: RingSpec, species: SpeciesSpec, basis: FockBasis) -> None:
    if basis.n_sites != ring.n_sites:
        raise DomainError(f"basis: enumerated for {basis.n_sites} sites, "
                          f"ring has {ring.n_sites}")
    if particle_content(basis.species) != particle_content(species):
        raise DomainError(f"basis: enumerated for {basis.species!r}, "
                          f"got species {species!r}")


def interaction_diagonal(species: SpeciesSpec, basis: FockBasis) -> np.ndarray:
    """Per-state diagonal interaction energy at unit coupling."""
    diag = np.zeros(basis.dimension)
    if isinstance(species, Bosons):
        for k, occ in enumerate(basis.states):
            diag[k] = sum(m * (m - 1) for m in occ)
    elif isinstance(species, Fermions):
        for k, state in enumerate(basis.states):
            diag[k] = (state.up_mask & state.down_mask).bit_count()
    return diag


def build_boson(ring: RingSpec, species: Bosons, basis: FockBasis,
                twist: float = 0.0) -> HermitianOperator:
    """Boson ring Hamiltonian: complex hopping plus u * n * (n - 1)."""
    if not isinstance(species, Bosons):
        raise DomainError(f"species: build_boson needs Bosons, got "
                          f"{type(species).__name__}")
    _check_basis(ring, species, basis)
    return _build(ring, species, basis, twist)


def build_fermion(ring: RingSpec, species: Fermions, basis: FockBasis,
                  twist: float = 0.0) -> HermitianOperator:
    """Fermion ring Hamiltonian: spin-conserving hopping plus u per
    doubly occupied site."""
    if not isinstance(species, Fermions):
        raise DomainError(f"species: build_fermion needs Fermions, got "
                          f"{type(species).__name__}")
    _check_basis(ring, species, basis)
    return _build(ring, species, basis, twist)


def build_operator(ring: RingSpec, species: SpeciesSpec, basis: FockBasis,
                   twist: float = 0.0) -> HermitianOperator:
    """Hamiltonian for any species; polarized fermions hop with no
    interaction."""
    if isinstance(species, Bosons):
        return build_boson(ring, species, basis, twist)
    if isinstance(species, Fermions):
        return build_fermion(ring, species, basis, twist)
    _check_basis(ring, species, basis)
    return _build(ring, species, basis, twist)


def _build(ring: RingSpec, species: SpeciesSpec, basis: FockBasis,
           twist: float) -> HermitianOperator:
    amp = (-ring.t - 1j * ring.omega * ring.k_factor) * np.exp(1j * twist)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[complex] = []
    for r, c, v in hopping_entries(basis, amp):
        rows.append(r)
        cols.append(c)
        vals.append(v)
    u = getattr(species, "u", 0.0)
    if u:
        diag = interaction_diagonal(species, basis)
        for k in np.flatnonzero(diag):
            rows.append(int(k))
            cols.append(int(k))
            vals.append(u * diag[k])
    return operator_from_entries(basis.dimension, rows, cols, vals)
